#pragma once

#include <string>
#include <vector>

#include "noma/channel.hpp"
#include "noma/codebook.hpp"
#include "noma/factor_graph.hpp"
#include "noma/fec.hpp"
#include "noma/receiver.hpp"
#include "noma/types.hpp"

namespace noma {

enum class Scheme { Fds, Sparse, CbOfdma };

struct ScenarioConfig {
  Scheme scheme = Scheme::Fds;
  int num_users = 6;        // K
  int num_res = 4;          // L
  int mod_order = 4;        // M
  int num_antennas = 2;     // Nr
  int payload_bytes = 12;
  double code_rate = 0.5;
  std::vector<double> snr_db{6.0};
  int trials = 100;
  std::uint64_t seed = 1;
  int t_outer = 3;
  int t_inner = 3;
  DetectorKind receiver = DetectorKind::Epa;
  ChannelModel channel = ChannelModel::BlockRayleigh;
  bool hard_pic = true;
  double damping = 1.0;
};

// Flat key=value text with '#' comments; unknown keys are errors.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
void validate_config(const ScenarioConfig& cfg);  // throws on inconsistency
std::string config_to_text(const ScenarioConfig& cfg);

// Immutable per-scenario objects shared by all trials.
struct Scenario {
  std::vector<Codebook> codebooks;
  FactorGraph graph;
  std::vector<CodeConfig> code_cfgs;
  int info_bits = 0;  // per user, before CRC
};

Scenario build_scenario(const ScenarioConfig& cfg);

// One transmission of all K users at the given noise level. Returns per-user
// error flags (CRC failure or payload mismatch). Fully determined by
// (cfg.seed, trial_index, snr_db).
std::vector<std::uint8_t> run_trial(const ScenarioConfig& cfg, const Scenario& sc, double snr_db,
                                    std::uint64_t trial_index);

struct BlerRecord {
  std::string scheme;
  std::string receiver;
  int num_users = 0;
  int num_res = 0;
  int mod_order = 0;
  int num_antennas = 0;
  int payload_bytes = 0;
  double snr_db = 0.0;
  int trials = 0;
  long long block_errors = 0;
  double bler = 0.0;
  double ci_lo = 0.0;  // Wilson 95% bounds
  double ci_hi = 0.0;
};

// Wilson score interval for a binomial proportion at 95% confidence.
std::pair<double, double> wilson_interval(long long errors, long long total);

// Full grid; trials of each SNR point run in `threads` chunks. Aggregation is
// integer, so the records (and the CSV) do not depend on the thread count.
std::vector<BlerRecord> sweep(const ScenarioConfig& cfg, int threads = 1);

std::string records_to_csv(const std::vector<BlerRecord>& records);

std::string scheme_name(Scheme s);
std::string receiver_name(DetectorKind d);

double snr_db_to_noise_var(double snr_db);

}  // namespace noma
