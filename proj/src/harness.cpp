#include "noma/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "noma/rng.hpp"

namespace noma {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::string tmp = s;
  std::replace(tmp.begin(), tmp.end(), ',', ' ');
  std::istringstream is(tmp);
  std::vector<double> out;
  double v = 0.0;
  while (is >> v) out.push_back(v);
  if (out.empty()) throw std::invalid_argument("expected a list of numbers, got '" + s + "'");
  return out;
}

long long binom(int n, int k) {
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Fds: return "fds";
    case Scheme::Sparse: return "sparse";
    case Scheme::CbOfdma: return "cb-ofdma";
  }
  return "?";
}

std::string receiver_name(DetectorKind d) {
  switch (d) {
    case DetectorKind::Epa: return "epa";
    case DetectorKind::MmsePic: return "mmse-pic";
    case DetectorKind::ExactMap: return "map";
  }
  return "?";
}

double snr_db_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "scheme") {
      if (val == "fds") cfg.scheme = Scheme::Fds;
      else if (val == "sparse") cfg.scheme = Scheme::Sparse;
      else if (val == "cb-ofdma") cfg.scheme = Scheme::CbOfdma;
      else throw std::invalid_argument("config: unknown scheme '" + val + "'");
    } else if (key == "K") {
      cfg.num_users = std::stoi(val);
    } else if (key == "L") {
      cfg.num_res = std::stoi(val);
    } else if (key == "M") {
      cfg.mod_order = std::stoi(val);
    } else if (key == "Nr") {
      cfg.num_antennas = std::stoi(val);
    } else if (key == "payload_bytes") {
      cfg.payload_bytes = std::stoi(val);
    } else if (key == "code_rate") {
      cfg.code_rate = std::stod(val);
    } else if (key == "snr_db") {
      cfg.snr_db = parse_double_list(val);
    } else if (key == "trials") {
      cfg.trials = std::stoi(val);
    } else if (key == "seed") {
      cfg.seed = std::stoull(val);
    } else if (key == "T_outer") {
      cfg.t_outer = std::stoi(val);
    } else if (key == "T_inner") {
      cfg.t_inner = std::stoi(val);
    } else if (key == "receiver") {
      if (val == "epa") cfg.receiver = DetectorKind::Epa;
      else if (val == "mmse-pic") cfg.receiver = DetectorKind::MmsePic;
      else if (val == "map") cfg.receiver = DetectorKind::ExactMap;
      else throw std::invalid_argument("config: unknown receiver '" + val + "'");
    } else if (key == "channel") {
      if (val == "awgn-fixed") cfg.channel = ChannelModel::AwgnFixed;
      else if (val == "block-rayleigh") cfg.channel = ChannelModel::BlockRayleigh;
      else throw std::invalid_argument("config: unknown channel '" + val + "'");
    } else if (key == "hard_pic") {
      if (val == "on") cfg.hard_pic = true;
      else if (val == "off") cfg.hard_pic = false;
      else throw std::invalid_argument("config: hard_pic must be on|off, got '" + val + "'");
    } else if (key == "damping") {
      cfg.damping = std::stod(val);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.num_users <= 0 || cfg.num_res <= 0 || cfg.num_antennas <= 0 || cfg.payload_bytes <= 0 ||
      cfg.trials <= 0 || cfg.t_outer <= 0 || cfg.t_inner <= 0) {
    throw std::invalid_argument("config: all dimensions and counts must be positive");
  }
  if (cfg.mod_order != 2 && cfg.mod_order != 4 && cfg.mod_order != 16) {
    throw std::invalid_argument("config: M must be 2, 4 or 16");
  }
  if (cfg.scheme == Scheme::CbOfdma && cfg.num_res != 1) {
    throw std::invalid_argument("config: cb-ofdma requires L = 1");
  }
  if (cfg.scheme == Scheme::Fds && cfg.num_res != 4) {
    throw std::invalid_argument("config: built-in fds signatures have length 4");
  }
  if (cfg.scheme == Scheme::Fds && cfg.num_users > 8) {
    throw std::invalid_argument("config: built-in fds signature table covers at most 8 users");
  }
  if (cfg.scheme == Scheme::Sparse) {
    const long long masks = binom(cfg.num_res, std::max(1, cfg.num_res / 2));
    if (cfg.num_users > masks) {
      throw std::invalid_argument("config: sparse scheme supports at most " + std::to_string(masks) +
                                  " users at L = " + std::to_string(cfg.num_res));
    }
  }
  if (!(cfg.code_rate > 0.0 && cfg.code_rate <= 1.0)) {
    throw std::invalid_argument("config: code_rate must be in (0, 1]");
  }
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
    throw std::invalid_argument("config: damping must be in (0, 1]");
  }
  if (cfg.snr_db.empty()) throw std::invalid_argument("config: snr_db list is empty");
  CodeConfig cc;
  cc.payload_bits = cfg.payload_bytes * 8 + 16;
  cc.rate = cfg.code_rate;
  const int coded = cc.coded_bits();  // throws if not integral
  int bits = 0;
  while ((1 << bits) < cfg.mod_order) ++bits;
  if (coded % bits != 0) {
    throw std::invalid_argument("config: coded length " + std::to_string(coded) +
                                " is not a multiple of bits per symbol");
  }
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  validate_config(cfg);
  Scenario sc;
  const Constellation c = build_qam(cfg.mod_order);
  for (int k = 0; k < cfg.num_users; ++k) {
    switch (cfg.scheme) {
      case Scheme::Fds:
        sc.codebooks.push_back(build_spread_codebook(c, fds_signature(k), k));
        break;
      case Scheme::Sparse:
        sc.codebooks.push_back(build_sparse_codebook(c, cfg.num_res, sparse_mask(k, cfg.num_res),
                                                     sparse_values(k, cfg.num_res), k));
        break;
      case Scheme::CbOfdma: {
        const std::vector<Complex> seq{Complex{1.0, 0.0}};
        sc.codebooks.push_back(build_spread_codebook(c, seq, k));
        break;
      }
    }
  }
  sc.graph = build_factor_graph(sc.codebooks);
  sc.info_bits = cfg.payload_bytes * 8;
  for (int k = 0; k < cfg.num_users; ++k) {
    CodeConfig cc;
    cc.payload_bits = sc.info_bits + 16;
    cc.rate = cfg.code_rate;
    cc.interleaver_seed = mix64(cfg.seed ^ (0xA5A5A5A5ULL + static_cast<std::uint64_t>(k)));
    sc.code_cfgs.push_back(cc);
  }
  return sc;
}

std::vector<std::uint8_t> run_trial(const ScenarioConfig& cfg, const Scenario& sc, double snr_db,
                                    std::uint64_t trial_index) {
  const double noise_var = snr_db_to_noise_var(snr_db);
  RngStream payload_rng(cfg.seed, trial_index, StreamPurpose::Payload);
  RngStream channel_rng(cfg.seed, trial_index, StreamPurpose::Channel);
  RngStream noise_rng(cfg.seed, trial_index, StreamPurpose::Noise);

  const int K = cfg.num_users;
  std::vector<BitVector> info(static_cast<std::size_t>(K));
  std::vector<std::vector<std::vector<Complex>>> blocks(static_cast<std::size_t>(K));
  std::size_t groups = 0;
  for (int k = 0; k < K; ++k) {
    auto& bits = info[static_cast<std::size_t>(k)];
    bits.resize(static_cast<std::size_t>(sc.info_bits));
    for (auto& b : bits) b = static_cast<std::uint8_t>(payload_rng.next_bit());
    const BitVector with_crc = crc16_attach(bits);
    const BitVector coded = conv_encode(with_crc, sc.code_cfgs[static_cast<std::size_t>(k)]);
    const BitVector tx_bits =
        interleave_bits(coded, sc.code_cfgs[static_cast<std::size_t>(k)].interleaver_seed);
    blocks[static_cast<std::size_t>(k)] = map_block(tx_bits, sc.codebooks[static_cast<std::size_t>(k)]);
    groups = blocks[static_cast<std::size_t>(k)].size();
  }

  const ChannelRealization ch =
      draw_channel(channel_rng, K, cfg.num_res, cfg.num_antennas, cfg.channel, noise_var);

  std::vector<ReceivedSignal> y(groups);
  std::vector<std::vector<Complex>> x(static_cast<std::size_t>(K));
  for (std::size_t g = 0; g < groups; ++g) {
    for (int k = 0; k < K; ++k) x[static_cast<std::size_t>(k)] = blocks[static_cast<std::size_t>(k)][g];
    y[g] = transmit(x, ch, noise_rng);
  }

  ReceiverConfig rx;
  rx.detector = cfg.receiver;
  rx.t_outer = cfg.t_outer;
  rx.t_inner = cfg.t_inner;
  rx.hard_pic = cfg.hard_pic;
  rx.damping = cfg.damping;
  const auto results = turbo_receive(y, ch, sc.graph, sc.codebooks, sc.code_cfgs, rx);

  std::vector<std::uint8_t> errors(static_cast<std::size_t>(K), 0);
  for (int k = 0; k < K; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    errors[static_cast<std::size_t>(k)] =
        static_cast<std::uint8_t>(!(r.crc_ok && r.payload == info[static_cast<std::size_t>(k)]));
  }
  return errors;
}

std::pair<double, double> wilson_interval(long long errors, long long total) {
  if (total <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5th percentile of N(0,1)
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<BlerRecord> sweep(const ScenarioConfig& cfg, int threads) {
  validate_config(cfg);
  const Scenario sc = build_scenario(cfg);
  threads = std::max(1, threads);

  std::vector<BlerRecord> records;
  for (double snr : cfg.snr_db) {
    std::vector<long long> partial(static_cast<std::size_t>(threads), 0);
    auto worker = [&](int tid) {
      long long local = 0;
      for (std::uint64_t t = static_cast<std::uint64_t>(tid); t < static_cast<std::uint64_t>(cfg.trials);
           t += static_cast<std::uint64_t>(threads)) {
        const auto errs = run_trial(cfg, sc, snr, t);
        for (std::uint8_t e : errs) local += e;
      }
      partial[static_cast<std::size_t>(tid)] = local;
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
      for (auto& th : pool) th.join();
    }
    long long block_errors = 0;
    for (long long p : partial) block_errors += p;

    BlerRecord rec;
    rec.scheme = scheme_name(cfg.scheme);
    rec.receiver = receiver_name(cfg.receiver);
    rec.num_users = cfg.num_users;
    rec.num_res = cfg.num_res;
    rec.mod_order = cfg.mod_order;
    rec.num_antennas = cfg.num_antennas;
    rec.payload_bytes = cfg.payload_bytes;
    rec.snr_db = snr;
    rec.trials = cfg.trials;
    rec.block_errors = block_errors;
    const long long total = static_cast<long long>(cfg.trials) * cfg.num_users;
    rec.bler = static_cast<double>(block_errors) / static_cast<double>(total);
    std::tie(rec.ci_lo, rec.ci_hi) = wilson_interval(block_errors, total);
    records.push_back(rec);
  }
  std::sort(records.begin(), records.end(), [](const BlerRecord& a, const BlerRecord& b) {
    if (a.receiver != b.receiver) return a.receiver < b.receiver;
    return a.snr_db < b.snr_db;
  });
  return records;
}

std::string records_to_csv(const std::vector<BlerRecord>& records) {
  std::ostringstream os;
  os << "scheme,receiver,K,L,M,Nr,payload_bytes,snr_db,trials,block_errors,bler,ci_lo,ci_hi\n";
  for (const auto& r : records) {
    os << r.scheme << ',' << r.receiver << ',' << r.num_users << ',' << r.num_res << ','
       << r.mod_order << ',' << r.num_antennas << ',' << r.payload_bytes << ','
       << format_sig6(r.snr_db) << ',' << r.trials << ',' << r.block_errors << ','
       << format_sig6(r.bler) << ',' << format_sig6(r.ci_lo) << ',' << format_sig6(r.ci_hi) << '\n';
  }
  return os.str();
}

std::string config_to_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "scheme = " << scheme_name(cfg.scheme) << '\n';
  os << "K = " << cfg.num_users << '\n';
  os << "L = " << cfg.num_res << '\n';
  os << "M = " << cfg.mod_order << '\n';
  os << "Nr = " << cfg.num_antennas << '\n';
  os << "payload_bytes = " << cfg.payload_bytes << '\n';
  os << "code_rate = " << format_sig6(cfg.code_rate) << '\n';
  os << "snr_db =";
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) os << (i ? "," : " ") << format_sig6(cfg.snr_db[i]);
  os << '\n';
  os << "trials = " << cfg.trials << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "T_outer = " << cfg.t_outer << '\n';
  os << "T_inner = " << cfg.t_inner << '\n';
  os << "receiver = " << receiver_name(cfg.receiver) << '\n';
  os << "channel = " << (cfg.channel == ChannelModel::AwgnFixed ? "awgn-fixed" : "block-rayleigh") << '\n';
  os << "hard_pic = " << (cfg.hard_pic ? "on" : "off") << '\n';
  os << "damping = " << format_sig6(cfg.damping) << '\n';
  return os.str();
}

}  // namespace noma
