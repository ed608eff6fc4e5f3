#include "noma/detector_epa.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "noma/linalg.hpp"

namespace noma {

namespace {

// Shared core of the chip MMSE step; writes posterior moments for each of
// the df columns. Buffers are caller-provided so the detector loop does not
// allocate.
void fn_mmse_core(std::span<const Complex> y, std::span<const Complex> H, int nr, int df,
                  double noise_var, std::span<const double> pri_var,
                  std::span<const Complex> pri_mean, std::vector<Complex>& gram,
                  std::vector<Complex>& resid, std::vector<Complex>& col,
                  std::span<Complex> post_mean, std::span<double> post_var) {
  const auto n = static_cast<std::size_t>(nr);
  // G = sigma^2 I + sum_c var_c h_c h_c^H (lower triangle), factored in place;
  // rebuilt with diagonal jitter if the factorization fails (sigma^2 == 0 with
  // a rank-deficient Gram is the only way in).
  const auto build_gram = [&](double jitter) {
    gram.assign(n * n, Complex{0.0, 0.0});
    for (int c = 0; c < df; ++c) {
      const Complex* h = &H[static_cast<std::size_t>(c) * n];
      const double v = pri_var[static_cast<std::size_t>(c)];
      for (int r1 = 0; r1 < nr; ++r1) {
        for (int r2 = 0; r2 <= r1; ++r2) {
          gram[static_cast<std::size_t>(r1) * n + static_cast<std::size_t>(r2)] +=
              v * h[r1] * std::conj(h[r2]);
        }
      }
    }
    for (int r = 0; r < nr; ++r) {
      gram[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(r)] += noise_var + jitter;
    }
  };
  build_gram(0.0);
  if (!linalg::cholesky(gram, nr)) {
    build_gram(1e-12);
    if (!linalg::cholesky(gram, nr)) {
      throw std::runtime_error("fn_mmse_update: channel Gram matrix is not positive definite");
    }
  }
  std::vector<Complex>& chol = gram;

  // residual = y - H m_pri, then z = G^{-1} residual
  resid.assign(n, Complex{0.0, 0.0});
  for (int r = 0; r < nr; ++r) resid[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)];
  for (int c = 0; c < df; ++c) {
    const Complex* h = &H[static_cast<std::size_t>(c) * n];
    const Complex m = pri_mean[static_cast<std::size_t>(c)];
    for (int r = 0; r < nr; ++r) resid[static_cast<std::size_t>(r)] -= h[r] * m;
  }
  linalg::cholesky_solve(chol, nr, resid);

  for (int c = 0; c < df; ++c) {
    const Complex* h = &H[static_cast<std::size_t>(c) * n];
    const double v = pri_var[static_cast<std::size_t>(c)];
    Complex corr{0.0, 0.0};
    for (int r = 0; r < nr; ++r) corr += std::conj(h[r]) * resid[static_cast<std::size_t>(r)];
    post_mean[static_cast<std::size_t>(c)] = pri_mean[static_cast<std::size_t>(c)] + v * corr;

    col.assign(n, Complex{0.0, 0.0});
    for (int r = 0; r < nr; ++r) col[static_cast<std::size_t>(r)] = h[r];
    linalg::cholesky_solve(chol, nr, col);
    double q = 0.0;
    for (int r = 0; r < nr; ++r) q += (std::conj(h[r]) * col[static_cast<std::size_t>(r)]).real();
    // MMSE never increases variance; clamp fp excursions into [floor, prior].
    post_var[static_cast<std::size_t>(c)] = std::clamp(v - v * v * q, kVarFloor, v);
  }
}

}  // namespace

PriorTable prior_from_llrs(std::span<const LlrVector> llrs, std::span<const Codebook> cbs) {
  PriorTable table(cbs.size());
  for (std::size_t k = 0; k < cbs.size(); ++k) {
    const Codebook& cb = cbs[k];
    const int order = cb.order();
    const int bits = cb.bits_per_symbol();
    auto& row = table[k];
    row.assign(static_cast<std::size_t>(order), 1.0 / order);
    const bool absent = llrs.empty() || llrs[k].empty();
    if (absent) continue;
    if (static_cast<int>(llrs[k].size()) != bits) {
      throw std::invalid_argument("prior_from_llrs: expected " + std::to_string(bits) +
                                  " LLRs for user " + std::to_string(cb.user_id));
    }
    // p(bit=0) = sigmoid(llr); label bits are MSB-first.
    double p0[16];
    for (int j = 0; j < bits; ++j) {
      const double l = std::clamp(llrs[k][static_cast<std::size_t>(j)], -kLlrMax, kLlrMax);
      p0[j] = 1.0 / (1.0 + std::exp(-l));
    }
    double total = 0.0;
    for (int label = 0; label < order; ++label) {
      double p = 1.0;
      for (int j = 0; j < bits; ++j) {
        const int b = (label >> (bits - 1 - j)) & 1;
        p *= b ? (1.0 - p0[j]) : p0[j];
      }
      row[static_cast<std::size_t>(label)] = p;
      total += p;
    }
    for (auto& p : row) p /= total;
  }
  return table;
}

SymbolPosterior vn_posterior(const std::vector<double>& prior, const Codebook& cb,
                             std::span<const GaussianMessage> messages) {
  const int order = cb.order();
  std::vector<double> logw(static_cast<std::size_t>(order));
  for (int m = 0; m < order; ++m) {
    logw[static_cast<std::size_t>(m)] = std::log(prior[static_cast<std::size_t>(m)]);
  }
  for (std::size_t j = 0; j < cb.support.size(); ++j) {
    const GaussianMessage& msg = messages[j];
    if (!(msg.precision > 0.0)) continue;  // non-informative contributes nothing
    const int l = cb.support[j];
    for (int m = 0; m < order; ++m) {
      logw[static_cast<std::size_t>(m)] -=
          msg.precision * std::norm(cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)] -
                                    msg.mean);
    }
  }
  const double peak = *std::max_element(logw.begin(), logw.end());
  assert(std::isfinite(peak));
  SymbolPosterior post(static_cast<std::size_t>(order));
  double total = 0.0;
  for (int m = 0; m < order; ++m) {
    post[static_cast<std::size_t>(m)] = std::exp(logw[static_cast<std::size_t>(m)] - peak);
    total += post[static_cast<std::size_t>(m)];
  }
  for (auto& p : post) p /= total;
  return post;
}

GaussianMessage vn_project(const SymbolPosterior& posterior, const Codebook& cb, int l) {
  Complex mean{0.0, 0.0};
  for (std::size_t m = 0; m < posterior.size(); ++m) {
    mean += posterior[m] * cb.codewords[m][static_cast<std::size_t>(l)];
  }
  double var = 0.0;
  for (std::size_t m = 0; m < posterior.size(); ++m) {
    var += posterior[m] * std::norm(cb.codewords[m][static_cast<std::size_t>(l)] - mean);
  }
  return GaussianMessage::from_moments(mean, std::max(var, kVarFloor));
}

std::vector<GaussianMessage> fn_mmse_update(std::span<const GaussianMessage> priors,
                                            std::span<const Complex> y, std::span<const Complex> H,
                                            int num_antennas, double noise_var) {
  const int df = static_cast<int>(priors.size());
  std::vector<double> pri_var(priors.size());
  std::vector<Complex> pri_mean(priors.size());
  for (std::size_t c = 0; c < priors.size(); ++c) {
    pri_var[c] = priors[c].precision > 0.0 ? 1.0 / priors[c].precision : kVarCap;
    pri_mean[c] = priors[c].mean;
  }
  std::vector<Complex> gram, resid, col;
  std::vector<Complex> post_mean(priors.size());
  std::vector<double> post_var(priors.size());
  fn_mmse_core(y, H, num_antennas, df, noise_var, pri_var, pri_mean, gram, resid, col, post_mean,
               post_var);
  std::vector<GaussianMessage> out(priors.size());
  for (std::size_t c = 0; c < priors.size(); ++c) {
    out[c] = GaussianMessage::from_moments(post_mean[c], post_var[c]);
  }
  return out;
}

LlrVector extrinsic_llrs(const SymbolPosterior& posterior, const LlrVector& prior_llrs,
                         const Codebook& cb) {
  const int bits = cb.bits_per_symbol();
  LlrVector out(static_cast<std::size_t>(bits));
  for (int j = 0; j < bits; ++j) {
    double mass0 = 0.0, mass1 = 0.0;
    for (std::size_t label = 0; label < posterior.size(); ++label) {
      const int b = (static_cast<int>(label) >> (bits - 1 - j)) & 1;
      (b ? mass1 : mass0) += posterior[label];
    }
    const double post_ratio = std::log(mass0) - std::log(mass1);
    const double prior = j < static_cast<int>(prior_llrs.size()) ? prior_llrs[static_cast<std::size_t>(j)] : 0.0;
    out[static_cast<std::size_t>(j)] = std::clamp(post_ratio - prior, -kLlrMax, kLlrMax);
  }
  return out;
}

EpaDetector::EpaDetector(const FactorGraph& graph, std::span<const Codebook> codebooks, EpaConfig cfg)
    : graph_(graph), codebooks_(codebooks.begin(), codebooks.end()), cfg_(cfg) {
  res_edge_offset_.resize(static_cast<std::size_t>(graph_.num_res) + 1, 0);
  for (int l = 0; l < graph_.num_res; ++l) {
    res_edge_offset_[static_cast<std::size_t>(l) + 1] =
        res_edge_offset_[static_cast<std::size_t>(l)] +
        static_cast<int>(graph_.res_users[static_cast<std::size_t>(l)].size());
  }
  num_edges_ = res_edge_offset_.back();

  user_edges_.resize(codebooks_.size());
  for (int l = 0; l < graph_.num_res; ++l) {
    const auto& users = graph_.res_users[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < users.size(); ++i) {
      user_edges_[static_cast<std::size_t>(users[i])].push_back(
          res_edge_offset_[static_cast<std::size_t>(l)] + static_cast<int>(i));
    }
  }

  // user_edges_[k] must align with V(k): both are ascending in l because
  // edges are laid out in RE order.
  edge_chips_.resize(static_cast<std::size_t>(num_edges_));
  for (int l = 0; l < graph_.num_res; ++l) {
    const auto& users = graph_.res_users[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < users.size(); ++i) {
      const Codebook& cb = codebooks_[static_cast<std::size_t>(users[i])];
      auto& chips = edge_chips_[static_cast<std::size_t>(res_edge_offset_[static_cast<std::size_t>(l)]) + i];
      chips.resize(static_cast<std::size_t>(cb.order()));
      for (int m = 0; m < cb.order(); ++m) {
        chips[static_cast<std::size_t>(m)] = cb.codewords[static_cast<std::size_t>(m)][static_cast<std::size_t>(l)];
      }
    }
  }

  for (const Codebook& cb : codebooks_) max_order_ = std::max(max_order_, cb.order());
  fn_to_vn_.resize(static_cast<std::size_t>(num_edges_));
  vn_to_fn_.resize(static_cast<std::size_t>(num_edges_));
  logw_.resize(static_cast<std::size_t>(max_order_));
}

void EpaDetector::compute_posterior(int k, const std::vector<double>& prior_row,
                                    SymbolPosterior& out) {
  const Codebook& cb = codebooks_[static_cast<std::size_t>(k)];
  const int order = cb.order();
  const auto& edges = user_edges_[static_cast<std::size_t>(k)];
  out.resize(static_cast<std::size_t>(order));
  double* logw = logw_.data();
  for (int m = 0; m < order; ++m) logw[m] = std::log(prior_row[static_cast<std::size_t>(m)]);
  for (int e : edges) {
    const GaussianMessage& msg = fn_to_vn_[static_cast<std::size_t>(e)];
    if (!(msg.precision > 0.0)) continue;
    const auto& chips = edge_chips_[static_cast<std::size_t>(e)];
    for (int m = 0; m < order; ++m) {
      logw[m] -= msg.precision * std::norm(chips[static_cast<std::size_t>(m)] - msg.mean);
    }
  }
  double peak = logw[0];
  for (int m = 1; m < order; ++m) peak = std::max(peak, logw[m]);
  double total = 0.0;
  for (int m = 0; m < order; ++m) {
    out[static_cast<std::size_t>(m)] = std::exp(logw[m] - peak);
    total += out[static_cast<std::size_t>(m)];
  }
  for (auto& p : out) p /= total;
}

void EpaDetector::run_group(const ReceivedSignal& y, const ChannelRealization& ch,
                            const PriorTable& priors, std::span<const LlrVector> prior_llrs,
                            GroupDetectResult& out) {
  const int num_users = graph_.num_users;
  const int num_res = graph_.num_res;
  const int nr = ch.num_antennas();

  std::fill(fn_to_vn_.begin(), fn_to_vn_.end(), GaussianMessage::non_informative());

  SymbolPosterior posterior;
  std::vector<double> pri_var(static_cast<std::size_t>(graph_.df_max));
  std::vector<Complex> pri_mean(static_cast<std::size_t>(graph_.df_max));
  std::vector<Complex> post_mean(static_cast<std::size_t>(graph_.df_max));
  std::vector<double> post_var(static_cast<std::size_t>(graph_.df_max));

  for (int t = 0; t < cfg_.t_inner; ++t) {
    // VN update: discrete posterior, chip projection, extrinsic divide.
    for (int k = 0; k < num_users; ++k) {
      compute_posterior(k, priors[static_cast<std::size_t>(k)], posterior);
      const Codebook& cb = codebooks_[static_cast<std::size_t>(k)];
      const auto& edges = user_edges_[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < edges.size(); ++j) {
        const auto e = static_cast<std::size_t>(edges[j]);
        const auto& chips = edge_chips_[e];
        Complex mean{0.0, 0.0};
        for (int m = 0; m < cb.order(); ++m) mean += posterior[static_cast<std::size_t>(m)] * chips[static_cast<std::size_t>(m)];
        double var = 0.0;
        for (int m = 0; m < cb.order(); ++m) {
          var += posterior[static_cast<std::size_t>(m)] * std::norm(chips[static_cast<std::size_t>(m)] - mean);
        }
        const GaussianMessage proj = GaussianMessage::from_moments(mean, std::max(var, kVarFloor));
        vn_to_fn_[e] = gaussian_divide(proj, fn_to_vn_[e]);
      }
    }

    // FN update: chip-by-chip MMSE and extrinsic divide back to the users.
    for (int l = 0; l < num_res; ++l) {
      const auto& users = graph_.res_users[static_cast<std::size_t>(l)];
      const int df = static_cast<int>(users.size());
      const int base = res_edge_offset_[static_cast<std::size_t>(l)];
      ws_h_.resize(static_cast<std::size_t>(nr) * static_cast<std::size_t>(df));
      for (int c = 0; c < df; ++c) {
        const auto& hk = ch.h[static_cast<std::size_t>(users[static_cast<std::size_t>(c)])];
        for (int r = 0; r < nr; ++r) {
          ws_h_[static_cast<std::size_t>(c * nr + r)] = hk[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)];
        }
      }
      ws_y_.resize(static_cast<std::size_t>(nr));
      for (int r = 0; r < nr; ++r) ws_y_[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)][static_cast<std::size_t>(l)];

      for (int c = 0; c < df; ++c) {
        const GaussianMessage& msg = vn_to_fn_[static_cast<std::size_t>(base + c)];
        pri_var[static_cast<std::size_t>(c)] = msg.precision > 0.0 ? 1.0 / msg.precision : kVarCap;
        pri_mean[static_cast<std::size_t>(c)] = msg.mean;
      }
      fn_mmse_core(ws_y_, ws_h_, nr, df, ch.noise_var, pri_var, pri_mean, ws_gram_, ws_resid_,
                   ws_col_, post_mean, post_var);
      for (int c = 0; c < df; ++c) {
        const auto e = static_cast<std::size_t>(base + c);
        const GaussianMessage post =
            GaussianMessage::from_moments(post_mean[static_cast<std::size_t>(c)], post_var[static_cast<std::size_t>(c)]);
        GaussianMessage msg = gaussian_divide(post, vn_to_fn_[e]);
        if (cfg_.damping < 1.0) {
          const GaussianMessage& old = fn_to_vn_[e];
          const double d = cfg_.damping;
          const double prec = d * msg.precision + (1.0 - d) * old.precision;
          const Complex eta = d * msg.mean * msg.precision + (1.0 - d) * old.mean * old.precision;
          msg.precision = prec;
          msg.mean = prec > 0.0 ? eta / prec : Complex{0.0, 0.0};
        }
        fn_to_vn_[e] = msg;
      }
    }
  }

  // Final posterior update and extrinsic bit LLRs.
  out.posteriors.resize(static_cast<std::size_t>(num_users));
  out.extrinsic.resize(static_cast<std::size_t>(num_users));
  static const LlrVector kNoPrior;
  for (int k = 0; k < num_users; ++k) {
    compute_posterior(k, priors[static_cast<std::size_t>(k)], out.posteriors[static_cast<std::size_t>(k)]);
    const LlrVector& lam0 = prior_llrs.empty() ? kNoPrior : prior_llrs[static_cast<std::size_t>(k)];
    out.extrinsic[static_cast<std::size_t>(k)] =
        extrinsic_llrs(out.posteriors[static_cast<std::size_t>(k)], lam0, codebooks_[static_cast<std::size_t>(k)]);
  }
}

GroupDetectResult EpaDetector::detect_group(const ReceivedSignal& y, const ChannelRealization& ch,
                                            const PriorTable& priors,
                                            std::span<const LlrVector> prior_llrs) {
  GroupDetectResult out;
  run_group(y, ch, priors, prior_llrs, out);
  return out;
}

BlockDetectResult EpaDetector::detect_block(std::span<const ReceivedSignal> y,
                                            const ChannelRealization& ch,
                                            std::span<const LlrVector> prior_llrs) {
  const int num_users = graph_.num_users;
  BlockDetectResult out;
  out.extrinsic.resize(static_cast<std::size_t>(num_users));
  std::vector<LlrVector> group_llrs(static_cast<std::size_t>(num_users));
  GroupDetectResult group_out;
  for (std::size_t g = 0; g < y.size(); ++g) {
    for (int k = 0; k < num_users; ++k) {
      const int bits = codebooks_[static_cast<std::size_t>(k)].bits_per_symbol();
      auto& lam = group_llrs[static_cast<std::size_t>(k)];
      lam.assign(static_cast<std::size_t>(bits), 0.0);
      if (!prior_llrs.empty() && !prior_llrs[static_cast<std::size_t>(k)].empty()) {
        for (int j = 0; j < bits; ++j) {
          lam[static_cast<std::size_t>(j)] = prior_llrs[static_cast<std::size_t>(k)][g * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)];
        }
      }
    }
    const PriorTable priors = prior_from_llrs(group_llrs, codebooks_);
    run_group(y[g], ch, priors, group_llrs, group_out);
    for (int k = 0; k < num_users; ++k) {
      auto& dst = out.extrinsic[static_cast<std::size_t>(k)];
      const auto& src = group_out.extrinsic[static_cast<std::size_t>(k)];
      dst.insert(dst.end(), src.begin(), src.end());
    }
  }
  return out;
}

}  // namespace noma
