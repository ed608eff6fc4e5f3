#include "noma/factor_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace noma {

FactorGraph build_factor_graph(std::span<const Codebook> codebooks) {
  FactorGraph g;
  g.num_users = static_cast<int>(codebooks.size());
  for (const Codebook& cb : codebooks) g.num_res = std::max(g.num_res, cb.num_res);

  g.user_res.resize(codebooks.size());
  g.res_users.resize(static_cast<std::size_t>(g.num_res));
  for (std::size_t k = 0; k < codebooks.size(); ++k) {
    const Codebook& cb = codebooks[k];
    std::vector<int> sup;
    for (int l = 0; l < cb.num_res; ++l) {
      bool nonzero = false;
      for (const auto& cw : cb.codewords) {
        if (std::norm(cw[static_cast<std::size_t>(l)]) > 0.0) {
          nonzero = true;
          break;
        }
      }
      if (nonzero) sup.push_back(l);
    }
    if (sup.empty()) {
      throw std::invalid_argument("build_factor_graph: user " + std::to_string(cb.user_id) +
                                  " has no RE with a nonzero codeword entry");
    }
    for (int l : sup) g.res_users[static_cast<std::size_t>(l)].push_back(static_cast<int>(k));
    g.user_res[k] = std::move(sup);
  }
  for (const auto& f : g.res_users) g.df_max = std::max(g.df_max, static_cast<int>(f.size()));
  return g;
}

bool factor_graph_consistent(const FactorGraph& g) {
  if (static_cast<int>(g.user_res.size()) != g.num_users) return false;
  if (static_cast<int>(g.res_users.size()) != g.num_res) return false;
  for (int k = 0; k < g.num_users; ++k) {
    const auto& v = g.user_res[static_cast<std::size_t>(k)];
    if (v.empty()) return false;
    for (int l : v) {
      if (l < 0 || l >= g.num_res) return false;
      const auto& f = g.res_users[static_cast<std::size_t>(l)];
      if (std::find(f.begin(), f.end(), k) == f.end()) return false;
    }
  }
  int df = 0;
  for (int l = 0; l < g.num_res; ++l) {
    const auto& f = g.res_users[static_cast<std::size_t>(l)];
    df = std::max(df, static_cast<int>(f.size()));
    for (int k : f) {
      if (k < 0 || k >= g.num_users) return false;
      const auto& v = g.user_res[static_cast<std::size_t>(k)];
      if (std::find(v.begin(), v.end(), l) == v.end()) return false;
    }
  }
  return df == g.df_max;
}

}  // namespace noma
