#pragma once

#include <span>
#include <vector>

#include "noma/codebook.hpp"

namespace noma {

// Bipartite user/RE adjacency. F(l) lists the users with a nonzero codeword
// entry on RE l; V(k) is its transpose. Immutable after construction.
struct FactorGraph {
  int num_users = 0;                        // K
  int num_res = 0;                          // L
  std::vector<std::vector<int>> user_res;   // V(k), ascending RE indices
  std::vector<std::vector<int>> res_users;  // F(l), ascending user indices
  int df_max = 0;                           // max_l |F(l)|
};

// Adjacency from codeword support. Throws if any user has empty support.
FactorGraph build_factor_graph(std::span<const Codebook> codebooks);

// Exhaustive double-scan bipartite consistency check (k in F(l) <=> l in V(k),
// indices in range, df_max correct).
bool factor_graph_consistent(const FactorGraph& g);

}  // namespace noma
