/*
   Copyright 2026 The sparsecert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sparsecert/block_set.hpp"
#include "sparsecert/errors.hpp"
#include "sparsecert/polynomial.hpp"

namespace sparsecert {

// Ordered variable blocks I_1,...,I_r inside an ambient space of nvars
// variables. The order matters: the running intersection property is a
// statement about this order.
class SparsityPattern {
 public:
  SparsityPattern(int nvars, std::vector<BlockIndexSet> blocks)
      : nvars_(nvars), blocks_(std::move(blocks)) {
    for (const auto& b : blocks_) {
      if (b.max_index() > nvars_) {
        throw InputError("block " + b.to_string() + " exceeds ambient dimension " +
                         std::to_string(nvars_));
      }
    }
  }

  int nvars() const { return nvars_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const std::vector<BlockIndexSet>& blocks() const { return blocks_; }
  const BlockIndexSet& block(int j) const { return blocks_.at(j - 1); }

 private:
  int nvars_;
  std::vector<BlockIndexSet> blocks_;
};

// Result of a running-intersection check. When the property holds,
// witness[i] (1-based, i >= 2) is the smallest k < i with
// I_i cap (I_1 cup ... cup I_{i-1}) subseteq I_k. When it fails,
// violating_index is the first i with no such k.
struct RipReport {
  bool holds = false;
  std::vector<int> witness;
  int violating_index = 0;
};

inline RipReport check_rip(const SparsityPattern& pattern) {
  const int r = pattern.size();
  RipReport report;
  report.witness.assign(r + 1, 0);
  std::set<int> seen;
  if (r > 0) {
    seen.insert(pattern.block(1).indices().begin(), pattern.block(1).indices().end());
  }
  for (int i = 2; i <= r; ++i) {
    const BlockIndexSet& bi = pattern.block(i);
    std::vector<int> inter;
    for (int v : bi.indices()) {
      if (seen.count(v)) inter.push_back(v);
    }
    int found = 0;
    for (int k = 1; k < i; ++k) {
      if (pattern.block(k).contains_all(inter)) {
        found = k;
        break;
      }
    }
    if (found == 0) {
      report.holds = false;
      report.violating_index = i;
      return report;
    }
    report.witness[i] = found;
    seen.insert(bi.indices().begin(), bi.indices().end());
  }
  report.holds = true;
  return report;
}

namespace detail {

inline bool rip_order_valid(const std::vector<BlockIndexSet>& blocks,
                            const std::vector<int>& order) {
  std::set<int> seen;
  for (size_t t = 0; t < order.size(); ++t) {
    const BlockIndexSet& b = blocks[order[t] - 1];
    if (t > 0) {
      std::vector<int> inter;
      for (int v : b.indices()) {
        if (seen.count(v)) inter.push_back(v);
      }
      bool ok = false;
      for (size_t k = 0; k < t; ++k) {
        if (blocks[order[k] - 1].contains_all(inter)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    seen.insert(b.indices().begin(), b.indices().end());
  }
  return true;
}

}  // namespace detail

// Permutation (1-based indices into `blocks`) under which the running
// intersection property holds, or nullopt. Exhaustive for r <= 8; above
// that a greedy maximum-overlap heuristic is tried from every starting
// block and may miss an existing order.
inline std::optional<std::vector<int>> find_rip_order(
    const std::vector<BlockIndexSet>& blocks) {
  const int r = static_cast<int>(blocks.size());
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 1);
  if (r <= 2) return order;
  if (r <= 8) {
    do {
      if (detail::rip_order_valid(blocks, order)) return order;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
  }
  for (int start = 1; start <= r; ++start) {
    std::vector<int> chosen = {start};
    std::vector<bool> used(r + 1, false);
    used[start] = true;
    std::set<int> seen(blocks[start - 1].indices().begin(),
                       blocks[start - 1].indices().end());
    while (static_cast<int>(chosen.size()) < r) {
      int best = 0;
      int best_overlap = -1;
      for (int c = 1; c <= r; ++c) {
        if (used[c]) continue;
        std::vector<int> inter;
        for (int v : blocks[c - 1].indices()) {
          if (seen.count(v)) inter.push_back(v);
        }
        bool ok = false;
        for (int k : chosen) {
          if (blocks[k - 1].contains_all(inter)) {
            ok = true;
            break;
          }
        }
        if (ok && static_cast<int>(inter.size()) > best_overlap) {
          best_overlap = static_cast<int>(inter.size());
          best = c;
        }
      }
      if (best == 0) break;
      chosen.push_back(best);
      used[best] = true;
      seen.insert(blocks[best - 1].indices().begin(), blocks[best - 1].indices().end());
    }
    if (static_cast<int>(chosen.size()) == r) return chosen;
  }
  return std::nullopt;
}

// First-fit assignment of whole summands to blocks by variable support.
// Returns per-block sums f_j, zero polynomials for unused blocks.
inline std::vector<Polynomial> assign_summands(const std::vector<Polynomial>& summands,
                                               const SparsityPattern& pattern) {
  std::vector<Polynomial> out(pattern.size(), Polynomial(pattern.nvars()));
  for (size_t s = 0; s < summands.size(); ++s) {
    const auto support = summands[s].support_vars();
    int target = 0;
    for (int j = 1; j <= pattern.size(); ++j) {
      if (pattern.block(j).contains_all(support)) {
        target = j;
        break;
      }
    }
    if (target == 0) {
      std::string monos;
      for (const auto& [m, c] : summands[s].terms()) {
        if (!monos.empty()) monos += ", ";
        monos += m.to_string();
      }
      throw InputError("summand " + std::to_string(s + 1) +
                       " fits no block; offending monomials: " + monos);
    }
    out[target - 1] += summands[s];
  }
  return out;
}

namespace detail {

// Maximal cliques of the min-degree chordal extension of the given graph,
// returned in a clique-tree preorder (which satisfies the running
// intersection property).
inline std::vector<BlockIndexSet> chordal_cliques(
    const std::vector<int>& vertices, const std::set<std::pair<int, int>>& edges) {
  std::map<int, std::set<int>> adj;
  for (int v : vertices) adj[v];
  for (const auto& [a, b] : edges) {
    adj[a].insert(b);
    adj[b].insert(a);
  }
  // Minimum-degree elimination; candidate clique = vertex + remaining
  // neighbours, with fill edges added among those neighbours.
  std::vector<std::vector<int>> candidates;
  std::set<int> remaining(vertices.begin(), vertices.end());
  while (!remaining.empty()) {
    int pick = 0;
    size_t best = static_cast<size_t>(-1);
    for (int v : remaining) {
      if (adj[v].size() < best) {
        best = adj[v].size();
        pick = v;
      }
    }
    std::vector<int> clique = {pick};
    for (int u : adj[pick]) clique.push_back(u);
    std::sort(clique.begin(), clique.end());
    candidates.push_back(clique);
    for (int u : adj[pick]) {
      for (int w : adj[pick]) {
        if (u < w) {
          adj[u].insert(w);
          adj[w].insert(u);
        }
      }
      adj[u].erase(pick);
    }
    adj.erase(pick);
    remaining.erase(pick);
  }
  // Drop non-maximal candidates.
  std::vector<BlockIndexSet> cliques;
  for (size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < candidates.size(); ++j) {
      if (i == j) continue;
      bool subset = std::includes(candidates[j].begin(), candidates[j].end(),
                                  candidates[i].begin(), candidates[i].end());
      bool equal = candidates[i] == candidates[j];
      if ((subset && !equal) || (equal && j < i)) {
        maximal = false;
        break;
      }
    }
    if (maximal) cliques.emplace_back(candidates[i]);
  }
  if (cliques.size() <= 1) return cliques;
  // Maximum-weight spanning tree on pairwise intersection sizes, then a
  // preorder walk. Parent-before-child visiting yields RIP.
  const int r = static_cast<int>(cliques.size());
  std::vector<bool> in_tree(r, false);
  std::vector<int> tree_parent(r, -1);
  std::vector<int> best_weight(r, -1);
  std::vector<int> order;
  in_tree[0] = true;
  order.push_back(0);
  for (int c = 1; c < r; ++c) {
    best_weight[c] = static_cast<int>(cliques[0].intersect(cliques[c]).size());
    tree_parent[c] = 0;
  }
  for (int step = 1; step < r; ++step) {
    int pick = -1;
    for (int c = 0; c < r; ++c) {
      if (!in_tree[c] && (pick < 0 || best_weight[c] > best_weight[pick])) pick = c;
    }
    in_tree[pick] = true;
    order.push_back(pick);
    for (int c = 0; c < r; ++c) {
      if (in_tree[c]) continue;
      int w = static_cast<int>(cliques[pick].intersect(cliques[c]).size());
      if (w > best_weight[c]) {
        best_weight[c] = w;
        tree_parent[c] = pick;
      }
    }
  }
  // Prim's order already visits each node after its tree parent.
  std::vector<BlockIndexSet> out;
  for (int c : order) out.push_back(cliques[c]);
  return out;
}

}  // namespace detail

// Correlative sparsity blocks for f subject to constraints: variables
// co-occurring in a monomial of f are adjacent, and the whole support of
// each constraint forms a clique. The result always passes check_rip.
inline SparsityPattern extract_blocks(const Polynomial& f,
                                      const std::vector<Polynomial>& constraints) {
  std::set<int> vars;
  std::set<std::pair<int, int>> edges;
  for (const auto& [m, c] : f.terms()) {
    std::vector<int> mv;
    for (const auto& [v, e] : m.factors()) mv.push_back(v);
    vars.insert(mv.begin(), mv.end());
    for (size_t a = 0; a < mv.size(); ++a) {
      for (size_t b = a + 1; b < mv.size(); ++b) edges.emplace(mv[a], mv[b]);
    }
  }
  for (const auto& g : constraints) {
    const auto support = g.support_vars();
    vars.insert(support.begin(), support.end());
    for (size_t a = 0; a < support.size(); ++a) {
      for (size_t b = a + 1; b < support.size(); ++b) {
        edges.emplace(support[a], support[b]);
      }
    }
  }
  std::vector<int> vertex_list(vars.begin(), vars.end());
  auto cliques = detail::chordal_cliques(vertex_list, edges);
  SparsityPattern pattern(f.nvars(), std::move(cliques));
  if (!check_rip(pattern).holds) {
    // Clique-tree preorder should always satisfy RIP; reorder defensively.
    auto order = find_rip_order(pattern.blocks());
    if (!order) throw Error("extract_blocks: no RIP order for chordal cliques");
    std::vector<BlockIndexSet> reordered;
    for (int idx : *order) reordered.push_back(pattern.block(idx));
    pattern = SparsityPattern(f.nvars(), std::move(reordered));
  }
  return pattern;
}

}  // namespace sparsecert
