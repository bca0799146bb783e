#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ingest.hpp"
#include "metric.hpp"

namespace xbnet {

namespace detail {

// Union-find with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

inline void append_fixed6(std::string& out, double value) {
  char buf[40];
  auto res =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// One agglomeration step: clusters `left` and `right` join at `distance`
/// into cluster `id`. Leaves are 0..N-1; new ids continue from N.
struct LinkageMerge {
  int left;
  int right;
  double distance;
  int id;
};

/// Full single-link agglomeration history: N-1 merges with non-decreasing
/// distances, ending in one cluster containing every leaf.
struct Linkage {
  std::vector<std::string> leaves;  // leaf id -> entity code
  std::vector<LinkageMerge> merges;
};

struct MstEdge {
  std::string a;  // lexicographically smaller endpoint
  std::string b;
  double weight;
};

struct Mst {
  std::vector<MstEdge> edges;  // sorted by (weight, a, b)
  double total_weight = 0.0;
};

/// Nearest-neighbor agglomerative clustering: at every step the pair of
/// clusters with minimal cross-pair distance is merged. Ties are broken by
/// the lexicographically smallest member entity, then the smallest member of
/// the other cluster, so the result is independent of input order.
inline Linkage single_link(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) fail(errc::too_short, "clustering needs at least 2 entities");

  // Work matrix of current cluster-to-cluster distances; slot u keeps the
  // merged cluster, slot v dies. min_member[p] is the lexicographically
  // smallest entity in cluster p, the tie-break key.
  std::vector<std::vector<double>> work = d.distances;
  std::vector<int> cluster_id(n);
  std::vector<std::string_view> min_member(n);
  std::vector<bool> alive(n, true);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  for (std::size_t i = 0; i < n; ++i) min_member[i] = d.entities[i];

  Linkage linkage;
  linkage.leaves = d.entities;
  linkage.merges.reserve(n - 1);

  int next_id = static_cast<int>(n);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_u = 0, best_v = 0;
    bool have_best = false;
    double best_dist = 0.0;
    std::string_view best_lo, best_hi;
    for (std::size_t p = 0; p < n; ++p) {
      if (!alive[p]) continue;
      for (std::size_t q = p + 1; q < n; ++q) {
        if (!alive[q]) continue;
        double dist = work[p][q];
        std::string_view lo = std::min(min_member[p], min_member[q]);
        std::string_view hi = std::max(min_member[p], min_member[q]);
        if (!have_best || dist < best_dist ||
            (dist == best_dist &&
             (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
          have_best = true;
          best_dist = dist;
          best_lo = lo;
          best_hi = hi;
          best_u = p;
          best_v = q;
        }
      }
    }

    std::size_t u = best_u, v = best_v;
    if (min_member[v] < min_member[u]) std::swap(u, v);
    linkage.merges.push_back(
        LinkageMerge{cluster_id[u], cluster_id[v], best_dist, next_id});
    for (std::size_t r = 0; r < n; ++r) {
      if (!alive[r] || r == u || r == v) continue;
      double merged = std::min(work[u][r], work[v][r]);
      work[u][r] = work[r][u] = merged;
    }
    cluster_id[u] = next_id++;
    alive[v] = false;
  }
  return linkage;
}

/// Kruskal over the complete distance graph. Edges are considered in
/// (weight, entity pair) order, which also fixes the choice among
/// equal-weight candidates independently of entity input order.
inline Mst minimum_spanning_tree(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) fail(errc::too_short, "spanning tree needs at least 2 entities");

  struct Candidate {
    double weight;
    std::string_view a;
    std::string_view b;
    std::size_t i;
    std::size_t j;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::string_view a = d.entities[i];
      std::string_view b = d.entities[j];
      if (b < a) std::swap(a, b);
      candidates.push_back(Candidate{d.distances[i][j], a, b, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.weight != y.weight) return x.weight < y.weight;
              if (x.a != y.a) return x.a < y.a;
              return x.b < y.b;
            });

  detail::UnionFind components(n);
  Mst tree;
  tree.edges.reserve(n - 1);
  for (const auto& c : candidates) {
    if (!components.unite(c.i, c.j)) continue;
    tree.edges.push_back(MstEdge{std::string(c.a), std::string(c.b), c.weight});
    tree.total_weight += c.weight;
    if (tree.edges.size() == n - 1) break;
  }
  return tree;
}

/// The endogenous threshold distance: the last (largest) merge distance,
/// i.e. the smallest cutoff that keeps the thresholded graph connected.
inline double threshold_distance(const Linkage& linkage) {
  if (linkage.merges.empty()) fail(errc::too_short, "linkage has no merges");
  return linkage.merges.back().distance;
}

/// Cluster labels obtained by cutting the dendrogram at `factor` times the
/// threshold distance; merges strictly below the cut join their leaves.
struct DendrogramColoring {
  double factor = 0.7;
  double cut = 0.0;
  std::vector<std::string> labels;                // ordered cluster labels
  std::map<std::string, std::string> cluster_of;  // entity -> label
};

inline DendrogramColoring color_dendrogram(const Linkage& linkage,
                                           double factor = 0.7) {
  if (!(factor > 0.0) || factor > 1.0)
    fail(errc::invalid_factor,
         "dendrogram factor must lie in (0, 1], got " + std::to_string(factor));

  const std::size_t n = linkage.leaves.size();
  DendrogramColoring coloring;
  coloring.factor = factor;
  coloring.cut = factor * threshold_distance(linkage);

  // rep maps any cluster id to one of its leaves.
  std::vector<std::size_t> rep(n + linkage.merges.size());
  std::iota(rep.begin(), rep.begin() + n, std::size_t{0});
  detail::UnionFind components(n);
  for (const auto& m : linkage.merges) {
    std::size_t left = rep[static_cast<std::size_t>(m.left)];
    std::size_t right = rep[static_cast<std::size_t>(m.right)];
    if (m.distance < coloring.cut) components.unite(left, right);
    rep[static_cast<std::size_t>(m.id)] = left;
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    groups[components.find(leaf)].push_back(leaf);

  // Groups keyed by root; order by smallest member leaf for stable labels.
  std::vector<std::vector<std::size_t>> ordered;
  ordered.reserve(groups.size());
  for (auto& [root, members] : groups) ordered.push_back(std::move(members));
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  for (std::size_t g = 0; g < ordered.size(); ++g) {
    std::string label = "c" + std::to_string(g + 1);
    for (std::size_t leaf : ordered[g])
      coloring.cluster_of[linkage.leaves[leaf]] = label;
    coloring.labels.push_back(std::move(label));
  }
  return coloring;
}

/// Newick serialization of the dendrogram; each child branch carries the
/// distance of the merge that created its parent, 6 decimal places.
inline std::string export_newick(const Linkage& linkage) {
  const std::size_t n = linkage.leaves.size();
  std::vector<std::string> text(n + linkage.merges.size());
  for (std::size_t i = 0; i < n; ++i) text[i] = linkage.leaves[i];
  for (const auto& m : linkage.merges) {
    std::string node = "(";
    node += text[static_cast<std::size_t>(m.left)];
    node += ':';
    detail::append_fixed6(node, m.distance);
    node += ',';
    node += text[static_cast<std::size_t>(m.right)];
    node += ':';
    detail::append_fixed6(node, m.distance);
    node += ')';
    text[static_cast<std::size_t>(m.id)] = std::move(node);
  }
  return text.back() + ";\n";
}

/// DOT serialization of a spanning tree as an undirected graph. When role
/// assignments are given, creditor nodes are green, debtors red and neutral
/// entities gray; highlighted nodes get an enlarged width.
inline std::string export_dot(const Mst& tree,
                              std::span<const RoleAssignment> roles = {},
                              std::span<const std::string> highlights = {}) {
  std::set<std::string> nodes;
  for (const auto& e : tree.edges) {
    nodes.insert(e.a);
    nodes.insert(e.b);
  }
  std::set<std::string> enlarged;
  for (const auto& h : highlights) {
    if (!nodes.contains(h))
      fail(errc::unknown_entity,
           "highlight entity '" + h + "' is not a tree node");
    enlarged.insert(h);
  }
  std::map<std::string, Role> role_of;
  for (const auto& r : roles) role_of[r.entity] = r.role;

  std::string out = "graph mst {\n";
  for (const auto& node : nodes) {
    out += "  \"" + node + '"';
    std::vector<std::string> attrs;
    if (!roles.empty()) {
      Role role = Role::neutral;
      if (auto it = role_of.find(node); it != role_of.end()) role = it->second;
      const char* color = role == Role::creditor  ? "green"
                          : role == Role::debtor ? "red"
                                                  : "gray";
      attrs.push_back(std::string("color=") + color);
    }
    if (enlarged.contains(node)) attrs.push_back("width=1.5");
    if (!attrs.empty()) {
      out += " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ", ";
        out += attrs[i];
      }
      out += ']';
    }
    out += ";\n";
  }
  for (const auto& e : tree.edges) {
    out += "  \"" + e.a + "\" -- \"" + e.b + "\" [weight=";
    detail::append_fixed6(out, e.weight);
    out += "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace xbnet
