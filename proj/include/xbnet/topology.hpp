#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cluster.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "metric.hpp"
#include "quarter.hpp"

namespace xbnet {

/// Distances below this value are treated as zero when inverted, so a pair of
/// perfectly correlated series contributes 1/epsilon instead of infinity.
inline constexpr double kDistanceEpsilon = 1e-9;

/// The distance matrix filtered at a threshold: entries with d <= threshold
/// are kept, everything else (and the diagonal) is zero.
struct ProjectedGraph {
  std::vector<std::string> entities;
  std::vector<std::vector<double>> weights;
  double threshold = 0.0;

  std::size_t size() const { return entities.size(); }
};

/// 0/1 adjacency indicator of a projected graph.
struct BooleanGraph {
  std::vector<std::string> entities;
  std::vector<std::vector<int>> adjacency;

  std::size_t size() const { return entities.size(); }

  std::size_t edge_count() const {
    std::size_t edges = 0;
    for (std::size_t i = 0; i < adjacency.size(); ++i)
      for (std::size_t j = i + 1; j < adjacency.size(); ++j)
        edges += static_cast<std::size_t>(adjacency[i][j]);
    return edges;
  }
};

inline ProjectedGraph project(const DistanceMatrix& d, double threshold) {
  if (!(threshold > 0.0))
    fail(errc::out_of_range, "projection threshold must be positive");
  ProjectedGraph graph;
  graph.entities = d.entities;
  graph.threshold = threshold;
  graph.weights.assign(d.size(), std::vector<double>(d.size(), 0.0));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (d.distances[i][j] <= threshold)
        graph.weights[i][j] = graph.weights[j][i] = d.distances[i][j];
  return graph;
}

inline BooleanGraph booleanize(const ProjectedGraph& graph) {
  BooleanGraph boolean;
  boolean.entities = graph.entities;
  boolean.adjacency.assign(graph.size(), std::vector<int>(graph.size(), 0));
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = 0; j < graph.size(); ++j)
      if (i != j && graph.weights[i][j] != 0.0) boolean.adjacency[i][j] = 1;
  return boolean;
}

inline bool is_connected(const BooleanGraph& graph) {
  if (graph.size() == 0) return true;
  detail::UnionFind components(graph.size());
  std::size_t merges = 0;
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = i + 1; j < graph.size(); ++j)
      if (graph.adjacency[i][j] && components.unite(i, j)) ++merges;
  return merges == graph.size() - 1;
}

/// M = number of unordered off-diagonal pairs with d <= threshold, and the
/// redundancy S = M - (N-1): links beyond the N-1 a spanning tree needs.
/// When the threshold comes from the linkage, S is the cyclomatic number of
/// the boolean graph.
struct RedundancyCount {
  std::size_t linked_pairs = 0;  // M
  long redundant = 0;            // S
};

inline RedundancyCount count_redundancy(const DistanceMatrix& d,
                                        double threshold) {
  RedundancyCount count;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      if (d.distances[i][j] <= threshold) ++count.linked_pairs;
  count.redundant = static_cast<long>(count.linked_pairs) -
                    static_cast<long>(d.size() - 1);
  return count;
}

/// Residuality R: inverse-distance mass above the threshold relative to the
/// mass at or below it. Each unordered pair is counted once.
struct ResidualityParts {
  double above = 0.0;  // sum of 1/d over pairs with d > threshold
  double below = 0.0;  // sum of 1/d over pairs with d <= threshold
  double value = 0.0;
  std::vector<std::pair<std::string, std::string>> clamped;
};

inline ResidualityParts residuality_breakdown(const DistanceMatrix& d,
                                              double threshold) {
  ResidualityParts parts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      double dist = d.distances[i][j];
      if (dist < kDistanceEpsilon)
        parts.clamped.emplace_back(d.entities[i], d.entities[j]);
      double inverse = 1.0 / std::max(dist, kDistanceEpsilon);
      if (dist <= threshold)
        parts.below += inverse;
      else
        parts.above += inverse;
    }
  }
  if (parts.below == 0.0)
    fail(errc::empty_denominator,
         "no pair lies at or below the threshold distance");
  parts.value = parts.above / parts.below;
  return parts;
}

inline double residuality(const DistanceMatrix& d, double threshold) {
  return residuality_breakdown(d, threshold).value;
}

/// Threshold, link counts and residuality of one analysis window.
struct TopologySummary {
  Quarter period_from;
  Quarter period_to;
  std::size_t entity_count = 0;  // N
  double threshold = 0.0;        // L
  std::size_t linked_pairs = 0;  // M
  long redundancy = 0;           // S
  double residuality = 0.0;      // R
};

inline TopologySummary summarize_topology(const DistanceMatrix& d,
                                          double threshold, Quarter from,
                                          Quarter to) {
  RedundancyCount count = count_redundancy(d, threshold);
  TopologySummary summary;
  summary.period_from = from;
  summary.period_to = to;
  summary.entity_count = d.size();
  summary.threshold = threshold;
  summary.linked_pairs = count.linked_pairs;
  summary.redundancy = count.redundant;
  summary.residuality = residuality(d, threshold);
  return summary;
}

namespace detail {

inline void append_json_double(std::string& out, double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
}

}  // namespace detail

inline void write_summary_json(const TopologySummary& summary,
                               std::ostream& out) {
  std::string buf = "{\n";
  buf += "  \"period_from\": \"" + summary.period_from.str() + "\",\n";
  buf += "  \"period_to\": \"" + summary.period_to.str() + "\",\n";
  buf += "  \"N\": " + std::to_string(summary.entity_count) + ",\n";
  buf += "  \"L\": ";
  detail::append_json_double(buf, summary.threshold);
  buf += ",\n";
  buf += "  \"M\": " + std::to_string(summary.linked_pairs) + ",\n";
  buf += "  \"S\": " + std::to_string(summary.redundancy) + ",\n";
  buf += "  \"R\": ";
  detail::append_json_double(buf, summary.residuality);
  buf += "\n}\n";
  out << buf;
}

/// Residuality evaluated on a trailing window advanced one quarter at a time.
struct ResidualityPoint {
  Quarter window_end;
  double value = 0.0;
};

struct ResidualitySeries {
  std::size_t window = 0;  // quarters per evaluation
  std::vector<ResidualityPoint> points;
};

inline ResidualitySeries rolling_residuality(const PositionMatrix& m,
                                             std::size_t window = 56) {
  if (window < 2)
    fail(errc::window_too_short, "rolling window must cover at least 2 "
                                 "quarters, got " + std::to_string(window));
  const std::size_t n = m.period_count();
  if (window > n)
    fail(errc::window_too_long, "rolling window of " + std::to_string(window) +
                                    " quarters exceeds the " +
                                    std::to_string(n) + " available");

  ResidualitySeries series;
  series.window = window;
  series.points.reserve(n - window + 1);
  for (std::size_t end = window - 1; end < n; ++end) {
    Quarter from = m.periods[end - window + 1];
    Quarter to = m.periods[end];
    PositionMatrix slab = slice_periods(m, from, to);
    DistanceMatrix d;
    try {
      d = distance_matrix(slab);
    } catch (const Error& e) {
      if (e.code() == errc::zero_variance)
        fail(errc::zero_variance, std::string(e.what()) + " in window " +
                                      from.str() + ".." + to.str());
      throw;
    }
    double threshold = threshold_distance(single_link(d));
    series.points.push_back(
        ResidualityPoint{to, residuality(d, threshold)});
  }
  return series;
}

inline void write_residuality_csv(const ResidualitySeries& series,
                                  std::ostream& out) {
  std::string buf = "window_end,R\n";
  for (const auto& point : series.points) {
    buf += point.window_end.str();
    buf += ',';
    detail::append_double(buf, point.value);
    buf += '\n';
  }
  out << buf;
}

/// Boolean graph in the same DOT dialect as the tree export, without weights.
inline std::string export_boolean_dot(const BooleanGraph& graph) {
  std::string out = "graph boolean {\n";
  for (const auto& entity : graph.entities) out += "  \"" + entity + "\";\n";
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = i + 1; j < graph.size(); ++j)
      if (graph.adjacency[i][j])
        out += "  \"" + graph.entities[i] + "\" -- \"" + graph.entities[j] +
               "\";\n";
  out += "}\n";
  return out;
}

}  // namespace xbnet
