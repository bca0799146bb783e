#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ingest.hpp"

namespace xbnet {

/// Symmetric correlation-distance matrix over a set of entities.
/// distances[i][j] = sqrt(2 (1 - correlations[i][j])), zero diagonal,
/// off-diagonal values in [0, 2], correlations in [-1, 1].
struct DistanceMatrix {
  std::vector<std::string> entities;
  std::vector<std::vector<double>> distances;
  std::vector<std::vector<double>> correlations;

  std::size_t size() const { return entities.size(); }
};

namespace detail {

inline bool is_constant(std::span<const double> series) {
  for (double v : series)
    if (v != series.front()) return false;
  return true;
}

// Sum of values in index order (correlation cells must not depend on any
// accumulation schedule).
inline double ordered_sum(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace detail

inline double clamp_correlation(double c) {
  return std::clamp(c, -1.0, 1.0);
}

/// Centers the series and scales it to unit Euclidean norm, which is the
/// same as dividing the centered values by sqrt(n * population variance).
inline std::vector<double> normalize(std::span<const double> series) {
  if (series.size() < 2)
    fail(errc::too_short, "normalization needs at least 2 observations, got " +
                              std::to_string(series.size()));
  if (detail::is_constant(series))
    fail(errc::zero_variance, "constant series has no defined correlation");

  double mean =
      detail::ordered_sum(series) / static_cast<double>(series.size());
  std::vector<double> centered(series.size());
  double sumsq = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    centered[t] = series[t] - mean;
    sumsq += centered[t] * centered[t];
  }
  if (sumsq <= 0.0)
    fail(errc::zero_variance, "series variance vanishes numerically");
  double scale = 1.0 / std::sqrt(sumsq);
  for (double& v : centered) v *= scale;
  return centered;
}

/// Pearson correlation with the population (1/n) moment convention; the 1/n
/// factors cancel in the ratio. Result is clamped to [-1, 1].
inline double correlation(std::span<const double> x,
                          std::span<const double> y) {
  if (x.size() != y.size())
    fail(errc::length_mismatch,
         "series lengths differ: " + std::to_string(x.size()) + " vs " +
             std::to_string(y.size()));
  if (x.size() < 2)
    fail(errc::too_short, "correlation needs at least 2 observations");
  if (detail::is_constant(x) || detail::is_constant(y))
    fail(errc::zero_variance, "constant series has no defined correlation");

  double n = static_cast<double>(x.size());
  double mx = detail::ordered_sum(x) / n;
  double my = detail::ordered_sum(y) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    double dx = x[t] - mx;
    double dy = y[t] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    fail(errc::zero_variance, "series variance vanishes numerically");
  return clamp_correlation(sxy / std::sqrt(sxx * syy));
}

/// Maps a correlation c in [-1, 1] to the metric value sqrt(2 (1 - c)).
inline double correlation_distance(double c) {
  if (!(c >= -1.0 && c <= 1.0))
    fail(errc::out_of_range,
         "correlation " + std::to_string(c) + " outside [-1, 1]");
  return std::sqrt(2.0 * (1.0 - c));
}

/// Full pairwise correlation-distance matrix of the position series over the
/// matrix's whole period range (slice the window first when needed).
inline DistanceMatrix distance_matrix(const PositionMatrix& m) {
  const std::size_t n_entities = m.entity_count();
  if (n_entities < 2)
    fail(errc::too_short, "distance matrix needs at least 2 entities");
  if (m.period_count() < 2)
    fail(errc::too_short, "distance matrix needs at least 2 periods");

  // Unit-norm centered series; correlation of a pair is then a dot product.
  std::vector<std::vector<double>> rho(n_entities);
  for (std::size_t i = 0; i < n_entities; ++i) {
    try {
      rho[i] = normalize(m.positions[i]);
    } catch (const Error& e) {
      if (e.code() == errc::zero_variance)
        fail(errc::zero_variance, "entity '" + m.entities[i] +
                                      "' has a constant position series");
      throw;
    }
  }

  DistanceMatrix d;
  d.entities = m.entities;
  d.distances.assign(n_entities, std::vector<double>(n_entities, 0.0));
  d.correlations.assign(n_entities, std::vector<double>(n_entities, 1.0));
  for (std::size_t i = 0; i < n_entities; ++i) {
    for (std::size_t j = i + 1; j < n_entities; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < rho[i].size(); ++t)
        dot += rho[i][t] * rho[j][t];
      double c = clamp_correlation(dot);
      double dist = std::sqrt(2.0 * (1.0 - c));
      d.correlations[i][j] = d.correlations[j][i] = c;
      d.distances[i][j] = d.distances[j][i] = dist;
    }
  }
  return d;
}

/// Square CSV with entity header row/column and 17-significant-digit cells.
inline void write_distance_csv(const DistanceMatrix& d, std::ostream& out) {
  std::string buf = "entity";
  for (const auto& e : d.entities) {
    buf += ',';
    buf += e;
  }
  buf += '\n';
  char cell[40];
  for (std::size_t i = 0; i < d.size(); ++i) {
    buf += d.entities[i];
    for (std::size_t j = 0; j < d.size(); ++j) {
      buf += ',';
      auto res = std::to_chars(cell, cell + sizeof cell, d.distances[i][j],
                               std::chars_format::general, 17);
      buf.append(cell, res.ptr);
    }
    buf += '\n';
  }
  out << buf;
}

}  // namespace xbnet
