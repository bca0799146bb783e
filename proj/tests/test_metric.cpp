#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "xbnet/metric.hpp"

using namespace xbnet;
using testing_support::Rng;
using testing_support::oracle_normalize;
using testing_support::oracle_pearson;

namespace {

PositionMatrix positions_of(std::vector<std::vector<double>> rows) {
  PositionMatrix m;
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.entities.push_back(testing_support::entity_code(i));
  Quarter q{1983, 1};
  for (std::size_t t = 0; t < rows.front().size(); ++t, q = q.next())
    m.periods.push_back(q);
  m.positions = std::move(rows);
  return m;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    sum += (a[t] - b[t]) * (a[t] - b[t]);
  return std::sqrt(sum);
}

}  // namespace

TEST(Normalize, MatchesDirectEvaluation) {
  std::vector<double> series{1.0, 2.0, 3.0};
  auto values = normalize(series);
  auto expected = oracle_normalize(series);
  ASSERT_EQ(values.size(), expected.size());
  for (std::size_t t = 0; t < values.size(); ++t)
    EXPECT_NEAR(values[t], expected[t], 1e-12);
  // Frozen from the oracle: (-1/sqrt(2), 0, +1/sqrt(2)).
  EXPECT_NEAR(values[0], -0.7071067811865475, 1e-12);
  EXPECT_NEAR(values[1], 0.0, 1e-12);
  EXPECT_NEAR(values[2], 0.7071067811865475, 1e-12);
}

TEST(Normalize, InvariantsHold) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> series(2 + rng.index(30));
    for (auto& v : series) v = rng.uniform(-1e4, 1e4);
    auto values = normalize(series);
    double mean = 0.0, norm2 = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    for (double v : values) norm2 += v * v;
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(norm2), 1.0, 1e-9);
  }
}

TEST(Normalize, RejectsConstantSeries) {
  std::vector<double> series{5.0, 5.0, 5.0};
  try {
    normalize(series);
    FAIL() << "expected zero-variance error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::zero_variance);
  }
}

TEST(Normalize, RejectsShortSeries) {
  std::vector<double> series{1.0};
  try {
    normalize(series);
    FAIL() << "expected too-short error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::too_short);
  }
}

TEST(Normalize, TwoPointsAreForced) {
  std::vector<double> up{3.0, 9.0};
  auto v = normalize(up);
  EXPECT_NEAR(v[0], -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(v[1], 1.0 / std::sqrt(2.0), 1e-12);

  std::vector<double> down{9.0, 3.0};
  auto w = normalize(down);
  EXPECT_NEAR(w[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(w[1], -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Correlation, SelfIsOne) {
  std::vector<double> x{1.0, 4.0, 2.0, 8.0};
  EXPECT_DOUBLE_EQ(correlation(x, x), 1.0);
}

TEST(Correlation, NegationIsMinusOne) {
  std::vector<double> x{1.0, 4.0, 2.0, 8.0};
  std::vector<double> y{-1.0, -4.0, -2.0, -8.0};
  EXPECT_DOUBLE_EQ(correlation(x, y), -1.0);
}

TEST(Correlation, HandComputedValue) {
  // cov = 29/4 - 2.5*2.5 = 1, var_x = var_y = 1.25, so C = 1/1.25 = 0.8.
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> y{1.0, 3.0, 2.0, 4.0};
  EXPECT_NEAR(correlation(x, y), 0.8, 1e-15);
}

TEST(Correlation, ReportsLengthMismatch) {
  std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> y{1.0, 2.0};
  try {
    correlation(x, y);
    FAIL() << "expected length-mismatch error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::length_mismatch);
  }
}

TEST(Correlation, ReportsZeroVariance) {
  std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> y{7.0, 7.0, 7.0};
  try {
    correlation(x, y);
    FAIL() << "expected zero-variance error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::zero_variance);
  }
}

TEST(CorrelationDistance, Endpoints) {
  EXPECT_DOUBLE_EQ(correlation_distance(1.0), 0.0);
  EXPECT_DOUBLE_EQ(correlation_distance(-1.0), 2.0);
  EXPECT_DOUBLE_EQ(correlation_distance(0.5), 1.0);
}

TEST(CorrelationDistance, RejectsOutOfRange) {
  for (double c : {1.0000001, -1.0000001, 2.0}) {
    try {
      correlation_distance(c);
      FAIL() << "expected out-of-range error for " << c;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), errc::out_of_range);
    }
  }
}

TEST(DistanceMatrixOp, ProportionalSeriesAtZeroDistance) {
  auto m = positions_of({{1.0, 2.0, 3.0, 4.0}, {2.0, 4.0, 6.0, 8.0}});
  auto d = distance_matrix(m);
  EXPECT_LT(d.distances[0][1], 1e-7);
}

TEST(DistanceMatrixOp, IdenticalAndNegatedPairs) {
  std::vector<double> base{1.0, -2.0, 3.0, 0.5};
  std::vector<double> negated{-1.0, 2.0, -3.0, -0.5};
  auto m = positions_of({base, base, negated});
  auto d = distance_matrix(m);
  EXPECT_NEAR(d.distances[0][1], 0.0, 1e-7);
  EXPECT_NEAR(d.distances[0][2], 2.0, 1e-7);
  EXPECT_NEAR(d.distances[1][2], 2.0, 1e-7);
}

TEST(DistanceMatrixOp, MatchesPairwiseOracle) {
  Rng rng(23);
  auto m = testing_support::random_positions(rng, 4, 20);
  auto d = distance_matrix(m);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) {
        EXPECT_EQ(d.distances[i][j], 0.0);
        continue;
      }
      double c = clamp_correlation(
          oracle_pearson(m.positions[i], m.positions[j]));
      EXPECT_NEAR(d.correlations[i][j], c, 1e-12);
      EXPECT_NEAR(d.distances[i][j], std::sqrt(2.0 * (1.0 - c)), 1e-12);
    }
  }
}

TEST(DistanceMatrixOp, NamesZeroVarianceEntity) {
  auto m = positions_of({{1.0, 2.0, 3.0}, {4.0, 4.0, 4.0}});
  try {
    distance_matrix(m);
    FAIL() << "expected zero-variance error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::zero_variance);
    EXPECT_NE(std::string(e.what()).find("AB"), std::string::npos);
  }
}

// The two formulations of the metric must agree: sqrt(2(1-C)) against the
// Euclidean distance between the normalized vectors.
TEST(DistanceMatrixOp, EquivalenceOfForms) {
  Rng rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t n_entities = 3 + rng.index(6);
    std::size_t n_quarters = 4 + rng.index(30);
    auto m = testing_support::random_positions(rng, n_entities, n_quarters);
    auto d = distance_matrix(m);
    std::vector<std::vector<double>> rho;
    for (const auto& row : m.positions) rho.push_back(normalize(row));
    for (std::size_t i = 0; i < n_entities; ++i)
      for (std::size_t j = i + 1; j < n_entities; ++j)
        EXPECT_NEAR(d.distances[i][j], euclidean(rho[i], rho[j]), 1e-9);
  }
}

TEST(DistanceMatrixOp, MetricAxiomsOnSampledData) {
  Rng rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    std::size_t n = 3 + rng.index(5);
    auto m = testing_support::random_positions(rng, n, 6 + rng.index(20));
    auto d = distance_matrix(m);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(d.distances[i][i], 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_EQ(d.distances[i][j], d.distances[j][i]);
        EXPECT_GE(d.distances[i][j], 0.0);
        EXPECT_LE(d.distances[i][j], 2.0);
        for (std::size_t k = 0; k < n; ++k)
          EXPECT_LE(d.distances[i][k],
                    d.distances[i][j] + d.distances[j][k] + 1e-9);
      }
    }
  }
}

TEST(DistanceMatrixOp, AffineInvariance) {
  Rng rng(43);
  auto m = testing_support::random_positions(rng, 5, 16);
  auto d = distance_matrix(m);

  auto scaled = m;
  for (auto& v : scaled.positions[2]) v = 3.5 * v + 1234.0;
  auto d_scaled = distance_matrix(scaled);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(d_scaled.distances[i][j], d.distances[i][j], 1e-9);

  auto flipped = m;
  for (auto& v : flipped.positions[2]) v = -2.0 * v + 7.0;
  auto d_flipped = distance_matrix(flipped);
  for (std::size_t j = 0; j < 5; ++j) {
    if (j == 2) continue;
    EXPECT_NEAR(d_flipped.correlations[2][j], -d.correlations[2][j], 1e-9);
  }
}

TEST(DistanceMatrixOp, CorrelationsAlwaysClamped) {
  Rng rng(47);
  for (int rep = 0; rep < 20; ++rep) {
    // Proportional pairs with huge scales push raw correlations onto the
    // boundary; the stored values must never leave [-1, 1].
    std::vector<double> base(8);
    for (auto& v : base) v = rng.uniform(-1.0, 1.0);
    std::vector<double> scaled(8), negated(8);
    for (std::size_t t = 0; t < 8; ++t) {
      scaled[t] = base[t] * 1e12;
      negated[t] = -base[t] * 1e-9;
    }
    auto d = distance_matrix(positions_of({base, scaled, negated}));
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_GE(d.correlations[i][j], -1.0);
        EXPECT_LE(d.correlations[i][j], 1.0);
        EXPECT_GE(d.distances[i][j], 0.0);
        EXPECT_LE(d.distances[i][j], 2.0);
      }
    }
  }
}

TEST(DistanceMatrixOp, RejectsTooFewEntitiesOrPeriods) {
  try {
    distance_matrix(positions_of({{1.0, 2.0, 3.0}}));
    FAIL() << "expected too-short error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::too_short);
  }
  try {
    distance_matrix(positions_of({{1.0}, {2.0}}));
    FAIL() << "expected too-short error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::too_short);
  }
}

TEST(DistanceCsv, FullPrecisionRoundTrip) {
  Rng rng(53);
  auto m = testing_support::random_positions(rng, 3, 10);
  auto d = distance_matrix(m);
  std::ostringstream out;
  write_distance_csv(d, out);
  std::string text = out.str();
  // Header row, then one row per entity; values parse back exactly.
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "entity,AA,AB,AC");
  for (std::size_t i = 0; i < 3; ++i) {
    ASSERT_TRUE(static_cast<bool>(std::getline(in, line)));
    auto fields = detail::split_csv(line);
    ASSERT_EQ(fields.size(), 4u);
    EXPECT_EQ(fields[0], d.entities[i]);
    for (std::size_t j = 0; j < 3; ++j) {
      double parsed = std::stod(std::string(fields[j + 1]));
      EXPECT_EQ(parsed, d.distances[i][j]);
    }
  }
}
