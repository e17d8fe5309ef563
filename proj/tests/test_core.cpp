#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "birgn/errors.hpp"
#include "birgn/field_csv.hpp"
#include "birgn/grid.hpp"
#include "birgn/history_csv.hpp"
#include "birgn/noise.hpp"
#include "birgn/schedule.hpp"
#include "birgn/tridiagonal.hpp"
#include "test_util.hpp"

using namespace birgn;
using birgn::testing::random_field;

TEST(Grid, WeightsSumToDomainMeasure) {
  for (int n : {1, 7, 100, 400}) {
    const auto g = Grid::unit_interval(n);
    double s = 0.0;
    for (double w : g->weights()) {
      EXPECT_GE(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_EQ(g->node_count(), static_cast<std::size_t>(n + 1));
  }
  for (int n : {1, 5, 30}) {
    const auto g = Grid::unit_square(n);
    double s = 0.0;
    for (double w : g->weights()) s += w;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_EQ(g->node_count(), static_cast<std::size_t>((n + 1) * (n + 1)));
  }
}

TEST(Grid, TrapezoidIsExactOnAffineFunctions) {
  const auto g = Grid::unit_interval(37);
  double s = 0.0;
  for (std::size_t i = 0; i < g->node_count(); ++i) s += g->weight(i) * g->coord(i);
  EXPECT_NEAR(s, 0.5, 1e-15);
}

TEST(Grid, IndexingAndBoundary) {
  const auto g = Grid::unit_square(4);
  EXPECT_EQ(g->index(2, 3), 13u);
  EXPECT_DOUBLE_EQ(g->coord(g->index(2, 3), 0), 0.5);
  EXPECT_DOUBLE_EQ(g->coord(g->index(2, 3), 1), 0.75);
  EXPECT_TRUE(g->is_boundary(g->index(0, 2)));
  EXPECT_TRUE(g->is_boundary(g->index(2, 4)));
  EXPECT_FALSE(g->is_boundary(g->index(2, 2)));
  EXPECT_THROW(Grid::unit_interval(0), std::invalid_argument);
}

TEST(Grid, SameGridComparesStructure) {
  EXPECT_TRUE(same_grid(Grid::unit_interval(10), Grid::unit_interval(10)));
  EXPECT_FALSE(same_grid(Grid::unit_interval(10), Grid::unit_interval(11)));
  EXPECT_FALSE(same_grid(Grid::unit_interval(4), Grid::unit_square(4)));
}

TEST(L2Norm, ConstantOneHasUnitNorm) {
  EXPECT_NEAR(l2_norm(Field(Grid::unit_interval(100), 1.0)), 1.0, 1e-12);
}

TEST(L2Norm, ZeroFieldIsZero) { EXPECT_EQ(l2_norm(Field(Grid::unit_interval(100))), 0.0); }

TEST(L2Norm, SineOn400Subintervals) {
  const auto g = Grid::unit_interval(400);
  const Field f = Field::sample(g, [](double t, double) { return std::sin(std::numbers::pi * t); });
  EXPECT_NEAR(l2_norm(f), 1.0 / std::sqrt(2.0), 1e-4);
}

TEST(L2Norm, RejectsNonFiniteValues) {
  Field f(Grid::unit_interval(4));
  f[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(l2_norm(f), InvalidField);
  f[2] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(l2_norm(f), InvalidField);
}

TEST(L2Norm, TriangleInequalityAndHomogeneity) {
  for (const auto& g : {Grid::unit_interval(50), Grid::unit_square(9)}) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Field a = random_field(g, 2 * s);
      const Field b = random_field(g, 2 * s + 1, -3.0, 3.0);
      EXPECT_LE(l2_norm(a + b), l2_norm(a) + l2_norm(b) + 1e-12);
      const double c = -2.5 + 0.1 * static_cast<double>(s);
      EXPECT_NEAR(l2_norm(c * a), std::abs(c) * l2_norm(a), 1e-12);
    }
  }
}

TEST(Field, ArithmeticRequiresMatchingGrids) {
  Field a(Grid::unit_interval(4), 1.0);
  Field b(Grid::unit_interval(5), 1.0);
  EXPECT_THROW(a + b, GridMismatch);
  EXPECT_THROW(inner(a, b), GridMismatch);
  EXPECT_THROW(Field(Grid::unit_interval(4), Eigen::VectorXd::Zero(3)), InvalidField);
}

TEST(Field, InnerUsesQuadratureWeights) {
  const auto g = Grid::unit_interval(2);
  const Field a(g, Eigen::Vector3d(1.0, 2.0, 3.0));
  const Field b(g, Eigen::Vector3d(1.0, 1.0, 1.0));
  // weights 1/4, 1/2, 1/4
  EXPECT_DOUBLE_EQ(inner(a, b), 0.25 + 1.0 + 0.75);
}

TEST(Schedule, PaperScheduleValues) {
  const RegSchedule s(1.0, 0.5);
  EXPECT_EQ(s.alpha(3), 0.125);
  EXPECT_EQ(s.alpha(0), 1.0);
  EXPECT_EQ(s.alpha(2) / s.alpha(3), 2.0);
  EXPECT_EQ(s.theta(), 2.0);
  for (int n = 0; n < 60; ++n) EXPECT_EQ(s.alpha(n), std::ldexp(1.0, -n));
}

TEST(Schedule, RejectsInvalidParameters) {
  EXPECT_THROW(RegSchedule(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(RegSchedule(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(RegSchedule(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(RegSchedule(1.0, 0.5).alpha(-1), std::invalid_argument);
}

TEST(Noise, ExactNoiseLevel) {
  for (const auto& g : {Grid::unit_interval(100), Grid::unit_square(30)}) {
    const Field exact = random_field(g, 3);
    for (double delta : {1e-2, 1e-4, 1e-7}) {
      const Field y = add_noise(exact, delta, 7);
      EXPECT_NEAR(l2_norm(y - exact), delta, 1e-12 * delta + 1e-15);
    }
  }
}

TEST(Noise, DeterministicInSeed) {
  const Field exact(Grid::unit_interval(100), 2.0);
  const Field a = add_noise(exact, 1e-4, 7);
  const Field b = add_noise(exact, 1e-4, 7);
  const Field c = add_noise(exact, 1e-4, 8);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
}

TEST(Noise, RejectsNonPositiveDelta) {
  const Field exact(Grid::unit_interval(10), 1.0);
  EXPECT_THROW(add_noise(exact, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(add_noise(exact, -1.0, 1), std::invalid_argument);
}

TEST(FieldCsv, RoundTripIsBitExact1D) {
  const auto g = Grid::unit_interval(100);
  Field f = random_field(g, 11, -1e3, 1e3);
  f[0] = 1e-300;
  f[1] = -0.0;
  f[2] = 0.1;
  f[3] = std::numeric_limits<double>::max();
  std::stringstream ss;
  write_field_csv(ss, f);
  const Field back = read_field_csv(ss);
  ASSERT_TRUE(same_grid(back.grid(), g));
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(f[i]), std::bit_cast<std::uint64_t>(back[i])) << "node " << i;
  }
}

TEST(FieldCsv, RoundTripIsBitExact2D) {
  const auto g = Grid::unit_square(30);
  const Field f = random_field(g, 12);
  std::stringstream ss;
  write_field_csv(ss, f);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "index,coord,coord2,value");
  const Field back = read_field_csv(ss);
  EXPECT_TRUE(same_grid(back.grid(), g));
  EXPECT_EQ(back.values(), f.values());
}

TEST(FieldCsv, RejectsMalformedInput) {
  std::stringstream bad_header("idx,value\n0,1\n");
  EXPECT_THROW(read_field_csv(bad_header), ParseError);
  std::stringstream bad_coord("index,coord,value\n0,0,1\n1,0.7,2\n");
  EXPECT_THROW(read_field_csv(bad_coord), ParseError);
  std::stringstream bad_value("index,coord,value\n0,0,1\n1,1,abc\n");
  EXPECT_THROW(read_field_csv(bad_value), ParseError);
  std::stringstream too_short("index,coord,value\n0,0,1\n");
  EXPECT_THROW(read_field_csv(too_short), ParseError);
}

TEST(HistoryCsv, RoundTripIsExact) {
  std::vector<IterationRecord> recs;
  for (int n = 0; n < 5; ++n) {
    IterationRecord r{n, std::ldexp(1.0, -n), 0.1 / (n + 1.0), 3 * n, std::nullopt};
    if (n % 2) r.error_to_truth = 1.0 / 3.0 * n;
    recs.push_back(r);
  }
  std::stringstream ss;
  write_history_csv(ss, recs);
  EXPECT_EQ(read_history_csv(ss), recs);
}

TEST(Tridiagonal, MatchesDenseSolve) {
  const int n = 40;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> lo(n, 0.0), di(n), up(n, 0.0), rhs(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    di[i] = 4.0 + u(rng);
    a(i, i) = di[i];
    rhs[i] = u(rng);
    if (i + 1 < n) {
      lo[i + 1] = u(rng);
      up[i] = u(rng);
      a(i + 1, i) = lo[i + 1];
      a(i, i + 1) = up[i];
    }
  }
  const auto x = solve_tridiagonal(lo, di, up, rhs);
  const Eigen::VectorXd ref = a.partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(rhs.data(), n));
  for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-13);
}

TEST(Tridiagonal, ZeroPivotIsASolverError) {
  std::vector<double> lo{0.0, 1.0}, di{0.0, 1.0}, up{1.0, 0.0}, rhs{1.0, 1.0};
  EXPECT_THROW(solve_tridiagonal(lo, di, up, rhs), SolverError);
  EXPECT_THROW(TridiagonalFactor({0.0, -1.0}, {1.0, -2.0}, {-1.0, 0.0}, true), SolverError);
}
