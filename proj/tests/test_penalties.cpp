#include <cmath>

#include <gtest/gtest.h>

#include "birgn/errors.hpp"
#include "birgn/penalty.hpp"
#include "test_util.hpp"

using namespace birgn;
using birgn::testing::random_field;
using Opt = PenaltyFunctional::Options;

namespace {

std::vector<PenaltyFunctional> all_kinds(const GridPtr& g, double eps = 1e-6) {
  const Field anchor = random_field(g, 99, 0.5, 1.5);
  return {
      PenaltyFunctional(Opt{PenaltyKind::SquaredL2, 0.0, eps, 2.0}, Field(g)),
      PenaltyFunctional(Opt{PenaltyKind::ElasticNetSmoothed, 0.01, eps, 2.0}, Field(g)),
      PenaltyFunctional(Opt{PenaltyKind::TVSmoothed, 0.01, eps, 2.0}, Field(g)),
      PenaltyFunctional(Opt{PenaltyKind::SobolevWp, 0.0, eps, 1.5}, anchor),
      PenaltyFunctional(Opt{PenaltyKind::SobolevWp, 0.0, eps, 1.2}, anchor),
  };
}

}  // namespace

TEST(PenaltyKind, ParseAndPrint) {
  for (auto k : {PenaltyKind::SquaredL2, PenaltyKind::ElasticNetSmoothed, PenaltyKind::TVSmoothed,
                 PenaltyKind::SobolevWp}) {
    EXPECT_EQ(parse_penalty_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_penalty_kind("l1"), std::invalid_argument);
}

TEST(PenaltyValue, SquaredL2AtZero) {
  const auto g = Grid::unit_interval(100);
  EXPECT_EQ(PenaltyFunctional(Opt{}, Field(g)).value(Field(g)), 0.0);
}

TEST(PenaltyValue, TVOfConstantIsSqrtEps) {
  const auto g = Grid::unit_interval(100);
  const PenaltyFunctional p(Opt{PenaltyKind::TVSmoothed, 0.0, 1e-6, 2.0}, Field(g));
  EXPECT_NEAR(p.value(Field(g, 3.7)), 1e-3, 1e-12);
  const auto g2 = Grid::unit_square(12);
  const PenaltyFunctional p2(Opt{PenaltyKind::TVSmoothed, 0.0, 1e-6, 2.0}, Field(g2));
  EXPECT_NEAR(p2.value(Field(g2, -2.0)), 1e-3, 1e-12);
}

TEST(PenaltyValue, ElasticNetOfConstantOne) {
  const auto g = Grid::unit_interval(100);
  const PenaltyFunctional p(Opt{PenaltyKind::ElasticNetSmoothed, 0.01, 1e-6, 2.0}, Field(g));
  EXPECT_NEAR(p.value(Field(g, 1.0)), 0.01 + std::sqrt(1.0 + 1e-6), 1e-12);
}

TEST(PenaltyValue, SobolevAtAnchorIsEpsilonFloor) {
  const auto g = Grid::unit_interval(50);
  const Field a = random_field(g, 1);
  const double p = 1.6;
  const PenaltyFunctional pen(Opt{PenaltyKind::SobolevWp, 0.0, 1e-6, p}, a);
  // node part sum w eps^(p/2) = eps^(p/2); cell part n h eps^(p/2) = eps^(p/2)
  EXPECT_NEAR(pen.value(a), 2.0 * std::pow(1e-6, p / 2), 1e-15);
}

TEST(PenaltyGradient, SquaredL2IsTwiceWeightedValue) {
  const auto g = Grid::unit_interval(20);
  const Field x = random_field(g, 4);
  const Field grad = PenaltyFunctional(Opt{}, Field(g)).gradient(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(grad[i], 2.0 * g->weight(i) * x[i]);
}

TEST(PenaltyGradient, MatchesCentralDifferences) {
  for (const auto& g : {Grid::unit_interval(30), Grid::unit_square(7)}) {
    for (const auto& pen : all_kinds(g)) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Field x = random_field(g, 10 + s);
        const Field h = random_field(g, 20 + s);
        const double eta = 1e-6;
        const double fd = (pen.value(x + eta * h) - pen.value(x - eta * h)) / (2 * eta);
        const double an = pen.gradient(x).values().dot(h.values());
        EXPECT_LT(std::abs(fd - an) / std::abs(an), 1e-6) << to_string(pen.kind());
        EXPECT_NEAR(inner(pen.riesz_gradient(x), h), an, 1e-12 * (1 + std::abs(an)));
      }
    }
  }
}

TEST(PenaltyGradient, SobolevGradientAtAnchorIsBounded) {
  const auto g = Grid::unit_interval(40);
  const Field a = random_field(g, 3);
  for (double p : {1.2, 1.5, 2.0, 3.0}) {
    const PenaltyFunctional pen(Opt{PenaltyKind::SobolevWp, 0.0, 1e-6, p}, a);
    const double bound = p * std::pow(1e-6, (p - 1) / 2) * static_cast<double>(g->node_count());
    EXPECT_LE(pen.gradient(a).values().lpNorm<Eigen::Infinity>(), bound);
  }
}

TEST(PenaltyGradient, GridMismatchThrows) {
  const PenaltyFunctional pen(Opt{}, Field(Grid::unit_interval(10)));
  EXPECT_THROW(pen.value(Field(Grid::unit_interval(11))), GridMismatch);
  EXPECT_THROW(pen.gradient(Field(Grid::unit_square(10))), GridMismatch);
}

TEST(Bregman, VanishesOnTheDiagonal) {
  const auto g = Grid::unit_interval(25);
  for (const auto& pen : all_kinds(g)) {
    const Field x = random_field(g, 8);
    EXPECT_EQ(pen.bregman(x, x, pen.riesz_gradient(x)), 0.0);
  }
}

TEST(Bregman, SquaredL2IsSquaredDistance) {
  const auto g = Grid::unit_square(10);
  const PenaltyFunctional pen(Opt{}, Field(g));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field x = random_field(g, s);
    const Field z = random_field(g, s + 100);
    const double d = l2_norm(z - x);
    EXPECT_NEAR(pen.bregman(z, x, 2.0 * x), d * d, 1e-12);
  }
}

TEST(Bregman, ThreePointIdentity) {
  for (const auto& g : {Grid::unit_interval(30), Grid::unit_square(6)}) {
    for (const auto& pen : all_kinds(g)) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Field x = random_field(g, s), x1 = random_field(g, s + 10), x2 = random_field(g, s + 20);
        const Field xi = pen.riesz_gradient(x), xi1 = pen.riesz_gradient(x1);
        const double lhs = pen.bregman(x2, x, xi) - pen.bregman(x1, x, xi);
        const double rhs = pen.bregman(x2, x1, xi1) + inner(xi1 - xi, x2 - x1);
        EXPECT_NEAR(lhs, rhs, 1e-10) << to_string(pen.kind());
      }
    }
  }
}

TEST(Bregman, TwoConvexityWitness) {
  const auto g = Grid::unit_interval(30);
  for (const auto& pen : all_kinds(g)) {
    if (pen.kind() == PenaltyKind::SobolevWp) continue;
    const double c = pen.kind() == PenaltyKind::SquaredL2 ? 1.0 : std::min(1.0, pen.lambda());
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Field x = random_field(g, s), z = random_field(g, s + 50);
      const double d = l2_norm(z - x);
      EXPECT_GE(pen.bregman(z, x, pen.riesz_gradient(x)), c * d * d - 1e-10);
    }
  }
}

TEST(Bregman, WrongSubgradientIsAConvexityViolation) {
  const auto g = Grid::unit_interval(20);
  const PenaltyFunctional pen(Opt{}, Field(g));
  const Field x(g, 1.0);
  const Field z(g, 0.0);
  // xi = 10 x overshoots: value(z) - value(x) - <10x, z - x> = 0 - 1 + 10 > 0, so use a negative xi.
  EXPECT_THROW(pen.bregman(z, x, Field(g, -10.0)), ConvexityViolation);
}

TEST(Bregman, AnchorSubgradientIsChecked) {
  const auto g = Grid::unit_interval(20);
  const Field a(g, 0.5);
  const PenaltyFunctional pen(Opt{}, a);
  EXPECT_THROW(pen.bregman(Field(g, 1.0), a, Field(g, 7.0)), ConvexityViolation);
  EXPECT_NEAR(pen.bregman_to_anchor(Field(g, 1.0)), 0.25, 1e-14);
  EXPECT_THROW(PenaltyFunctional(Opt{}, a, Field(g, 0.3)), std::invalid_argument);
  EXPECT_NO_THROW(PenaltyFunctional(Opt{}, a, Field(g, 1.0)));
}

TEST(Bregman, ZeroAnchorReducesToPenaltyValueUpToAConstant) {
  const auto g = Grid::unit_interval(40);
  for (const auto& pen : all_kinds(g)) {
    if (pen.kind() == PenaltyKind::SobolevWp) continue;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const Field x = random_field(g, s);
      EXPECT_NEAR(pen.anchored_value(x), pen.value(x) - pen.value(Field(g)), 1e-12);
    }
  }
}

TEST(Penalty, MidpointConvexity) {
  for (const auto& g : {Grid::unit_interval(30), Grid::unit_square(6)}) {
    for (const auto& pen : all_kinds(g)) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        const Field x = random_field(g, s), z = random_field(g, s + 30);
        const double t = 0.1 + 0.08 * static_cast<double>(s);
        EXPECT_LE(pen.value(t * x + (1 - t) * z), t * pen.value(x) + (1 - t) * pen.value(z) + 1e-10);
      }
    }
  }
}

TEST(Penalty, InvalidOptionsAreRejected) {
  const Field a(Grid::unit_interval(5));
  EXPECT_THROW(PenaltyFunctional(Opt{PenaltyKind::TVSmoothed, -1.0, 1e-6, 2.0}, a), std::invalid_argument);
  EXPECT_THROW(PenaltyFunctional(Opt{PenaltyKind::TVSmoothed, 0.0, 0.0, 2.0}, a), std::invalid_argument);
  EXPECT_THROW(PenaltyFunctional(Opt{PenaltyKind::SobolevWp, 0.0, 1e-6, 1.0}, a), std::invalid_argument);
}

TEST(Curvature, SquaredL2IsExactHessian) {
  const auto g = Grid::unit_interval(12);
  const PenaltyFunctional pen(Opt{}, Field(g));
  const Eigen::MatrixXd c(pen.curvature(random_field(g, 1)));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(13, 13);
  for (int i = 0; i < 13; ++i) expected(i, i) = 2.0 * g->weight(static_cast<std::size_t>(i));
  EXPECT_LT((c - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Curvature, SymmetricPositiveAndMajorizesTheHessian) {
  for (const auto& g : {Grid::unit_interval(20), Grid::unit_square(5)}) {
    for (const auto& pen : all_kinds(g, 1e-2)) {
      const Field x = random_field(g, 3);
      const Eigen::MatrixXd c(pen.curvature(x));
      EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Field h = random_field(g, 40 + s);
        const double eta = 1e-4;
        const double second = (pen.value(x + eta * h) - 2 * pen.value(x) + pen.value(x - eta * h)) / (eta * eta);
        const double model = h.values().dot(c * h.values());
        EXPECT_GT(model, 0.0);
        EXPECT_LE(second, model * (1 + 1e-5) + 1e-6) << to_string(pen.kind());
      }
    }
  }
}
