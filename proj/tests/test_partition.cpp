#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msle/partition.hpp"

using namespace msle;

namespace {

Positions pos(std::initializer_list<double> v) {
  Positions p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

double fd_log(const PartitionFunction& pf, Positions x, int alpha) {
  const double h = 1e-6;
  Positions a = x, b = x;
  a(alpha) += h;
  b(alpha) -= h;
  return (std::log(pf.value(a)) - std::log(pf.value(b))) / (2 * h);
}

const double kGrid[] = {0.05, 0.15, 0.25, 0.35, 0.45, 0.5, 0.55, 0.65, 0.75, 0.85, 0.95};

}  // namespace

TEST_CASE("frozen block values") {
  const ModelParams k2 = model_params(2);
  CHECK(triple_blocks(k2, {0.1}).z_c1 == doctest::Approx(2.154846242337742).epsilon(1e-12));
  CHECK(crossing_probability(k2, {0.1}).p_c1 == doctest::Approx(0.8291796067500631).epsilon(1e-12));
  CHECK(crossing_probability(k2, {0.3}).p_c1 == doctest::Approx(0.6526877851014217).epsilon(1e-12));
  CHECK(crossing_probability(model_params(4), {0.3}).p_c1 ==
        doctest::Approx(0.6033887401557892).epsilon(1e-12));
}

TEST_CASE("k = 1 blocks in closed form") {
  const ModelParams k1 = model_params(1);
  for (double x : kGrid) {
    const BlockValues b = triple_blocks(k1, {x});
    CHECK(b.z_c1 == doctest::Approx(std::sqrt((1 - x) / x)).epsilon(1e-12));
    CHECK(b.z_c2 == doctest::Approx(std::sqrt(x / (1 - x))).epsilon(1e-12));
    CHECK(std::abs(crossing_probability(k1, {x}).p_c1 - (1 - x)) < 1e-12);
  }
}

TEST_CASE("reflection symmetry Z_C2(x) = Z_C1(1 - x)") {
  for (int k : {1, 2, 3, 4, 10}) {
    const ModelParams model = model_params(k);
    for (double x : kGrid) {
      CAPTURE(k);
      CAPTURE(x);
      const double a = triple_blocks(model, {x}).z_c2;
      const double b = triple_blocks(model, {1 - x}).z_c1;
      CHECK(std::abs(a - b) < 1e-9 * std::abs(b));
      const CrossingProbability p = crossing_probability(model, {x});
      CHECK(std::abs(p.p_c1 + p.p_c2 - 1) < 1e-15);
      CHECK(p.p_c1 > 0);
      CHECK(p.p_c1 < 1);
    }
    CHECK(std::abs(crossing_probability(model, {0.5}).p_c1 - 0.5) < 1e-12);
  }
}

TEST_CASE("crossing probability decreases in x and increases toward 1/2 with k") {
  for (int k : {2, 3, 6}) {
    const ModelParams model = model_params(k);
    double prev = 1.0;
    for (double x : kGrid) {
      const double p = crossing_probability(model, {x}).p_c1;
      CHECK(p < prev);
      prev = p;
    }
  }
  double prev = 1.0;
  for (int k : {1, 2, 4, 8, 16}) {
    const double p = crossing_probability(model_params(k), {0.2}).p_c1;
    CHECK(p < prev);
    CHECK(p > 0.5);
    prev = p;
  }
}

TEST_CASE("blocks satisfy the hypergeometric ODE and endpoint exponents") {
  for (int k : {1, 2, 3, 4, 10}) {
    const ModelParams model = model_params(k);
    for (double x : kGrid) {
      CAPTURE(k);
      CAPTURE(x);
      const KzResidual r = kz_residual(model, TripleBlock::C1, {x});
      CHECK(r.ode < 1e-6);
      CHECK(r.exponent < 1e-3);
    }
    const TripleBlockEvaluator blocks(model);
    const double lead = blocks.leading_exponent();
    const double sub = blocks.subleading_exponent();
    CHECK(endpoint_log_slope(blocks, TripleBlock::C1, true) == doctest::Approx(lead).epsilon(1e-3));
    CHECK(endpoint_log_slope(blocks, TripleBlock::C1, false) == doctest::Approx(sub).epsilon(1e-3));
    CHECK(endpoint_log_slope(blocks, TripleBlock::C2, false) == doctest::Approx(lead).epsilon(1e-3));
    CHECK(endpoint_log_slope(blocks, TripleBlock::C2, true) == doctest::Approx(sub).epsilon(1e-3));
  }
  CHECK(TripleBlockEvaluator(model_params(1)).subleading_exponent() == doctest::Approx(0.5));
  CHECK(std::abs(TripleBlockEvaluator(model_params(1)).mixing()) < 1e-15);
}

TEST_CASE("guard band joins the power law continuously") {
  const TripleBlockEvaluator blocks(model_params(3));
  const double in = blocks.values(kBlockGuard * 1.0001).c1;
  const double out = blocks.values(kBlockGuard * 0.9999).c1;
  CHECK(std::abs(in / out - 1) < 1e-3);
  const auto j = blocks.jet(0.37);
  CHECK(j.value.c1 == doctest::Approx(blocks.values(0.37).c1).epsilon(1e-14));
  CHECK(j.derivative.c2 == doctest::Approx(blocks.derivatives(0.37).c2).epsilon(1e-14));
}

TEST_CASE("grad_log matches finite differences") {
  const ModelParams k2 = model_params(2);
  const ModelParams k4 = model_params(4);
  const std::vector<std::pair<PartitionFunction, Positions>> cases = {
      {PartitionFunction::factorized(k4, 3), pos({-0.4, 0.1, 0.9})},
      {PartitionFunction::double_channel(k2, 0), pos({0.0, 0.7})},
      {PartitionFunction::double_channel(k2, 2), pos({0.0, 0.7})},
      {PartitionFunction::triple(k2, TripleBlock::C1), pos({-0.2, 0.15, 0.8})},
      {PartitionFunction::triple(k2, TripleBlock::C2), pos({-0.2, 0.55, 0.8})},
      {PartitionFunction::triple(k4, TripleBlock::Sum), pos({1.0, 1.3, 2.1})},
      {PartitionFunction::triple(model_params(1), TripleBlock::Sum), pos({0.0, 0.5, 1.0})},
  };
  for (const auto& [pf, x] : cases) {
    CAPTURE(pf.describe());
    const Positions g = pf.grad_log(x);
    for (int a = 0; a < x.size(); ++a) {
      CHECK(std::abs(g(a) - fd_log(pf, x, a)) < 1e-6);
      CHECK(g(a) == doctest::Approx(pf.log_derivative(x, a)).epsilon(1e-14));
    }
    // translation invariance
    CHECK(std::abs(g.sum()) < 1e-10);
  }
}

TEST_CASE("factorized m = 2 equals the channel-2 double correlator") {
  for (int k : {2, 3, 5}) {
    const ModelParams model = model_params(k);
    const Positions x = pos({0.3, 1.4});
    CHECK(PartitionFunction::factorized(model, 2).value(x) ==
          doctest::Approx(PartitionFunction::double_channel(model, 2).value(x)).epsilon(1e-14));
    CHECK(double_z(model, 2, 0.3, 1.4) == doctest::Approx(std::pow(1.1, 1.0 / (2 * (k + 2)))));
    CHECK(double_z(model, 0, 0.3, 1.4) == doctest::Approx(std::pow(1.1, -3.0 / (2 * (k + 2)))));
  }
}

TEST_CASE("triple partition function scales with the cross-ratio prefactor") {
  const ModelParams model = model_params(3);
  const PartitionFunction pf = PartitionFunction::triple(model, TripleBlock::C1);
  const double h = to_double(model.weight_of(1));
  const double u = CrossRatio::of(0.2, 0.9, 1.7).value;
  CHECK(pf.value(pos({0.2, 0.9, 1.7})) ==
        doctest::Approx(std::pow(1.5, -2 * h) * triple_blocks(model, {u}).z_c1).epsilon(1e-13));
  // Möbius scale covariance: Z(λx) = λ^{-2h} Z(x)
  CHECK(pf.value(pos({0.6, 2.7, 5.1})) ==
        doctest::Approx(std::pow(3.0, -2 * h) * pf.value(pos({0.2, 0.9, 1.7}))).epsilon(1e-12));
}

TEST_CASE("survivors use the factorized correlator") {
  const PartitionFunction pf = PartitionFunction::triple(model_params(2), TripleBlock::Sum);
  const PartitionFunction s = pf.survivors(1);
  CHECK(s.driver_count() == 1);
  CHECK(s.kind() == PartitionFunction::Kind::Factorized);
}

TEST_CASE("invalid inputs") {
  const ModelParams k2 = model_params(2);
  CHECK_THROWS_AS(PartitionFunction::factorized(k2, 3), std::invalid_argument);
  CHECK_THROWS_AS(PartitionFunction::double_channel(k2, 1), std::invalid_argument);
  CHECK_THROWS_AS(triple_blocks(k2, {0.0}), std::domain_error);
  CHECK_THROWS_AS(triple_blocks(k2, {1.0}), std::domain_error);
  CHECK_THROWS_AS(crossing_probability(k2, {-0.2}), std::domain_error);
  const PartitionFunction pf = PartitionFunction::triple(k2, TripleBlock::Sum);
  CHECK_THROWS_AS(pf.value(pos({0.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS(pf.value(pos({0.0, 1.0, 0.5})), std::invalid_argument);
}
