#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "msle/algebra.hpp"

using namespace msle;

TEST_CASE("parameters at k = 2") {
  const ModelParams p = model_params(2);
  CHECK(p.kappa == Rational(16, 5));
  CHECK(p.tau == Rational(2, 5));
  CHECK(p.central_charge == Rational(3, 2));
  CHECK(p.weight_of(1) == Rational(3, 16));
  CHECK(p.delta(0) == Rational(-3, 8));
  CHECK(p.delta(2) == Rational(1, 8));
  CHECK(to_string(p.kappa) == "16/5");
  CHECK(to_string(Rational(4)) == "4");
}

TEST_CASE("k = 1 uses kappa = 4, tau = 0") {
  const ModelParams p = model_params(1);
  CHECK(p.kappa == Rational(4));
  CHECK(p.tau == Rational(0));
  CHECK(p.central_charge == Rational(1));
  CHECK(p.weight_of(1) == Rational(1, 4));
  CHECK(p.delta(0) == Rational(-1, 2));
  CHECK_THROWS_AS(p.delta(2), std::invalid_argument);
}

TEST_CASE("parameters match integer oracle for k = 2..30") {
  for (int k = 2; k <= 30; ++k) {
    const ModelParams p = model_params(k);
    CAPTURE(k);
    // κ(k+3) = 4(k+2), τ(k+3) = 2, c(k+2) = 3k, h(4(k+2)) = 3
    CHECK(p.kappa * (k + 3) == Rational(4 * (k + 2)));
    CHECK(p.tau * (k + 3) == Rational(2));
    CHECK(p.central_charge * (k + 2) == Rational(3 * k));
    CHECK(p.weight_of(1) * (4 * (k + 2)) == Rational(3));
    // null-state line κ + τ h∨ = 4
    CHECK(p.kappa + 2 * p.tau == Rational(4));
  }
}

TEST_CASE("general algebra data for su(2)") {
  const GeneralAlgebraData g = su2_data();
  CHECK(g.dim_g == 3);
  CHECK(g.dual_coxeter == 2);
  CHECK(su2_casimir(1) == Rational(3, 2));
  CHECK(g.conformal_weight(su2_casimir(2), 3) == Rational(8, 20));
}

TEST_CASE("invalid levels and labels") {
  CHECK_THROWS_AS(model_params(0), std::invalid_argument);
  CHECK_THROWS_AS(model_params(-3), std::invalid_argument);
  CHECK_THROWS_AS(model_params(2).weight_of(3), std::invalid_argument);
  CHECK_THROWS_AS(model_params(2).delta(1), std::invalid_argument);
}

TEST_CASE("kostka numbers") {
  CHECK(kostka(4, 0) == 1);
  CHECK(kostka(4, 1) == 3);
  CHECK(kostka(4, 2) == 2);
  CHECK(kostka(3, 1) == 2);
  // Catalan numbers at n = m/2
  const long catalan[] = {1, 1, 2, 5, 14, 42, 132};
  for (int n = 0; n <= 6; ++n) CHECK(kostka(2 * n, n) == catalan[n]);
  CHECK_THROWS_AS(kostka(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(kostka(4, -1), std::invalid_argument);
}

TEST_CASE("topologies, paths and tensor oracle agree for m <= 10") {
  for (int m = 1; m <= 10; ++m) {
    const auto oracle = tensor_decomposition_oracle(m);
    for (int n = 0; 2 * n <= m; ++n) {
      CAPTURE(m);
      CAPTURE(n);
      const auto topo = enumerate_arch_topologies(m, n);
      CHECK(static_cast<std::int64_t>(topo.size()) == kostka(m, n));
      CHECK(oracle.at(m - 2 * n) == kostka(m, n));
      CHECK(static_cast<std::int64_t>(enumerate_fusion_paths(m, m, m - 2 * n).size()) == kostka(m, n));
      std::set<ArchTopology> unique(topo.begin(), topo.end());
      CHECK(unique.size() == topo.size());
      for (const auto& t : topo) {
        CHECK(t.is_valid());
        CHECK(t.arch_count() == n);
      }
    }
  }
}

TEST_CASE("no-arch fusion path exists iff m <= k") {
  for (int k = 1; k <= 6; ++k)
    for (int m = 1; m <= 8; ++m) {
      if (m <= k)
        CHECK(enumerate_fusion_paths(k, m, m).size() == 1);
      else
        CHECK_THROWS_AS(enumerate_fusion_paths(k, m, m), std::invalid_argument);
    }
}

TEST_CASE("level truncation removes paths") {
  // k = 2, m = 4: the path through j = 3 is forbidden
  CHECK(enumerate_fusion_paths(2, 4, 2).size() == 2);
  CHECK(enumerate_fusion_paths(4, 4, 2).size() == 3);
  for (const auto& path : enumerate_fusion_paths(2, 6, 0)) {
    CHECK(path.front() == 0);
    for (std::size_t i = 1; i < path.size(); ++i) {
      CHECK(std::abs(path[i] - path[i - 1]) == 1);
      CHECK(path[i] >= 0);
      CHECK(path[i] <= 2);
    }
  }
  CHECK(enumerate_fusion_paths(3, 3, 2).empty());  // parity
}

TEST_CASE("arch topology validity and canonical form") {
  ArchTopology t{5, {{3, 4}, {1, 2}}, {5}};
  t.canonicalize();
  CHECK(t.to_string() == "(1,2)(3,4)|5");
  CHECK(t.is_valid());

  ArchTopology crossing{4, {{1, 3}, {2, 4}}, {}};
  CHECK_FALSE(crossing.is_valid());
  CHECK_THROWS_AS(crossing.canonicalize(), std::logic_error);

  ArchTopology covered_ray{3, {{1, 3}}, {2}};
  CHECK_FALSE(covered_ray.is_valid());

  ArchTopology nested{4, {{1, 4}, {2, 3}}, {}};
  CHECK(nested.is_valid());

  ArchTopology missing{3, {{1, 2}}, {}};
  CHECK_FALSE(missing.is_valid());
}

TEST_CASE("m = 3 configurations") {
  const auto topo = enumerate_arch_topologies(3, 1);
  REQUIRE(topo.size() == 2);
  CHECK(topo[0].to_string() == "(1,2)|3");
  CHECK(topo[1].to_string() == "(2,3)|1");
}
