#ifndef MSLE_ALGEBRA_HPP
#define MSLE_ALGEBRA_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace msle {

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& r);

/// Dimension, dual Coxeter number and Casimir data of a simple Lie algebra,
/// in the normalization where long roots have squared length 2.
struct GeneralAlgebraData {
  int dim_g;
  int dual_coxeter;

  /// Central charge k·dim g / (k + h∨) of the Sugawara construction.
  Rational central_charge(int level) const;

  /// Conformal weight (λ, λ+2ρ) / (2(k + h∨)).
  Rational conformal_weight(const Rational& casimir, int level) const;
};

GeneralAlgebraData su2_data();

/// Casimir eigenvalue (jΛ, jΛ+2ρ) = j(j+2)/2 of the su(2) irrep with
/// highest weight jΛ (spin j/2).
Rational su2_casimir(int j);

/// Level-k su(2) WZW data together with the SLE parameters fixed by the
/// level-2 null state of the spin-1/2 boundary field.
///
/// k = 1 only constrains κ + 2τ = 4; the convention κ = 4, τ = 0 is stored
/// here so that nothing downstream has to re-derive it.
struct ModelParams {
  int level;
  Rational kappa;
  Rational tau;
  Rational central_charge;

  /// h_{jΛ} = j(j+2) / (4(k+2)).
  Rational weight_of(int j) const;

  /// Two-point exponent Δ = h_{λ3} − 2h_Λ for the fusion channel
  /// λ3 = channel_j·Λ, channel_j ∈ {0, 2}.
  Rational delta(int channel_j) const;

  double kappa_value() const { return to_double(kappa); }
  double tau_value() const { return to_double(tau); }
};

/// Throws std::invalid_argument for k < 1.
ModelParams model_params(int k);

std::int64_t binomial(int n, int r);

/// c_{m,n} = C(m,n) − C(m,n−1): multiplicity of L_{(m−2n)Λ} in L_Λ^{⊗m}.
/// Throws std::invalid_argument unless 0 ≤ n ≤ ⌊m/2⌋.
std::int64_t kostka(int m, int n);

/// A planar pairing of m ordered boundary points: n arches plus m − 2n rays
/// to infinity. Indices are 1-based.
struct ArchTopology {
  int m = 0;
  std::vector<std::pair<int, int>> pairs;  // each (a, b) with a < b, sorted
  std::vector<int> rays;                   // sorted

  int arch_count() const { return static_cast<int>(pairs.size()); }

  /// Every index used exactly once, no crossing pairs, no ray under an arch.
  bool is_valid() const;

  /// Sorts pairs and rays; throws std::logic_error if the result is invalid.
  void canonicalize();

  /// e.g. "(1,2)(3,4)|5".
  std::string to_string() const;

  auto operator<=>(const ArchTopology&) const = default;
};

/// All non-crossing configurations of n arches among m points, in
/// lexicographic order of their pairings. Size equals kostka(m, n).
std::vector<ArchTopology> enumerate_arch_topologies(int m, int n);

/// j_0 = 0, j_1 = 1, …, j_m: spin labels along successive fusions with the
/// spin-1/2 field.
using FusionPath = std::vector<int>;

/// Walks 0 → j_final of m ±1 steps confined to [0, k] (level-k fusion of
/// spin-1/2 fields). Throws std::invalid_argument if j_final > k.
std::vector<FusionPath> enumerate_fusion_paths(int k, int m, int j_final);

/// Multiplicities of L_{jΛ} in L_Λ^{⊗m} from the weight multiset of the
/// 2^m tensor basis states. Independent of the path and Kostka counts.
std::map<int, std::int64_t> tensor_decomposition_oracle(int m);

}  // namespace msle

#endif
