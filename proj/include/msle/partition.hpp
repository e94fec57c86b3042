#ifndef MSLE_PARTITION_HPP
#define MSLE_PARTITION_HPP

#include <array>
#include <memory>
#include <utility>

#include <Eigen/Core>

#include "msle/algebra.hpp"
#include "msle/special.hpp"

namespace msle {

using Positions = Eigen::VectorXd;
using PositionsRef = Eigen::Ref<const Eigen::VectorXd>;

/// Cross-ratio of (x1, x2, x3, ∞): the image of x2 under the Möbius map
/// sending x1 → 0, x3 → 1, ∞ → ∞.
struct CrossRatio {
  double value;

  static CrossRatio of(double x1, double x2, double x3) { return {(x2 - x1) / (x3 - x1)}; }
};

enum class TripleBlock { C1, C2, Sum };

/// Evaluations of the triple-SLE blocks are clamped to this band; outside,
/// the endpoint power laws take over.
inline constexpr double kBlockGuard = 1e-6;

/// Four-point spin-1/2 conformal blocks at level k:
///   Z_C1 = F1⁻ + r F1⁺,  Z_C2 = F2⁻ + r F2⁺,  r = (1 − c_−)/c_+,
/// each F = prefactor · x^p (1−x)^q ₂F₁(a, b; c; x).
class TripleBlockEvaluator {
 public:
  struct Constituent {
    double prefactor;
    double x_exponent;
    double one_minus_x_exponent;
    Hypergeometric2F1<double> series;
    Hypergeometric2F1<double> series_derivative;

    double value(double x) const;
    double derivative(double x) const;
    /// value and derivative sharing the envelope evaluation
    std::pair<double, double> jet(double x) const;
  };

  struct Pair {
    double c1;
    double c2;
  };

  explicit TripleBlockEvaluator(const ModelParams& model);

  int level() const { return level_; }
  double mixing() const { return mixing_; }

  /// Constituents in the order F1⁻, F1⁺, F2⁻, F2⁺.
  const std::array<Constituent, 4>& constituents() const { return parts_; }

  /// Unclamped values and x-derivatives on (0, 1).
  Pair values_raw(double x) const;
  Pair derivatives_raw(double x) const;

  /// Values and derivatives with the endpoint guard band applied.
  Pair values(double x) const;
  Pair derivatives(double x) const;

  struct Jet {
    Pair value;
    Pair derivative;
  };
  /// values() and derivatives() in one pass.
  Jet jet(double x) const;

  /// Leading exponents: Z_C1 ~ x^{−2h_Λ} at 0 and ~ (1−x)^{subleading} at 1,
  /// mirrored for Z_C2.
  double leading_exponent() const { return -2.0 * h_; }
  double subleading_exponent() const { return subleading_; }

 private:
  int level_;
  double h_;
  double subleading_;
  double mixing_;
  std::array<Constituent, 4> parts_;
};

/// Boundary correlator Z of the bcc fields, with the field at infinity
/// stripped of its |x|^{2h} normalization.
class PartitionFunction {
 public:
  enum class Kind { Factorized, DoubleChannel, TripleBlock };

  /// ∏_{i<j} |x_i − x_j|^{1/(2(k+2))}; throws std::invalid_argument if m > k.
  static PartitionFunction factorized(const ModelParams& model, int m);
  /// |x1 − x2|^Δ with Δ = h_{jΛ} − 2h_Λ, channel_j ∈ {0, 2}.
  static PartitionFunction double_channel(const ModelParams& model, int channel_j);
  /// (x3 − x1)^{−2h_Λ} Z_block((x2 − x1)/(x3 − x1)).
  static PartitionFunction triple(const ModelParams& model, TripleBlock block);

  Kind kind() const { return kind_; }
  const ModelParams& model() const { return model_; }
  int driver_count() const { return drivers_; }
  int channel() const { return channel_; }
  TripleBlock block() const { return block_; }

  /// Z at strictly increasing positions. Throws std::runtime_error if the
  /// result is not positive and finite.
  double value(const PositionsRef& x) const;

  /// ∂ log Z / ∂ x_alpha, alpha zero-based.
  double log_derivative(const PositionsRef& x, int alpha) const;

  /// All partial derivatives of log Z at once.
  Positions grad_log(const PositionsRef& x) const;

  /// Partition function governing `count` drivers left over after arches
  /// have closed: the factorized (no-arch) correlator of the survivors.
  PartitionFunction survivors(int count) const;

  std::string describe() const;

 private:
  PartitionFunction(const ModelParams& model, Kind kind, int drivers);
  void check_positions(const PositionsRef& x) const;

  ModelParams model_;
  Kind kind_;
  int drivers_;
  int channel_ = 0;
  TripleBlock block_ = TripleBlock::Sum;
  double exponent_ = 0.0;  // pair exponent for Factorized / DoubleChannel
  std::shared_ptr<const TripleBlockEvaluator> blocks_;
};

double factorized_z(const ModelParams& model, const PositionsRef& x);
double double_z(const ModelParams& model, int channel_j, double x1, double x2);

struct BlockValues {
  double z_c1;
  double z_c2;
};

/// Throws std::domain_error unless 0 < x < 1.
BlockValues triple_blocks(const ModelParams& model, CrossRatio x);

struct CrossingProbability {
  double p_c1;
  double p_c2;
};

/// P[C1] = Z_C1 / (Z_C1 + Z_C2), P[C2] = 1 − P[C1].
CrossingProbability crossing_probability(const ModelParams& model, CrossRatio x);

double log_derivative(const PartitionFunction& pf, int alpha, const PositionsRef& x);

struct KzResidual {
  /// Max relative residual of x(1−x)F'' + [c − (a+b+1)x]F' − abF = 0 over
  /// the hypergeometric constituents of the block (finite differences).
  double ode;
  /// Max deviation of the extrapolated endpoint log-slopes from the
  /// exponents {−2h_Λ, h_{2Λ} − 2h_Λ} (or 1 − 2h_Λ when k = 1).
  double exponent;
};

KzResidual kz_residual(const ModelParams& model, TripleBlock block, CrossRatio x);

/// d log Z_block / d log x as x → 0 (or d log Z_block / d log(1−x) as x → 1),
/// extrapolated from slopes at 1e−4, 1e−5 and 1e−6 with Aitken's Δ².
double endpoint_log_slope(const TripleBlockEvaluator& blocks, TripleBlock block, bool at_zero);

}  // namespace msle

#endif
