#ifndef MSLE_DYNAMICS_HPP
#define MSLE_DYNAMICS_HPP

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "msle/algebra.hpp"
#include "msle/partition.hpp"
#include "msle/rng.hpp"

namespace msle {

using cplx = std::complex<double>;

/// (time, {first, second}) with 1-based seed indices, first < second.
struct ArchEvent {
  double time;
  int first;
  int second;
};

/// Driving processes of m interfaces. Arrays are indexed by seed order and
/// keep their size when drivers are deactivated; inactive drivers keep
/// their last position and carry rate zero.
struct DriverState {
  Positions x;
  Eigen::VectorXd base_rates;  // as configured, used for renormalization
  Eigen::VectorXd rates;       // current a_α, Σ over active = 1
  Eigen::MatrixXd p;           // algebraic accumulators p^a_α, m × 3
  Eigen::VectorXd g_drift;     // scalar part of Σ dG_α (scalar channel)
  double t = 0.0;
  std::vector<bool> active;
  std::vector<ArchEvent> arches;

  /// Throws std::invalid_argument unless positions are strictly increasing
  /// and rates are positive (empty rates means a_α = 1/m).
  static DriverState initial(const Positions& x, const Eigen::VectorXd& rates = {});

  int size() const { return static_cast<int>(x.size()); }
  int active_count() const;
  std::vector<int> active_indices() const;
  Positions active_positions() const;
};

/// One Euler–Maruyama increment for every driver: dξ_α with variance
/// a_α dt and dϑ^a_α with variance a_α dt per component. Rows of inactive
/// drivers are zero.
struct NoiseIncrement {
  Eigen::VectorXd dxi;
  Eigen::MatrixXd dtheta;  // m × 3

  static NoiseIncrement zero(int m);
  static NoiseIncrement draw(const DriverState& s, double dt, SampleStream& stream,
                             bool with_algebra);
};

enum class StepStatus { Ok, Crossing };

struct StepResult {
  DriverState state;
  StepStatus status;
  int crossing_left = -1;  // zero-based index of the left driver of a crossed pair
};

/// dx_α = √κ dξ_α + κ a_α dt ∂_α log Z + 2 Σ_{β≠α} a_β dt / (x_α − x_β),
/// dp^a_α = √τ dϑ^a_α, and the scalar channel dG_α = τ a_α dt Σ_{β≠α} 1/(x_β − x_α),
/// over active drivers. pf must be defined for the active driver count.
/// Throws std::invalid_argument for dt ≤ 0. If active drivers change order
/// the step is returned with status Crossing and must be refined.
StepResult step_drivers(const DriverState& state, const PartitionFunction& pf, double dt,
                        const NoiseIncrement& noise, bool with_algebra = true);

/// If two adjacent active drivers are closer than delta_collide, records the
/// arch, deactivates the pair and renormalizes the remaining rates.
std::optional<ArchEvent> detect_arches(DriverState& state, double delta_collide);

/// Rays are the drivers still active.
ArchTopology topology_of(const DriverState& state);

/// One recorded Euler step: positions at both ends (linearly interpolated
/// in between), rates, and algebraic increments.
struct StepRecord {
  double t0;
  double dt;
  Positions x0;
  Positions x1;
  Eigen::VectorXd rates;
  Eigen::MatrixXd dp;  // m × 3
  Eigen::VectorXd dg;  // scalar channel increments
};

using RunHistory = std::vector<StepRecord>;

struct RunConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  double delta_collide = 1e-4;  // absolute
  bool with_algebra = true;
  bool record_history = false;
  int max_halvings = 40;
  int max_bisections = 30;
};

struct RunResult {
  DriverState final_state;
  RunHistory history;
  ArchTopology topology;
  long steps = 0;
};

/// Adaptive Euler–Maruyama run. dt is halved while the smallest active gap
/// is below 10√(κ dt); a step that reorders drivers is split along a Brownian
/// bridge, and a pair still crossing after max_bisections is treated as a
/// collision. After an arch the survivors follow pf.survivors(). Stops at
/// the horizon or when fewer than two drivers remain active.
RunResult run_drivers(const DriverState& initial, const PartitionFunction& pf,
                      const RunConfig& config, SampleStream& stream);

struct LoewnerPoint {
  cplx value;
  bool absorbed = false;
  double absorbed_at = 0.0;
};

/// g_t(z) at t = t_end by RK4 along the recorded drivers. A point that comes
/// within eps_hull of an active driver is absorbed and not integrated further.
LoewnerPoint evolve_loewner(const RunHistory& history, cplx z, double t_end,
                            double eps_hull = 1e-9);

/// lim z (g_t(z) − z) as z → ∞, from the integrated w = g − z at z = iR.
double hcap_coefficient(const RunHistory& history, double t_end, double radius = 1e7);

struct TracePoint {
  double t;
  cplx z;
  bool gap = false;  // reverse flow blew up; z is meaningless
};

struct TraceSet {
  double epsilon;
  std::vector<std::vector<TracePoint>> traces;  // seed order
};

/// Tips γ_α(s) ≈ g_s^{-1}(x_α(s) + iε) by reverse-time flow, at up to
/// samples_per_driver times per driver (plus the seed and the final time).
TraceSet extract_traces(const RunHistory& history, int drivers, double epsilon,
                        int samples_per_driver = 100);

/// g_s^{-1}(w) by integrating the Loewner flow backwards from s to 0.
std::optional<cplx> inverse_loewner(const RunHistory& history, cplx w, double s);

struct BesselReduction {
  Rational delta;
  Rational kappa;
  Rational d_eff;           // 2Δ + 4/κ + 1
  Rational drift;           // Δ + 2/κ
  bool recurrent() const { return d_eff < Rational(2); }
};

/// y = x_2 − x_1 under ds = κ dt obeys dy = dB_s + (Δ + 2/κ)/y ds.
BesselReduction bessel_reduction(const ModelParams& model, int channel_j);

/// Generator coefficients of y = x_2 − x_1 implied by step_drivers at the
/// given configuration: (drift per unit s, variance per unit s) with
/// ds = κ(a_1 + a_2) dt.
struct GeneratorCoefficients {
  double drift;
  double variance;
};
GeneratorCoefficients pair_generator(const PartitionFunction& pf, const Positions& x,
                                     const Eigen::VectorXd& rates);

/// θ^a_t(z) = ∫ Σ_α dp^a_α / (z − x_α), evaluated at the start of each step.
/// drift is the scalar-channel part; it enters the group element as
/// C_Λ · drift · 1 with C_Λ the spin-1/2 Casimir.
struct ThetaField {
  Eigen::Vector3cd noise;
  cplx drift;
};

/// At a point z outside the hull. Throws std::domain_error if z is absorbed.
ThetaField theta_field(const RunHistory& history, cplx z, double t_end);
/// At driver `alpha` (zero-based), omitting its own term.
ThetaField theta_field(const RunHistory& history, int alpha, double t_end);

/// exp(Σ_a θ^a T^a + C_Λ drift) in the spin-1/2 representation.
Eigen::Matrix2cd group_element(const ThetaField& theta);

}  // namespace msle

#endif
