#include "msle/experiments.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "msle/special.hpp"

namespace msle {

namespace {

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(12);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (level < 1) throw std::invalid_argument("config: level must be positive");
  if (positions.empty()) throw std::invalid_argument("config: no positions");
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i] > positions[i - 1]))
      throw std::invalid_argument("config: positions must be strictly increasing");
  if (!(dt > 0.0) || !(horizon > 0.0) || samples < 1 || !(delta_collide_factor > 0.0) || workers < 1)
    throw std::invalid_argument("config: dt, horizon, samples, delta and workers must be positive");
  if (!rates.empty()) {
    if (rates.size() != positions.size()) throw std::invalid_argument("config: one rate per driver");
    for (double a : rates)
      if (!(a > 0.0)) throw std::invalid_argument("config: rates must be positive");
  }
  if (kind == PartitionKind::Double && positions.size() != 2)
    throw std::invalid_argument("config: double channel needs two drivers");
  if (kind == PartitionKind::Triple && positions.size() != 3)
    throw std::invalid_argument("config: triple blocks need three drivers");
  partition();
}

PartitionFunction ExperimentConfig::partition() const {
  const ModelParams model = model_params(level);
  switch (kind) {
    case PartitionKind::Factorized:
      return PartitionFunction::factorized(model, static_cast<int>(positions.size()));
    case PartitionKind::Double:
      return PartitionFunction::double_channel(model, channel);
    default:
      return PartitionFunction::triple(model, block);
  }
}

double ExperimentConfig::delta_collide() const {
  const double spread = positions.size() > 1 ? positions.back() - positions.front() : 1.0;
  return delta_collide_factor * spread;
}

RunConfig ExperimentConfig::run_config() const {
  RunConfig rc;
  rc.dt = dt;
  rc.horizon = horizon;
  rc.delta_collide = delta_collide();
  rc.with_algebra = false;
  return rc;
}

DriverState ExperimentConfig::initial_state() const {
  return DriverState::initial(to_vector(positions), to_vector(rates));
}

std::string ExperimentConfig::digest() const {
  std::ostringstream os;
  os.precision(12);
  os << "k=" << level << " x=" << join(positions) << " z=" << partition().describe() << " dt=" << dt
     << " T=" << horizon << " delta=" << delta_collide() << " rates=" << join(rates)
     << " N=" << samples << " seed=" << seed;
  return os.str();
}

Interval wilson_interval(long successes, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double McEstimate::z_score(double reference) const {
  const double diff = estimate - reference;
  if (standard_error > 0.0) return diff / standard_error;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

McEstimate make_estimate(long successes, long samples) {
  McEstimate e;
  e.successes = successes;
  e.samples = samples;
  e.attempted = samples;
  if (samples > 0) {
    e.estimate = static_cast<double>(successes) / samples;
    e.standard_error = std::sqrt(e.estimate * (1.0 - e.estimate) / samples);
  }
  e.interval = wilson_interval(successes, samples);
  return e;
}

McEstimate mc_double_arch(const ExperimentConfig& config) {
  if (config.kind != PartitionKind::Double)
    throw std::invalid_argument("mc_double_arch: needs the double-channel partition function");
  config.validate();
  const PartitionFunction pf = config.partition();
  const RunConfig rc = config.run_config();
  const DriverState init = config.initial_state();
  const auto hits = run_indexed(config.samples, config.workers, [&](long i) -> int {
    SampleStream stream(config.seed, static_cast<std::uint64_t>(i));
    return run_drivers(init, pf, rc, stream).final_state.arches.empty() ? 0 : 1;
  });
  long n_hit = 0;
  for (int h : hits) n_hit += h;
  McEstimate e = make_estimate(n_hit, config.samples);
  e.seed = config.seed;
  e.digest = config.digest();
  return e;
}

McEstimate mc_triple_crossing(const ExperimentConfig& config) {
  if (config.kind != PartitionKind::Triple)
    throw std::invalid_argument("mc_triple_crossing: needs the triple-block partition function");
  config.validate();
  const PartitionFunction pf = config.partition();
  const RunConfig rc = config.run_config();
  const DriverState init = config.initial_state();
  // 1: arch (1,2) first, 2: arch (2,3) first, 0: unresolved
  const auto outcome = run_indexed(config.samples, config.workers, [&](long i) -> int {
    SampleStream stream(config.seed, static_cast<std::uint64_t>(i));
    const auto& arches = run_drivers(init, pf, rc, stream).final_state.arches;
    if (arches.empty()) return 0;
    return arches.front().first == 1 ? 1 : 2;
  });
  long c1 = 0, c2 = 0, open = 0;
  for (int o : outcome) (o == 1 ? c1 : o == 2 ? c2 : open)++;
  McEstimate e = make_estimate(c1, c1 + c2);
  e.unresolved = open;
  e.attempted = config.samples;
  e.seed = config.seed;
  e.digest = config.digest();
  return e;
}

std::map<ArchTopology, long> topology_census(const ExperimentConfig& config) {
  config.validate();
  const PartitionFunction pf = config.partition();
  const RunConfig rc = config.run_config();
  const DriverState init = config.initial_state();
  const auto topo = run_indexed(config.samples, config.workers, [&](long i) {
    SampleStream stream(config.seed, static_cast<std::uint64_t>(i));
    return run_drivers(init, pf, rc, stream).topology;
  });
  std::map<ArchTopology, long> census;
  for (const ArchTopology& t : topo) {
    if (!t.is_valid()) throw std::logic_error("topology_census: non-planar arch configuration");
    ++census[t];
  }
  return census;
}

McEstimate mc_bessel_hitting(const BesselOracleConfig& c) {
  if (!(c.y0 > 0.0) || !(c.dt > 0.0) || !(c.horizon > 0.0) || !(c.delta_collide > 0.0) ||
      !(c.kappa > 0.0) || c.samples < 1)
    throw std::invalid_argument("mc_bessel_hitting: parameters must be positive");
  const double drift = c.kappa * (c.d_eff - 1.0) / 2.0;
  const double sk = std::sqrt(c.kappa);
  const auto hits = run_indexed(c.samples, c.workers, [&](long i) -> int {
    SampleStream stream(c.seed, static_cast<std::uint64_t>(i));
    double y = c.y0;
    double t = 0.0;
    const double end = c.horizon * (1.0 - 1e-14);
    while (t < end) {
      double dt = std::min(c.dt, c.horizon - t);
      for (int h = 0; h < 40 && y < 10.0 * std::sqrt(c.kappa * dt); ++h) dt *= 0.5;
      y += sk * std::sqrt(dt) * stream.normal() + drift / y * dt;
      t += dt;
      if (y < c.delta_collide) return 1;
    }
    return 0;
  });
  long n_hit = 0;
  for (int h : hits) n_hit += h;
  McEstimate e = make_estimate(n_hit, c.samples);
  e.seed = c.seed;
  std::ostringstream os;
  os.precision(12);
  os << "bessel d=" << c.d_eff << " y0=" << c.y0 << " kappa=" << c.kappa << " dt=" << c.dt
     << " T=" << c.horizon << " delta=" << c.delta_collide << " N=" << c.samples << " seed=" << c.seed;
  e.digest = os.str();
  return e;
}

double bessel_hit_probability(double d_eff, double y0, double s) {
  if (d_eff >= 2.0) return 0.0;
  return 1.0 - regularized_gamma_p(1.0 - d_eff / 2.0, y0 * y0 / (2.0 * s));
}

double diffusion_crossing_probability(const ModelParams& model, double x,
                                      const std::vector<double>& rates) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("diffusion_crossing_probability: x outside (0,1)");
  const PartitionFunction pf = PartitionFunction::triple(model, TripleBlock::Sum);
  const double kappa = model.kappa_value();
  const Eigen::VectorXd a =
      rates.empty() ? Eigen::VectorXd::Constant(3, 1.0 / 3.0) : Eigen::VectorXd(to_vector(rates) / to_vector(rates).sum());

  // u = (x2 − x1)/(x3 − x1) at the normalized configuration (0, u, 1):
  // du = [Σ ∂u·μ + κ(a1(u−1) + a3 u)] dt + noise with variance κ[a1(u−1)² + a2 + a3u²] dt
  auto ratio = [&](double u) {
    Positions p(3);
    p << 0.0, u, 1.0;
    const Positions g = pf.grad_log(p);
    double mu[3];
    for (int i = 0; i < 3; ++i) {
      mu[i] = kappa * a(i) * g(i);
      for (int j = 0; j < 3; ++j)
        if (j != i) mu[i] += 2.0 * a(j) / (p(i) - p(j));
    }
    const double b = (u - 1.0) * mu[0] + mu[1] - u * mu[2] + kappa * (a(0) * (u - 1.0) + a(2) * u);
    const double s2 = kappa * (a(0) * (u - 1.0) * (u - 1.0) + a(1) + a(2) * u * u);
    return 2.0 * b / s2;
  };

  // logit variable w = log(u/(1−u)); du = u(1−u) dw keeps both integrands smooth
  const double w_max = 30.0;
  const double h = 1e-3;
  const int n = static_cast<int>(2.0 * w_max / h);
  auto u_of = [](double w) { return 1.0 / (1.0 + std::exp(-w)); };
  std::vector<double> phi_prime(n + 1), jac(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double w = -w_max + i * h;
    const double u = u_of(w);
    jac[i] = u * u_of(-w);
    phi_prime[i] = jac[i] > 0.0 ? ratio(u) * jac[i] : 0.0;
  }
  // s'(u) du = exp(−φ) jac dw, φ accumulated from the left end
  std::vector<double> dens(n + 1);
  double phi = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) phi += 0.5 * h * (phi_prime[i] + phi_prime[i - 1]);
    dens[i] = jac[i] * std::exp(-phi);
  }
  // beyond ±w_max the density is a pure exponential in w; add its tails
  auto tail = [&](int end, int inner) {
    const double rate = std::log(dens[end] / dens[inner]) / h;
    return rate < 0.0 ? dens[end] / -rate : 0.0;
  };
  double total = tail(0, 1) + tail(n, n - 1);
  double below = tail(0, 1);
  const double w0 = std::log(x / (1.0 - x));
  for (int i = 1; i <= n; ++i) {
    const double piece = 0.5 * h * (dens[i] + dens[i - 1]);
    const double wl = -w_max + (i - 1) * h;
    total += piece;
    if (wl + h <= w0)
      below += piece;
    else if (wl < w0)
      below += piece * (w0 - wl) / h;
  }
  // P(u → 0 first) = (s(1) − s(x)) / (s(1) − s(0))
  return (total - below) / total;
}

}  // namespace msle
