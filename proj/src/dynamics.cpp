#include "msle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace msle {

namespace {

constexpr double kFlowStepFactor = 0.02;   // RK4 step ≤ factor · (distance to nearest driver)²
constexpr long kMaxFlowSubsteps = 20'000'000;
constexpr double kBlowUp = 1e8;

double min_active_gap(const DriverState& s) {
  double gap = std::numeric_limits<double>::infinity();
  int prev = -1;
  for (int i = 0; i < s.size(); ++i) {
    if (!s.active[i]) continue;
    if (prev >= 0) gap = std::min(gap, s.x(i) - s.x(prev));
    prev = i;
  }
  return gap;
}

void renormalize_rates(DriverState& s) {
  double total = 0.0;
  for (int i = 0; i < s.size(); ++i)
    if (s.active[i]) total += s.base_rates(i);
  for (int i = 0; i < s.size(); ++i) s.rates(i) = s.active[i] && total > 0 ? s.base_rates(i) / total : 0.0;
}

ArchEvent close_pair(DriverState& s, int left, int right) {
  s.active[left] = false;
  s.active[right] = false;
  renormalize_rates(s);
  ArchEvent ev{s.t, left + 1, right + 1};
  s.arches.push_back(ev);
  return ev;
}

int next_active(const DriverState& s, int i) {
  for (int j = i + 1; j < s.size(); ++j)
    if (s.active[j]) return j;
  return -1;
}

const PartitionFunction& partition_for(const PartitionFunction& pf, int active,
                                       std::optional<PartitionFunction>& cache) {
  if (active == pf.driver_count()) return pf;
  if (!cache || cache->driver_count() != active) cache = pf.survivors(active);
  return *cache;
}

// Loewner velocity Σ_α 2a_α / (z − x_α(s)) inside one record, plus the
// distance to the nearest growing driver.
struct Velocity {
  cplx v;
  double nearest;
};

Velocity loewner_velocity(const StepRecord& r, cplx z, double s) {
  const double frac = r.dt > 0 ? (s - r.t0) / r.dt : 0.0;
  Velocity out{0.0, std::numeric_limits<double>::infinity()};
  for (Eigen::Index a = 0; a < r.rates.size(); ++a) {
    if (r.rates(a) <= 0.0) continue;
    const double xa = r.x0(a) + frac * (r.x1(a) - r.x0(a));
    const cplx d = z - xa;
    out.v += 2.0 * r.rates(a) / d;
    out.nearest = std::min(out.nearest, std::abs(d));
  }
  return out;
}

cplx rk4(const StepRecord& r, cplx z, double s, double h) {
  const cplx k1 = loewner_velocity(r, z, s).v;
  const cplx k2 = loewner_velocity(r, z + 0.5 * h * k1, s + 0.5 * h).v;
  const cplx k3 = loewner_velocity(r, z + 0.5 * h * k2, s + 0.5 * h).v;
  const cplx k4 = loewner_velocity(r, z + h * k3, s + h).v;
  return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

DriverState DriverState::initial(const Positions& x, const Eigen::VectorXd& rates) {
  const Eigen::Index m = x.size();
  if (m < 1) throw std::invalid_argument("DriverState: need at least one driver");
  for (Eigen::Index i = 1; i < m; ++i)
    if (!(x(i) > x(i - 1)))
      throw std::invalid_argument("DriverState: positions must be strictly increasing");
  DriverState s;
  s.x = x;
  if (rates.size() == 0) {
    s.base_rates = Eigen::VectorXd::Constant(m, 1.0 / m);
  } else {
    if (rates.size() != m) throw std::invalid_argument("DriverState: one rate per driver");
    if ((rates.array() <= 0.0).any()) throw std::invalid_argument("DriverState: rates must be positive");
    s.base_rates = rates / rates.sum();
  }
  s.rates = s.base_rates;
  s.p = Eigen::MatrixXd::Zero(m, 3);
  s.g_drift = Eigen::VectorXd::Zero(m);
  s.active.assign(m, true);
  return s;
}

int DriverState::active_count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

std::vector<int> DriverState::active_indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (active[i]) out.push_back(i);
  return out;
}

Positions DriverState::active_positions() const {
  const auto idx = active_indices();
  Positions out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = x(idx[i]);
  return out;
}

NoiseIncrement NoiseIncrement::zero(int m) {
  return {Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, 3)};
}

NoiseIncrement NoiseIncrement::draw(const DriverState& s, double dt, SampleStream& stream,
                                    bool with_algebra) {
  NoiseIncrement n = zero(s.size());
  for (int i = 0; i < s.size(); ++i) {
    if (!s.active[i]) continue;
    const double sd = std::sqrt(s.rates(i) * dt);
    n.dxi(i) = sd * stream.normal();
    if (with_algebra)
      for (int a = 0; a < 3; ++a) n.dtheta(i, a) = sd * stream.normal();
  }
  return n;
}

StepResult step_drivers(const DriverState& state, const PartitionFunction& pf, double dt,
                        const NoiseIncrement& noise, bool with_algebra) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_drivers: dt must be positive");
  const auto idx = state.active_indices();
  const int n = static_cast<int>(idx.size());
  if (pf.driver_count() != n)
    throw std::invalid_argument("step_drivers: partition function does not match active drivers");

  const double kappa = pf.model().kappa_value();
  const double tau = pf.model().tau_value();
  Positions xa(n);
  for (int i = 0; i < n; ++i) xa(i) = state.x(idx[i]);
  const Positions grad = n > 0 ? pf.grad_log(xa) : Positions();

  StepResult out{state, StepStatus::Ok};
  DriverState& next = out.state;
  for (int i = 0; i < n; ++i) {
    const int alpha = idx[i];
    const double a = state.rates(alpha);
    double drift = kappa * a * grad(i);
    double pull = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      drift += 2.0 * state.rates(idx[j]) / (xa(i) - xa(j));
      pull += 1.0 / (xa(j) - xa(i));
    }
    next.x(alpha) = xa(i) + std::sqrt(kappa) * noise.dxi(alpha) + drift * dt;
    if (with_algebra) {
      next.p.row(alpha) += std::sqrt(tau) * noise.dtheta.row(alpha);
      next.g_drift(alpha) += tau * a * dt * pull;
    }
  }
  next.t = state.t + dt;
  for (int i = 0; i + 1 < n; ++i)
    if (!(next.x(idx[i + 1]) > next.x(idx[i]))) {
      out.status = StepStatus::Crossing;
      out.crossing_left = idx[i];
      break;
    }
  return out;
}

std::optional<ArchEvent> detect_arches(DriverState& state, double delta_collide) {
  int best = -1;
  double best_gap = delta_collide;
  for (int i = 0; i < state.size(); ++i) {
    if (!state.active[i]) continue;
    const int j = next_active(state, i);
    if (j < 0) break;
    const double gap = state.x(j) - state.x(i);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  if (best < 0) return std::nullopt;
  return close_pair(state, best, next_active(state, best));
}

ArchTopology topology_of(const DriverState& state) {
  ArchTopology topo;
  topo.m = state.size();
  for (const ArchEvent& ev : state.arches) topo.pairs.emplace_back(ev.first, ev.second);
  for (int i = 0; i < state.size(); ++i)
    if (state.active[i]) topo.rays.push_back(i + 1);
  topo.canonicalize();
  return topo;
}

namespace {

struct Runner {
  const PartitionFunction& pf;
  const RunConfig& config;
  SampleStream& stream;
  RunResult& result;
  std::optional<PartitionFunction> cache;

  void record(const DriverState& before, const DriverState& after, double dt) {
    ++result.steps;
    if (!config.record_history) return;
    StepRecord r{before.t, dt, before.x, after.x, before.rates, after.p - before.p,
                 after.g_drift - before.g_drift};
    result.history.push_back(std::move(r));
  }

  // Advances by dt with the given increment; returns false if an arch closed
  // part-way, in which case the remainder of the increment is discarded.
  bool advance(DriverState& s, double dt, const NoiseIncrement& noise, int depth) {
    const PartitionFunction& cur = partition_for(pf, s.active_count(), cache);
    StepResult r = step_drivers(s, cur, dt, noise, config.with_algebra);
    if (r.status == StepStatus::Ok) {
      record(s, r.state, dt);
      s = std::move(r.state);
      return true;
    }
    if (depth >= config.max_bisections) {
      const int left = r.crossing_left;
      const int right = next_active(s, left);
      const double meet = 0.5 * (r.state.x(left) + r.state.x(right));
      r.state.x(left) = meet;
      r.state.x(right) = meet;
      record(s, r.state, dt);
      s = std::move(r.state);
      close_pair(s, left, right);
      return false;
    }
    // Brownian bridge: split the increment into two conditionally exact halves
    NoiseIncrement first = NoiseIncrement::zero(s.size());
    for (int i = 0; i < s.size(); ++i) {
      if (!s.active[i]) continue;
      const double sd = std::sqrt(s.rates(i) * dt / 4.0);
      first.dxi(i) = 0.5 * noise.dxi(i) + sd * stream.normal();
      if (config.with_algebra)
        for (int a = 0; a < 3; ++a) first.dtheta(i, a) = 0.5 * noise.dtheta(i, a) + sd * stream.normal();
    }
    const NoiseIncrement second{noise.dxi - first.dxi, noise.dtheta - first.dtheta};
    if (!advance(s, 0.5 * dt, first, depth + 1)) return false;
    if (detect_arches(s, config.delta_collide)) return false;
    return advance(s, 0.5 * dt, second, depth + 1);
  }
};

}  // namespace

RunResult run_drivers(const DriverState& initial, const PartitionFunction& pf,
                      const RunConfig& config, SampleStream& stream) {
  if (!(config.dt > 0.0) || !(config.horizon > 0.0) || !(config.delta_collide > 0.0))
    throw std::invalid_argument("run_drivers: dt, horizon and delta_collide must be positive");
  RunResult result;
  Runner runner{pf, config, stream, result, std::nullopt};
  DriverState s = initial;
  const double kappa = pf.model().kappa_value();
  while (detect_arches(s, config.delta_collide)) {
  }
  const double end = config.horizon * (1.0 - 1e-14);
  while (s.t < end && s.active_count() >= 1) {
    if (s.active_count() < 2 && !config.record_history) break;
    double dt = std::min(config.dt, config.horizon - s.t);
    const double gap = min_active_gap(s);
    for (int h = 0; h < config.max_halvings && gap < 10.0 * std::sqrt(kappa * dt); ++h) dt *= 0.5;
    const NoiseIncrement noise = NoiseIncrement::draw(s, dt, stream, config.with_algebra);
    runner.advance(s, dt, noise, 0);
    while (detect_arches(s, config.delta_collide)) {
    }
  }
  result.final_state = s;
  result.topology = topology_of(s);
  return result;
}

LoewnerPoint evolve_loewner(const RunHistory& history, cplx z, double t_end, double eps_hull) {
  if (!(z.imag() > 0.0)) throw std::domain_error("evolve_loewner: z must lie in the upper half plane");
  LoewnerPoint out{z};
  for (const StepRecord& r : history) {
    if (r.t0 >= t_end) break;
    const double stop = std::min(r.t0 + r.dt, t_end);
    double s = r.t0;
    while (s < stop) {
      const Velocity v = loewner_velocity(r, out.value, s);
      if (v.nearest < eps_hull) {
        out.absorbed = true;
        out.absorbed_at = s;
        return out;
      }
      const double h = std::min(stop - s, kFlowStepFactor * v.nearest * v.nearest);
      out.value = rk4(r, out.value, s, h);
      s += h;
    }
  }
  return out;
}

double hcap_coefficient(const RunHistory& history, double t_end, double radius) {
  const cplx z0(0.0, radius);
  cplx w = 0.0;
  auto velocity = [&](const StepRecord& r, cplx wv, double s) {
    const double frac = r.dt > 0 ? (s - r.t0) / r.dt : 0.0;
    cplx v = 0.0;
    for (Eigen::Index a = 0; a < r.rates.size(); ++a) {
      if (r.rates(a) <= 0.0) continue;
      v += 2.0 * r.rates(a) / (z0 + wv - (r.x0(a) + frac * (r.x1(a) - r.x0(a))));
    }
    return v;
  };
  for (const StepRecord& r : history) {
    if (r.t0 >= t_end) break;
    const double h = std::min(r.t0 + r.dt, t_end) - r.t0;
    const cplx k1 = velocity(r, w, r.t0);
    const cplx k2 = velocity(r, w + 0.5 * h * k1, r.t0 + 0.5 * h);
    const cplx k3 = velocity(r, w + 0.5 * h * k2, r.t0 + 0.5 * h);
    const cplx k4 = velocity(r, w + h * k3, r.t0 + h);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  // z·w = hcap + O(1/z); the O(1/z) term is imaginary on the imaginary axis
  return (z0 * w).real();
}

std::optional<cplx> inverse_loewner(const RunHistory& history, cplx w, double s_end) {
  cplx z = w;
  long substeps = 0;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    const StepRecord& r = *it;
    if (r.t0 >= s_end) continue;
    double s = std::min(r.t0 + r.dt, s_end);
    while (s > r.t0) {
      const Velocity v = loewner_velocity(r, z, s);
      const double h = std::min(s - r.t0, kFlowStepFactor * v.nearest * v.nearest);
      z = rk4(r, z, s, -h);
      s -= h;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kBlowUp ||
          ++substeps > kMaxFlowSubsteps)
        return std::nullopt;
    }
  }
  return z;
}

TraceSet extract_traces(const RunHistory& history, int drivers, double epsilon,
                        int samples_per_driver) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("extract_traces: epsilon must be positive");
  TraceSet out{epsilon, std::vector<std::vector<TracePoint>>(drivers)};
  if (history.empty()) return out;
  for (int a = 0; a < drivers; ++a) {
    auto& poly = out.traces[a];
    poly.push_back({0.0, cplx(history.front().x0(a), 0.0)});
    // records during which this driver grows
    std::size_t last = 0;
    bool grew = false;
    for (std::size_t i = 0; i < history.size(); ++i)
      if (history[i].rates(a) > 0.0) {
        last = i;
        grew = true;
      }
    if (!grew) continue;
    const double t_last = history[last].t0 + history[last].dt;
    const int samples = std::max(1, samples_per_driver);
    std::size_t cursor = 0;
    for (int j = 1; j <= samples; ++j) {
      const double target = t_last * j / samples;
      while (cursor < last && history[cursor].t0 + history[cursor].dt < target) ++cursor;
      const StepRecord& r = history[cursor];
      const double s = r.t0 + r.dt;
      if (!poly.empty() && s <= poly.back().t) continue;
      const auto tip = inverse_loewner(history, cplx(r.x1(a), epsilon), s);
      if (tip)
        poly.push_back({s, *tip});
      else
        poly.push_back({s, cplx(0.0, 0.0), true});
    }
  }
  return out;
}

BesselReduction bessel_reduction(const ModelParams& model, int channel_j) {
  const Rational delta = model.delta(channel_j);
  const Rational four_over_kappa = Rational(4) / model.kappa;
  return {delta, model.kappa, 2 * delta + four_over_kappa + 1, delta + four_over_kappa / 2};
}

GeneratorCoefficients pair_generator(const PartitionFunction& pf, const Positions& x,
                                     const Eigen::VectorXd& rates) {
  if (x.size() != 2) throw std::invalid_argument("pair_generator: needs two drivers");
  const DriverState s = DriverState::initial(x, rates);
  const double dt = 1.0;
  const auto base = step_drivers(s, pf, dt, NoiseIncrement::zero(2), false).state.x;
  const double drift_t = (base(1) - base(0)) - (x(1) - x(0));
  double variance_t = 0.0;
  for (int a = 0; a < 2; ++a) {
    NoiseIncrement unit = NoiseIncrement::zero(2);
    unit.dxi(a) = 1.0;
    const auto moved = step_drivers(s, pf, dt, unit, false).state.x;
    const double coeff = (moved(1) - moved(0)) - (base(1) - base(0));
    variance_t += coeff * coeff * s.rates(a);
  }
  const double ds = pf.model().kappa_value() * (s.rates(0) + s.rates(1)) * dt;
  return {drift_t / ds, variance_t / ds};
}

namespace {

ThetaField accumulate_theta(const RunHistory& history, double t_end, int skip,
                            const std::function<cplx(const StepRecord&)>& point) {
  ThetaField th{Eigen::Vector3cd::Zero(), 0.0};
  for (const StepRecord& r : history) {
    if (r.t0 + r.dt > t_end * (1.0 + 1e-12)) break;
    const cplx z = point(r);
    for (Eigen::Index a = 0; a < r.rates.size(); ++a) {
      if (a == skip || r.rates(a) <= 0.0) continue;
      const cplx inv = 1.0 / (z - r.x0(a));
      th.noise += r.dp.row(a).transpose().cast<cplx>() * inv;
      th.drift += r.dg(a) * inv;
    }
  }
  return th;
}

}  // namespace

ThetaField theta_field(const RunHistory& history, cplx z, double t_end) {
  if (evolve_loewner(history, z, t_end).absorbed)
    throw std::domain_error("theta_field: point lies inside the hull");
  return accumulate_theta(history, t_end, -1, [z](const StepRecord&) { return z; });
}

ThetaField theta_field(const RunHistory& history, int alpha, double t_end) {
  if (!history.empty() && (alpha < 0 || alpha >= history.front().x0.size()))
    throw std::out_of_range("theta_field: driver index");
  return accumulate_theta(history, t_end, alpha,
                          [alpha](const StepRecord& r) { return cplx(r.x0(alpha), 0.0); });
}

Eigen::Matrix2cd group_element(const ThetaField& theta) {
  const cplx i(0.0, 1.0);
  // Σ θ^a σ^a / √2
  Eigen::Matrix2cd m;
  m << theta.noise(2), theta.noise(0) - i * theta.noise(1), theta.noise(0) + i * theta.noise(1),
      -theta.noise(2);
  m /= std::sqrt(2.0);
  const cplx mu = std::sqrt(theta.noise.array().square().sum() / 2.0);
  const cplx sinhc = std::abs(mu) < 1e-8 ? 1.0 + mu * mu / 6.0 : std::sinh(mu) / mu;
  const Eigen::Matrix2cd e = std::cosh(mu) * Eigen::Matrix2cd::Identity() + sinhc * m;
  const double casimir = 1.5;
  return std::exp(casimir * theta.drift) * e;
}

}  // namespace msle
