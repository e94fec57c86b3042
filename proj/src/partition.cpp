#include "msle/partition.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msle {

namespace {

Hypergeometric2F1<double> make_series(double a, double b, double c) { return {a, b, c}; }

TripleBlockEvaluator::Constituent make_part(double prefactor, double p, double q, double a,
                                            double b, double c) {
  auto f = make_series(a, b, c);
  return {prefactor, p, q, f, f.derivative_function()};
}

double checked_positive(double z) {
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::runtime_error("partition function is not positive and finite");
  return z;
}

}  // namespace

double TripleBlockEvaluator::Constituent::value(double x) const {
  return prefactor * std::pow(x, x_exponent) * std::pow(1.0 - x, one_minus_x_exponent) * series(x);
}

double TripleBlockEvaluator::Constituent::derivative(double x) const {
  const double envelope =
      prefactor * std::pow(x, x_exponent) * std::pow(1.0 - x, one_minus_x_exponent);
  const double h = series(x);
  const double dh = series.derivative_factor() * series_derivative(x);
  return envelope * ((x_exponent / x - one_minus_x_exponent / (1.0 - x)) * h + dh);
}

namespace {

std::array<TripleBlockEvaluator::Constituent, 4> build_parts(int level, double h) {
  const double k = level;
  const double q = 1.0 / (k + 2);
  // h_{2Λ} − 2h_Λ = 1/(2(k+2)); at k = 1 it only enters the vanishing F⁺ terms
  const double e = 2.0 * q - 2.0 * h;
  return {make_part(1.0, -2.0 * h, e, q, -q, k * q),
          make_part(1.0, e, e, q, 3.0 * q, (k + 4) * q),
          make_part(1.0 / k, 1.0 - 2.0 * h, e, (k + 3) * q, (k + 1) * q, 2.0 * (k + 1) * q),
          make_part(-2.0, e, e, q, 3.0 * q, 2.0 * q)};
}

}  // namespace

std::pair<double, double> TripleBlockEvaluator::Constituent::jet(double x) const {
  const double envelope =
      prefactor * std::pow(x, x_exponent) * std::pow(1.0 - x, one_minus_x_exponent);
  const double h = series(x);
  const double dh = series.derivative_factor() * series_derivative(x);
  return {envelope * h,
          envelope * ((x_exponent / x - one_minus_x_exponent / (1.0 - x)) * h + dh)};
}

TripleBlockEvaluator::TripleBlockEvaluator(const ModelParams& model)
    : level_(model.level),
      h_(to_double(model.weight_of(1))),
      parts_(build_parts(model.level, h_)) {
  const ConnectionCoefficients cc = connection_coefficients(level_);
  mixing_ = (1.0 - cc.c_minus) / cc.c_plus;
  // k = 1: the mixing vanishes and Z_C2 starts at x^{1 − 2h_Λ}
  const double e = 2.0 / (level_ + 2) - 2.0 * h_;
  subleading_ = std::abs(mixing_) > 1e-12 ? e : 1.0 - 2.0 * h_;
}

TripleBlockEvaluator::Pair TripleBlockEvaluator::values_raw(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("triple blocks: cross-ratio outside (0,1)");
  return {parts_[0].value(x) + mixing_ * parts_[1].value(x),
          parts_[2].value(x) + mixing_ * parts_[3].value(x)};
}

TripleBlockEvaluator::Pair TripleBlockEvaluator::derivatives_raw(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("triple blocks: cross-ratio outside (0,1)");
  return {parts_[0].derivative(x) + mixing_ * parts_[1].derivative(x),
          parts_[2].derivative(x) + mixing_ * parts_[3].derivative(x)};
}

TripleBlockEvaluator::Pair TripleBlockEvaluator::values(double x) const {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("triple blocks: cross-ratio outside (0,1)");
  if (x < kBlockGuard) {
    const Pair edge = values_raw(kBlockGuard);
    const double r = x / kBlockGuard;
    return {edge.c1 * std::pow(r, leading_exponent()), edge.c2 * std::pow(r, subleading_)};
  }
  if (x > 1.0 - kBlockGuard) {
    const Pair edge = values_raw(1.0 - kBlockGuard);
    const double r = (1.0 - x) / kBlockGuard;
    return {edge.c1 * std::pow(r, subleading_), edge.c2 * std::pow(r, leading_exponent())};
  }
  return values_raw(x);
}

TripleBlockEvaluator::Pair TripleBlockEvaluator::derivatives(double x) const {
  if (x < kBlockGuard || x > 1.0 - kBlockGuard) {
    const Pair v = values(x);
    if (x < kBlockGuard) return {v.c1 * leading_exponent() / x, v.c2 * subleading_ / x};
    return {-v.c1 * subleading_ / (1.0 - x), -v.c2 * leading_exponent() / (1.0 - x)};
  }
  return derivatives_raw(x);
}

TripleBlockEvaluator::Jet TripleBlockEvaluator::jet(double x) const {
  if (x < kBlockGuard || x > 1.0 - kBlockGuard) return {values(x), derivatives(x)};
  std::array<std::pair<double, double>, 4> j;
  for (int i = 0; i < 4; ++i) j[i] = parts_[i].jet(x);
  return {{j[0].first + mixing_ * j[1].first, j[2].first + mixing_ * j[3].first},
          {j[0].second + mixing_ * j[1].second, j[2].second + mixing_ * j[3].second}};
}

PartitionFunction::PartitionFunction(const ModelParams& model, Kind kind, int drivers)
    : model_(model), kind_(kind), drivers_(drivers) {}

PartitionFunction PartitionFunction::factorized(const ModelParams& model, int m) {
  if (m < 0) throw std::invalid_argument("factorized: negative driver count");
  if (m > model.level)
    throw std::invalid_argument("factorized: no-arch correlator requires m <= k");
  PartitionFunction pf(model, Kind::Factorized, m);
  pf.exponent_ = 1.0 / (2.0 * (model.level + 2));
  return pf;
}

PartitionFunction PartitionFunction::double_channel(const ModelParams& model, int channel_j) {
  PartitionFunction pf(model, Kind::DoubleChannel, 2);
  pf.channel_ = channel_j;
  pf.exponent_ = to_double(model.delta(channel_j));
  return pf;
}

PartitionFunction PartitionFunction::triple(const ModelParams& model, TripleBlock block) {
  PartitionFunction pf(model, Kind::TripleBlock, 3);
  pf.block_ = block;
  pf.blocks_ = std::make_shared<const TripleBlockEvaluator>(model);
  return pf;
}

PartitionFunction PartitionFunction::survivors(int count) const {
  return factorized(model_, count);
}

std::string PartitionFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Factorized:
      os << "factorized(m=" << drivers_ << ")";
      break;
    case Kind::DoubleChannel:
      os << "double(channel=" << channel_ << ")";
      break;
    case Kind::TripleBlock:
      os << "triple(" << (block_ == TripleBlock::C1 ? "C1" : block_ == TripleBlock::C2 ? "C2" : "Sum")
         << ")";
      break;
  }
  return os.str();
}

void PartitionFunction::check_positions(const PositionsRef& x) const {
  if (x.size() != drivers_) throw std::invalid_argument("partition function: wrong driver count");
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (!(x(i) > x(i - 1)))
      throw std::invalid_argument("partition function: positions must be strictly increasing");
}

double PartitionFunction::value(const PositionsRef& x) const {
  check_positions(x);
  if (kind_ != Kind::TripleBlock) {
    double log_z = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      for (Eigen::Index j = i + 1; j < x.size(); ++j) log_z += exponent_ * std::log(x(j) - x(i));
    return checked_positive(std::exp(log_z));
  }
  const double span = x(2) - x(0);
  const auto v = blocks_->values((x(1) - x(0)) / span);
  const double zb = block_ == TripleBlock::C1 ? v.c1 : block_ == TripleBlock::C2 ? v.c2 : v.c1 + v.c2;
  return checked_positive(std::pow(span, blocks_->leading_exponent()) * checked_positive(zb));
}

Positions PartitionFunction::grad_log(const PositionsRef& x) const {
  check_positions(x);
  Positions g = Positions::Zero(x.size());
  if (kind_ != Kind::TripleBlock) {
    for (Eigen::Index a = 0; a < x.size(); ++a)
      for (Eigen::Index b = 0; b < x.size(); ++b)
        if (a != b) g(a) += exponent_ / (x(a) - x(b));
    return g;
  }
  const double span = x(2) - x(0);
  const double u = (x(1) - x(0)) / span;
  const auto jet = blocks_->jet(u);
  const auto& v = jet.value;
  const auto& d = jet.derivative;
  double zb = v.c1 + v.c2;
  double dzb = d.c1 + d.c2;
  if (block_ == TripleBlock::C1) {
    zb = v.c1;
    dzb = d.c1;
  } else if (block_ == TripleBlock::C2) {
    zb = v.c2;
    dzb = d.c2;
  }
  checked_positive(zb);
  const double slope = dzb / zb;
  const double lead = blocks_->leading_exponent();
  // u = (x2 − x1)/(x3 − x1): ∂u/∂x1 = (u − 1)/span, ∂u/∂x2 = 1/span, ∂u/∂x3 = −u/span
  g(0) = -lead / span + slope * (u - 1.0) / span;
  g(1) = slope / span;
  g(2) = lead / span - slope * u / span;
  return g;
}

double PartitionFunction::log_derivative(const PositionsRef& x, int alpha) const {
  if (alpha < 0 || alpha >= drivers_) throw std::out_of_range("log_derivative: driver index");
  return grad_log(x)(alpha);
}

double factorized_z(const ModelParams& model, const PositionsRef& x) {
  return PartitionFunction::factorized(model, static_cast<int>(x.size())).value(x);
}

double double_z(const ModelParams& model, int channel_j, double x1, double x2) {
  if (x1 == x2) throw std::invalid_argument("double_z: coincident positions");
  Positions x(2);
  x << std::min(x1, x2), std::max(x1, x2);
  return PartitionFunction::double_channel(model, channel_j).value(x);
}

BlockValues triple_blocks(const ModelParams& model, CrossRatio x) {
  const auto v = TripleBlockEvaluator(model).values(x.value);
  return {v.c1, v.c2};
}

CrossingProbability crossing_probability(const ModelParams& model, CrossRatio x) {
  const BlockValues z = triple_blocks(model, x);
  const double p = z.z_c1 / (z.z_c1 + z.z_c2);
  return {p, 1.0 - p};
}

double log_derivative(const PartitionFunction& pf, int alpha, const PositionsRef& x) {
  return pf.log_derivative(x, alpha);
}

namespace {

double block_of(const TripleBlockEvaluator::Pair& p, TripleBlock block) {
  switch (block) {
    case TripleBlock::C1:
      return p.c1;
    case TripleBlock::C2:
      return p.c2;
    default:
      return p.c1 + p.c2;
  }
}

double ode_residual(const Hypergeometric2F1<double>& f, double x) {
  // central differences at h and 2h, Richardson-combined to O(h⁴)
  const double step = 1e-2 * std::min(x, 1.0 - x);
  const double f0 = f(x);
  auto differences = [&](double h, double& d1, double& d2) {
    const double fm = f(x - h);
    const double fp = f(x + h);
    d1 = (fp - fm) / (2.0 * h);
    d2 = (fp - 2.0 * f0 + fm) / (h * h);
  };
  double d1h, d2h, d1w, d2w;
  differences(step, d1h, d2h);
  differences(2.0 * step, d1w, d2w);
  const double d1 = (4.0 * d1h - d1w) / 3.0;
  const double d2 = (4.0 * d2h - d2w) / 3.0;
  const double a = f.a(), b = f.b(), c = f.c();
  const double t1 = x * (1.0 - x) * d2;
  const double t2 = (c - (a + b + 1.0) * x) * d1;
  const double t3 = a * b * f0;
  const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
  return std::abs(t1 + t2 - t3) / scale;
}

}  // namespace

double endpoint_log_slope(const TripleBlockEvaluator& blocks, TripleBlock block, bool at_zero) {
  double s[3];
  const double points[3] = {1e-4, 1e-5, 1e-6};
  for (int i = 0; i < 3; ++i) {
    const double x = at_zero ? points[i] : 1.0 - points[i];
    const double z = block_of(blocks.values_raw(x), block);
    const double dz = block_of(blocks.derivatives_raw(x), block);
    s[i] = at_zero ? x * dz / z : -(1.0 - x) * dz / z;
  }
  const double d1 = s[2] - s[1];
  const double d0 = s[1] - s[0];
  const double curvature = d1 - d0;
  if (std::abs(curvature) < 1e-14 * (1.0 + std::abs(s[2]))) return s[2];
  return s[2] - d1 * d1 / curvature;
}

KzResidual kz_residual(const ModelParams& model, TripleBlock block, CrossRatio x) {
  if (!(x.value > 0.0 && x.value < 1.0)) throw std::domain_error("kz_residual: x outside (0,1)");
  const TripleBlockEvaluator blocks(model);
  KzResidual r{0.0, 0.0};
  const auto& parts = blocks.constituents();
  const bool use_c1 = block != TripleBlock::C2;
  const bool use_c2 = block != TripleBlock::C1;
  for (int i = 0; i < 4; ++i) {
    if ((i < 2 && !use_c1) || (i >= 2 && !use_c2)) continue;
    r.ode = std::max(r.ode, ode_residual(parts[i].series, x.value));
  }

  const double lead = blocks.leading_exponent();
  const double sub = blocks.subleading_exponent();
  auto check = [&](TripleBlock b, double at0, double at1) {
    r.exponent = std::max(r.exponent, std::abs(endpoint_log_slope(blocks, b, true) - at0));
    r.exponent = std::max(r.exponent, std::abs(endpoint_log_slope(blocks, b, false) - at1));
  };
  if (block == TripleBlock::C1) check(TripleBlock::C1, lead, sub);
  if (block == TripleBlock::C2) check(TripleBlock::C2, sub, lead);
  if (block == TripleBlock::Sum) {
    check(TripleBlock::C1, lead, sub);
    check(TripleBlock::C2, sub, lead);
  }
  return r;
}

}  // namespace msle
