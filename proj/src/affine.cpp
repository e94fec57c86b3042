#include "msle/affine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace msle {

namespace {

constexpr int kMaxGrade = 2;

int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  // cyclic permutations of (1,2,3) are even
  return ((a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1)) ? 1 : -1;
}

// Spin-s matrices (s = j/2) in the basis m = s, s−1, …, −s.
void spin_matrices(int j, Eigen::MatrixXcd (&out)[3]) {
  const int dim = j + 1;
  const double s = 0.5 * j;
  Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const double m = s - r;
    sz(r, r) = m;
    if (r > 0) sp(r - 1, r) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  const Eigen::MatrixXcd sm = sp.adjoint();
  const cdouble i(0.0, 1.0);
  out[0] = 0.5 * (sp + sm);
  out[1] = (sp - sm) / (2.0 * i);
  out[2] = sz;
}

int word_grade(const NormalWord& w) {
  int g = 0;
  for (const Mode& m : w) g -= m.index;
  return g;
}

}  // namespace

std::string to_string(const Mode& m) {
  if (m.kind == ModeKind::Virasoro) return "L_" + std::to_string(m.index);
  return "J" + std::to_string(m.component) + "_" + std::to_string(m.index);
}

ModeOperator adjoint(const ModeOperator& op) {
  ModeOperator out;
  out.reserve(op.size());
  for (const ModeWord& w : op) {
    ModeWord a{std::conj(w.coefficient), {}};
    a.modes.reserve(w.modes.size());
    for (auto it = w.modes.rbegin(); it != w.modes.rend(); ++it) {
      Mode m = *it;
      m.index = -m.index;
      a.modes.push_back(m);
    }
    out.push_back(std::move(a));
  }
  return out;
}

ModeOperator operator*(const ModeOperator& lhs, const ModeOperator& rhs) {
  ModeOperator out;
  out.reserve(lhs.size() * rhs.size());
  for (const ModeWord& l : lhs)
    for (const ModeWord& r : rhs) {
      ModeWord w{l.coefficient * r.coefficient, l.modes};
      w.modes.insert(w.modes.end(), r.modes.begin(), r.modes.end());
      out.push_back(std::move(w));
    }
  return out;
}

ModeOperator operator+(ModeOperator lhs, const ModeOperator& rhs) {
  lhs.insert(lhs.end(), rhs.begin(), rhs.end());
  return lhs;
}

ModeOperator operator*(cdouble s, ModeOperator op) {
  for (ModeWord& w : op) w.coefficient *= s;
  return op;
}

ModeOperator as_operator(const Mode& m) { return {ModeWord{1.0, {m}}}; }

int StateVector::grade() const {
  int g = 0;
  for (const auto& [w, _] : terms) g = std::max(g, word_grade(w));
  return g;
}

void StateVector::add(const NormalWord& w, const Eigen::MatrixXcd& m) {
  auto it = terms.find(w);
  if (it == terms.end())
    terms.emplace(w, m);
  else
    it->second += m;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  for (const auto& [w, m] : other.terms) add(w, m);
  return *this;
}

StateVector& StateVector::operator*=(cdouble s) {
  for (auto& [_, m] : terms) m *= s;
  return *this;
}

Eigen::MatrixXcd StateVector::ground() const {
  auto it = terms.find(NormalWord{});
  if (it != terms.end()) return it->second;
  return Eigen::MatrixXcd::Zero(spin_label + 1, spin_label + 1);
}

AffineModule::AffineModule(int level, int spin_label) : level_(level), spin_(spin_label) {
  if (level < 1) throw std::invalid_argument("AffineModule: level must be positive");
  if (spin_label < 0 || spin_label > level)
    throw std::invalid_argument("AffineModule: spin label must lie in [0, k]");
  spin_matrices(spin_label, t_);
  const double root2 = std::sqrt(2.0);
  for (auto& t : t_) t *= root2;
  weight_ = spin_label * (spin_label + 2) / (4.0 * (level + 2));
  central_charge_ = 3.0 * level / (level + 2);
}

StateVector AffineModule::empty_state() const {
  StateVector s;
  s.spin_label = spin_;
  s.level = level_;
  return s;
}

StateVector AffineModule::act_commutator(const Mode& x, const Mode& y, const NormalWord& rest,
                                         const Eigen::MatrixXcd& m) const {
  StateVector out = empty_state();
  const int n = x.index;
  const int p = y.index;
  auto add_mode = [&](const Mode& z, cdouble coeff) {
    if (coeff == 0.0) return;
    StateVector s = act(z, rest, m);
    s *= coeff;
    out += s;
  };
  auto add_central = [&](double coeff) {
    if (coeff != 0.0) out.add(rest, coeff * m);
  };

  if (x.kind == ModeKind::Current && y.kind == ModeKind::Current) {
    const cdouble i_f(0.0, std::sqrt(2.0));
    for (int c = 1; c <= 3; ++c)
      add_mode(J(c, n + p), i_f * static_cast<double>(levi_civita(x.component, y.component, c)));
    if (x.component == y.component && n + p == 0) add_central(static_cast<double>(level_) * n);
  } else if (x.kind == ModeKind::Virasoro && y.kind == ModeKind::Current) {
    add_mode(J(y.component, n + p), static_cast<double>(-p));
  } else if (x.kind == ModeKind::Current && y.kind == ModeKind::Virasoro) {
    add_mode(J(x.component, n + p), static_cast<double>(n));
  } else {
    add_mode(L(n + p), static_cast<double>(n - p));
    if (n + p == 0) add_central(central_charge_ / 12.0 * (static_cast<double>(n) * n * n - n));
  }
  return out;
}

StateVector AffineModule::act(const Mode& x, const NormalWord& w, const Eigen::MatrixXcd& m) const {
  StateVector out = empty_state();
  if (w.empty()) {
    if (x.index > 0) return out;
    if (x.index < 0) {
      out.add(NormalWord{x}, m);
      return out;
    }
    if (x.kind == ModeKind::Virasoro)
      out.add(w, weight_ * m);
    else
      out.add(w, t_[x.component - 1] * m);
    return out;
  }
  if (x.is_creation() && x <= w.front()) {
    NormalWord nw;
    nw.reserve(w.size() + 1);
    nw.push_back(x);
    nw.insert(nw.end(), w.begin(), w.end());
    out.add(nw, m);
    return out;
  }
  // x w0 rest = w0 (x rest) + [x, w0] rest
  const NormalWord rest(w.begin() + 1, w.end());
  out = act(w.front(), act(x, rest, m));
  out += act_commutator(x, w.front(), rest, m);
  return out;
}

StateVector AffineModule::act(const Mode& x, const StateVector& s) const {
  StateVector out = empty_state();
  for (const auto& [w, m] : s.terms) out += act(x, w, m);
  return out;
}

StateVector AffineModule::apply(const ModeWord& word) const {
  int grade = 0;
  for (auto it = word.modes.rbegin(); it != word.modes.rend(); ++it) {
    grade -= it->index;
    if (grade > kMaxGrade)
      throw std::domain_error("normal_order: word exceeds affine level 2");
  }
  const int dim = multiplet_dim();
  StateVector s = empty_state();
  s.add(NormalWord{}, word.coefficient * Eigen::MatrixXcd::Identity(dim, dim));
  for (auto it = word.modes.rbegin(); it != word.modes.rend(); ++it) {
    if (s.terms.empty()) break;
    s = act(*it, s);
  }
  return s;
}

StateVector AffineModule::apply(const ModeOperator& op) const {
  StateVector out = empty_state();
  for (const ModeWord& w : op) out += apply(w);
  return out;
}

Eigen::MatrixXcd AffineModule::pairing(const ModeOperator& bra, const ModeOperator& ket) const {
  return apply(adjoint(bra) * ket).ground();
}

Eigen::MatrixXcd AffineModule::pairing_reversed(const ModeOperator& bra,
                                                const ModeOperator& ket) const {
  return apply(adjoint(ket) * bra).ground().adjoint();
}

Eigen::MatrixXcd AffineModule::gram(const std::vector<NormalWord>& words) const {
  const int dim = multiplet_dim();
  const int n = static_cast<int>(words.size());
  Eigen::MatrixXcd g(n * dim, n * dim);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      g.block(a * dim, b * dim, dim, dim) =
          pairing({ModeWord{1.0, words[a]}}, {ModeWord{1.0, words[b]}});
  return g;
}

double AffineModule::norm(const StateVector& state) const {
  if (state.terms.empty()) return 0.0;
  const int dim = multiplet_dim();
  std::vector<NormalWord> words;
  for (const auto& [w, _] : state.terms) words.push_back(w);
  const int n = static_cast<int>(words.size());

  Eigen::MatrixXcd coeff(n * dim, dim);
  for (int a = 0; a < n; ++a) coeff.block(a * dim, 0, dim, dim) = state.terms.at(words[a]);

  const Eigen::MatrixXcd g = gram(words);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  // radical of the Shapovalov form (exactly zero eigenvalues up to rounding)
  Eigen::VectorXd root = Eigen::VectorXd::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 1e-9 * scale) root(i) = std::sqrt(lambda(i));
  const Eigen::MatrixXcd projected = root.asDiagonal() * (eig.eigenvectors().adjoint() * coeff);
  return projected.norm();
}

StateVector normal_order(const ModeWord& word, int spin_label, int level) {
  return AffineModule(level, spin_label).apply(word);
}

ModeOperator level_two_null_operator(double kappa, double tau) {
  ModeOperator chi;
  chi.push_back({kappa / 2.0, {L(-1), L(-1)}});
  chi.push_back({-2.0, {L(-2)}});
  for (int a = 1; a <= 3; ++a) chi.push_back({tau / 2.0, {J(a, -1), J(a, -1)}});
  return chi;
}

NullResidual null_state_residual(int level, int spin_label, double kappa, double tau) {
  const AffineModule module(level, spin_label);
  const ModeOperator chi = level_two_null_operator(kappa, tau);
  NullResidual r{0.0, 0.0};
  for (int b = 1; b <= 3; ++b) {
    r.level_one = std::max(r.level_one, module.norm(module.apply(as_operator(J(b, 1)) * chi)));
    r.level_two = std::max(r.level_two, module.norm(module.apply(as_operator(J(b, 2)) * chi)));
  }
  return r;
}

}  // namespace msle
