#ifndef MSLE_AFFINE_HPP
#define MSLE_AFFINE_HPP

// Normal ordering of Virasoro / affine su(2)_k mode words acting on a
// highest-weight multiplet, restricted to affine level <= 2.
//
// Conventions: orthonormal basis with respect to the Killing form normalized
// so that long roots have squared length 2. In that basis the structure
// constants are f^{abc} = √2 ε^{abc}, h∨ = 2, and the zero modes J^a_0 act on
// the spin-j/2 multiplet through T^a = √2 S^a, with Σ_a T^a T^a equal to the
// Casimir j(j+2)/2. L_n and J^a_n are kept as independent symbols related
// only by
//   [J^a_n, J^b_m] = i f^{abc} J^c_{n+m} + k n δ^{ab} δ_{n+m,0}
//   [L_n, J^a_m]   = −m J^a_{n+m}
//   [L_n, L_m]     = (n−m) L_{n+m} + c/12 (n³−n) δ_{n+m,0}.

#include <complex>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace msle {

using cdouble = std::complex<double>;

enum class ModeKind { Virasoro, Current };

struct Mode {
  ModeKind kind;
  int component;  // 1..3 for currents, 0 for Virasoro
  int index;

  bool is_creation() const { return index < 0; }
  auto operator<=>(const Mode&) const = default;
};

inline Mode L(int n) { return {ModeKind::Virasoro, 0, n}; }
inline Mode J(int a, int n) { return {ModeKind::Current, a, n}; }

std::string to_string(const Mode& m);

/// coefficient · modes[0] modes[1] … modes[r−1]; the rightmost mode acts first.
struct ModeWord {
  cdouble coefficient{1.0};
  std::vector<Mode> modes;
};

/// Linear combination of mode words.
using ModeOperator = std::vector<ModeWord>;

ModeOperator adjoint(const ModeOperator& op);
ModeOperator operator*(const ModeOperator& lhs, const ModeOperator& rhs);
ModeOperator operator+(ModeOperator lhs, const ModeOperator& rhs);
ModeOperator operator*(cdouble s, ModeOperator op);
ModeOperator as_operator(const Mode& m);

/// Creation-mode word in canonical (sorted) order.
using NormalWord = std::vector<Mode>;

/// Σ_w w · M_w |ψ⟩: each normal word w carries the (j+1)×(j+1) matrix M_w
/// acting on the highest-weight multiplet, so column p is the component
/// obtained from the p-th multiplet basis vector.
struct StateVector {
  int spin_label = 0;
  int level = 1;
  std::map<NormalWord, Eigen::MatrixXcd> terms;

  /// Affine level of the highest word present (0 for an empty state).
  int grade() const;

  void add(const NormalWord& w, const Eigen::MatrixXcd& m);
  StateVector& operator+=(const StateVector& other);
  StateVector& operator*=(cdouble s);

  /// Coefficient matrix of the empty word.
  Eigen::MatrixXcd ground() const;
};

/// Highest-weight representation data for spin j/2 at level k.
class AffineModule {
 public:
  AffineModule(int level, int spin_label);

  int level() const { return level_; }
  int spin_label() const { return spin_; }
  int multiplet_dim() const { return spin_ + 1; }
  double weight() const { return weight_; }
  double central_charge() const { return central_charge_; }

  /// Zero-mode matrix T^a, a ∈ {1,2,3}.
  const Eigen::MatrixXcd& zero_mode(int a) const { return t_[a - 1]; }

  /// The operator applied to the multiplet, in normal form. Throws
  /// std::domain_error if some intermediate state would exceed level 2.
  StateVector apply(const ModeOperator& op) const;
  StateVector apply(const ModeWord& word) const;

  /// ⟨bra ψ_p | ket ψ_q⟩ for all multiplet indices (p, q): the vacuum
  /// component of bra† · ket.
  Eigen::MatrixXcd pairing(const ModeOperator& bra, const ModeOperator& ket) const;

  /// Same pairing computed by sweeping bra with the adjoint ordering,
  /// i.e. as (ket† · bra)†.
  Eigen::MatrixXcd pairing_reversed(const ModeOperator& bra, const ModeOperator& ket) const;

  /// Gram matrix of ⟨w ψ_p | w' ψ_q⟩ over the given normal words.
  Eigen::MatrixXcd gram(const std::vector<NormalWord>& words) const;

  /// Norm of a state in the irreducible quotient: the Gram matrix is
  /// diagonalized and its radical discarded, so the result is linear in the
  /// state coefficients and not limited by square-root cancellation.
  /// Sums the squared norms of all multiplet columns.
  double norm(const StateVector& state) const;

 private:
  StateVector act(const Mode& x, const NormalWord& w, const Eigen::MatrixXcd& m) const;
  StateVector act(const Mode& x, const StateVector& s) const;
  StateVector act_commutator(const Mode& x, const Mode& y, const NormalWord& rest,
                             const Eigen::MatrixXcd& m) const;
  StateVector empty_state() const;

  int level_;
  int spin_;
  double weight_;
  double central_charge_;
  Eigen::MatrixXcd t_[3];
};

/// Normal form of word·|ψ_{jΛ}⟩ at level k.
StateVector normal_order(const ModeWord& word, int spin_label, int level);

/// (κ/2) L_{−1}² − 2 L_{−2} + (τ/2) Σ_a J^a_{−1} J^a_{−1}.
ModeOperator level_two_null_operator(double kappa, double tau);

struct NullResidual {
  double level_one;  // max_b ‖J^b_1 χ‖
  double level_two;  // max_b ‖J^b_2 χ‖
};

/// Residuals of the candidate level-2 null state χ built on the spin-j/2
/// primary. Both vanish iff χ is null. Requires k ≥ 1 and 0 ≤ j ≤ k.
NullResidual null_state_residual(int level, int spin_label, double kappa, double tau);

/// Threshold below which a residual counts as null.
inline constexpr double kNullTolerance = 1e-10;

}  // namespace msle

#endif
