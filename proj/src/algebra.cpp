#include "msle/algebra.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace msle {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational GeneralAlgebraData::central_charge(int level) const {
  return Rational(static_cast<std::int64_t>(level) * dim_g, level + dual_coxeter);
}

Rational GeneralAlgebraData::conformal_weight(const Rational& casimir, int level) const {
  return casimir / Rational(2 * (level + dual_coxeter));
}

GeneralAlgebraData su2_data() { return {3, 2}; }

Rational su2_casimir(int j) { return Rational(static_cast<std::int64_t>(j) * (j + 2), 2); }

Rational ModelParams::weight_of(int j) const {
  if (j < 0 || j > level)
    throw std::invalid_argument("weight_of: spin label outside [0, k]");
  return su2_data().conformal_weight(su2_casimir(j), level);
}

Rational ModelParams::delta(int channel_j) const {
  if (channel_j != 0 && channel_j != 2)
    throw std::invalid_argument("delta: channel must be 0 or 2");
  if (channel_j == 2 && level < 2)
    throw std::invalid_argument("delta: the 2Λ channel requires k > 1");
  return weight_of(channel_j) - 2 * weight_of(1);
}

ModelParams model_params(int k) {
  if (k < 1) throw std::invalid_argument("model_params: level must be positive");
  ModelParams p;
  p.level = k;
  p.central_charge = su2_data().central_charge(k);
  if (k == 1) {
    p.kappa = Rational(4);
    p.tau = Rational(0);
  } else {
    p.kappa = Rational(4 * (k + 2), k + 3);
    p.tau = Rational(2, k + 3);
  }
  return p;
}

std::int64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::int64_t out = 1;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

std::int64_t kostka(int m, int n) {
  if (m < 0 || n < 0 || n > m / 2)
    throw std::invalid_argument("kostka: need 0 <= n <= floor(m/2)");
  return binomial(m, n) - binomial(m, n - 1);
}

bool ArchTopology::is_valid() const {
  if (m < 0) return false;
  std::vector<int> seen(m + 1, 0);
  for (auto [a, b] : pairs) {
    if (a < 1 || b > m || a >= b) return false;
    ++seen[a];
    ++seen[b];
  }
  for (int r : rays) {
    if (r < 1 || r > m) return false;
    ++seen[r];
  }
  for (int i = 1; i <= m; ++i)
    if (seen[i] != 1) return false;
  for (auto [a, b] : pairs) {
    for (auto [c, d] : pairs)
      if (a < c && c < b && b < d) return false;
    for (int r : rays)
      if (a < r && r < b) return false;
  }
  return true;
}

void ArchTopology::canonicalize() {
  for (auto& [a, b] : pairs)
    if (a > b) std::swap(a, b);
  std::sort(pairs.begin(), pairs.end());
  std::sort(rays.begin(), rays.end());
  if (!is_valid()) throw std::logic_error("non-planar arch topology: " + to_string());
}

std::string ArchTopology::to_string() const {
  std::ostringstream os;
  for (auto [a, b] : pairs) os << '(' << a << ',' << b << ')';
  os << '|';
  for (std::size_t i = 0; i < rays.size(); ++i) os << (i ? "," : "") << rays[i];
  return os.str();
}

namespace {

// Scans points left to right: each point becomes a ray (only at nesting
// depth zero), opens an arch, or closes the innermost open arch.
void grow_topologies(int m, int n, int point, std::vector<int>& open, ArchTopology& cur,
                     std::vector<ArchTopology>& out) {
  if (point > m) {
    if (open.empty() && cur.arch_count() == n) {
      ArchTopology t = cur;
      t.canonicalize();
      out.push_back(std::move(t));
    }
    return;
  }
  const int remaining = m - point + 1;
  const int arches_needed = n - cur.arch_count();
  if (static_cast<int>(open.size()) > remaining) return;

  if (open.empty() && static_cast<int>(cur.rays.size()) < m - 2 * n) {
    cur.rays.push_back(point);
    grow_topologies(m, n, point + 1, open, cur, out);
    cur.rays.pop_back();
  }
  if (static_cast<int>(open.size()) < arches_needed) {
    open.push_back(point);
    grow_topologies(m, n, point + 1, open, cur, out);
    open.pop_back();
  }
  if (!open.empty()) {
    const int a = open.back();
    open.pop_back();
    cur.pairs.emplace_back(a, point);
    grow_topologies(m, n, point + 1, open, cur, out);
    cur.pairs.pop_back();
    open.push_back(a);
  }
}

}  // namespace

std::vector<ArchTopology> enumerate_arch_topologies(int m, int n) {
  if (m < 0 || n < 0 || 2 * n > m)
    throw std::invalid_argument("enumerate_arch_topologies: need 0 <= 2n <= m");
  std::vector<ArchTopology> out;
  std::vector<int> open;
  ArchTopology cur;
  cur.m = m;
  grow_topologies(m, n, 1, open, cur, out);
  std::sort(out.begin(), out.end(),
            [](const ArchTopology& a, const ArchTopology& b) { return a.pairs < b.pairs; });
  return out;
}

std::vector<FusionPath> enumerate_fusion_paths(int k, int m, int j_final) {
  if (k < 1 || m < 1) throw std::invalid_argument("enumerate_fusion_paths: need k, m >= 1");
  if (j_final < 0 || j_final > k)
    throw std::invalid_argument("enumerate_fusion_paths: final weight forbidden at this level");
  std::vector<FusionPath> out;
  FusionPath path{0};
  auto walk = [&](auto&& self) -> void {
    const int steps_left = m - (static_cast<int>(path.size()) - 1);
    const int j = path.back();
    if (steps_left == 0) {
      if (j == j_final) out.push_back(path);
      return;
    }
    if (std::abs(j - j_final) > steps_left) return;
    for (int next : {j - 1, j + 1}) {
      if (next < 0 || next > k) continue;
      path.push_back(next);
      self(self);
      path.pop_back();
    }
  };
  walk(walk);
  return out;
}

std::map<int, std::int64_t> tensor_decomposition_oracle(int m) {
  if (m < 1 || m > 20) throw std::invalid_argument("tensor_decomposition_oracle: 1 <= m <= 20");
  // weight (in units of Λ) of a basis state = #up − #down spins
  std::map<int, std::int64_t> weight_count;
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    const int up = std::popcount(s);
    ++weight_count[2 * up - m];
  }
  std::map<int, std::int64_t> mult;
  for (int j = m; j >= 0; j -= 2) {
    const std::int64_t above = weight_count.contains(j + 2) ? weight_count[j + 2] : 0;
    const std::int64_t c = weight_count[j] - above;
    if (c > 0) mult[j] = c;
  }
  return mult;
}

}  // namespace msle
