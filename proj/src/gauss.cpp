#include "oho/gauss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// plain bilinear sum, no conjugation (Eigen's dot conjugates)
cd cdot2(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  return a(0) * b(0) + a(1) * b(1);
}

double binom_d(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - i + 1) / i;
  return b;
}

using PolyMap = std::map<std::pair<int, int>, cd>;

void poly_add(PolyMap& p, int j, int k, cd c) {
  if (c == cd(0)) return;
  auto [it, fresh] = p.try_emplace({j, k}, c);
  if (!fresh) it->second += c;
}

PolyMap poly_mul(const PolyMap& a, const PolyMap& b) {
  PolyMap out;
  for (const auto& [jk1, c1] : a)
    for (const auto& [jk2, c2] : b)
      poly_add(out, jk1.first + jk2.first, jk1.second + jk2.second, c1 * c2);
  return out;
}

PolyMap poly_translate(const PolyMap& p, cd s0, cd s1) {
  PolyMap out;
  for (const auto& [jk, c] : p) {
    const int j = jk.first, k = jk.second;
    cd pow0 = 1.0;
    std::vector<cd> s0pow(j + 1), s1pow(k + 1);
    for (int i = 0; i <= j; ++i) { s0pow[i] = pow0; pow0 *= s0; }
    cd pow1 = 1.0;
    for (int i = 0; i <= k; ++i) { s1pow[i] = pow1; pow1 *= s1; }
    for (int a = 0; a <= j; ++a)
      for (int b = 0; b <= k; ++b)
        poly_add(out, a, b, c * binom_d(j, a) * binom_d(k, b) * s0pow[j - a] * s1pow[k - b]);
  }
  return out;
}

// raw 1-D Gaussian moments for weight exp(-a x^2/2 - v x): mean -v/a, var 1/a
std::vector<cd> raw_moments_1d(cd a, cd v, int nmax) {
  std::vector<cd> m(nmax + 1);
  const cd mu = -v / a;
  m[0] = 1.0;
  if (nmax >= 1) m[1] = mu;
  for (int n = 2; n <= nmax; ++n) m[n] = mu * m[n - 1] + cd(n - 1) / a * m[n - 2];
  return m;
}

}  // namespace

void GaussPolyState::prune(double rel) {
  double top = poly_norm(*this);
  for (auto it = poly.begin(); it != poly.end();) {
    if (std::abs(it->second) <= rel * top || it->second == cd(0))
      it = poly.erase(it);
    else
      ++it;
  }
}

cd GaussPolyState::value(double x, double xd) const {
  Eigen::Vector2cd X;
  X << cd(x), cd(xd);
  cd expo = -0.5 * cdot2(X, M * X) - cdot2(v, X) + logc;
  cd pval = 0.0;
  for (const auto& [jk, c] : poly)
    pval += c * std::pow(x, jk.first) * std::pow(xd, jk.second);
  return pval * std::exp(expo);
}

double poly_norm(const GaussPolyState& s) {
  double m = 0.0;
  for (const auto& [jk, c] : s.poly) m = std::max(m, std::abs(c));
  return m;
}

GaussPolyState scale(const GaussPolyState& s, cd factor) {
  GaussPolyState out = s;
  out.poly.clear();
  for (const auto& [jk, c] : s.poly) {
    cd v = c * factor;
    if (v != cd(0)) out.poly[jk] = v;
  }
  return out;
}

GaussPolyState relaxed_state(const ModelParams& p) {
  auto rep = validate(p);
  if (!rep.ok()) throw std::invalid_argument("relaxed_state: " + rep.hard.front());
  const double q = p.q_exp(), r = p.r_exp(), sig = p.sigma_exp();
  GaussPolyState s;
  s.M << cd(q), cd(0, sig), cd(0, sig), cd(r);
  s.v.setZero();
  s.logc = 0.5 * std::log(q / kTwoPi);  // unit trace
  return s;
}

GaussPolyState act(const DiffOp& op, const GaussPolyState& s) {
  GaussPolyState out = s;
  out.poly.clear();
  const cd M00 = s.M(0, 0), M01 = s.M(0, 1), M11 = s.M(1, 1);
  const cd v0 = s.v(0), v1 = s.v(1);
  for (const auto& [m, c] : op.terms) {
    PolyMap cur = s.poly;
    // derivatives first (monomials are normal ordered)
    for (int n = 0; n < m[2]; ++n) {  // d/dx
      PolyMap nxt;
      for (const auto& [jk, pc] : cur) {
        const int j = jk.first, k = jk.second;
        if (j >= 1) poly_add(nxt, j - 1, k, cd(j) * pc);
        poly_add(nxt, j + 1, k, -M00 * pc);
        poly_add(nxt, j, k + 1, -M01 * pc);
        poly_add(nxt, j, k, -v0 * pc);
      }
      cur = std::move(nxt);
    }
    for (int n = 0; n < m[3]; ++n) {  // d/dxd
      PolyMap nxt;
      for (const auto& [jk, pc] : cur) {
        const int j = jk.first, k = jk.second;
        if (k >= 1) poly_add(nxt, j, k - 1, cd(k) * pc);
        poly_add(nxt, j, k + 1, -M11 * pc);
        poly_add(nxt, j + 1, k, -M01 * pc);
        poly_add(nxt, j, k, -v1 * pc);
      }
      cur = std::move(nxt);
    }
    for (const auto& [jk, pc] : cur)
      poly_add(out.poly, jk.first + m[0], jk.second + m[1], c * pc);
  }
  return out;
}

cd trace(const GaussPolyState& s) {
  const cd a = s.M(0, 0), v0 = s.v(0);
  int jmax = 0;
  for (const auto& [jk, c] : s.poly)
    if (jk.second == 0) jmax = std::max(jmax, jk.first);
  auto m = raw_moments_1d(a, v0, jmax);
  cd acc = 0.0;
  for (const auto& [jk, c] : s.poly)
    if (jk.second == 0) acc += c * m[jk.first];
  const cd I0 = std::sqrt(kTwoPi / a) * std::exp(v0 * v0 / (2.0 * a) + s.logc);
  return I0 * acc;
}

cd overlap(const GaussPolyState& A, const GaussPolyState& B) {
  Eigen::Matrix2cd Mc = A.M.conjugate() + B.M;
  Eigen::Vector2cd vc = A.v.conjugate() + B.v;
  cd lc = std::conj(A.logc) + B.logc;
  PolyMap pa;
  for (const auto& [jk, c] : A.poly) pa[jk] = std::conj(c);
  PolyMap prod = poly_mul(pa, B.poly);

  const cd det = Mc.determinant();
  Eigen::Matrix2cd C = Mc.inverse();
  Eigen::Vector2cd mu = -(C * vc);
  int jmax = 0, kmax = 0;
  for (const auto& [jk, c] : prod) {
    jmax = std::max(jmax, jk.first);
    kmax = std::max(kmax, jk.second);
  }
  // central moments E[y1^j y2^k] of the Gaussian with covariance C
  std::vector<std::vector<cd>> E(jmax + 1, std::vector<cd>(kmax + 1, cd(0)));
  E[0][0] = 1.0;
  for (int k = 2; k <= kmax; ++k) E[0][k] = cd(k - 1) * C(1, 1) * E[0][k - 2];
  for (int j = 1; j <= jmax; ++j)
    for (int k = 0; k <= kmax; ++k) {
      cd e = 0.0;
      if (j >= 2) e += cd(j - 1) * C(0, 0) * E[j - 2][k];
      if (k >= 1) e += cd(k) * C(0, 1) * E[j - 1][k - 1];
      E[j][k] = e;
    }
  // raw moments about mu, then contract with the polynomial
  cd acc = 0.0;
  for (const auto& [jk, c] : prod) {
    const int j = jk.first, k = jk.second;
    cd raw = 0.0;
    for (int p = 0; p <= j; ++p)
      for (int q = 0; q <= k; ++q)
        raw += binom_d(j, p) * binom_d(k, q) * std::pow(mu(0), j - p) * std::pow(mu(1), k - q) *
               E[p][q];
    acc += c * raw;
  }
  const cd I0 = kTwoPi / std::sqrt(det) * std::exp(0.5 * cdot2(vc, C * vc) + lc);
  return I0 * acc;
}

bool is_hermitian(const GaussPolyState& s, double tol) {
  // value-level check: rho(x, xd) == conj(rho(x, -xd)) on a fixed probe grid
  double top = 0.0, worst = 0.0;
  const double pts[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  for (double x : pts)
    for (double xd : pts) top = std::max(top, std::abs(s.value(x, xd)));
  if (top == 0.0) return true;
  for (double x : pts)
    for (double xd : pts)
      worst = std::max(worst, std::abs(s.value(x, xd) - std::conj(s.value(x, -xd))));
  return worst <= tol * top;
}

WeylOp WeylOp::from_linear(const DiffOp& op) {
  WeylOp w;
  for (const auto& [m, c] : op.terms) {
    if (m == Mono{0, 0, 0, 0})
      w.phi += c;
    else if (m == Mono{1, 0, 0, 0})
      w.mult(0) += c;
    else if (m == Mono{0, 1, 0, 0})
      w.mult(1) += c;
    else if (m == Mono{0, 0, 1, 0})
      w.shift(0) += c;
    else if (m == Mono{0, 0, 0, 1})
      w.shift(1) += c;
    else
      throw std::invalid_argument("WeylOp requires an operator of monomial degree <= 1");
  }
  // symmetric splitting: exp(m.X + g.D + g0) = exp(m.X) exp(g.D) exp(g0 + g.m/2)
  w.phi += 0.5 * cdot2(w.shift, w.mult);
  return w;
}

GaussPolyState WeylOp::apply_to(const GaussPolyState& s) const {
  GaussPolyState out = s;
  if (shift(0) != cd(0) || shift(1) != cd(0)) {
    out.logc += -0.5 * cdot2(shift, s.M * shift) - cdot2(s.v, shift);
    out.v = s.v + s.M * shift;
    out.poly = poly_translate(s.poly, shift(0), shift(1));
  }
  out.logc += phi;
  out.v -= mult;
  return out;
}

BSet b_operators(const ModelParams& p) {
  auto rep = validate(p);
  if (!rep.ok()) throw std::invalid_argument("b_operators: " + rep.hard.front());
  BSet bs;
  bs.Q = std::sqrt(p.q_exp());
  bs.R = std::sqrt(p.r_exp());
  bs.sigma = p.sigma_exp();
  bs.n00 = bs.Q / (2.0 * bs.R);
  const double rt2 = std::sqrt(2.0);
  const cd i(0, 1);
  const double Q = bs.Q, R = bs.R, sig = bs.sigma;
  bs.b = cd(Q / rt2) * dop_x() + cd(1.0 / (Q * rt2)) * dop_dx() + i * cd(sig / (Q * rt2)) * dop_xd();
  bs.bb = cd(Q / rt2) * dop_x() - cd(1.0 / (Q * rt2)) * dop_dx() - i * cd(sig / (Q * rt2)) * dop_xd();
  bs.bd = cd(-sig / (R * rt2)) * dop_x() + i * cd(R / rt2) * dop_xd() + i * cd(1.0 / (R * rt2)) * dop_dxd();
  bs.bbd = cd(-sig / (R * rt2)) * dop_x() - i * cd(R / rt2) * dop_xd() + i * cd(1.0 / (R * rt2)) * dop_dxd();
  if (norm_inf(commutator(bs.b, bs.bb) - dop_one()) > 1e-12 ||
      norm_inf(commutator(bs.bd, bs.bbd) - dop_one()) > 1e-12 ||
      norm_inf(commutator(bs.b, bs.bd)) > 1e-12 || norm_inf(commutator(bs.b, bs.bbd)) > 1e-12 ||
      norm_inf(commutator(bs.bb, bs.bd)) > 1e-12 || norm_inf(commutator(bs.bb, bs.bbd)) > 1e-12)
    throw std::runtime_error("b_operators: commutation table failed");
  return bs;
}

GaussPolyState ladder_state_b(const ModelParams& p, int m, int n) {
  BSet bs = b_operators(p);
  GaussPolyState st = relaxed_state(p);
  for (int k = 0; k < m; ++k) st = act(bs.bb, st);
  for (int k = 0; k < n; ++k) st = act(bs.bbd, st);
  double fac = 1.0;
  for (int k = 2; k <= m; ++k) fac *= k;
  for (int k = 2; k <= n; ++k) fac *= k;
  return scale(st, 1.0 / std::sqrt(fac));
}

GaussPolyState coherent_uv(const ModelParams& p, cd u, cd v) {
  BSet bs = b_operators(p);
  DiffOp lin = u * bs.bb + v * bs.bbd;
  return WeylOp::from_linear(lin).apply_to(relaxed_state(p));
}

DiffOp obs_x() { return dop_x() + cd(0.5) * dop_xd(); }

DiffOp obs_p(PConvention c) {
  if (c == PConvention::simplified) return dop_pd();
  return cd(0.5) * dop_p() + dop_pd();
}

cd expectation(const DiffOp& obs, const GaussPolyState& s) {
  return trace(act(obs, s)) / trace(s);
}

Eigen::VectorXd kernel_eigenvalues(const GaussPolyState& s, int N, double L) {
  const double h = 2.0 * L / (N - 1);
  Eigen::MatrixXcd A(N, N);
  for (int i = 0; i < N; ++i) {
    const double xi = (i - N / 2) * h;
    for (int j = 0; j < N; ++j) {
      const double xj = (j - N / 2) * h;
      A(i, j) = h * s.value(0.5 * (xi + xj), xi - xj);
    }
  }
  Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  return es.eigenvalues();
}

double kernel_window(const ModelParams& p) {
  return 8.0 * std::max(1.0 / std::sqrt(p.q_exp()), 1.0 / std::sqrt(p.r_exp()));
}

}  // namespace oho
