#include "oho/ladder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace oho {

namespace {
const cd I(0, 1);

double rel_residual(const DiffOp& r, const DiffOp& ref) {
  return norm_inf(r) / std::max(1.0, norm_inf(ref));
}
}  // namespace

Spectrum make_spectrum(double nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("spectrum needs finite nu >= 0");
  Spectrum sp;
  sp.nu = nu;
  sp.omega = omega_nu(nu);
  sp.degenerate = std::abs(nu - 2.0) <= 1e-8;
  if (!sp.degenerate) {
    // componentwise add so the +-0 imaginary part lands on the upper side of
    // the sqrt branch cut when the radicand is negative real (nu > 2)
    const cd rad = nu / (4.0 * I * sp.omega);
    sp.z = std::sqrt(cd(0.5 + rad.real(), 0.0 + rad.imag()));
    // not conj(z): the analytic continuation stays valid for nu > 2
    sp.Nminus = std::sqrt(cd(0.5 - rad.real(), 0.0 - rad.imag()));
  }
  return sp;
}

Eigen::Vector4cd coeff_vec(const DiffOp& op, cd* constant) {
  if (constant) *constant = 0.0;
  Eigen::Vector4cd u = Eigen::Vector4cd::Zero();
  for (const auto& [m, c] : op.terms) {
    if (m == Mono{0, 0, 0, 0}) {
      if (constant)
        *constant = c;
      else
        throw std::invalid_argument("coeff_vec: constant part present");
    } else if (m == Mono{1, 0, 0, 0})
      u(0) = c;
    else if (m == Mono{0, 0, 1, 0})
      u(1) = I * c;  // p = -i dx
    else if (m == Mono{0, 1, 0, 0})
      u(2) = c;
    else if (m == Mono{0, 0, 0, 1})
      u(3) = I * c;  // p_d = -i dxd
    else
      throw std::invalid_argument("coeff_vec: operator not of monomial degree <= 1");
  }
  return u;
}

DiffOp op_from_xvec(const Eigen::Vector4cd& u) {
  return u(0) * dop_x() + u(1) * dop_p() + u(2) * dop_xd() + u(3) * dop_pd();
}

Eigen::Matrix4cd c_rows() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd C;
  // rows: c+, c-, cb+, cb- over X = (x, p, xd, pd)
  C << cd(r), I * (r / 2.0), cd(r / 2.0), I * r,      // c+
      cd(r), I * (r / 2.0), cd(-r / 2.0), -I * r,     // c-
      cd(r), -I * (r / 2.0), cd(r / 2.0), -I * r,     // cb+
      cd(r), -I * (r / 2.0), cd(-r / 2.0), I * r;     // cb-
  return C;
}

Eigen::Matrix4cd printed_T(const ModelParams& p) {
  Spectrum sp = make_spectrum(p.nu);
  if (sp.degenerate) throw std::domain_error("printed_T undefined at nu = 2");
  const cd w = sp.omega, z = sp.z, Nm = sp.Nminus;
  const cd lp = p.nu / 2.0 + I * w, lm = p.nu / 2.0 - I * w;
  const double s = p.s(), nu = p.nu, d0 = p.d0, d2 = p.d2, beta = p.beta;
  Eigen::Matrix4cd T;
  // columns: a+, a-, ab+, ab-; rows: x, p, xd, pd
  T.row(0) << I / (2.0 * z * w), -I / (2.0 * Nm * w), z * (d0 * lm - d2 * lp) / (2.0 * nu),
      Nm * (d0 * lp - d2 * lm) / (2.0 * nu);
  T.row(1) << cd(0), cd(0), 1.0 / (2.0 * z * w), -1.0 / (2.0 * Nm * w);
  T.row(2) << cd(0), cd(0), -I * z, -I * Nm;
  T.row(3) << z, Nm, z * (s / (2.0 * nu) + (d2 / 2.0) * lp - beta),
      Nm * (s / (2.0 * nu) + (d2 / 2.0) * lm - beta);
  return T;
}

LadderSet make_ladders(const ModelParams& p) {
  auto rep = validate(p);
  if (!rep.ok()) throw std::invalid_argument("make_ladders: " + rep.hard.front());
  Spectrum sp = make_spectrum(p.nu);
  if (sp.degenerate)
    throw std::domain_error("make_ladders: nu at the degenerate point, no diagonal form");

  LadderSet ls;
  ls.params = p;
  ls.spec = sp;
  const cd w = sp.omega, z = sp.z, Nm = sp.Nminus;
  const cd lp = p.nu / 2.0 + I * w, lm = p.nu / 2.0 - I * w;
  const double s = p.s(), nu = p.nu, d0 = p.d0, d2 = p.d2, beta = p.beta;

  auto lower = [&](cd N, cd lam_o, cd lam_s) {
    // N [ lam_o x + i (d0 lam_o - d2 lam_s)/(2 nu) p
    //     + i (beta - s/(2 nu) - d2/2 lam_s) x_d + p_d ]
    return N * (lam_o * dop_x() + I * ((d0 * lam_o - d2 * lam_s) / (2.0 * nu)) * dop_p() +
                I * (beta - s / (2.0 * nu) - 0.5 * d2 * lam_s) * dop_xd() + dop_pd());
  };
  ls.a_p = lower(z, lm, lp);
  ls.a_m = lower(Nm, lp, lm);
  ls.ab_p = I * z * (lm * dop_p() + dop_xd());
  ls.ab_m = I * Nm * (lp * dop_p() + dop_xd());

  // commutation table
  const DiffOp one = dop_one();
  double comm = 0.0;
  comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.ab_p) - one));
  comm = std::max(comm, norm_inf(commutator(ls.a_m, ls.ab_m) - one));
  comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.a_m)));
  comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.ab_m)));
  comm = std::max(comm, norm_inf(commutator(ls.a_m, ls.ab_p)));
  comm = std::max(comm, norm_inf(commutator(ls.ab_p, ls.ab_m)));
  const double scale = 1.0 + std::norm(z) + std::norm(Nm);
  if (comm > 1e-10 * scale) throw std::runtime_error("make_ladders: commutation table failed");

  // eigen-relations, pairing resolved by search over lambda_{tau,tau'}
  DiffOp L = build_generator(p);
  const DiffOp* ops[4] = {&ls.a_p, &ls.a_m, &ls.ab_p, &ls.ab_m};
  for (int k = 0; k < 4; ++k) {
    DiffOp c = commutator(L, *ops[k]);
    double best = 1e300;
    std::pair<int, int> arg{0, 0};
    for (int tau : {+1, -1})
      for (int taup : {+1, -1}) {
        double r = rel_residual(c - sp.lambda(tau, taup) * (*ops[k]), *ops[k]);
        if (r < best) {
          best = r;
          arg = {tau, taup};
        }
      }
    if (best > 1e-10 * scale) throw std::runtime_error("make_ladders: eigen-relation failed");
    ls.pairing.idx[k] = arg;
  }

  // diagonal form L = mu+ ab+ a+ + mu- ab- a- + const, unique over the four
  // sign assignments of (mu+, mu-)
  const DiffOp n_p = ls.ab_p * ls.a_p, n_m = ls.ab_m * ls.a_m;
  const double opscale = std::max(1.0, norm_inf(n_p) + norm_inf(n_m));
  double best = 1e300, second = 1e300;
  for (cd mup : {sp.lambda(+1, -1), sp.lambda(-1, -1)})
    for (cd mum : {sp.lambda(+1, +1), sp.lambda(-1, +1)}) {
      DiffOp d = L - mup * n_p - mum * n_m;
      d -= DiffOp::mono(0, 0, 0, 0, d.coeff(0, 0, 0, 0));
      double r = norm_inf(d) / opscale;
      if (r < best) {
        second = best;
        best = r;
        ls.pairing.mu_plus = mup;
        ls.pairing.mu_minus = mum;
      } else if (r < second)
        second = r;
    }
  ls.pairing.diag_residual = best;
  if (best > 1e-10 || second < 1e2 * best)
    throw std::runtime_error("make_ladders: diagonal form not uniquely resolved");

  for (int k = 0; k < 4; ++k) ls.S.row(k) = coeff_vec(*ops[k]).transpose();
  ls.detS = ls.S.determinant();
  ls.T = ls.S.inverse();
  return ls;
}

Eigen::Matrix4cd basis_rows(char basis, const LadderSet& ls) {
  switch (basis) {
    case 'X':
      return Eigen::Matrix4cd::Identity();
    case 'A':
      return ls.S;
    case 'B': {
      BSet bs = b_operators(ls.params);
      Eigen::Matrix4cd B;
      const DiffOp* ops[4] = {&bs.b, &bs.bd, &bs.bb, &bs.bbd};
      for (int k = 0; k < 4; ++k) B.row(k) = coeff_vec(*ops[k]).transpose();
      return B;
    }
    case 'C':
      return c_rows();
    default:
      throw std::invalid_argument("basis must be one of X, A, B, C");
  }
}

Eigen::Matrix4cd basis_transform(char from, char to, const LadderSet& ls) {
  return basis_rows(from, ls) * basis_rows(to, ls).inverse();
}

cd omega_mn(const Spectrum& sp, int m, int n) {
  return -(sp.nu / 2.0 * (m + n) + I * sp.omega * cd(m - n));
}

GaussPolyState ladder_state_a(const LadderSet& ls, int m, int n) {
  GaussPolyState st = relaxed_state(ls.params);
  for (int k = 0; k < m; ++k) st = act(ls.ab_p, st);
  for (int k = 0; k < n; ++k) st = act(ls.ab_m, st);
  double fac = 1.0;
  for (int k = 2; k <= m; ++k) fac *= k;
  for (int k = 2; k <= n; ++k) fac *= k;
  return scale(st, 1.0 / std::sqrt(fac));
}

GaussPolyState coherent_w(const LadderSet& ls, cd wp, cd wm) {
  DiffOp lin = wp * ls.ab_p + wm * ls.ab_m;
  return WeylOp::from_linear(lin).apply_to(relaxed_state(ls.params));
}

cd coherent_x_mean(const LadderSet& ls, cd w) {
  cd g = w / (ls.spec.z * ls.spec.omega);
  return cd(-g.imag(), 0.0);
}

cd coherent_p_mean(const LadderSet& ls, cd w) {
  return cd(2.0 * (w * ls.spec.z).real(), 0.0);
}

std::pair<cd, cd> evolve_labels(const Spectrum& sp, cd wp, cd wm, double t) {
  const cd mup = sp.nu / 2.0 + I * sp.omega, mum = sp.nu / 2.0 - I * sp.omega;
  return {wp * std::exp(-mup * t), wm * std::exp(-mum * t)};
}

DiffOp heisenberg_evolve(const LadderSet& ls, const DiffOp& op, double t) {
  cd konst;
  Eigen::Vector4cd u = coeff_vec(op, &konst);
  Eigen::Vector4cd avec = ls.T.transpose() * u;  // components over (a+, a-, ab+, ab-)
  const cd mup = ls.spec.nu / 2.0 + I * ls.spec.omega, mum = ls.spec.nu / 2.0 - I * ls.spec.omega;
  avec(0) *= std::exp(-mup * t);
  avec(1) *= std::exp(-mum * t);
  avec(2) *= std::exp(mup * t);
  avec(3) *= std::exp(mum * t);
  DiffOp out = avec(0) * ls.a_p + avec(1) * ls.a_m + avec(2) * ls.ab_p + avec(3) * ls.ab_m;
  out += DiffOp::mono(0, 0, 0, 0, konst);
  return out;
}

namespace {
cd wick_rec(const std::vector<Eigen::Vector4cd>& av, std::vector<int> idx) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2) return 0.0;
  const Eigen::Vector4cd& u0 = av[idx[0]];
  cd sum = 0.0;
  for (size_t j = 1; j < idx.size(); ++j) {
    // only lowering(left) against raising(right) survives, channel by channel
    cd c = u0(0) * av[idx[j]](2) + u0(1) * av[idx[j]](3);
    if (c == cd(0)) continue;
    std::vector<int> rest;
    rest.reserve(idx.size() - 2);
    for (size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    sum += c * wick_rec(av, std::move(rest));
  }
  return sum;
}
}  // namespace

cd wick_expectation(const LadderSet& ls, const std::vector<DiffOp>& factors) {
  std::vector<Eigen::Vector4cd> av;
  av.reserve(factors.size());
  for (const auto& f : factors) {
    cd konst;
    Eigen::Vector4cd u = coeff_vec(f, &konst);
    if (std::abs(konst) > 0.0)
      throw std::invalid_argument("wick_expectation: factors must have no constant part");
    av.push_back(ls.T.transpose() * u);
  }
  std::vector<int> idx(av.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return wick_rec(av, idx);
}

AlgebraSweep run_algebra_sweep(std::uint64_t seed, int draws) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  AlgebraSweep sw;
  sw.draws = draws;
  for (int k = 0; k < draws; ++k) {
    ModelParams p;
    p.nu = (k % 2 == 0) ? 0.02 + 1.96 * u01(rng) : 2.02 + 1.96 * u01(rng);
    do {
      p.d0 = 3.0 * u01(rng);
      p.d2 = 3.0 * u01(rng);
    } while (p.s() < 0.05);
    p.beta = -1.0 + (0.9 * p.beta_max() + 1.0) * u01(rng);

    LadderSet ls = make_ladders(p);
    const DiffOp one = dop_one();
    double comm = 0.0;
    comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.ab_p) - one));
    comm = std::max(comm, norm_inf(commutator(ls.a_m, ls.ab_m) - one));
    comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.a_m)));
    comm = std::max(comm, norm_inf(commutator(ls.a_p, ls.ab_m)));
    comm = std::max(comm, norm_inf(commutator(ls.a_m, ls.ab_p)));
    comm = std::max(comm, norm_inf(commutator(ls.ab_p, ls.ab_m)));
    sw.max_comm_residual = std::max(sw.max_comm_residual, comm);

    DiffOp L = build_generator(p);
    const DiffOp* ops[4] = {&ls.a_p, &ls.a_m, &ls.ab_p, &ls.ab_m};
    for (int i = 0; i < 4; ++i) {
      cd lam = ls.spec.lambda(ls.pairing.idx[i].first, ls.pairing.idx[i].second);
      sw.max_eigen_residual = std::max(
          sw.max_eigen_residual, rel_residual(commutator(L, *ops[i]) - lam * (*ops[i]), *ops[i]));
    }

    GaussPolyState rho0 = relaxed_state(p);
    sw.max_annihilation = std::max(sw.max_annihilation, poly_norm(act(ls.a_p, rho0)));
    sw.max_annihilation = std::max(sw.max_annihilation, poly_norm(act(ls.a_m, rho0)));
    BSet bs = b_operators(p);
    sw.max_annihilation = std::max(sw.max_annihilation, poly_norm(act(bs.b, rho0)));
    sw.max_annihilation = std::max(sw.max_annihilation, poly_norm(act(bs.bd, rho0)));

    sw.max_T_mismatch =
        std::max(sw.max_T_mismatch, (ls.T - printed_T(p)).cwiseAbs().maxCoeff());
    sw.max_detS_err = std::max(sw.max_detS_err, std::abs(ls.detS - cd(1)));
    sw.max_diag_residual = std::max(sw.max_diag_residual, ls.pairing.diag_residual);
  }
  return sw;
}

}  // namespace oho
