#include "oho/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "oho/diffop.hpp"

namespace oho {

namespace {

// d<O>/dt on a trace-normalised state: the generator conserves the trace,
// so no quotient-rule term appears
cd observable_rate(const DiffOp& obs, const DiffOp& L, const GaussPolyState& st) {
  return trace(act(obs, act(L, st))) / trace(st);
}

GaussPolyState probe_state(cd v0, cd v1) {
  GaussPolyState st;
  st.M << cd(1.0), cd(0, 0.2), cd(0, 0.2), cd(1.1);
  st.v << v0, v1;
  st.logc = 0.0;
  return st;
}

}  // namespace

Eigen::Matrix2d stationary_covariance(const ModelParams& p) {
  Eigen::Matrix2d S;
  S << p.s() / (2.0 * p.nu), -p.d2 / 2.0, -p.d2 / 2.0, p.x2p2();
  return S;
}

MomentSystem derive_moment_system(const ModelParams& p, PConvention conv) {
  if (!generator_ok(p)) throw std::invalid_argument("derive_moment_system: bad parameters");
  const DiffOp L = build_generator(p);
  const DiffOp X = obs_x(), P = obs_p(conv);
  MomentSystem ms;

  // drift: fit mdot = A m + c over four displaced hermitian probes (three
  // unknowns per row), then demand c = 0 and a real A
  const double disp[4][2] = {{0.4, 0.25}, {-0.3, 0.35}, {0.2, -0.3}, {-0.15, -0.2}};
  Eigen::Matrix<cd, 4, 3> lhs;
  Eigen::Matrix<cd, 4, 1> bx, bp;
  for (int k = 0; k < 4; ++k) {
    // hermitian kernels need real v0, imaginary v1
    GaussPolyState st = probe_state(cd(disp[k][0]), cd(0, disp[k][1]));
    lhs(k, 0) = expectation(X, st);
    lhs(k, 1) = expectation(P, st);
    lhs(k, 2) = 1.0;
    bx(k) = observable_rate(X, L, st);
    bp(k) = observable_rate(P, L, st);
  }
  Eigen::Matrix<cd, 3, 1> rowx = lhs.colPivHouseholderQr().solve(bx);
  Eigen::Matrix<cd, 3, 1> rowp = lhs.colPivHouseholderQr().solve(bp);
  double res = std::max((lhs * rowx - bx).cwiseAbs().maxCoeff(),
                        (lhs * rowp - bp).cwiseAbs().maxCoeff());
  res = std::max({res, std::abs(rowx(2)), std::abs(rowp(2)), std::abs(rowx(0).imag()),
                  std::abs(rowx(1).imag()), std::abs(rowp(0).imag()), std::abs(rowp(1).imag())});
  ms.A << rowx(0).real(), rowx(1).real(), rowp(0).real(), rowp(1).real();
  ms.drift_residual = res;
  if (res > 1e-8) throw std::runtime_error("derive_moment_system: first moments are not linear");

  // diffusion from zero-mean probes: D = Sigmadot - A Sigma - Sigma A^T,
  // consistent across probes iff the noise is state-independent
  const DiffOp X2 = X * X, P2 = P * P;
  const DiffOp XP = cd(0.5) * (X * P + P * X);
  Eigen::Matrix2d Dfound[2];
  double imag_worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    GaussPolyState st = probe_state(0.0, 0.0);
    if (k == 1) st.M << cd(1.7), cd(0, -0.15), cd(0, -0.15), cd(0.9);
    Eigen::Matrix2cd Sg, Sgdot;
    Sg << expectation(X2, st), expectation(XP, st), expectation(XP, st), expectation(P2, st);
    Sgdot << observable_rate(X2, L, st), observable_rate(XP, L, st), observable_rate(XP, L, st),
        observable_rate(P2, L, st);
    Eigen::Matrix2cd Dk = Sgdot - ms.A.cast<cd>() * Sg - Sg * ms.A.transpose().cast<cd>();
    imag_worst = std::max(imag_worst, Dk.imag().cwiseAbs().maxCoeff());
    Dfound[k] = Dk.real();
  }
  ms.D = Dfound[0];
  ms.diffusion_residual =
      std::max(imag_worst, (Dfound[0] - Dfound[1]).cwiseAbs().maxCoeff());
  if (ms.diffusion_residual > 1e-8)
    throw std::runtime_error("derive_moment_system: diffusion is state-dependent");

  Eigen::EigenSolver<Eigen::Matrix2d> es(ms.A);
  ms.eigenvalues = es.eigenvalues();

  if (p.nu > 0.0) {
    // Lyapunov fixed point A S + S A^T + D = 0 for S = [[a,b],[b,c]]
    Eigen::Matrix3d K;
    const Eigen::Matrix2d& A = ms.A;
    K << 2 * A(0, 0), 2 * A(0, 1), 0,  //
        A(1, 0), A(0, 0) + A(1, 1), A(0, 1),  //
        0, 2 * A(1, 0), 2 * A(1, 1);
    Eigen::Vector3d rhs(-ms.D(0, 0), -ms.D(0, 1), -ms.D(1, 1));
    Eigen::Vector3d sol = K.colPivHouseholderQr().solve(rhs);
    ms.Sigma_inf << sol(0), sol(1), sol(1), sol(2);
    ms.energy_inf = 0.5 * (sol(0) + sol(2));
  } else {
    ms.Sigma_inf.setConstant(std::nan(""));
    ms.energy_inf = std::nan("");
  }
  return ms;
}

MomentTrajectory integrate_moments(const MomentSystem& ms, Eigen::Vector2d m0,
                                   Eigen::Matrix2d Sigma0, double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final >= 0.0))
    throw std::invalid_argument("integrate_moments: need dt > 0 and t_final >= 0");
  int steps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
  if (steps > 0) dt = t_final / steps;
  MomentTrajectory tr;
  Eigen::Vector2d m = m0;
  Eigen::Matrix2d S = Sigma0;
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.x_mean.push_back(m(0));
    tr.p_mean.push_back(m(1));
    const double x2 = S(0, 0) + m(0) * m(0), p2 = S(1, 1) + m(1) * m(1);
    tr.x2.push_back(x2);
    tr.p2.push_back(p2);
    tr.energy.push_back(0.5 * (x2 + p2));
  };
  auto mdot = [&](const Eigen::Vector2d& mm) { return (ms.A * mm).eval(); };
  auto Sdot = [&](const Eigen::Matrix2d& SS) {
    return (ms.A * SS + SS * ms.A.transpose() + ms.D).eval();
  };
  record(0.0);
  for (int k = 0; k < steps; ++k) {
    Eigen::Vector2d k1 = mdot(m), k2 = mdot(m + 0.5 * dt * k1), k3 = mdot(m + 0.5 * dt * k2),
                    k4 = mdot(m + dt * k3);
    Eigen::Matrix2d K1 = Sdot(S), K2 = Sdot(S + 0.5 * dt * K1), K3 = Sdot(S + 0.5 * dt * K2),
                    K4 = Sdot(S + dt * K3);
    m += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    S += dt / 6.0 * (K1 + 2 * K2 + 2 * K3 + K4);
    record((k + 1) * dt);
  }
  return tr;
}

}  // namespace oho
