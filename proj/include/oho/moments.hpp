#pragma once
// First/second-moment dynamics of the physical observables (xhat, phat):
//   d<m>/dt = A m,   dSigma/dt = A Sigma + Sigma A^T + D
// with A and D extracted from the generator by probing it on Gaussian
// kernels, never assumed. The stationary covariance solves the Lyapunov
// equation and is reported together with the stationary energy.

#include <Eigen/Dense>

#include "oho/gauss.hpp"
#include "oho/params.hpp"

namespace oho {

struct MomentSystem {
  Eigen::Matrix2d A;          // drift: expected [[0,1],[-1,-nu]]
  Eigen::Matrix2d D;          // diffusion (symmetric)
  Eigen::Matrix2d Sigma_inf;  // stationary covariance of (xhat, phat)
  Eigen::Vector2cd eigenvalues;
  double energy_inf = 0.0;    // (Sigma_xx + Sigma_pp)/2
  double drift_residual = 0.0;     // max deviation of A from the probe fit
  double diffusion_residual = 0.0; // consistency across probe states
};

// pre: generator_ok(p) and nu > 0 for the stationary pieces; with nu = 0 the
// Lyapunov solve is skipped and Sigma_inf is NaN. Throws std::runtime_error
// if the probed drift is inconsistent across probes (the dynamics would not
// be linear).
MomentSystem derive_moment_system(const ModelParams& p, PConvention conv = PConvention::full);

// closed-form stationary covariance for cross-checks:
//   [[s/(2 nu), -d2/2], [-d2/2, x2p2]]
Eigen::Matrix2d stationary_covariance(const ModelParams& p);

// trajectory of (trace, <x>, <p>, <x^2>, <p^2>, energy) under the moment ODE
struct MomentTrajectory {
  std::vector<double> t;
  std::vector<double> x_mean, p_mean, x2, p2, energy;
};
MomentTrajectory integrate_moments(const MomentSystem& ms, Eigen::Vector2d m0,
                                   Eigen::Matrix2d Sigma0, double t_final, double dt);

}  // namespace oho
