#pragma once
// Spectral decomposition of the generator: damped-mode frequencies, the two
// pairs of ladder operators that diagonalise it, the 4x4 basis transforms
// among the coordinate, ladder, stationary-annihilation and closed-limit
// bases, Heisenberg evolution of linear observables, and the pair-contraction
// rule for stationary expectation values of ladder monomials.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "oho/diffop.hpp"
#include "oho/gauss.hpp"
#include "oho/params.hpp"

namespace oho {

struct Spectrum {
  double nu = 0.0;
  cd omega;          // sqrt(1 - nu^2/4), principal branch
  cd z;              // sqrt(1/2 + nu/(4 i omega)), principal branch
  cd Nminus;         // sqrt(1/2 - nu/(4 i omega)), analytic continuation of conj(z)
  bool degenerate = false;  // |nu - 2| below the working threshold

  // lambda_{tau,tau'} = -tau nu/2 + tau' i omega, tau,tau' in {+1,-1}
  cd lambda(int tau, int taup) const {
    return -tau * nu / 2.0 + cd(0, 1) * (static_cast<double>(taup) * omega);
  }
};
Spectrum make_spectrum(double nu);

// which lambda_{tau,tau'} each of (a+, a-, ab+, ab-) satisfies [L,op] = lambda op,
// plus the diagonal-form coefficients L = mu+ ab+ a+ + mu- ab- a-.
struct PairingRecord {
  std::array<std::pair<int, int>, 4> idx{};  // (tau,tau') per operator
  cd mu_plus, mu_minus;
  double diag_residual = 0.0;  // |L - const - diagonal form|_inf
};

struct LadderSet {
  ModelParams params;
  Spectrum spec;
  DiffOp a_p, a_m, ab_p, ab_m;  // lowering pair, raising pair
  Eigen::Matrix4cd S;  // rows: (a+, a-, ab+, ab-) over X = (x, p, xd, pd)
  Eigen::Matrix4cd T;  // inverse: X_i = sum_alpha T(i,alpha) A_alpha
  cd detS;
  PairingRecord pairing;
};

// Builds the four operators, verifies the commutation table
// [a_i, ab_j] = delta_ij, [a_i, a_j] = [ab_i, ab_j] = 0, the eigen-relations
// against the generator, and the diagonal form (unique over the four sign
// assignments). Throws std::domain_error at the degenerate point nu = 2 and
// std::runtime_error when a verification residual exceeds 1e-10.
LadderSet make_ladders(const ModelParams& p);

// coefficient vector of an operator of monomial degree <= 1 over
// X = (x, p, xd, pd); the constant part is returned separately
Eigen::Vector4cd coeff_vec(const DiffOp& op, cd* constant = nullptr);
DiffOp op_from_xvec(const Eigen::Vector4cd& u);

// ordered bases for transforms: 'X' coords, 'A' ladder (a+,a-,ab+,ab-),
// 'B' stationary annihilation (b, bd, bb, bbd), 'C' closed-limit
// (c+, c-, cb+, cb-). Rows of the returned matrix express the basis
// operators over X.
Eigen::Matrix4cd basis_rows(char basis, const LadderSet& ls);

// T with F_alpha = sum_beta T(alpha,beta) G_beta for ordered bases F, G
Eigen::Matrix4cd basis_transform(char from, char to, const LadderSet& ls);

// closed-form expected values of the X<-A transform, one per element;
// used to cross-check the numerically inverted T
Eigen::Matrix4cd printed_T(const ModelParams& p);

// The closed-limit ladder rows over X (nu = d0 = d2 = beta = 0):
//   c+- = (x +- xd/2 + i(p/2 +- pd))/sqrt(2) and conjugate partners; in this
//   limit the generator is -i(cb+ c+ - cb- c-) up to normal-ordering constants.
Eigen::Matrix4cd c_rows();

// (ab+^m ab-^n / sqrt(m! n!)) rho0 : generator eigenstate with eigenvalue
// Omega_mn = -(nu/2 (m+n) + i omega (m-n))
GaussPolyState ladder_state_a(const LadderSet& ls, int m, int n);
cd omega_mn(const Spectrum& sp, int m, int n);

// exp(wp ab+ + wm ab-) rho0 ; hermitian iff wm = conj(wp)
GaussPolyState coherent_w(const LadderSet& ls, cd wp, cd wm);

// first moments of a coherent state with wm = conj(wp) =: conj(w)
cd coherent_x_mean(const LadderSet& ls, cd w);   // -Im(w/(z omega))
cd coherent_p_mean(const LadderSet& ls, cd w);   // 2 Re(w z)
// labels evolve as w(t) = (wp e^{-(nu/2+i omega)t}, wm e^{-(nu/2-i omega)t})
std::pair<cd, cd> evolve_labels(const Spectrum& sp, cd wp, cd wm, double t);

// Heisenberg evolution of an operator with monomial degree <= 1: the ladder
// components pick up factors e^{-mu t} (lowering) / e^{+mu t} (raising),
// mu_pm = nu/2 +- i omega. The constant part is untouched.
DiffOp heisenberg_evolve(const LadderSet& ls, const DiffOp& op, double t);

// stationary expectation of a product of degree<=1 operators by pair
// contraction: the only nonzero pairing is a_tau (left) with ab_tau (right)
cd wick_expectation(const LadderSet& ls, const std::vector<DiffOp>& factors);

// randomized algebra sweep shared by the CLI and the acceptance gate
struct AlgebraSweep {
  int draws = 0;
  double max_comm_residual = 0.0;   // commutation table
  double max_eigen_residual = 0.0;  // [L, op] - lambda op
  double max_annihilation = 0.0;    // |a rho0|, |b rho0|
  double max_T_mismatch = 0.0;      // inverted T vs printed_T
  double max_detS_err = 0.0;        // |det S - 1|
  double max_diag_residual = 0.0;   // diagonal form
  bool ok(double tol = 1e-8) const {
    return max_comm_residual < tol && max_eigen_residual < tol && max_annihilation < tol &&
           max_T_mismatch < tol && max_detS_err < tol && max_diag_residual < tol;
  }
};
AlgebraSweep run_algebra_sweep(std::uint64_t seed, int draws);

}  // namespace oho
