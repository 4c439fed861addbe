#pragma once
// Gaussian density kernels with polynomial prefactor:
//
//   rho(x, x_d) = P(x, x_d) * exp(-1/2 X^T M X - v.X + logc),  X = (x, x_d)
//
// closed under the differential operators of diffop.hpp. Traces, overlaps
// and expectation values reduce to Gaussian moment recursions and are exact
// up to rounding. The stationary kernel, its annihilation pair (b, b_d),
// and coherent/number excitations built on it all live here.

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "oho/diffop.hpp"
#include "oho/params.hpp"

namespace oho {

struct GaussPolyState {
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Zero();
  Eigen::Vector2cd v = Eigen::Vector2cd::Zero();
  cd logc = 0.0;
  std::map<std::pair<int, int>, cd> poly;  // (j,k) -> coeff of x^j x_d^k

  GaussPolyState() { poly[{0, 0}] = cd(1); }

  cd poly_coeff(int j, int k) const {
    auto it = poly.find({j, k});
    return it == poly.end() ? cd(0) : it->second;
  }
  int poly_degree() const {
    int d = 0;
    for (const auto& [jk, c] : poly) d = std::max(d, jk.first + jk.second);
    return d;
  }
  void prune(double rel = 0.0);
  cd value(double x, double xd) const;
};

// max |poly coeff|, the natural magnitude of a state relative to its envelope
double poly_norm(const GaussPolyState& s);

// multiply the whole kernel by a constant
GaussPolyState scale(const GaussPolyState& s, cd factor);

// Stationary kernel of the generator: P = 1, M = [[q, i sigma],[i sigma, r]],
// v = 0, normalised to unit trace. Throws std::invalid_argument when the
// parameters fail validation.
GaussPolyState relaxed_state(const ModelParams& p);

// apply a differential operator; derivatives act before multiplications
// within each monomial (normal order)
GaussPolyState act(const DiffOp& op, const GaussPolyState& s);

// integral over x at x_d = 0
cd trace(const GaussPolyState& s);

// <<A|B>> = integral of conj(A(x,xd)) B(x,xd) dx dxd; the conjugation is of
// the kernel values only, the arguments are not flipped
cd overlap(const GaussPolyState& A, const GaussPolyState& B);

// rho(x,xd) = conj(rho(x,-xd)) up to tol, measured on the coefficient data
bool is_hermitian(const GaussPolyState& s, double tol = 1e-10);

// exp(linear operator) acting in closed form. Built from an operator with
// monomial degree <= 1 (a constant, multiplications by x/x_d, first
// derivatives); throws std::invalid_argument otherwise.
struct WeylOp {
  Eigen::Vector2cd shift = Eigen::Vector2cd::Zero();  // derivative part: exp(g.D) translates
  Eigen::Vector2cd mult = Eigen::Vector2cd::Zero();   // linear multiplication part
  cd phi = 0.0;  // scalar accumulated by the splitting, incl. g0 and cross term

  static WeylOp from_linear(const DiffOp& op);
  GaussPolyState apply_to(const GaussPolyState& s) const;
};

// Annihilation pair of the stationary kernel and its formal adjoints:
//   b      = (Q x + dx/Q + i sigma x_d/Q)/sqrt(2)
//   b_bar  = (Q x - dx/Q - i sigma x_d/Q)/sqrt(2)
//   b_d    = (-(sigma/R) x + i R x_d + i dxd/R)/sqrt(2)
//   bb_d   = (-(sigma/R) x - i R x_d + i dxd/R)/sqrt(2)
// with Q = sqrt(q), R = sqrt(r). [b, b_bar] = [b_d, bb_d] = 1 and both
// b and b_d annihilate the stationary kernel.
struct BSet {
  DiffOp b, bb, bd, bbd;
  double Q = 0.0, R = 0.0, sigma = 0.0;
  double n00 = 0.0;  // <<rho0|rho0>> = Q/(2R)
};
BSet b_operators(const ModelParams& p);

// (bb^m bbd^n / sqrt(m! n!)) rho0 : orthonormal relative to n00
GaussPolyState ladder_state_b(const ModelParams& p, int m, int n);

// exp(u bb + v bbd) rho0
GaussPolyState coherent_uv(const ModelParams& p, cd u, cd v);

// observables in the doubled coordinates
enum class PConvention { full, simplified };
DiffOp obs_x();                     // x + x_d/2
DiffOp obs_p(PConvention c);        // p/2 + p_d  (full) or p_d (simplified)
cd expectation(const DiffOp& obs, const GaussPolyState& s);

// Discretised kernel positivity: eigenvalues of the hermitised matrix
//   A_ij = h * rho((x_i+x_j)/2, x_i - x_j)
// on x_i = -L + i*2L/(N-1). Returns all eigenvalues ascending.
Eigen::VectorXd kernel_eigenvalues(const GaussPolyState& s, int N, double L);

// default window for kernel_eigenvalues, 8 * max(1/Q, 1/sqrt(Re r))
double kernel_window(const ModelParams& p);

}  // namespace oho
