#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>

namespace stiff {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Kernels across the barrier ("opposite", cosh + 1) or along one side ("same", cosh - 1).
enum class Coupling { opposite, same };

struct KernelSpec {
  double ell;  // splitting length, may be kInf
  Coupling mode;
};

// Samples of a function on the barrier line, uniform grid over [-Lx, Lx].
struct TraceFn {
  double x0 = -1.0;
  double dx = 1.0;
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  double x(Eigen::Index i) const { return x0 + static_cast<double>(i) * dx; }
  double half_width() const { return -x0; }
  // Trapezoid weight of node i.
  double weight(Eigen::Index i) const {
    return (i == 0 || i == size() - 1) ? 0.5 * dx : dx;
  }
  Eigen::VectorXd weights() const;

  // Throws GridError unless dx > 0, length >= 4, finite values, grid symmetric about 0.
  void validate() const;
  bool same_grid(const TraceFn& other) const;

  static TraceFn sample(double half_width, Eigen::Index cells,
                        const std::function<double(double)>& f);
};

// Poisson kernel of the strip R x (0, pi).
double poisson_kernel(double x1, double x2);

// 1 / [(2 ell/pi)^2 (cosh(pi d / 2 ell) +- 1)], with the ell = inf limits 0 and 2/d^2.
double cosh_kernel(double d, const KernelSpec& spec);
// Integral of cosh_kernel over (a, inf), a > 0 (a >= 0 for opposite mode).
double cosh_kernel_tail(double a, const KernelSpec& spec);

// Kernel of the Levy operator: cosh_kernel(same) for finite ell and the
// 1-stable kernel 1/y^2 for ell = inf.
double levy_kernel(double y, double ell);
double levy_kernel_tail(double a, double ell);
// lim_{y->0} y^2 levy_kernel(y).
double levy_kernel_limit(double ell);

// Integral of [w(x+y) - 2w(x) + w(x-y)] levy_kernel(y) dy at each node, with w
// continued by its endpoint values outside the grid.
TraceFn levy_apply(const TraceFn& w, double ell);

// Row weights of levy_apply: out_i = sum_k C(i,k) (w_k - w_i). Zero diagonal.
Eigen::MatrixXd levy_row_weights(Eigen::Index n, double dx, double ell);

// Row weights of the opposite-kernel flux
//   out_i = int (a(x_i) - b(x')) cosh_kernel(x_i - x', opposite) dx' = sum_k D(i,k) (a_i - b_k),
// with b continued by its endpoint values. ell must be finite.
Eigen::MatrixXd opposite_row_weights(Eigen::Index n, double dx, double ell);

// Symmetric pair conductances G(i,k) = w_i C(i,k) taken from the row of the
// interior node of each pair; endpoint-endpoint pairs use the first row met.
// Rows of interior nodes reproduce C exactly in the weighted generator.
Eigen::MatrixXd symmetrize_from_interior(const Eigen::MatrixXd& C, const Eigen::VectorXd& w);

struct TraceForms {
  double A1 = 0.0;  // opposite-component form
  double A2 = 0.0;  // sum of the two same-component forms
};

// Double-integral forms
//   A1 = int int (f+(x) - f-(x'))^2 / (2 ell (cosh((x-x')/ell) + 1))
//   A2 = sum_{s=+-} int int (f_s(x) - f_s(x'))^2 / (ell^2 (cosh((x-x')/ell) - 1))
// over R x R (endpoint continuation; pairs with both points outside the box are
// dropped). ell = 0: A1 = int (f+ - f-)^2, A2 = 0. ell = inf: A1 = 0, A2 with kernel 2/(x-x')^2.
TraceForms trace_form(const TraceFn& f_plus, const TraceFn& f_minus, double ell);

struct FourierForms {
  double A1 = 0.0;
  double A2 = 0.0;
  bool non_decaying = false;  // endpoint values above tolerance
};

// Spectral evaluation of trace_form(f, f, ell) for finite ell > 0.
FourierForms trace_form_fourier(const TraceFn& f, double ell, double decay_tol = 1e-8);

// (1 - cos t) / t^2, with value 1/2 at t = 0.
double moment_weight(double t);
// int y^2 / (cosh y +- 1) dy (opposite: +, same: -), by quadrature.
double kernel_moment(Coupling mode);
// int y^2 / (cosh y +- 1) * moment_weight(s y) dy.
double moment_profile(Coupling mode, double s);

}  // namespace stiff
