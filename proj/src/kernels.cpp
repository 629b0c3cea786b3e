#include "stiff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "stiff/errors.hpp"

namespace stiff {
namespace {

constexpr double pi = std::numbers::pi;

void check_ell(double ell, bool allow_zero) {
  if (std::isnan(ell) || ell < 0.0 || (!allow_zero && ell == 0.0))
    throw DomainError("splitting length must be positive or +inf");
}

// Central second-difference stencil of order six: w'' ~ sum_m a_m (w_{i+m} + w_{i-m} - 2 w_i) / dx^2.
constexpr double taylor6[3] = {1.5, -0.15, 1.0 / 90.0};

// Row weights of the discrete Levy operator, shared by levy_apply and the pair matrices.
struct LevyRows {
  Eigen::Index n;
  double dx, ell;
  std::vector<double> two_k;  // 2 dx-free kernel values 2 k(m dx), m >= 1
  double stencil[3] = {0, 0, 0};

  LevyRows(Eigen::Index n_, double dx_, double ell_) : n(n_), dx(dx_), ell(ell_), two_k(n_ + 1, 0.0) {
    for (Eigen::Index m = 1; m <= n; ++m) two_k[m] = 2.0 * levy_kernel(m * dx, ell);
    // The y = 0 node of the symmetrized integrand carries dx * L0 * w''(x).
    const double l0 = levy_kernel_limit(ell);
    bool positive = true;
    for (int m = 1; m <= 3; ++m) {
      const double lattice = m <= n ? dx * two_k[m] : 0.0;
      if (lattice + l0 * taylor6[m - 1] / dx < 0.0) positive = false;
    }
    if (positive) {
      for (int m = 0; m < 3; ++m) stencil[m] = l0 * taylor6[m] / dx;
    } else {
      stencil[0] = l0 / dx;
    }
  }

  double weight(Eigen::Index k) const { return (k == 0 || k == n - 1) ? 0.5 * dx : dx; }

  // Calls add(k, c) for every coefficient of out_i = sum_k c (w_k - w_i).
  template <class Add>
  void row(Eigen::Index i, Add&& add) const {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      add(k, weight(k) * two_k[std::abs(i - k)]);
    }
    for (int m = 1; m <= 3; ++m) {
      if (stencil[m - 1] == 0.0) continue;
      const Eigen::Index right = std::min<Eigen::Index>(i + m, n - 1);
      const Eigen::Index left = std::max<Eigen::Index>(i - m, 0);
      if (right != i) add(right, stencil[m - 1]);
      if (left != i) add(left, stencil[m - 1]);
    }
    const double xi = i * dx;
    const double xr = (n - 1) * dx;
    if (i != 0) add(0, 2.0 * levy_kernel_tail(xi, ell));
    if (i != n - 1) add(n - 1, 2.0 * levy_kernel_tail(xr - xi, ell));
  }
};

// Sixth-order central first derivative with endpoint clamping.
double derivative6(const Eigen::VectorXd& f, Eigen::Index i, double dx) {
  const Eigen::Index n = f.size();
  auto at = [&](Eigen::Index k) { return f[std::clamp<Eigen::Index>(k, 0, n - 1)]; };
  return (45.0 * (at(i + 1) - at(i - 1)) - 9.0 * (at(i + 2) - at(i - 2)) + (at(i + 3) - at(i - 3))) /
         (60.0 * dx);
}

// Kernels of the forms in trace_form (scaled cosh profiles).
double form_kernel_opposite(double d, double ell) {
  return 1.0 / (2.0 * ell * (std::cosh(d / ell) + 1.0));
}
double form_tail_opposite(double a, double ell) { return 1.0 / (std::exp(a / ell) + 1.0); }
double form_kernel_same(double d, double ell) {
  if (std::isinf(ell)) return 2.0 / (d * d);
  const double s = std::sinh(0.5 * d / ell);
  return 1.0 / (2.0 * ell * ell * s * s);
}
double form_tail_same(double a, double ell) {
  if (std::isinf(ell)) return 2.0 / a;
  return 2.0 / (ell * std::expm1(a / ell));
}

// Same-component form of one trace over R x R.
double same_form(const TraceFn& f, double ell) {
  const Eigen::Index n = f.size();
  const double dx = f.dx;
  std::vector<double> ker(n);
  for (Eigen::Index m = 1; m < n; ++m) ker[m] = form_kernel_same(m * dx, ell);
  const double l0 = 2.0;
  const auto& v = f.values;
  double interior = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      const double d = v[i] - v[k];
      row += f.weight(k) * d * d * ker[std::abs(i - k)];
    }
    const double slope = derivative6(v, i, dx);
    row += f.weight(i) * l0 * slope * slope;
    interior += f.weight(i) * row;
  }
  // Pairs with exactly one point outside the box, both orderings.
  double exterior = 0.0;
  const double xl = f.x(0), xr = f.x(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dl = v[i] - v[0], dr = v[i] - v[n - 1];
    double s = 0.0;
    if (i != 0) s += dl * dl * form_tail_same(f.x(i) - xl, ell);
    if (i != n - 1) s += dr * dr * form_tail_same(xr - f.x(i), ell);
    exterior += f.weight(i) * s;
  }
  return interior + 2.0 * exterior;
}

double opposite_form(const TraceFn& fp, const TraceFn& fm, double ell) {
  const Eigen::Index n = fp.size();
  const double dx = fp.dx;
  std::vector<double> ker(n);
  for (Eigen::Index m = 0; m < n; ++m) ker[m] = form_kernel_opposite(m * dx, ell);
  const auto& a = fp.values;
  const auto& b = fm.values;
  double interior = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = a[i] - b[k];
      row += fp.weight(k) * d * d * ker[std::abs(i - k)];
    }
    interior += fp.weight(i) * row;
  }
  double exterior = 0.0;
  const double xl = fp.x(0), xr = fp.x(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tl = form_tail_opposite(fp.x(i) - xl, ell);
    const double tr = form_tail_opposite(xr - fp.x(i), ell);
    // (x inside, x' outside) and (x outside, x' inside).
    const double s = (a[i] - b[0]) * (a[i] - b[0]) * tl + (a[i] - b[n - 1]) * (a[i] - b[n - 1]) * tr +
                     (a[0] - b[i]) * (a[0] - b[i]) * tl + (a[n - 1] - b[i]) * (a[n - 1] - b[i]) * tr;
    exterior += fp.weight(i) * s;
  }
  return interior + exterior;
}

// Closed form of int (1 - cos(s y)) / (cosh y +- 1) dy.
double symbol(Coupling mode, double s) {
  s = std::abs(s);
  const double ps = pi * s;
  if (mode == Coupling::opposite) {
    if (ps > 700.0) return 2.0;
    return 2.0 - 2.0 * ps / std::sinh(ps);
  }
  if (ps > 20.0) return 2.0 * ps - 2.0;
  return 2.0 * ps / std::tanh(ps) - 2.0;
}

}  // namespace

Eigen::VectorXd TraceFn::weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(size(), dx);
  if (size() > 0) {
    w[0] *= 0.5;
    w[size() - 1] *= 0.5;
  }
  return w;
}

void TraceFn::validate() const {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw GridError("trace spacing must be positive");
  if (size() < 4) throw GridError("trace needs at least 4 samples");
  if (!values.allFinite()) throw GridError("trace values must be finite");
  const double right = x(size() - 1);
  if (std::abs(right + x0) > 1e-9 * std::max(1.0, std::abs(x0)))
    throw GridError("trace grid must be symmetric about 0");
}

bool TraceFn::same_grid(const TraceFn& o) const {
  return size() == o.size() && std::abs(dx - o.dx) <= 1e-12 * dx && std::abs(x0 - o.x0) <= 1e-12 * std::max(1.0, std::abs(x0));
}

TraceFn TraceFn::sample(double half_width, Eigen::Index cells, const std::function<double(double)>& f) {
  TraceFn t;
  t.x0 = -half_width;
  t.dx = 2.0 * half_width / static_cast<double>(cells);
  t.values.resize(cells + 1);
  for (Eigen::Index i = 0; i <= cells; ++i) t.values[i] = f(t.x(i));
  return t;
}

double poisson_kernel(double x1, double x2) {
  if (!(x2 > 0.0 && x2 < pi)) throw DomainError("poisson_kernel needs 0 < x2 < pi");
  return std::sin(x2) / (2.0 * pi * (std::cosh(x1) - std::cos(x2)));
}

double cosh_kernel(double d, const KernelSpec& spec) {
  check_ell(spec.ell, false);
  if (spec.mode == Coupling::same && d == 0.0)
    throw SingularityError("same-component kernel is singular at d = 0");
  if (std::isinf(spec.ell)) return spec.mode == Coupling::same ? 2.0 / (d * d) : 0.0;
  const double b = pi / (2.0 * spec.ell);
  const double z = b * d;
  if (spec.mode == Coupling::opposite) return b * b / (std::cosh(z) + 1.0);
  const double s = std::sinh(0.5 * z);
  return b * b / (2.0 * s * s);
}

double cosh_kernel_tail(double a, const KernelSpec& spec) {
  check_ell(spec.ell, false);
  if (a < 0.0 || (spec.mode == Coupling::same && a == 0.0))
    throw DomainError("kernel tail needs a > 0");
  if (std::isinf(spec.ell)) return spec.mode == Coupling::same ? 2.0 / a : 0.0;
  const double b = pi / (2.0 * spec.ell);
  if (spec.mode == Coupling::opposite) return 2.0 * b / (std::exp(b * a) + 1.0);
  return 2.0 * b / std::expm1(b * a);
}

double levy_kernel(double y, double ell) {
  if (std::isinf(ell)) {
    if (y == 0.0) throw SingularityError("Levy kernel is singular at 0");
    return 1.0 / (y * y);
  }
  return cosh_kernel(y, {ell, Coupling::same});
}

double levy_kernel_tail(double a, double ell) {
  if (std::isinf(ell)) {
    if (!(a > 0.0)) throw DomainError("kernel tail needs a > 0");
    return 1.0 / a;
  }
  return cosh_kernel_tail(a, {ell, Coupling::same});
}

double levy_kernel_limit(double ell) {
  check_ell(ell, false);
  return std::isinf(ell) ? 1.0 : 2.0;
}

Eigen::MatrixXd levy_row_weights(Eigen::Index n, double dx, double ell) {
  check_ell(ell, false);
  if (n < 8) throw GridError("Levy operator needs at least 8 grid points");
  LevyRows rows(n, dx, ell);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) rows.row(i, [&](Eigen::Index k, double v) { c(i, k) += v; });
  return c;
}

TraceFn levy_apply(const TraceFn& w, double ell) {
  check_ell(ell, false);
  if (w.size() < 8) throw GridError("levy_apply needs at least 8 grid points");
  if (!w.values.allFinite()) throw DomainError("levy_apply input must be finite");
  LevyRows rows(w.size(), w.dx, ell);
  TraceFn out = w;
  const auto& v = w.values;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    double acc = 0.0;
    rows.row(i, [&](Eigen::Index k, double c) { acc += c * (v[k] - v[i]); });
    out.values[i] = acc;
  }
  return out;
}

Eigen::MatrixXd opposite_row_weights(Eigen::Index n, double dx, double ell) {
  check_ell(ell, false);
  if (std::isinf(ell)) return Eigen::MatrixXd::Zero(n, n);
  const KernelSpec spec{ell, Coupling::opposite};
  std::vector<double> ker(n);
  for (Eigen::Index m = 0; m < n; ++m) ker[m] = cosh_kernel(m * dx, spec);
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double w = (k == 0 || k == n - 1) ? 0.5 * dx : dx;
      d(i, k) = w * ker[std::abs(i - k)];
    }
    d(i, 0) += cosh_kernel_tail(i * dx, spec);
    d(i, n - 1) += cosh_kernel_tail((n - 1 - i) * dx, spec);
  }
  return d;
}

Eigen::MatrixXd symmetrize_from_interior(const Eigen::MatrixXd& c, const Eigen::VectorXd& w) {
  const Eigen::Index n = c.rows();
  auto interior = [n](Eigen::Index i) { return i > 0 && i < n - 1; };
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (interior(i) || !interior(k))
        g(i, k) = w[i] * c(i, k);
      else
        g(i, k) = w[k] * c(k, i);
    }
  return g;
}

TraceForms trace_form(const TraceFn& f_plus, const TraceFn& f_minus, double ell) {
  check_ell(ell, true);
  f_plus.validate();
  f_minus.validate();
  if (!f_plus.same_grid(f_minus)) throw GridError("trace_form operands live on different grids");
  TraceForms out;
  if (ell == 0.0) {
    const Eigen::VectorXd d = f_plus.values - f_minus.values;
    out.A1 = (f_plus.weights().array() * d.array().square()).sum();
    out.A2 = 0.0;
    return out;
  }
  out.A1 = std::isinf(ell) ? 0.0 : opposite_form(f_plus, f_minus, ell);
  out.A2 = same_form(f_plus, ell) + same_form(f_minus, ell);
  return out;
}

double moment_weight(double t) {
  if (std::abs(t) < 1e-4) return 0.5 - t * t / 24.0;
  const double s = std::sin(0.5 * t);
  return 2.0 * s * s / (t * t);
}

double kernel_moment(Coupling mode) {
  // Trapezoid on the real line; the integrand is analytic in a strip of half-width pi,
  // so the rule converges geometrically in 1/h.
  const double h = 0.05, radius = 60.0;
  const int m = static_cast<int>(radius / h);
  double sum = mode == Coupling::opposite ? 0.0 : 2.0;  // value at y = 0
  for (int k = 1; k <= m; ++k) {
    const double y = k * h;
    double v;
    if (mode == Coupling::opposite) {
      v = y * y / (std::cosh(y) + 1.0);
    } else {
      const double s = std::sinh(0.5 * y);
      v = y * y / (2.0 * s * s);
    }
    sum += 2.0 * v;
  }
  return h * sum;
}

double moment_profile(Coupling mode, double s) {
  s = std::abs(s);
  if (s < 1e-2) {
    const double p2 = pi * pi, p4 = p2 * p2, p6 = p4 * p2, s2 = s * s;
    if (mode == Coupling::opposite) return p2 / 3.0 - 7.0 * p4 * s2 / 180.0 + 31.0 * p6 * s2 * s2 / 7560.0;
    return 2.0 * p2 / 3.0 - 2.0 * p4 * s2 / 45.0 + 4.0 * p6 * s2 * s2 / 945.0;
  }
  return symbol(mode, s) / (s * s);
}

FourierForms trace_form_fourier(const TraceFn& f, double ell, double decay_tol) {
  check_ell(ell, false);
  if (std::isinf(ell)) throw DomainError("trace_form_fourier needs finite ell");
  f.validate();
  FourierForms out;
  const Eigen::Index n = f.size();
  const double scale = std::max(1.0, f.values.cwiseAbs().maxCoeff());
  out.non_decaying = std::max(std::abs(f.values[0]), std::abs(f.values[n - 1])) > decay_tol * scale;
  if (f.values.cwiseAbs().maxCoeff() == 0.0) return out;

  // Zero padding: the period must dominate both the support and the kernel range ell.
  const double period_needed = 2.0 * (2.0 * f.half_width() + 60.0 * ell);
  Eigen::Index nfft = 1;
  while (nfft < 8 * n || nfft * f.dx < period_needed) nfft <<= 1;

  std::vector<double> padded(nfft, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) padded[i] = f.values[i] * f.weight(i);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);

  const double dxi = 2.0 * pi / (nfft * f.dx);
  double a1 = 0.0, a2 = 0.0;
  for (Eigen::Index k = 0; k < nfft; ++k) {
    const Eigen::Index kk = k <= nfft / 2 ? k : k - nfft;
    const double xi = kk * dxi;
    const double power = std::norm(spec[k]) / (2.0 * pi);  // |f^(xi)|^2, unitary convention
    const double s = ell * xi;
    a1 += power * s * s * moment_profile(Coupling::opposite, s);
    a2 += power * s * s * moment_profile(Coupling::same, s);
  }
  out.A1 = a1 * dxi;
  out.A2 = 4.0 / ell * a2 * dxi;
  return out;
}

}  // namespace stiff
