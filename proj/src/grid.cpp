#include "stiff/grid.hpp"

#include <algorithm>
#include <cmath>

#include "stiff/errors.hpp"

namespace stiff {

SplitGrid make_grid(double Lx, double Ly, int nx, int ny) {
  if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly))
    throw GridError("grid half-widths must be positive");
  if (nx < 8 || nx % 2 != 0) throw GridError("nx must be even and at least 8");
  if (ny < 4) throw GridError("ny must be at least 4");
  return SplitGrid{Lx, Ly, nx, ny};
}

SplitField::SplitField(const SplitGrid& g)
    : grid(g),
      upper(Eigen::MatrixXd::Zero(g.ny + 1, g.nx + 1)),
      lower(Eigen::MatrixXd::Zero(g.ny + 1, g.nx + 1)) {}

void require_same_grid(const SplitField& f, const SplitField& g) {
  if (!(f.grid == g.grid)) throw GridError("fields live on different grids");
}

SplitField& SplitField::operator+=(const SplitField& o) {
  require_same_grid(*this, o);
  upper += o.upper;
  lower += o.lower;
  return *this;
}

SplitField& SplitField::operator-=(const SplitField& o) {
  require_same_grid(*this, o);
  upper -= o.upper;
  lower -= o.lower;
  return *this;
}

SplitField& SplitField::operator*=(double a) {
  upper *= a;
  lower *= a;
  return *this;
}

SplitField operator+(SplitField a, const SplitField& b) { return a += b; }
SplitField operator-(SplitField a, const SplitField& b) { return a -= b; }
SplitField operator*(double a, SplitField f) { return f *= a; }

SplitField sample_field(const SplitGrid& g, const std::function<double(double, double)>& f) {
  return sample_field(g, f, f);
}

SplitField sample_field(const SplitGrid& g, const std::function<double(double, double)>& f_plus,
                        const std::function<double(double, double)>& f_minus) {
  SplitField out(g);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      out.upper(j, i) = f_plus(g.x1(i), j * g.dy());
      out.lower(j, i) = f_minus(g.x1(i), -j * g.dy());
    }
  return out;
}

TraceFn trace(const SplitField& f, Side side) {
  TraceFn t;
  t.x0 = -f.grid.Lx;
  t.dx = f.grid.dx();
  t.values = f.half(side).row(0).transpose();
  return t;
}

TraceFn normal_derivative(const SplitField& f, Side side) {
  if (f.grid.ny < 3) throw GridError("normal_derivative needs ny >= 3");
  const auto& h = f.half(side);
  TraceFn t;
  t.x0 = -f.grid.Lx;
  t.dx = f.grid.dx();
  const double sign = side == Side::plus ? -1.0 : 1.0;
  t.values = (sign / (2.0 * f.grid.dy())) * (3.0 * h.row(0) - 4.0 * h.row(1) + h.row(2)).transpose();
  return t;
}

Eigen::MatrixXd half_weights(const SplitGrid& g) {
  Eigen::MatrixXd w(g.ny + 1, g.nx + 1);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) w(j, i) = g.wx(i) * g.wy(j);
  return w;
}

double inner(const SplitField& f, const SplitField& g) {
  require_same_grid(f, g);
  const Eigen::MatrixXd w = half_weights(f.grid);
  return (w.array() * (f.upper.array() * g.upper.array() + f.lower.array() * g.lower.array())).sum();
}

double l2_norm(const SplitField& f) { return std::sqrt(inner(f, f)); }

double l2_diff(const SplitField& f, const SplitField& g) { return l2_norm(f - g); }

double side_mass(const SplitField& f, Side side) {
  return (half_weights(f.grid).array() * f.half(side).array()).sum();
}

double total_mass(const SplitField& f) { return side_mass(f, Side::plus) + side_mass(f, Side::minus); }

double sample_bilinear(const SplitField& f, Side s, double x1, double x2_abs) {
  const SplitGrid& g = f.grid;
  const double u = std::clamp((x1 + g.Lx) / g.dx(), 0.0, static_cast<double>(g.nx));
  const double v = std::clamp(std::abs(x2_abs) / g.dy(), 0.0, static_cast<double>(g.ny));
  const int i = std::min(static_cast<int>(u), g.nx - 1);
  const int j = std::min(static_cast<int>(v), g.ny - 1);
  const double a = u - i, b = v - j;
  const auto& h = f.half(s);
  return (1 - a) * (1 - b) * h(j, i) + a * (1 - b) * h(j, i + 1) + (1 - a) * b * h(j + 1, i) +
         a * b * h(j + 1, i + 1);
}

SplitField restrict_to(const SplitField& f, const SplitGrid& target) {
  if (f.grid == target) return f;
  SplitField out(target);
  for (Side s : {Side::plus, Side::minus})
    for (int j = 0; j <= target.ny; ++j)
      for (int i = 0; i <= target.nx; ++i)
        out.half(s)(j, i) = sample_bilinear(f, s, target.x1(i), j * target.dy());
  return out;
}

}  // namespace stiff
