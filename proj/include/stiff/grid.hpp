#pragma once

#include <Eigen/Dense>
#include <functional>

#include "stiff/kernels.hpp"

namespace stiff {

enum class Side { plus, minus };

// Truncated split plane [-Lx, Lx] x ([0, Ly] u [-Ly, 0]); nx cells across, ny cells per half.
struct SplitGrid {
  double Lx = 1.0, Ly = 1.0;
  int nx = 8, ny = 4;

  double dx() const { return 2.0 * Lx / nx; }
  double dy() const { return Ly / ny; }
  double x1(int i) const { return -Lx + i * dx(); }
  // Trapezoid weight in x1 of column i.
  double wx(int i) const { return (i == 0 || i == nx) ? 0.5 * dx() : dx(); }
  // Trapezoid weight in x2 of row j of one half-plane.
  double wy(int j) const { return (j == 0 || j == ny) ? 0.5 * dy() : dy(); }
  bool operator==(const SplitGrid& o) const {
    return Lx == o.Lx && Ly == o.Ly && nx == o.nx && ny == o.ny;
  }
};

// Throws GridError unless nx >= 8 is even, ny >= 4 and both half-widths are positive.
SplitGrid make_grid(double Lx, double Ly, int nx, int ny);

// Field on the split plane. Row j of `upper` sits at x2 = +j dy, row j of `lower`
// at x2 = -j dy; row 0 of each is that side's boundary row. Columns index x1.
struct SplitField {
  SplitGrid grid;
  Eigen::MatrixXd upper;
  Eigen::MatrixXd lower;

  SplitField() = default;
  explicit SplitField(const SplitGrid& g);

  Eigen::MatrixXd& half(Side s) { return s == Side::plus ? upper : lower; }
  const Eigen::MatrixXd& half(Side s) const { return s == Side::plus ? upper : lower; }
  // Signed x2 coordinate of row j on side s.
  double x2(Side s, int j) const { return s == Side::plus ? j * grid.dy() : -j * grid.dy(); }

  bool allFinite() const { return upper.allFinite() && lower.allFinite(); }

  SplitField& operator+=(const SplitField& o);
  SplitField& operator-=(const SplitField& o);
  SplitField& operator*=(double a);
};

SplitField operator+(SplitField a, const SplitField& b);
SplitField operator-(SplitField a, const SplitField& b);
SplitField operator*(double a, SplitField f);

// Samples f(x1, x2) on both halves; both boundary rows get f(x1, 0).
SplitField sample_field(const SplitGrid& g, const std::function<double(double, double)>& f);
// Independent functions on the two halves (x2 >= 0 for plus, x2 <= 0 for minus).
SplitField sample_field(const SplitGrid& g, const std::function<double(double, double)>& f_plus,
                        const std::function<double(double, double)>& f_minus);

TraceFn trace(const SplitField& f, Side side);
// Second-order one-sided approximation of du/dx2 at x2 = 0+ (plus) or 0- (minus).
TraceFn normal_derivative(const SplitField& f, Side side);

// Trapezoid mass weights (dx dy, halved on box edges and on each boundary row).
Eigen::MatrixXd half_weights(const SplitGrid& g);

double inner(const SplitField& f, const SplitField& g);
double l2_norm(const SplitField& f);
double l2_diff(const SplitField& f, const SplitField& g);
double total_mass(const SplitField& f);
double side_mass(const SplitField& f, Side side);

// Bilinear interpolation on side s at (x1, |x2|); points outside the box are clamped.
double sample_bilinear(const SplitField& f, Side s, double x1, double x2_abs);
// Bilinear restriction of f onto another grid.
SplitField restrict_to(const SplitField& f, const SplitGrid& target);

void require_same_grid(const SplitField& f, const SplitField& g);

}  // namespace stiff
