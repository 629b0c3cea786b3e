#pragma once

#include <cmath>
#include <vector>

#include "stiff/layout.hpp"

namespace stiff {

// Layer thickness eps and the conductivities inside the layer.
struct ScaleParams {
  double eps = 1.0;
  double a_tan = 1.0;   // along the layer
  double a_norm = 1.0;  // across the layer

  double C() const { return eps * a_tan; }   // tangent total conductivity
  double R() const { return eps / a_norm; }  // normal total resistance
  double M() const { return std::sqrt(C() / R()); }
  double L() const { return std::sqrt(C() * R()); }

  // Throws DomainError unless all three are positive and finite.
  static ScaleParams make(double eps, double a_tan, double a_norm);
};

// Merged-barrier operator of (1/2) div(A grad) with A = diag(a_tan, a_norm) for |x2| < eps.
// eps must be a positive integer multiple of dy and below Ly/2.
LinearOperator assemble_eps_operator(const SplitGrid& grid, const ScaleParams& s);

struct Trajectory {
  std::vector<double> times;
  std::vector<SplitField> states;
};

SplitField step(const SplitField& state, const LinearOperator& op, double dt, double theta = 0.5);

// Default dt <= 0 selects dt = dy.
SplitField solve_eps(const SplitField& u0, double t_end, double dt, const ScaleParams& s, const SplitGrid& grid,
                     const SolveOptions& opts = {}, Trajectory* snapshots = nullptr);

// |int (u0 - u(t)) g - (1/2) int_0^t int A grad u . grad g|, cell-midpoint quadrature in
// space and trapezoid over the snapshot times.
double weak_residual(const Trajectory& traj, const SplitField& g, const ScaleParams& s, const SplitGrid& grid);

}  // namespace stiff
