#include "stiff/eps_solver.hpp"

#include <cmath>

#include "stiff/errors.hpp"

namespace stiff {
namespace {

// Number of grid rows spanned by the layer half-thickness.
int layer_rows(const SplitGrid& grid, const ScaleParams& s) {
  const double m = s.eps / grid.dy();
  const double r = std::round(m);
  if (r < 1.0 || std::abs(m - r) > 1e-9 * std::max(1.0, m))
    throw AlignmentError("layer thickness eps must be an integer multiple of dy");
  if (!(s.eps < 0.5 * grid.Ly)) throw AlignmentError("layer thickness eps must be below Ly/2");
  return static_cast<int>(r);
}

}  // namespace

ScaleParams ScaleParams::make(double eps, double a_tan, double a_norm) {
  for (double v : {eps, a_tan, a_norm})
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("scale parameters must be positive and finite");
  return ScaleParams{eps, a_tan, a_norm};
}

LinearOperator assemble_eps_operator(const SplitGrid& grid, const ScaleParams& s) {
  ScaleParams::make(s.eps, s.a_tan, s.a_norm);
  const int m = layer_rows(grid, s);
  Layout layout(grid, BarrierKind::merged);
  // The cell around row m is half inside the layer: arithmetic mean along x1.
  // Edges between rows never straddle |x2| = eps, so their harmonic mean is exact.
  const auto tan = [&](Side, int j) { return j < m ? s.a_tan : (j == m ? 0.5 * (s.a_tan + 1.0) : 1.0); };
  const auto norm = [&](Side, int j) { return j + 1 <= m ? s.a_norm : 1.0; };
  StiffnessBuilder b(layout.size());
  add_diffusion(layout, tan, norm, b);
  Generator gen{layout.mass(), b.build(), nullptr};
  return LinearOperator{layout, std::move(gen)};
}

SplitField step(const SplitField& state, const LinearOperator& op, double dt, double theta) {
  ThetaScheme scheme(op.gen, dt, theta);
  return op.layout.unpack(scheme.step(op.layout.pack(state)));
}

SplitField solve_eps(const SplitField& u0, double t_end, double dt, const ScaleParams& s, const SplitGrid& grid,
                     const SolveOptions& opts, Trajectory* snapshots) {
  if (!u0.allFinite()) throw DomainError("initial field must be finite");
  const LinearOperator op = assemble_eps_operator(grid, s);
  if (dt <= 0.0) dt = grid.dy();
  StepObserver obs;
  if (snapshots) {
    snapshots->times.clear();
    snapshots->states.clear();
    obs = [&](double t, const Eigen::VectorXd& u) {
      snapshots->times.push_back(t);
      snapshots->states.push_back(op.layout.unpack(u));
    };
  }
  return op.layout.unpack(evolve(op.gen, op.layout.pack(u0), t_end, dt, opts, obs));
}

double weak_residual(const Trajectory& traj, const SplitField& g, const ScaleParams& s, const SplitGrid& grid) {
  if (traj.states.empty()) return 0.0;
  const int m = layer_rows(grid, s);
  const double dx = grid.dx(), dy = grid.dy();

  // (1/2) int A grad u . grad g with gradients at cell centres.
  auto form = [&](const SplitField& u) {
    double acc = 0.0;
    for (Side side : {Side::plus, Side::minus}) {
      const auto& a = u.half(side);
      const auto& b = g.half(side);
      for (int j = 0; j < grid.ny; ++j) {
        const bool inside = j + 1 <= m;
        const double at = inside ? s.a_tan : 1.0, an = inside ? s.a_norm : 1.0;
        for (int i = 0; i < grid.nx; ++i) {
          const double ux = (a(j, i + 1) - a(j, i) + a(j + 1, i + 1) - a(j + 1, i)) / (2 * dx);
          const double uy = (a(j + 1, i) - a(j, i) + a(j + 1, i + 1) - a(j, i + 1)) / (2 * dy);
          const double gx = (b(j, i + 1) - b(j, i) + b(j + 1, i + 1) - b(j + 1, i)) / (2 * dx);
          const double gy = (b(j + 1, i) - b(j, i) + b(j + 1, i + 1) - b(j, i + 1)) / (2 * dy);
          acc += at * ux * gx + an * uy * gy;
        }
      }
    }
    return 0.5 * acc * dx * dy;
  };

  double rhs = 0.0;
  double prev = form(traj.states.front());
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double cur = form(traj.states[k]);
    rhs += 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
    prev = cur;
  }
  const double lhs = inner(traj.states.front() - traj.states.back(), g);
  return std::abs(lhs - rhs);
}

}  // namespace stiff
