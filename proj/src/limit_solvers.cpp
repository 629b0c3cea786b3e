#include "stiff/limit_solvers.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "stiff/errors.hpp"
#include "stiff/kernels.hpp"
#include "stiff/log.hpp"

namespace stiff {
namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXd trace_weights(const SplitGrid& g) {
  Eigen::VectorXd w(g.nx + 1);
  for (int i = 0; i <= g.nx; ++i) w[i] = g.wx(i);
  return w;
}

// Dense barrier coupling of phases VI and VII.
std::shared_ptr<const BarrierCoupling> nonlocal_coupling(const Layout& layout, const PhaseSpec& p) {
  const SplitGrid& g = layout.grid();
  const Eigen::Index n = g.nx + 1;
  const double dx = g.dx();
  const Eigen::VectorXd w = trace_weights(g);
  std::vector<Eigen::Index> plus(n), minus(n);
  for (int i = 0; i <= g.nx; ++i) {
    plus[i] = layout.index(Side::plus, 0, i);
    minus[i] = layout.index(Side::minus, 0, i);
  }
  // Self pairs: (mu / 8 pi) w_i C(i,k), with C the Levy row weights (kernel 2 k(y) w_k).
  const bool stable = p.kind == PhaseKind::VII;
  const double ell = stable ? kInf : p.ell;
  const double self_scale = stable ? p.mu / (4.0 * pi) : p.mu / (8.0 * pi);
  const Eigen::MatrixXd self = self_scale * symmetrize_from_interior(levy_row_weights(n, dx, ell), w);
  std::vector<double> t_self(n, 0.0);
  for (Eigen::Index m = 1; m < n; ++m) t_self[m] = self_scale * 2.0 * levy_kernel(m * dx, ell);
  ToeplitzBlock pp(self, w, t_self, true);
  ToeplitzBlock mm = pp;

  std::optional<ToeplitzBlock> pm;
  if (!stable) {
    const double cross_scale = p.mu / (4.0 * pi);
    const Eigen::MatrixXd cross = cross_scale * symmetrize_from_interior(opposite_row_weights(n, dx, p.ell), w);
    std::vector<double> t_cross(n);
    for (Eigen::Index m = 0; m < n; ++m) t_cross[m] = cross_scale * cosh_kernel(m * dx, {p.ell, Coupling::opposite});
    pm = ToeplitzBlock(cross, w, t_cross, false);
  }
  return std::make_shared<BarrierCoupling>(plus, minus, std::move(pp), std::move(mm), std::move(pm));
}

// L2 norm over the central window |x1| <= 3 Lx / 4 of the barrier, away from the
// truncation walls.
double interior_norm(const Eigen::VectorXd& v, const SplitGrid& g) {
  double s = 0.0;
  for (int i = 1; i < g.nx; ++i)
    if (std::abs(g.x1(i)) <= 0.75 * g.Lx + 1e-12) s += v[i] * v[i];
  return std::sqrt(g.dx() * s);
}

}  // namespace

const char* phase_name(PhaseKind k) {
  static const char* names[] = {"I", "II", "III", "IV", "V", "VI", "VII"};
  return names[static_cast<int>(k)];
}

PhaseKind parse_phase(const std::string& name) {
  for (int k = 0; k < 7; ++k)
    if (name == phase_name(static_cast<PhaseKind>(k))) return static_cast<PhaseKind>(k);
  throw PhaseError("unknown phase '" + name + "'");
}

void PhaseSpec::validate() const {
  auto need = [&](double v, const char* what) {
    if (!(v > 0.0)) throw PhaseError(std::string("phase ") + phase_name(kind) + " needs positive " + what);
  };
  auto none = [&](double v, const char* what) {
    if (v != 0.0) throw PhaseError(std::string("phase ") + phase_name(kind) + " takes no " + what);
  };
  switch (kind) {
    case PhaseKind::I:
    case PhaseKind::III:
    case PhaseKind::V:
      none(kappa, "kappa"), none(lambda, "lambda"), none(mu, "mu"), none(ell, "ell");
      break;
    case PhaseKind::II:
      need(kappa, "kappa"), none(lambda, "lambda"), none(mu, "mu"), none(ell, "ell");
      break;
    case PhaseKind::IV:
      none(kappa, "kappa"), need(lambda, "lambda"), none(mu, "mu"), none(ell, "ell");
      break;
    case PhaseKind::VI:
      none(kappa, "kappa"), none(lambda, "lambda"), need(mu, "mu"), need(ell, "ell");
      if (std::isinf(ell)) throw PhaseError("phase VI needs a finite ell; ell = inf is phase VII");
      break;
    case PhaseKind::VII:
      none(kappa, "kappa"), none(lambda, "lambda"), need(mu, "mu");
      if (!std::isinf(ell)) throw PhaseError("phase VII has ell = inf");
      break;
  }
  for (double v : {kappa, lambda, mu})
    if (!std::isfinite(v)) throw PhaseError("phase parameters must be finite");
}

BarrierKind barrier_kind(PhaseKind k) {
  switch (k) {
    case PhaseKind::I:
    case PhaseKind::IV: return BarrierKind::merged;
    case PhaseKind::V: return BarrierKind::dirichlet;
    default: return BarrierKind::split;
  }
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

LinearOperator assemble_limit_operator(const SplitGrid& grid, const PhaseSpec& phase) {
  phase.validate();
  if ((phase.kind == PhaseKind::VI || phase.kind == PhaseKind::VII) && !is_power_of_two(grid.nx))
    throw GridError("nonlocal phases need nx to be a power of two");
  Layout layout(grid, barrier_kind(phase.kind));
  StiffnessBuilder b(layout.size());
  add_half_laplacian(layout, b);
  if (phase.kind == PhaseKind::II) {
    for (int i = 0; i <= grid.nx; ++i)
      b.add_pair(layout.index(Side::plus, 0, i), layout.index(Side::minus, 0, i), 0.25 * phase.kappa * grid.wx(i));
  } else if (phase.kind == PhaseKind::IV) {
    for (int i = 0; i < grid.nx; ++i)
      b.add_pair(layout.index(Side::plus, 0, i), layout.index(Side::plus, 0, i + 1), phase.lambda / grid.dx());
  }
  Generator gen{layout.mass(), b.build(), nullptr};
  if (phase.kind == PhaseKind::VI || phase.kind == PhaseKind::VII) gen.coupling = nonlocal_coupling(layout, phase);
  return LinearOperator{layout, std::move(gen)};
}

namespace {

void check_initial(const SplitField& u0, const LinearOperator& op) {
  if (!u0.allFinite()) throw DomainError("initial field must be finite");
  if (op.layout.kind() == BarrierKind::dirichlet &&
      (u0.upper.row(0).cwiseAbs().maxCoeff() > 0.0 || u0.lower.row(0).cwiseAbs().maxCoeff() > 0.0))
    warn("phase V initial data has nonzero boundary rows; projecting them to zero");
}

}  // namespace

SplitField solve_limit(const SplitField& u0, double t_end, double dt, const LinearOperator& op,
                       const SolveOptions& opts) {
  check_initial(u0, op);
  if (dt <= 0.0) dt = op.layout.grid().dy();
  return op.layout.unpack(evolve(op.gen, op.layout.pack(u0), t_end, dt, opts));
}

SplitField solve_limit(const SplitField& u0, double t_end, double dt, const PhaseSpec& phase,
                       const SplitGrid& grid, const SolveOptions& opts) {
  return solve_limit(u0, t_end, dt, assemble_limit_operator(grid, phase), opts);
}

SplitField resolvent(const SplitField& u0, double alpha, const LinearOperator& op, const SolveOptions& opts) {
  check_initial(u0, op);
  return op.layout.unpack(resolve(op.gen, op.layout.pack(u0), alpha, opts));
}

SplitField resolvent(const SplitField& u0, double alpha, const PhaseSpec& phase, const SplitGrid& grid,
                     const SolveOptions& opts) {
  return resolvent(u0, alpha, assemble_limit_operator(grid, phase), opts);
}

BcReport bc_residual(const SplitField& U, const PhaseSpec& phase, const SplitGrid& grid) {
  phase.validate();
  if (!(U.grid == grid)) throw GridError("field grid does not match");
  BcReport rep;
  rep.kind = phase.kind;
  const double dx = grid.dx();
  const Eigen::VectorXd gp = trace(U, Side::plus).values, gm = trace(U, Side::minus).values;
  const Eigen::VectorXd np = normal_derivative(U, Side::plus).values;
  const Eigen::VectorXd nm = normal_derivative(U, Side::minus).values;
  const Eigen::Index n = gp.size();
  auto& r = rep.residuals;
  switch (phase.kind) {
    case PhaseKind::I:
      r["trace_jump"] = interior_norm(gp - gm, grid);
      r["flux_jump"] = interior_norm(np - nm, grid);
      break;
    case PhaseKind::II: {
      const Eigen::VectorXd robin = 0.5 * phase.kappa * (gp - gm);
      r["robin_plus"] = interior_norm(np - robin, grid);
      r["robin_minus"] = interior_norm(nm - robin, grid);
      break;
    }
    case PhaseKind::III:
      r["neumann_plus"] = interior_norm(np, grid);
      r["neumann_minus"] = interior_norm(nm, grid);
      break;
    case PhaseKind::IV: {
      Eigen::VectorXd d2 = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 1; i + 1 < n; ++i) d2[i] = (gp[i + 1] - 2 * gp[i] + gp[i - 1]) / (dx * dx);
      r["trace_jump"] = interior_norm(gp - gm, grid);
      r["wentzell"] = interior_norm(np - nm + 2.0 * phase.lambda * d2, grid);
      break;
    }
    case PhaseKind::V:
      r["dirichlet_plus"] = interior_norm(gp, grid);
      r["dirichlet_minus"] = interior_norm(gm, grid);
      break;
    case PhaseKind::VI: {
      const TraceFn tp = trace(U, Side::plus), tm = trace(U, Side::minus);
      const Eigen::VectorXd lp = levy_apply(tp, phase.ell).values, lm = levy_apply(tm, phase.ell).values;
      const Eigen::MatrixXd d = opposite_row_weights(n, dx, phase.ell);
      const Eigen::VectorXd xp = d.rowwise().sum().cwiseProduct(gp) - d * gm;
      const Eigen::VectorXd xm = d * gp - d.rowwise().sum().cwiseProduct(gm);
      const double c = phase.mu / (2.0 * pi), s = phase.mu / (4.0 * pi);
      r["nonlocal_plus"] = interior_norm(np - (c * xp - s * lp), grid);
      r["nonlocal_minus"] = interior_norm(nm - (c * xm + s * lm), grid);
      break;
    }
    case PhaseKind::VII: {
      const Eigen::VectorXd lp = levy_apply(trace(U, Side::plus), kInf).values;
      const Eigen::VectorXd lm = levy_apply(trace(U, Side::minus), kInf).values;
      const double s = phase.mu / (2.0 * pi);
      r["stable_plus"] = interior_norm(np + s * lp, grid);
      r["stable_minus"] = interior_norm(nm - s * lm, grid);
      break;
    }
  }
  return rep;
}

std::string to_json(const BcReport& r) {
  std::ostringstream os;
  os << std::setprecision(17) << "{\"phase\": \"" << phase_name(r.kind) << "\", \"residuals\": {";
  bool first = true;
  for (const auto& [k, v] : r.residuals) {
    os << (first ? "" : ", ") << '"' << k << "\": " << v;
    first = false;
  }
  os << "}}";
  return os.str();
}

Eigen::VectorXd solve_heat_line(const Eigen::VectorXd& v0, double Lx, double t_end, double dt,
                                const SolveOptions& opts) {
  const Eigen::Index n = v0.size();
  if (n < 3) throw GridError("line problem needs at least 3 nodes");
  const double h = 2.0 * Lx / static_cast<double>(n - 1);
  Generator gen;
  gen.mass = Eigen::VectorXd::Constant(n, h);
  gen.mass[0] = gen.mass[n - 1] = 0.5 * h;
  StiffnessBuilder b(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) b.add_pair(i, i + 1, 0.5 / h);
  gen.stiffness = b.build();
  return evolve(gen, v0, t_end, dt, opts);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_snob_line(const Eigen::VectorXd& w_plus,
                                                            const Eigen::VectorXd& w_minus, double Ly,
                                                            double kappa, double t_end, double dt,
                                                            const SolveOptions& opts) {
  const Eigen::Index rows = w_plus.size();
  if (rows < 3 || w_minus.size() != rows) throw GridError("half-line samples must match and have >= 3 nodes");
  const double h = Ly / static_cast<double>(rows - 1);
  Generator gen;
  gen.mass = Eigen::VectorXd::Constant(2 * rows, h);
  for (Eigen::Index e : {Eigen::Index{0}, rows - 1, rows, 2 * rows - 1}) gen.mass[e] = 0.5 * h;
  StiffnessBuilder b(2 * rows);
  for (Eigen::Index j = 0; j + 1 < rows; ++j) {
    b.add_pair(j, j + 1, 0.5 / h);
    b.add_pair(rows + j, rows + j + 1, 0.5 / h);
  }
  b.add_pair(0, rows, 0.25 * kappa);
  gen.stiffness = b.build();
  Eigen::VectorXd u(2 * rows);
  u << w_plus, w_minus;
  const Eigen::VectorXd out = evolve(gen, u, t_end, dt, opts);
  return {out.head(rows), out.tail(rows)};
}

}  // namespace stiff
