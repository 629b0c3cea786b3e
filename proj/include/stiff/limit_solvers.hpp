#pragma once

#include <map>
#include <string>

#include "stiff/layout.hpp"

namespace stiff {

enum class PhaseKind { I, II, III, IV, V, VI, VII };

const char* phase_name(PhaseKind k);
PhaseKind parse_phase(const std::string& name);

// A limiting phase and its parameters; unused parameters are zero.
struct PhaseSpec {
  PhaseKind kind = PhaseKind::I;
  double kappa = 0.0;   // II: Robin coefficient
  double lambda = 0.0;  // IV: tangential conductivity on the barrier
  double mu = 0.0;      // VI, VII: strength of the boundary jumps
  double ell = 0.0;     // VI: splitting length

  static PhaseSpec I() { return {PhaseKind::I}; }
  static PhaseSpec II(double kappa) { return {PhaseKind::II, kappa}; }
  static PhaseSpec III() { return {PhaseKind::III}; }
  static PhaseSpec IV(double lambda) { return {PhaseKind::IV, 0.0, lambda}; }
  static PhaseSpec V() { return {PhaseKind::V}; }
  static PhaseSpec VI(double mu, double ell) { return {PhaseKind::VI, 0.0, 0.0, mu, ell}; }
  static PhaseSpec VII(double mu) { return {PhaseKind::VII, 0.0, 0.0, mu, kInf}; }

  // Throws PhaseError if parameters are missing, superfluous or non-positive.
  void validate() const;
  bool operator==(const PhaseSpec&) const = default;
};

BarrierKind barrier_kind(PhaseKind k);
bool is_power_of_two(int n);

// Half Laplacian on each half-plane, coupled through the barrier condition of the phase.
// Phase VII uses the ell -> inf limit of the phase VI self-interaction, whose kernel is
// 2/y^2, i.e. twice the 1-stable operator of levy_apply(., inf).
LinearOperator assemble_limit_operator(const SplitGrid& grid, const PhaseSpec& phase);

// Phase V zeroes nonzero boundary rows of u0 with a warning. dt <= 0 selects dt = dy.
SplitField solve_limit(const SplitField& u0, double t_end, double dt, const PhaseSpec& phase,
                       const SplitGrid& grid, const SolveOptions& opts = {});
SplitField solve_limit(const SplitField& u0, double t_end, double dt, const LinearOperator& op,
                       const SolveOptions& opts = {});

// U = (alpha - Op)^{-1} u0.
SplitField resolvent(const SplitField& u0, double alpha, const PhaseSpec& phase, const SplitGrid& grid,
                     const SolveOptions& opts = {});
SplitField resolvent(const SplitField& u0, double alpha, const LinearOperator& op, const SolveOptions& opts = {});

// Barrier-line L2 norms of each defining identity of the phase, keyed by condition name.
// Norms run over the central barrier window |x1| <= 3 Lx / 4: near the box walls the
// truncated problem departs from the problem on the full line.
struct BcReport {
  PhaseKind kind = PhaseKind::I;
  std::map<std::string, double> residuals;
};
BcReport bc_residual(const SplitField& U, const PhaseSpec& phase, const SplitGrid& grid);
std::string to_json(const BcReport& r);

// Line problems used as oracles: heat flow on [-Lx, Lx] with Neumann ends, and the
// Robin-coupled pair of half-lines [0, Ly] (the x2-part of phase II).
Eigen::VectorXd solve_heat_line(const Eigen::VectorXd& v0, double Lx, double t_end, double dt,
                                const SolveOptions& opts = {});
// w_plus, w_minus sampled at distance j Ly/ny from the barrier, j = 0..ny.
std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_snob_line(const Eigen::VectorXd& w_plus,
                                                            const Eigen::VectorXd& w_minus, double Ly,
                                                            double kappa, double t_end, double dt,
                                                            const SolveOptions& opts = {});

}  // namespace stiff
