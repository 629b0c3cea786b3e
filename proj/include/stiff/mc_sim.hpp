#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stiff/eps_solver.hpp"

namespace stiff {

using Rng = std::mt19937_64;

// Independent stream for path `index` under a master seed (splitmix64 mixing).
Rng child_rng(std::uint64_t master_seed, std::uint64_t index);

// Position on the plane (x2 signed; component is the sheet for split-plane processes,
// with x2 >= 0 on plus and x2 <= 0 on minus).
struct PathState {
  double x1 = 0.0, x2 = 0.0;
  Side component = Side::plus;
  double local_time = 0.0;
  bool alive = true;

  static PathState at(double x1, double x2) {
    return {x1, x2, x2 < 0.0 ? Side::minus : Side::plus, 0.0, true};
  }
};

// Continuous-time random walk with generator -M^{-1} K of a grid operator: jump rates
// G_ab / m_a, and killing at the rate of edges into fixed nodes.
class LatticeWalk {
 public:
  explicit LatticeWalk(const LinearOperator& op);
  // x0 is snapped to the nearest node of its component.
  PathState run(const PathState& x0, double t, Rng& rng) const;
  Eigen::Index node_of(const PathState& p) const;

 private:
  Layout layout_;
  std::vector<double> x1_, x2_;
  std::vector<Side> side_;
  std::vector<double> rate_;                 // total jump + kill rate
  std::vector<Eigen::Index> start_;          // CSR offsets
  std::vector<Eigen::Index> target_;
  std::vector<double> cumulative_;           // cumulative jump probabilities
};

PathState simulate_eps(const PathState& x0, double t, const ScaleParams& s, const SplitGrid& grid, Rng& rng);

// Snapping-out motion on two half-lines: reflected walk with step dt, side flips at
// rate kappa/2 per unit of local time. Position is the distance to the origin.
struct SnobState {
  double position = 0.0;
  Side component = Side::plus;
  double local_time = 0.0;
};
SnobState simulate_snob(double x0, Side component, double t, double kappa, double dt, Rng& rng);

// Brownian motion whose x1 clock runs at t + 2 lambda L_t, L the local time at x2 = 0.
PathState simulate_type4(const PathState& x0, double t, double lambda, double dt, Rng& rng);

enum class BasicKind { reflecting, absorbing };
// Reflection keeps the starting component; absorption kills at the first crossing of
// x2 = 0, including crossings between grid times (Brownian-bridge test).
PathState simulate_basic(const PathState& x0, double t, BasicKind kind, double dt, Rng& rng);

// Phase II process: SNOB in x2 times an independent Brownian motion in x1.
PathState simulate_snob_product(const PathState& x0, double t, double kappa, double dt, Rng& rng);

// Occupation-time increment of the band |x| < delta (trapezoid in time), normalized by 2 delta.
double local_time_increment(double x_before, double x_after, double dt, double delta);
double local_time_band(double dt);

using Sampler = std::function<PathState(const PathState& start, double t, Rng& rng)>;
using Observable = std::function<double(const PathState&)>;

struct SemigroupEstimate {
  std::vector<PathState> starts;
  std::vector<double> mean, se;
  int n_paths = 0;
  std::uint64_t seed = 0;
};

// Per-start mean and standard error of f(X_t); dead paths contribute 0. Paths run on
// `threads` workers with one child stream each; results do not depend on `threads`.
SemigroupEstimate empirical_semigroup(const Observable& f, const std::vector<PathState>& starts, double t,
                                      int n_paths, const Sampler& sampler, std::uint64_t seed, int threads = 1);
// f read off a split field by bilinear interpolation on the endpoint's component.
SemigroupEstimate empirical_semigroup(const SplitField& f, const std::vector<PathState>& starts, double t,
                                      int n_paths, const Sampler& sampler, std::uint64_t seed, int threads = 1);

std::string to_json(const SemigroupEstimate& e);

}  // namespace stiff
