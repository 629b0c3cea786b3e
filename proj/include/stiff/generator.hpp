#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace stiff {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Accumulates a symmetric stiffness matrix from pair conductances; index -1 marks a
// node held at zero (its edges only add to the diagonal of the active endpoint).
class StiffnessBuilder {
 public:
  explicit StiffnessBuilder(Eigen::Index n) : n_(n) {}
  void add_pair(Eigen::Index a, Eigen::Index b, double conductance);
  SparseMatrix build() const;

 private:
  Eigen::Index n_;
  std::vector<Eigen::Triplet<double>> entries_;
};

// Matrix G = diag(w) T diag(w) + C with T symmetric Toeplitz (t[0] on the diagonal)
// and C sparse; products use a circulant FFT embedding of T.
class ToeplitzBlock {
 public:
  ToeplitzBlock() = default;
  // Splits the dense block into the scaled Toeplitz core and a sparse remainder.
  ToeplitzBlock(const Eigen::MatrixXd& dense, const Eigen::VectorXd& w, std::vector<double> t,
                bool symmetric);

  Eigen::Index size() const { return w_.size(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
  Eigen::Index remainder_nonzeros() const { return remainder_.nonZeros(); }

 private:
  Eigen::VectorXd toeplitz(const Eigen::VectorXd& x) const;

  Eigen::VectorXd w_;
  std::vector<double> t_;
  Eigen::Index nfft_ = 0;
  Eigen::VectorXcd symbol_;
  SparseMatrix remainder_;
};

// Dense pair conductances among barrier nodes: `plus` and `minus` list the unknown
// indices of the two traces. The energy is sum over pairs G (u_a - u_b)^2 with
// blocks plus-plus, minus-minus and plus-minus.
class BarrierCoupling {
 public:
  BarrierCoupling(std::vector<Eigen::Index> plus, std::vector<Eigen::Index> minus, ToeplitzBlock pp,
                  ToeplitzBlock mm, std::optional<ToeplitzBlock> pm);

  // y += K_c u.
  void add_apply(const Eigen::VectorXd& u, Eigen::VectorXd& y) const;
  // Diagonal of K_c scattered on the unknowns.
  void add_diagonal(Eigen::VectorXd& d) const;
  // K_c as a dense matrix of size n (tests, small grids).
  Eigen::MatrixXd dense(Eigen::Index n) const;

  const std::vector<Eigen::Index>& plus() const { return plus_; }
  const std::vector<Eigen::Index>& minus() const { return minus_; }

 private:
  std::vector<Eigen::Index> plus_, minus_;
  ToeplitzBlock pp_, mm_;
  std::optional<ToeplitzBlock> pm_;
  Eigen::VectorXd row_plus_, row_minus_;
};

// Markov generator -M^{-1} K of a symmetric pair form: mass weights, sparse stiffness
// and an optional dense barrier coupling.
struct Generator {
  Eigen::VectorXd mass;
  SparseMatrix stiffness;
  std::shared_ptr<const BarrierCoupling> coupling;

  Eigen::Index size() const { return mass.size(); }
  // K u (sparse and dense parts).
  Eigen::VectorXd energy(const Eigen::VectorXd& u) const;
  // -M^{-1} K u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXd stiffness_diagonal() const;
  Eigen::MatrixXd dense_stiffness() const;
};

struct SolveOptions {
  double theta = 0.5;
  // Leading backward-Euler half steps that damp non-smooth initial data
  // before Crank-Nicolson (an even count replaces count/2 full steps).
  int startup_half_steps = 0;
  double krylov_tol = 1e-12;
  int max_iterations = 1000;
};

// Solves (a M + b K) x = rhs: sparse LDLT, or preconditioned CG when a dense
// coupling is present (preconditioner: LDLT of the sparse part plus the coupling diagonal).
class ShiftedSolver {
 public:
  ShiftedSolver(const Generator& gen, double a, double b, const SolveOptions& opts = {});
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int last_iterations() const { return last_iterations_; }

 private:
  struct Factor;
  const Generator* gen_;
  double a_, b_;
  SolveOptions opts_;
  std::unique_ptr<Factor> factor_;
  mutable int last_iterations_ = 0;
};

// (M + theta dt K) u_new = (M - (1 - theta) dt K) u_old.
class ThetaScheme {
 public:
  ThetaScheme(const Generator& gen, double dt, double theta = 0.5, const SolveOptions& opts = {});
  Eigen::VectorXd step(const Eigen::VectorXd& u) const;
  double dt() const { return dt_; }

 private:
  const Generator* gen_;
  double dt_, theta_;
  std::unique_ptr<ShiftedSolver> solver_;
};

using StepObserver = std::function<void(double t, const Eigen::VectorXd& u)>;

// Integrates to t_end with ceil(t_end/dt) equal steps; observer sees t = 0 and every step.
Eigen::VectorXd evolve(const Generator& gen, const Eigen::VectorXd& u0, double t_end, double dt,
                       const SolveOptions& opts = {}, const StepObserver& observer = {});

// (alpha M + K) U = M f.
Eigen::VectorXd resolve(const Generator& gen, const Eigen::VectorXd& f, double alpha,
                        const SolveOptions& opts = {});

}  // namespace stiff
