#include "stiff/generator.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <complex>
#include <unsupported/Eigen/FFT>

#include "stiff/errors.hpp"

namespace stiff {

void StiffnessBuilder::add_pair(Eigen::Index a, Eigen::Index b, double g) {
  if (g == 0.0) return;
  if (a >= 0) entries_.emplace_back(a, a, g);
  if (b >= 0) entries_.emplace_back(b, b, g);
  if (a >= 0 && b >= 0) {
    entries_.emplace_back(a, b, -g);
    entries_.emplace_back(b, a, -g);
  }
}

SparseMatrix StiffnessBuilder::build() const {
  SparseMatrix k(n_, n_);
  k.setFromTriplets(entries_.begin(), entries_.end());
  k.makeCompressed();
  return k;
}

ToeplitzBlock::ToeplitzBlock(const Eigen::MatrixXd& dense, const Eigen::VectorXd& w, std::vector<double> t,
                             bool symmetric)
    : w_(w), t_(std::move(t)) {
  const Eigen::Index n = w_.size();
  if (dense.rows() != n || dense.cols() != n || static_cast<Eigen::Index>(t_.size()) != n)
    throw Error("ToeplitzBlock: inconsistent sizes");
  nfft_ = 1;
  while (nfft_ < 2 * n) nfft_ <<= 1;
  std::vector<double> column(nfft_, 0.0);
  column[0] = t_[0];
  for (Eigen::Index m = 1; m < n; ++m) column[m] = column[nfft_ - m] = t_[m];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, column);
  symbol_ = Eigen::Map<Eigen::VectorXcd>(spec.data(), nfft_);

  const double scale = dense.cwiseAbs().maxCoeff();
  std::vector<Eigen::Triplet<double>> rem;
  auto keep = [&](double r, double ref) { return std::abs(r) > 1e-13 * std::abs(ref) + 1e-300 * scale; };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = symmetric ? i : 0; k < n; ++k) {
      const double core = w_[i] * t_[std::abs(i - k)] * w_[k];
      const double r = dense(i, k) - core;
      if (!keep(r, dense(i, k))) continue;
      rem.emplace_back(i, k, r);
      if (symmetric && k != i) rem.emplace_back(k, i, r);
    }
  }
  remainder_.resize(n, n);
  remainder_.setFromTriplets(rem.begin(), rem.end());
  remainder_.makeCompressed();
}

Eigen::VectorXd ToeplitzBlock::toeplitz(const Eigen::VectorXd& x) const {
  thread_local Eigen::FFT<double> fft;
  const Eigen::Index n = w_.size();
  std::vector<double> padded(nfft_, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) padded[i] = x[i];
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  for (Eigen::Index k = 0; k < nfft_; ++k) spec[k] *= symbol_[k];
  std::vector<double> back;
  fft.inv(back, spec);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = back[i];
  return y;
}

Eigen::VectorXd ToeplitzBlock::apply(const Eigen::VectorXd& x) const {
  return w_.cwiseProduct(toeplitz(w_.cwiseProduct(x))) + remainder_ * x;
}

Eigen::VectorXd ToeplitzBlock::apply_transpose(const Eigen::VectorXd& x) const {
  return w_.cwiseProduct(toeplitz(w_.cwiseProduct(x))) + remainder_.transpose() * x;
}

Eigen::MatrixXd ToeplitzBlock::dense() const {
  const Eigen::Index n = w_.size();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) g(i, k) = w_[i] * t_[std::abs(i - k)] * w_[k];
  return g + Eigen::MatrixXd(remainder_);
}

BarrierCoupling::BarrierCoupling(std::vector<Eigen::Index> plus, std::vector<Eigen::Index> minus,
                                 ToeplitzBlock pp, ToeplitzBlock mm, std::optional<ToeplitzBlock> pm)
    : plus_(std::move(plus)), minus_(std::move(minus)), pp_(std::move(pp)), mm_(std::move(mm)), pm_(std::move(pm)) {
  const Eigen::Index n = static_cast<Eigen::Index>(plus_.size());
  if (static_cast<Eigen::Index>(minus_.size()) != n || pp_.size() != n || mm_.size() != n ||
      (pm_ && pm_->size() != n))
    throw Error("BarrierCoupling: inconsistent sizes");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  row_plus_ = pp_.apply(ones);
  row_minus_ = mm_.apply(ones);
  if (pm_) {
    row_plus_ += pm_->apply(ones);
    row_minus_ += pm_->apply_transpose(ones);
  }
}

void BarrierCoupling::add_apply(const Eigen::VectorXd& u, Eigen::VectorXd& y) const {
  const Eigen::Index n = static_cast<Eigen::Index>(plus_.size());
  Eigen::VectorXd up(n), um(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    up[i] = u[plus_[i]];
    um[i] = u[minus_[i]];
  }
  Eigen::VectorXd yp = row_plus_.cwiseProduct(up) - pp_.apply(up);
  Eigen::VectorXd ym = row_minus_.cwiseProduct(um) - mm_.apply(um);
  if (pm_) {
    yp -= pm_->apply(um);
    ym -= pm_->apply_transpose(up);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    y[plus_[i]] += yp[i];
    y[minus_[i]] += ym[i];
  }
}

void BarrierCoupling::add_diagonal(Eigen::VectorXd& d) const {
  // Self pairs carry no energy: the Toeplitz diagonals only enter through the row sums,
  // except the plus-minus block whose diagonal pairs (i+, i-) are distinct nodes.
  const Eigen::Index n = static_cast<Eigen::Index>(plus_.size());
  const Eigen::MatrixXd pp = pp_.dense(), mm = mm_.dense();
  for (Eigen::Index i = 0; i < n; ++i) {
    d[plus_[i]] += row_plus_[i] - pp(i, i);
    d[minus_[i]] += row_minus_[i] - mm(i, i);
  }
}

Eigen::MatrixXd BarrierCoupling::dense(Eigen::Index size) const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
  const Eigen::Index n = static_cast<Eigen::Index>(plus_.size());
  const Eigen::MatrixXd pp = pp_.dense(), mm = mm_.dense();
  const Eigen::MatrixXd pm = pm_ ? pm_->dense() : Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(plus_[i], plus_[i]) += row_plus_[i];
    k(minus_[i], minus_[i]) += row_minus_[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      k(plus_[i], plus_[j]) -= pp(i, j);
      k(minus_[i], minus_[j]) -= mm(i, j);
      k(plus_[i], minus_[j]) -= pm(i, j);
      k(minus_[j], plus_[i]) -= pm(i, j);
    }
  }
  return k;
}

Eigen::VectorXd Generator::energy(const Eigen::VectorXd& u) const {
  Eigen::VectorXd y = stiffness * u;
  if (coupling) coupling->add_apply(u, y);
  return y;
}

Eigen::VectorXd Generator::apply(const Eigen::VectorXd& u) const {
  return -energy(u).cwiseQuotient(mass);
}

Eigen::VectorXd Generator::stiffness_diagonal() const {
  Eigen::VectorXd d = stiffness.diagonal();
  if (coupling) coupling->add_diagonal(d);
  return d;
}

Eigen::MatrixXd Generator::dense_stiffness() const {
  Eigen::MatrixXd k = Eigen::MatrixXd(stiffness);
  if (coupling) k += coupling->dense(size());
  return k;
}

struct ShiftedSolver::Factor {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

ShiftedSolver::ShiftedSolver(const Generator& gen, double a, double b, const SolveOptions& opts)
    : gen_(&gen), a_(a), b_(b), opts_(opts), factor_(std::make_unique<Factor>()) {
  SparseMatrix m(gen.size(), gen.size());
  m.reserve(Eigen::VectorXi::Constant(gen.size(), 1));
  for (Eigen::Index i = 0; i < gen.size(); ++i) m.insert(i, i) = a * gen.mass[i];
  SparseMatrix sys = m + b * gen.stiffness;
  if (gen.coupling) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(gen.size());
    gen.coupling->add_diagonal(d);
    for (Eigen::Index i = 0; i < gen.size(); ++i)
      if (d[i] != 0.0) sys.coeffRef(i, i) += b * d[i];
  }
  factor_->ldlt.compute(sys);
  if (factor_->ldlt.info() != Eigen::Success) throw SolverError("sparse factorization failed", 0.0);
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;

Eigen::VectorXd ShiftedSolver::solve(const Eigen::VectorXd& rhs) const {
  if (!gen_->coupling) {
    last_iterations_ = 0;
    Eigen::VectorXd x = factor_->ldlt.solve(rhs);
    if (!x.allFinite()) throw SolverError("direct solve produced non-finite values", 0.0);
    return x;
  }
  auto op = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return a_ * gen_->mass.cwiseProduct(v) + b_ * gen_->energy(v);
  };
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd x = factor_->ldlt.solve(rhs);
  Eigen::VectorXd r = rhs - op(x);
  Eigen::VectorXd z = factor_->ldlt.solve(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  int it = 0;
  while (r.norm() > opts_.krylov_tol * bnorm) {
    if (it >= opts_.max_iterations)
      throw SolverError("conjugate gradient hit the iteration cap", r.norm() / bnorm);
    const Eigen::VectorXd ap = op(p);
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    z = factor_->ldlt.solve(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    ++it;
  }
  last_iterations_ = it;
  return x;
}

ThetaScheme::ThetaScheme(const Generator& gen, double dt, double theta, const SolveOptions& opts)
    : gen_(&gen), dt_(dt), theta_(theta) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (theta < 0.0 || theta > 1.0) throw DomainError("theta must lie in [0, 1]");
  if (theta < 0.5) {
    // Gershgorin bound on the spectrum of M^{-1} K.
    const Eigen::VectorXd d = gen.stiffness_diagonal();
    const double rho = 2.0 * d.cwiseQuotient(gen.mass).maxCoeff();
    if (dt * (1.0 - 2.0 * theta) * rho > 2.0)
      throw DomainError("time step violates the explicit stability bound");
  }
  if (theta > 0.0) solver_ = std::make_unique<ShiftedSolver>(gen, 1.0, theta * dt, opts);
}

Eigen::VectorXd ThetaScheme::step(const Eigen::VectorXd& u) const {
  Eigen::VectorXd rhs = gen_->mass.cwiseProduct(u);
  if (theta_ < 1.0) rhs -= (1.0 - theta_) * dt_ * gen_->energy(u);
  if (!solver_) return rhs.cwiseQuotient(gen_->mass);
  return solver_->solve(rhs);
}

Eigen::VectorXd evolve(const Generator& gen, const Eigen::VectorXd& u0, double t_end, double dt,
                       const SolveOptions& opts, const StepObserver& observer) {
  if (t_end < 0.0) throw DomainError("t_end must be nonnegative");
  if (observer) observer(0.0, u0);
  if (t_end == 0.0) return u0;
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (opts.startup_half_steps % 2 != 0) throw DomainError("startup half steps must be even");
  const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  const long startup = std::min<long>(opts.startup_half_steps / 2, steps);
  Eigen::VectorXd u = u0;
  double t = 0.0;
  if (startup > 0) {
    ThetaScheme implicit(gen, 0.5 * h, 1.0, opts);
    for (long k = 0; k < 2 * startup; ++k) {
      u = implicit.step(u);
      t += 0.5 * h;
      if (observer) observer(t, u);
    }
  }
  if (steps > startup) {
    ThetaScheme scheme(gen, h, opts.theta, opts);
    for (long k = startup; k < steps; ++k) {
      u = scheme.step(u);
      t = (k + 1) * h;
      if (observer) observer(t, u);
    }
  }
  return u;
}

Eigen::VectorXd resolve(const Generator& gen, const Eigen::VectorXd& f, double alpha, const SolveOptions& opts) {
  if (!(alpha > 0.0)) throw DomainError("resolvent parameter must be positive");
  ShiftedSolver solver(gen, alpha, 1.0, opts);
  return solver.solve(gen.mass.cwiseProduct(f));
}

}  // namespace stiff
