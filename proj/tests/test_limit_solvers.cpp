#include <catch_amalgamated.hpp>
#include <cmath>

#include "stiff/errors.hpp"
#include "stiff/limit_solvers.hpp"
#include "stiff/log.hpp"

using namespace stiff;
using Catch::Matchers::WithinAbs;

namespace {

SplitField bump(const SplitGrid& g, double cx, double cy, double sigma) {
  return sample_field(g, [=](double x1, double x2) {
    return std::exp(-((x1 - cx) * (x1 - cx) + (x2 - cy) * (x2 - cy)) / (2 * sigma * sigma));
  });
}

std::vector<PhaseSpec> all_phases() {
  return {PhaseSpec::I(), PhaseSpec::II(1.0), PhaseSpec::III(), PhaseSpec::IV(1.0),
          PhaseSpec::V(), PhaseSpec::VI(1.0, 1.0), PhaseSpec::VII(1.0)};
}

}  // namespace

TEST_CASE("phase parameters") {
  CHECK(parse_phase("IV") == PhaseKind::IV);
  CHECK(std::string(phase_name(PhaseKind::VII)) == "VII");
  CHECK_THROWS_AS(parse_phase("VIII"), PhaseError);
  CHECK_THROWS_AS(PhaseSpec::II(0.0).validate(), PhaseError);
  CHECK_THROWS_AS(PhaseSpec::IV(-1.0).validate(), PhaseError);
  CHECK_THROWS_AS(PhaseSpec::VI(1.0, kInf).validate(), PhaseError);
  CHECK_THROWS_AS((PhaseSpec{PhaseKind::VII, 0, 0, 1.0, 2.0}).validate(), PhaseError);
  CHECK_THROWS_AS((PhaseSpec{PhaseKind::I, 1.0}).validate(), PhaseError);
  CHECK_NOTHROW(PhaseSpec::VII(2.0).validate());
  CHECK_THROWS_AS(assemble_limit_operator(make_grid(2, 1, 24, 4), PhaseSpec::VI(1, 1)), GridError);
  CHECK_NOTHROW(assemble_limit_operator(make_grid(2, 1, 24, 4), PhaseSpec::IV(1)));
}

TEST_CASE("limit operators are symmetric Markov forms") {
  const SplitGrid g = make_grid(2, 1, 16, 4);
  for (const PhaseSpec& p : all_phases()) {
    CAPTURE(phase_name(p.kind));
    const LinearOperator op = assemble_limit_operator(g, p);
    const Eigen::MatrixXd k = op.gen.dense_stiffness();
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * k.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    const double rows = k.rowwise().sum().cwiseAbs().maxCoeff();
    if (p.kind == PhaseKind::V) CHECK(rows > 0.0);
    else CHECK(rows <= 1e-11 * k.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("weak Robin coupling decouples the halves") {
  const SplitGrid g = make_grid(2, 1, 16, 4);
  const Eigen::MatrixXd k2 = assemble_limit_operator(g, PhaseSpec::II(1e-12)).gen.dense_stiffness();
  const Eigen::MatrixXd k3 = assemble_limit_operator(g, PhaseSpec::III()).gen.dense_stiffness();
  CHECK((k2 - k3).cwiseAbs().maxCoeff() <= 1e-12);
  // Phase III is reducible: data on one half never reaches the other.
  const SplitField u0 = sample_field(g, [](double x1, double x2) { return std::exp(-x1 * x1 - x2 * x2); },
                                     [](double, double) { return 0.0; });
  const SplitField u = solve_limit(u0, 0.5, 0.01, PhaseSpec::III(), g);
  CHECK(u.lower.cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.upper.maxCoeff() > 0.1);
}

TEST_CASE("phase I is plane heat flow") {
  const SplitGrid g = make_grid(4, 4, 128, 64);
  const double sigma = 0.5, t = 0.5, v = sigma * sigma + t;
  const SplitField u = solve_limit(bump(g, 0, 0, sigma), t, 0.005, PhaseSpec::I(), g);
  const SplitField exact = sample_field(g, [&](double x1, double x2) {
    return sigma * sigma / v * std::exp(-(x1 * x1 + x2 * x2) / (2 * v));
  });
  CHECK(l2_diff(u, exact) / l2_norm(exact) <= 2e-3);
}

TEST_CASE("phase II separates into line problems") {
  const SplitGrid g = make_grid(2, 1, 32, 16);
  const auto gx = [](double x1) { return std::exp(-2.0 * x1 * x1); };
  const auto hp = [](double y) { return std::exp(-4.0 * (y - 0.3) * (y - 0.3)); };
  const auto hm = [](double y) { return 0.5 * std::cos(y); };
  const SplitField u0 = sample_field(g, [&](double x1, double x2) { return gx(x1) * hp(x2); },
                                     [&](double x1, double x2) { return gx(x1) * hm(-x2); });
  const double kappa = 2.0, t = 0.3, dt = 0.005;
  const SplitField u = solve_limit(u0, t, dt, PhaseSpec::II(kappa), g);

  Eigen::VectorXd vx(g.nx + 1), wp(g.ny + 1), wm(g.ny + 1);
  for (int i = 0; i <= g.nx; ++i) vx[i] = gx(g.x1(i));
  for (int j = 0; j <= g.ny; ++j) {
    wp[j] = hp(j * g.dy());
    wm[j] = hm(j * g.dy());
  }
  const Eigen::VectorXd px = solve_heat_line(vx, g.Lx, t, dt);
  const auto [qp, qm] = solve_snob_line(wp, wm, g.Ly, kappa, t, dt);
  SplitField prod(g);
  prod.upper = qp * px.transpose();
  prod.lower = qm * px.transpose();
  CHECK(l2_diff(u, prod) <= 5e-3);
  CHECK_THROWS_AS(solve_heat_line(Eigen::VectorXd::Ones(2), 1.0, 0.1, 0.01), GridError);
}

TEST_CASE("resolvent") {
  const SplitGrid g = make_grid(2, 1, 16, 8);
  const SplitField f = bump(g, 0.2, 0.3, 0.4);
  for (const PhaseSpec& p : all_phases()) {
    CAPTURE(phase_name(p.kind));
    const LinearOperator op = assemble_limit_operator(g, p);
    const SplitField fp = op.layout.unpack(op.layout.pack(f));
    for (double alpha : {0.5, 1.0, 10.0}) CHECK(alpha * l2_norm(resolvent(fp, alpha, op)) <= l2_norm(fp) + 1e-12);
    // alpha R_alpha f -> f for large alpha.
    CHECK(l2_diff(1e3 * resolvent(fp, 1e3, op), fp) <= 0.02 * l2_norm(fp));
  }
  const LinearOperator op = assemble_limit_operator(g, PhaseSpec::II(1));
  CHECK_THROWS_AS(resolvent(f, 0.0, op), DomainError);
}

TEST_CASE("resolvent is the Laplace transform of the semigroup") {
  const SplitGrid g = make_grid(2, 1, 16, 8);
  const SplitField f = bump(g, 0.0, 0.4, 0.5);
  for (const PhaseSpec& p : {PhaseSpec::II(1.0), PhaseSpec::IV(0.5), PhaseSpec::VI(1.0, 0.5)}) {
    CAPTURE(phase_name(p.kind));
    const LinearOperator op = assemble_limit_operator(g, p);
    const double alpha = 1.5, dt = 0.005;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(op.size());
    double prev_t = 0.0;
    Eigen::VectorXd prev;
    evolve(op.gen, op.layout.pack(f), 16.0, dt, {}, [&](double t, const Eigen::VectorXd& u) {
      if (t > 0.0) acc += 0.5 * (t - prev_t) * (std::exp(-alpha * prev_t) * prev + std::exp(-alpha * t) * u);
      prev_t = t;
      prev = u;
    });
    const SplitField quad = op.layout.unpack(acc);
    const SplitField res = resolvent(f, alpha, op);
    CHECK(l2_diff(quad, res) <= 1e-3 * l2_norm(res));
  }
}

TEST_CASE("bc residual identities hold exactly where they are algebraic") {
  const SplitGrid g = make_grid(2, 1, 16, 8);
  const SplitField cont = bump(g, 0.1, 0.0, 0.5);
  const BcReport r1 = bc_residual(cont, PhaseSpec::I(), g);
  CHECK(r1.residuals.at("trace_jump") == 0.0);
  CHECK(r1.residuals.count("flux_jump") == 1);
  const SplitField zero_trace = sample_field(g, [](double x1, double x2) { return x2 * std::exp(-x1 * x1); });
  const BcReport r5 = bc_residual(zero_trace, PhaseSpec::V(), g);
  CHECK(r5.residuals.at("dirichlet_plus") == 0.0);
  CHECK(r5.residuals.at("dirichlet_minus") == 0.0);
  // Neumann data for phase III.
  const SplitField flat = sample_field(g, [](double x1, double x2) { return std::cos(x1) * (1.0 + x2 * x2); });
  CHECK(bc_residual(flat, PhaseSpec::III(), g).residuals.at("neumann_plus") <= 1e-12);
  CHECK(to_json(r5).find("\"phase\": \"V\"") != std::string::npos);
  CHECK_THROWS_AS(bc_residual(cont, PhaseSpec::I(), make_grid(2, 1, 32, 8)), GridError);
}

TEST_CASE("phase VI approaches phase VII as ell grows") {
  const SplitGrid g = make_grid(2, 1, 32, 4);
  const Eigen::MatrixXd k7 = assemble_limit_operator(g, PhaseSpec::VII(1.0)).gen.dense_stiffness();
  double prev = kInf;
  for (double ell : {1.0, 4.0, 16.0, 64.0}) {
    const Eigen::MatrixXd k6 = assemble_limit_operator(g, PhaseSpec::VI(1.0, ell)).gen.dense_stiffness();
    const double gap = (k6 - k7).cwiseAbs().maxCoeff();
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev <= 1e-2 * k7.cwiseAbs().maxCoeff());
}

TEST_CASE("phase V projects boundary data with a warning") {
  const SplitGrid g = make_grid(2, 1, 16, 8);
  std::vector<std::string> seen;
  const WarningSink old = set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  const SplitField u = solve_limit(bump(g, 0, 0, 0.5), 0.1, 0.01, PhaseSpec::V(), g);
  set_warning_sink(old);
  CHECK(seen.size() == 1);
  CHECK(u.upper.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.lower.row(0).cwiseAbs().maxCoeff() == 0.0);
}
