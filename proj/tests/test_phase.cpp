#include <catch_amalgamated.hpp>
#include <cmath>

#include "stiff/errors.hpp"
#include "stiff/phase.hpp"

using namespace stiff;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Numerical limit of a scale from two small eps: the trend over six decades decides
// between zero, a finite value and infinity.
Extended numeric_limit(const std::function<double(double)>& v) {
  const double a = v(1e-3), b = v(1e-9);
  if (b / a < 1e-1) return Extended::zero();
  if (b / a > 1e1) return Extended::infinite();
  return Extended::of(b);
}

LimitScales numeric_limits(double alpha, double beta, double ct, double cn) {
  auto s = [=](double eps) { return scales_from_monomials(eps, alpha, beta, ct, cn); };
  return {numeric_limit([&](double e) { return s(e).C(); }), numeric_limit([&](double e) { return s(e).R(); }),
          numeric_limit([&](double e) { return s(e).M(); }), numeric_limit([&](double e) { return s(e).L(); })};
}

void check_same(const PhaseSpec& a, const PhaseSpec& b) {
  CHECK(a.kind == b.kind);
  CHECK_THAT(a.kappa, WithinRel(b.kappa, 1e-12));
  CHECK_THAT(a.lambda, WithinRel(b.lambda, 1e-12));
  CHECK_THAT(a.mu, WithinRel(b.mu, 1e-12));
  if (std::isinf(b.ell)) CHECK(std::isinf(a.ell));
  else CHECK_THAT(a.ell, WithinRel(b.ell, 1e-12));
}

}  // namespace

TEST_CASE("extended reals") {
  CHECK(Extended::of(0.0).is_zero());
  CHECK(Extended::of(kInf).is_infinite());
  CHECK(Extended::of(2.5).value() == 2.5);
  CHECK_THROWS_AS(Extended::of(-1.0), DomainError);
  CHECK_THROWS_AS(Extended::of(NAN), DomainError);
}

TEST_CASE("monomial scales") {
  for (double eps : {0.5, 0.1, 0.01}) {
    const ScaleParams a = scales_from_monomials(eps, 1, 0, 1, 1);
    CHECK_THAT(a.C(), WithinRel(eps * eps, 1e-14));
    CHECK_THAT(a.R(), WithinRel(eps, 1e-14));
    CHECK_THAT(a.M(), WithinRel(std::sqrt(eps), 1e-14));
    CHECK_THAT(scales_from_monomials(eps, 1, 1, 1, 2).R(), WithinRel(0.5, 1e-14));
    const ScaleParams m = scales_from_monomials(eps, -1, 1, 1, 1);
    for (double v : {m.C(), m.R(), m.M(), m.L()}) CHECK_THAT(v, WithinRel(1.0, 1e-14));
    // The two worked scalings of the introduction.
    const ScaleParams p = scales_from_monomials(eps, 1, 1, 1, 1);
    CHECK_THAT(p.C(), WithinRel(eps * eps, 1e-14));
    CHECK_THAT(p.R(), WithinRel(1.0, 1e-14));
    CHECK_THAT(p.M(), WithinRel(eps, 1e-14));
    const ScaleParams q = scales_from_monomials(eps, -1, -1, 1, 1);
    CHECK_THAT(q.C(), WithinRel(1.0, 1e-14));
    CHECK_THAT(q.R(), WithinRel(eps * eps, 1e-14));
    CHECK_THAT(q.M(), WithinRel(1.0 / eps, 1e-14));
  }
  CHECK_THROWS_AS(scales_from_monomials(0.1, 1, 1, 0, 1), DomainError);
}

TEST_CASE("classify examples") {
  LimitScales z;
  CHECK(classify(z).kind == PhaseKind::I);
  check_same(classify({Extended::zero(), Extended::of(2.0), Extended::zero(), Extended::zero()}), PhaseSpec::II(0.5));
  check_same(classify({Extended::infinite(), Extended::infinite(), Extended::of(3.0), Extended::infinite()}),
             PhaseSpec::VII(3.0));
  check_same(classify({Extended::of(2.0), Extended::of(0.5), Extended::of(2.0), Extended::of(1.0)}),
             PhaseSpec::VI(2.0, 1.0));
  check_same(classify({Extended::of(1.5), Extended::zero(), Extended::infinite(), Extended::zero()}), PhaseSpec::IV(1.5));
  CHECK(classify({Extended::infinite(), Extended::zero(), Extended::infinite(), Extended::of(1.0)}).kind ==
        PhaseKind::V);
  CHECK(classify({Extended::zero(), Extended::infinite(), Extended::zero(), Extended::of(2.0)}).kind ==
        PhaseKind::III);
}

TEST_CASE("inconsistent limits are rejected") {
  const auto f = [](double v) { return Extended::of(v); };
  // M = 0 with C = inf and R finite.
  CHECK_THROWS_AS(classify({Extended::infinite(), f(1), Extended::zero(), Extended::infinite()}), PhaseError);
  CHECK_THROWS_AS(classify({f(1), f(1), f(2), f(1)}), PhaseError);
  CHECK_THROWS_AS(classify({f(1), Extended::zero(), f(1), Extended::zero()}), PhaseError);
  CHECK_THROWS_AS(classify({f(1), f(1), f(1), f(3)}), PhaseError);
  CHECK_THROWS_AS(classify({Extended::zero(), f(1), Extended::infinite(), Extended::zero()}), PhaseError);
}

TEST_CASE("corollary tables") {
  check_same(classify_monomial(1, 1, 1, 5), PhaseSpec::II(5));
  check_same(classify_monomial(-1, 1, 2, 0.5), PhaseSpec::VI(1, 2));
  check_same(classify_monomial(-2, 2, 2, 0.5), PhaseSpec::VII(1));
  // Diagonal alpha = beta.
  check_same(classify_monomial(2, 2, 1, 3), PhaseSpec::III());
  check_same(classify_monomial(1, 1, 1, 3), PhaseSpec::II(3));
  check_same(classify_monomial(0, 0, 1, 3), PhaseSpec::I());
  check_same(classify_monomial(-1, -1, 2, 3), PhaseSpec::IV(2));
  check_same(classify_monomial(-2, -2, 2, 3), PhaseSpec::V());
}

TEST_CASE("monomial table agrees with the general classifier") {
  for (double alpha : {-3.0, -2.0, -1.5, -1.0, -0.5, 0.0, 1.0, 2.0})
    for (double beta : {-2.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0})
      for (auto [ct, cn] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
        CAPTURE(alpha, beta, ct, cn);
        const PhaseSpec p = classify_monomial(alpha, beta, ct, cn);
        check_same(classify(monomial_limits(alpha, beta, ct, cn)), p);
        check_same(classify(numeric_limits(alpha, beta, ct, cn)), p);
      }
}

TEST_CASE("classifier parameters are scale coherent") {
  for (double c : {0.25, 1.0, 4.0})
    for (double r : {0.5, 2.0}) {
      const double m = std::sqrt(c / r), l = std::sqrt(c * r);
      const PhaseSpec p = classify({Extended::of(c), Extended::of(r), Extended::of(m), Extended::of(l)});
      CHECK(p.kind == PhaseKind::VI);
      CHECK_THAT(p.mu, WithinRel(m, 1e-14));
      CHECK_THAT(p.ell, WithinRel(m * r, 1e-12));
    }
  const PhaseSpec two = classify({Extended::zero(), Extended::of(0.3), Extended::zero(), Extended::zero()});
  CHECK_THAT(two.kappa, WithinRel(1.0 / 0.3, 1e-14));
  const PhaseSpec four = classify({Extended::of(0.3), Extended::zero(), Extended::infinite(), Extended::zero()});
  CHECK(four.lambda == 0.3);
}

TEST_CASE("phase table export") {
  const auto rows = phase_table({-1.0, 1.0}, {1.0}, 1.0, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].phase.kind == PhaseKind::VI);
  const std::string csv = phase_table_csv(rows);
  CHECK(csv.rfind("alpha,beta,c_tan,c_norm,phase,kappa,lambda,mu,ell\n", 0) == 0);
  CHECK(csv.find("1,1,1,1,II,1,0,0,0") != std::string::npos);
  const std::string json = phase_table_json(rows);
  CHECK(json.find("\"kind\": \"VI\", \"mu\": 1, \"ell\": 1") != std::string::npos);
  CHECK(to_json(PhaseSpec::VII(2)) == "{\"kind\": \"VII\", \"mu\": 2, \"ell\": \"inf\"}");
}
