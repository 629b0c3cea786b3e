#include "stiff/phase.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "stiff/errors.hpp"

namespace stiff {
namespace {

using K = Extended::Kind;

// Limit of c eps^p as eps -> 0 for c > 0.
Extended power_limit(double c, double p) {
  if (p > 0.0) return Extended::zero();
  if (p < 0.0) return Extended::infinite();
  return Extended::of(c);
}

// Kind of the limit of a product / quotient of two limits, when it is determined.
bool product_kind(const Extended& a, const Extended& b, K& out) {
  if ((a.is_zero() && b.is_infinite()) || (a.is_infinite() && b.is_zero())) return false;
  if (a.is_zero() || b.is_zero()) out = K::zero;
  else if (a.is_infinite() || b.is_infinite()) out = K::infinite;
  else out = K::finite;
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Extended Extended::of(double v) {
  if (std::isnan(v) || v < 0.0) throw DomainError("limit values must lie in [0, inf]");
  if (v == 0.0) return zero();
  if (std::isinf(v)) return infinite();
  return Extended(Kind::finite, v);
}

void LimitScales::validate() const {
  auto fail = [](const char* why) { throw PhaseError(std::string("inconsistent limits: ") + why); };
  // M^2 = C / R.
  switch (M.kind()) {
    case K::zero:
      if (!R.is_infinite() && !C.is_zero()) fail("M = 0 needs C = 0 unless R = inf");
      break;
    case K::infinite:
      if (!R.is_zero() && !C.is_infinite()) fail("M = inf needs C = inf unless R = 0");
      break;
    case K::finite:
      if (C.kind() != R.kind()) fail("finite M needs C and R of the same kind");
      if (C.is_finite() && std::abs(M.value() * M.value() * R.value() - C.value()) > 1e-12 * C.value())
        fail("M^2 R != C");
      break;
  }
  // L^2 = C R.
  K lk;
  if (product_kind(C, R, lk)) {
    if (L.kind() != lk) fail("L does not match C R");
    if (lk == K::finite && std::abs(L.value() * L.value() - C.value() * R.value()) > 1e-12 * C.value() * R.value())
      fail("L^2 != C R");
  }
}

ScaleParams scales_from_monomials(double eps, double alpha, double beta, double c_tan, double c_norm) {
  if (!(c_tan > 0.0) || !(c_norm > 0.0)) throw DomainError("monomial prefactors must be positive");
  return ScaleParams::make(eps, c_tan * std::pow(eps, alpha), c_norm * std::pow(eps, beta));
}

LimitScales monomial_limits(double alpha, double beta, double c_tan, double c_norm) {
  if (!(c_tan > 0.0) || !(c_norm > 0.0)) throw DomainError("monomial prefactors must be positive");
  LimitScales l;
  l.C = power_limit(c_tan, 1.0 + alpha);
  l.R = power_limit(1.0 / c_norm, 1.0 - beta);
  l.M = power_limit(std::sqrt(c_tan * c_norm), 0.5 * (alpha + beta));
  l.L = power_limit(std::sqrt(c_tan / c_norm), 1.0 + 0.5 * (alpha - beta));
  return l;
}

PhaseSpec classify(const LimitScales& l) {
  l.validate();
  switch (l.M.kind()) {
    case K::zero:
      if (l.R.is_zero()) return PhaseSpec::I();
      if (l.R.is_finite()) return PhaseSpec::II(1.0 / l.R.value());
      return PhaseSpec::III();
    case K::infinite:
      if (l.C.is_zero()) return PhaseSpec::I();
      if (l.C.is_finite()) return PhaseSpec::IV(l.C.value());
      return PhaseSpec::V();
    case K::finite:
      if (l.R.is_zero()) return PhaseSpec::I();
      if (l.R.is_finite()) return PhaseSpec::VI(l.M.value(), l.L.value());
      return PhaseSpec::VII(l.M.value());
  }
  throw PhaseError("unreachable");
}

PhaseSpec classify_monomial(double alpha, double beta, double c_tan, double c_norm) {
  if (!(c_tan > 0.0) || !(c_norm > 0.0)) throw DomainError("monomial prefactors must be positive");
  const double s = alpha + beta;
  if (s > 0.0) {
    if (beta < 1.0) return PhaseSpec::I();
    if (beta == 1.0) return PhaseSpec::II(c_norm);
    return PhaseSpec::III();
  }
  if (s < 0.0) {
    if (alpha > -1.0) return PhaseSpec::I();
    if (alpha == -1.0) return PhaseSpec::IV(c_tan);
    return PhaseSpec::V();
  }
  if (alpha > -1.0) return PhaseSpec::I();
  if (alpha == -1.0) return PhaseSpec::VI(std::sqrt(c_tan * c_norm), std::sqrt(c_tan / c_norm));
  return PhaseSpec::VII(std::sqrt(c_tan * c_norm));
}

std::vector<PhaseTableRow> phase_table(const std::vector<double>& alphas, const std::vector<double>& betas,
                                       double c_tan, double c_norm) {
  std::vector<PhaseTableRow> rows;
  for (double a : alphas)
    for (double b : betas) rows.push_back({a, b, c_tan, c_norm, classify_monomial(a, b, c_tan, c_norm)});
  return rows;
}

std::string to_json(const PhaseSpec& p) {
  std::ostringstream os;
  os << "{\"kind\": \"" << phase_name(p.kind) << "\"";
  switch (p.kind) {
    case PhaseKind::II: os << ", \"kappa\": " << fmt(p.kappa); break;
    case PhaseKind::IV: os << ", \"lambda\": " << fmt(p.lambda); break;
    case PhaseKind::VI: os << ", \"mu\": " << fmt(p.mu) << ", \"ell\": " << fmt(p.ell); break;
    case PhaseKind::VII: os << ", \"mu\": " << fmt(p.mu) << ", \"ell\": \"inf\""; break;
    default: break;
  }
  os << "}";
  return os.str();
}

std::string phase_table_json(const std::vector<PhaseTableRow>& rows) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    os << "  {\"alpha\": " << fmt(r.alpha) << ", \"beta\": " << fmt(r.beta) << ", \"c_tan\": " << fmt(r.c_tan)
       << ", \"c_norm\": " << fmt(r.c_norm) << ", \"phase\": " << to_json(r.phase) << "}"
       << (k + 1 < rows.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

std::string phase_table_csv(const std::vector<PhaseTableRow>& rows) {
  std::ostringstream os;
  os << "alpha,beta,c_tan,c_norm,phase,kappa,lambda,mu,ell\n";
  for (const auto& r : rows)
    os << fmt(r.alpha) << ',' << fmt(r.beta) << ',' << fmt(r.c_tan) << ',' << fmt(r.c_norm) << ','
       << phase_name(r.phase.kind) << ',' << fmt(r.phase.kappa) << ',' << fmt(r.phase.lambda) << ','
       << fmt(r.phase.mu) << ',' << (std::isinf(r.phase.ell) ? std::string("inf") : fmt(r.phase.ell)) << '\n';
  return os.str();
}

}  // namespace stiff
