#pragma once

#include <string>
#include <vector>

#include "stiff/eps_solver.hpp"
#include "stiff/limit_solvers.hpp"

namespace stiff {

// Limit value in [0, inf] with exact zero and infinity.
class Extended {
 public:
  enum class Kind { zero, finite, infinite };

  static Extended zero() { return Extended(Kind::zero, 0.0); }
  static Extended infinite() { return Extended(Kind::infinite, kInf); }
  // Positive finite value (0 and inf map to the exact kinds).
  static Extended of(double v);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::zero; }
  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_infinite() const { return kind_ == Kind::infinite; }
  double value() const { return value_; }
  bool operator==(const Extended&) const = default;

 private:
  Extended(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

// Limits of C, R, M and of the splitting length along eps -> 0.
struct LimitScales {
  Extended C = Extended::zero();
  Extended R = Extended::zero();
  Extended M = Extended::zero();
  Extended L = Extended::zero();

  // Throws PhaseError when the four limits cannot arise together (M^2 R = C and
  // L = M R where defined).
  void validate() const;
};

// a_tan = c_tan eps^alpha, a_norm = c_norm eps^beta.
ScaleParams scales_from_monomials(double eps, double alpha, double beta, double c_tan, double c_norm);
// Exact eps -> 0 limits of the monomial scales.
LimitScales monomial_limits(double alpha, double beta, double c_tan, double c_norm);

PhaseSpec classify(const LimitScales& limits);
PhaseSpec classify_monomial(double alpha, double beta, double c_tan, double c_norm);

struct PhaseTableRow {
  double alpha, beta, c_tan, c_norm;
  PhaseSpec phase;
};
std::vector<PhaseTableRow> phase_table(const std::vector<double>& alphas, const std::vector<double>& betas,
                                       double c_tan, double c_norm);
std::string phase_table_json(const std::vector<PhaseTableRow>& rows);
std::string phase_table_csv(const std::vector<PhaseTableRow>& rows);
std::string to_json(const PhaseSpec& p);

}  // namespace stiff
