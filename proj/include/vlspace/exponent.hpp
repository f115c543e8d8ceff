#pragma once

#include <span>
#include <string>
#include <vector>

#include "vlspace/domain.hpp"

namespace vls {

enum class ExponentKind { Constant, LogHolder, TwoStep, Sampled };

/// Closed-form exponent families:
///   Constant   p(x) = a
///   LogHolder  p(x) = a + b / log(e + |x|), p_inf = a
///   TwoStep    p(x) = a for x_1 < 0, b otherwise
struct ExponentSpec {
  ExponentKind kind = ExponentKind::Constant;
  double a = 2.0;
  double b = 0.0;
  double p_max = 8.0;
};

/// Parses "constant:2", "lh:2,1" or "twostep:2,4".
ExponentSpec parse_exponent_spec(const std::string& text);

class ExponentField {
 public:
  ExponentField() = default;
  /// Validates 1 < p_- <= p_+ < inf and finiteness; p_inf is metadata.
  ExponentField(const LatticeDomain& domain, std::vector<double> values, double p_inf,
                ExponentKind kind = ExponentKind::Sampled);

  const LatticeDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  double operator[](Index cell) const { return values_[static_cast<std::size_t>(cell)]; }
  double p_inf() const { return p_inf_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  ExponentKind kind() const { return kind_; }

 private:
  LatticeDomain domain_;
  std::vector<double> values_;
  double p_inf_ = 2.0;
  double p_minus_ = 2.0;
  double p_plus_ = 2.0;
  ExponentKind kind_ = ExponentKind::Sampled;
};

double lh_family_value(double c, double b, double radius);

ExponentField make_exponent(const LatticeDomain& domain, const ExponentSpec& spec);
/// p'(x) = p(x) / (p(x) - 1), with p'_inf = (p_inf)'.
ExponentField conjugate(const ExponentField& p);
/// Pointwise s p(x), p_inf scaled alike. Throws if the result leaves (1, inf).
ExponentField scaled(const ExponentField& p, double factor);

/// Harmonic mean p_Q: 1/p_Q is the overlap-weighted average of 1/p.
double harmonic_mean(const ExponentField& p, const CubeSupport& q);

struct LogHolderConstants {
  double c0 = 0.0;    // local constant over centre pairs with 0 < |x-y| < 1/2
  double cinf = 0.0;  // decay constant against the declared value at infinity
};

struct LogHolderReport {
  LogHolderConstants exponent;
  LogHolderConstants reciprocal;  // constants of 1/p
  double diening = 1.0;           // C_D(1/p)
};

/// Constants for an arbitrary real field r sampled at cell centres.
/// C0 is a lower estimate of the true supremum (only centre pairs).
LogHolderConstants estimate_log_holder(const LatticeDomain& domain, std::span<const double> r,
                                       double r_inf);
LogHolderReport estimate_log_holder(const ExponentField& p);

/// max{ (2 sqrt n)^(n (r_+ - r_-)), exp(C0 (1 + log2 sqrt n)) }.
double diening_constant(int n, double r_range, double c0);
/// C_D of a sampled field using the estimated C0.
double diening_constant(const LatticeDomain& domain, std::span<const double> r);

struct ClosureReport {
  LogHolderConstants scaled;    // of s p(.)
  LogHolderConstants quotient;  // of u(.)/p(.)
  bool pass = false;
};

ClosureReport lh_closure_check(const ExponentField& p, const ExponentField& u, double s);

}  // namespace vls
