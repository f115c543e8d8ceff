#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/exponent.hpp"

namespace vls {

/// Per-cell real values; entries must be finite.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const LatticeDomain& domain, std::vector<double> values);
  static ScalarField constant(const LatticeDomain& domain, double value);

  const LatticeDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  double operator[](Index cell) const { return values_[static_cast<std::size_t>(cell)]; }

 private:
  LatticeDomain domain_;
  std::vector<double> values_;
};

/// Per-cell vectors in R^d, stored cell-major.
class VectorField {
 public:
  VectorField() = default;
  VectorField(const LatticeDomain& domain, int d, std::vector<double> values);

  const LatticeDomain& domain() const { return domain_; }
  int components() const { return d_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> at(Index cell) const {
    return {values_.data() + static_cast<std::size_t>(cell) * d_, static_cast<std::size_t>(d_)};
  }
  /// Pointwise Euclidean length |f(x)|.
  ScalarField magnitude() const;

 private:
  LatticeDomain domain_;
  int d_ = 1;
  std::vector<double> values_;
};

struct NormSolveTrace {
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |rho(f/lambda) - 1|, 0 for the zero function
};

/// sum_i w_i |f_i|^{p_i}; entries above 1e100 are raised in log space.
double modular(std::span<const double> f, std::span<const double> p, std::span<const double> w);
double modular(const ScalarField& f, const ExponentField& p);

/// Luxemburg norm inf{lambda > 0 : rho(f / lambda) <= 1} of a weighted
/// sample. Solved by safeguarded Newton on log rho in log lambda, started
/// from the modular bracket [rho^{1/p_+}, rho^{1/p_-}] (ordered by regime).
double luxemburg(std::span<const double> f, std::span<const double> p, std::span<const double> w,
                 NormSolveTrace* trace = nullptr);
double luxemburg_norm(const ScalarField& f, const ExponentField& p, NormSolveTrace* trace = nullptr);
/// || f 1_Q || for per-cell values f.
double restricted_norm(std::span<const double> f, const ExponentField& p, const CubeSupport& q);
/// || 1_Q ||
double char_norm(const ExponentField& p, const CubeSupport& q);
std::vector<double> char_norms(const ExponentField& p, const CubeFamily& family);

struct HolderPair {
  double lhs = 0.0;  // int |f g|
  double rhs = 0.0;  // 2 ||f||_p ||g||_p'
};
HolderPair holder_pairing(const ScalarField& f, const ScalarField& g, const ExponentField& p);

/// A_{p,Q}(f) = ||1_Q f|| / ||1_Q||.
double averaging_functional(const ScalarField& f, const CubeSupport& q, const ExponentField& p);

struct NormMaximalResult {
  ScalarField values;
  std::vector<std::int64_t> argmax;  // family index, -1 when uncovered
  std::vector<std::uint8_t> uncovered;
};
NormMaximalResult norm_maximal(const ScalarField& f, const ExponentField& p, const CubeFamily& family);

struct ConstantResult {
  double value = 0.0;
  std::size_t argmax = 0;
};
/// [1]_{A_p} over the family: max |Q|^{-1} ||1_Q||_p ||1_Q||_p'.
ConstantResult one_constant(const ExponentField& p, const CubeFamily& family);

struct DualityResult {
  double lhs = 0.0;     // average of |f g| over Q
  double rhs = 0.0;     // C A_{p,Q}(f) A_{p',Q}(g)
  double c_used = 0.0;  // 2 |Q|^{-1} ||1_Q||_p ||1_Q||_p'
};
DualityResult duality_check(const ScalarField& f, const ScalarField& g, const CubeSupport& q,
                            const ExponentField& p);

}  // namespace vls
