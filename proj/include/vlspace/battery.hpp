#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/weights.hpp"

namespace vls {

struct BatteryConfig {
  std::uint64_t seed = 42;
  /// Number of exponent fields: the fixed list first, random log-Holder
  /// fields after it.
  std::size_t exponent_count = 10;
  /// Number of weights: identity, constant SPD, rotated power weights,
  /// then random smooth fields.
  std::size_t weight_count = 12;
};

struct NamedExponent {
  std::string name;
  ExponentField field;
};

struct NamedWeight {
  std::string name;
  MatrixWeightField field;
};

/// Constants 1.5, 2, 3; two-step (2,4), (1.5,3); lh (2,1), (1.5,0.5), (3,2);
/// then random lh fields with p_- > 1.1 and p_+ <= 8.
std::vector<NamedExponent> gen_exponent_battery(const LatticeDomain& domain, const BatteryConfig& config);

/// For d >= 2: identity, a constant SPD matrix, R(x) diag(|x|^a, |x|^-b) R(x)^T
/// with a, b in {0, 1/8, 1/4} (a = b = 0 omitted), then random smooth SPD
/// fields with condition number at most 1e3. R rotates by x_1 + ... + x_n.
/// For d = 1 the scalar analogues |x|^a, |x|^-b, |x|^(a-b) and smooth
/// positive fields are used.
std::vector<NamedWeight> gen_weight_battery(const LatticeDomain& domain, int d, const BatteryConfig& config);

/// Rotation by angle theta in the (0,1) plane (and (1,2) plane by theta/2 for d = 3).
Mat rotation(int d, double theta);
/// R(theta(x)) diag(|x|^a, |x|^-b, 1) R(theta(x))^T.
MatrixWeightField rotated_power_weight(const LatticeDomain& domain, int d, double a, double b);

}  // namespace vls
