#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/varnorm.hpp"
#include "vlspace/weights.hpp"

namespace vls {

enum class MaximalOp { HardyLittlewood, NormMaximal, ChristGoldberg, AuxPrime, AuxDoublePrime };

const char* maximal_op_name(MaximalOp op);

struct MaximalField {
  ScalarField values;
  std::vector<std::int64_t> argmax;  // family index, -1 where no cube contains the cell
  MaximalOp op = MaximalOp::HardyLittlewood;
  Provenance provenance = Provenance::Custom;
  std::uint8_t shift = 0;
};

/// Threshold test shared by the CZ decomposition and its superlevel sets.
/// The relative slack keeps exact ties (e.g. an average of exactly lambda
/// computed with rounding) on the "not above" side.
inline bool exceeds(double value, double lambda) { return value > lambda * (1.0 + 1e-12); }

/// sup over cubes containing x of avg_Q |f|.
MaximalField hardy_littlewood(const ScalarField& f, const CubeFamily& family);
/// sup_Q avg_Q |W(x) W^{-1}(y) f(y)| dy.
MaximalField christ_goldberg(const VectorField& f, const MatrixWeightField& w, const CubeFamily& family);

/// avg_Q |A_Q W^{-1}(y) f(y)| for every cube, A_Q the primal reducing operator.
std::vector<double> aux_prime_averages(const VectorField& f, const MatrixWeightField& w,
                                       const ReducingCache& cache);
/// avg_Q |Abar_Q^{-1} W^{-1}(y) f(y)| for every cube.
std::vector<double> aux_double_prime_averages(const VectorField& f, const MatrixWeightField& w,
                                              const ReducingCache& cache);
MaximalField aux_prime(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache);
MaximalField aux_double_prime(const VectorField& f, const MatrixWeightField& w,
                              const ReducingCache& cache);
/// Pointwise sup of per-cube values over the cubes containing each cell.
MaximalField sup_over_cubes(const std::vector<double>& per_cube, const CubeFamily& family, MaximalOp op);
MaximalField norm_maximal_field(const ScalarField& f, const ExponentField& p, const CubeFamily& family);

struct FiniteSumReport {
  double constant = 0.0;   // C = 6^{2n} 24 2 [1] sqrt(d) (1 + eps)
  double one_constant = 0.0;
  double max_ratio = 0.0;  // max over cells of M'_all / sum_t M'_t
  Index worst_cell = -1;
  bool pass = true;
};
/// M' over all lattice cubes whose one-third cover fits in the box versus
/// the sum of M' over the 2^n shifted grids.
FiniteSumReport finite_sum_bound_check(const VectorField& f, const MatrixWeightField& w,
                                       const ExponentField& p, std::size_t direction_count = 0);

struct CZDecomposition {
  double lambda = 0.0;
  std::uint8_t shift = 0;
  std::vector<std::size_t> stops;      // non-root stopping cubes, family indices
  std::vector<std::size_t> root_hits;  // root cubes whose average exceeds lambda
  std::vector<double> averages;        // per family cube
  std::vector<std::uint8_t> omega;     // union of stopping and root cubes, per cell
  std::vector<std::uint8_t> superlevel;  // cells with M'_{D^t} f > lambda
  bool cover_exact = true;
  double bound_constant = 0.0;  // 24 4^n 2 [1] sqrt(d) (1 + eps)
  double worst_bound_ratio = 0.0;  // max a_j / lambda over non-root stops
  bool bound_ok = true;
};

/// Whether a grid cube's parent leaves the box.
bool is_root(const LatticeDomain& domain, const Cube& q);

/// Maximal grid cubes with avg_Q |A_Q W^{-1} f| > lambda, found top-down
/// from the root cubes. `cache` must be built on a shifted-grid family.
CZDecomposition cz_decompose(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache,
                             double lambda, double one_constant);
CZDecomposition cz_decompose(const std::vector<double>& averages, const CubeFamily& family,
                             double lambda, double one_constant, int d);

/// Exponents k with 2^k below the largest average, starting one below the
/// smallest positive average.
std::vector<int> lambda_ladder(const std::vector<double>& averages);

struct UniformBound {
  double r = 1.0;
  double value = 0.0;
  std::size_t argmax = 0;
};
/// sup_Q A_{u',Q}(|W^{-1} A_Q|_op) with u' = r p'.
UniformBound uniform_bound_check(const MatrixWeightField& w, const ExponentField& p,
                                 const ReducingCache& cache, double r);
/// 1 + (r_pass - 1)/2 from the reverse Holder probe on the scalarised weights
/// |W e_i|, or 1 + 2^{-11} when no grid value passes.
double default_uniform_r(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                         double c_budget);

/// Test functions: cube indicators along a diagonal, single cells,
/// random signs and fields aligned with the smallest eigenvector of W.
std::vector<VectorField> test_function_battery(const LatticeDomain& domain, const MatrixWeightField& w,
                                               std::uint64_t seed, std::size_t random_count = 4);

struct NormEstimate {
  double ratio = 0.0;  // max over the battery of ||Op f||_p / || |f| ||_p
  std::size_t argmax = 0;
  std::vector<double> ratios;
};
NormEstimate operator_norm_estimate(MaximalOp op, const MatrixWeightField& w, const ExponentField& p,
                                    const ReducingCache& cache, const std::vector<VectorField>& battery);

}  // namespace vls
