#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/error.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/linalg.hpp"
#include "vlspace/varnorm.hpp"

namespace vls {

inline constexpr double kEigenFloor = 1e-8;

/// Per-cell SPD d x d matrices with cached inverses and operator norms.
/// Input is symmetrised (asymmetry above 1e-12 relative is rejected) and
/// eigenvalues are clamped to kEigenFloor.
class MatrixWeightField {
 public:
  MatrixWeightField() = default;
  /// `entries` holds d*d row-major values per cell.
  MatrixWeightField(const LatticeDomain& domain, int d, std::span<const double> entries);
  MatrixWeightField(const LatticeDomain& domain, std::vector<Mat> matrices);
  static MatrixWeightField from_scalar(const ScalarField& w);
  static MatrixWeightField identity(const LatticeDomain& domain, int d);

  const LatticeDomain& domain() const { return domain_; }
  int dim() const { return d_; }
  const Mat& at(Index cell) const { return w_[static_cast<std::size_t>(cell)]; }
  const Mat& inverse(Index cell) const { return inv_[static_cast<std::size_t>(cell)]; }
  double op(Index cell) const { return op_[static_cast<std::size_t>(cell)]; }
  double inverse_op(Index cell) const { return inv_op_[static_cast<std::size_t>(cell)]; }

  /// The field x -> W(x)^{-1}.
  MatrixWeightField inverted() const;
  /// w_u(x) = |W(x) u|.
  ScalarField scalarize(const Vec& u) const;
  /// For d = 1: the scalar weight.
  ScalarField scalar() const;
  /// Row-major entries, d*d per cell.
  std::vector<double> entries() const;

 private:
  void cache();

  LatticeDomain domain_;
  int d_ = 1;
  std::vector<Mat> w_;
  std::vector<Mat> inv_;
  std::vector<double> op_;
  std::vector<double> inv_op_;
};

struct ReducingOperator {
  Mat a;
  double c_lo = 1.0;  // min |A u| / N(u) over held-out directions
  double c_hi = 1.0;  // max |A u| / N(u)
};

/// N(u) = |Q|^{-1/p_Q} || |W u| 1_Q ||_p.
double localized_norm(const MatrixWeightField& w, const ExponentField& p, const CubeSupport& q,
                      const Vec& u);

/// Reducing operator of the norm u -> |Q|^{-1/p_Q} || |W u| 1_Q ||_p. The
/// MVEE of the boundary points u_j / N(u_j) is rescaled so that
/// N(u) <= |A u| on the fit directions; the certificate comes from
/// `heldout`. For d = 1 this is N(1) exactly.
ReducingOperator reducing_operator(const MatrixWeightField& w, const ExponentField& p,
                                   const CubeSupport& q, const DirectionSet& fit,
                                   const DirectionSet& heldout);
/// Same with r*(x,u) = |W^{-1}(x) u| and exponent p'.
ReducingOperator dual_reducing_operator(const MatrixWeightField& w, const ExponentField& p,
                                        const CubeSupport& q, const DirectionSet& fit,
                                        const DirectionSet& heldout);

/// Primal and dual reducing operators for every cube of a family, shared by
/// the constants, the auxiliary maximal operators and the CZ decomposition.
/// Computed eagerly in parallel; keeps a reference to the family. Without
/// `with_dual` only the primal operators are built and dual() throws.
class ReducingCache {
 public:
  ReducingCache(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                std::size_t direction_count = 0, bool with_dual = true);

  const CubeFamily& family() const { return *family_; }
  std::size_t size() const { return primal_.size(); }
  const ReducingOperator& primal(std::size_t cube) const { return primal_[cube]; }
  bool has_dual() const { return !dual_.empty() || primal_.empty(); }
  const ReducingOperator& dual(std::size_t cube) const {
    require(has_dual(), ErrorCode::Config, "reducing cache was built without dual operators");
    return dual_[cube];
  }

 private:
  const CubeFamily* family_;
  std::vector<ReducingOperator> primal_, dual_;
};

struct WeightConstant {
  double value = 0.0;
  std::size_t argmax = 0;
  std::vector<double> per_cube;
};

/// sup_Q |Q|^{-1} ||w 1_Q||_p ||w^{-1} 1_Q||_p'.
WeightConstant scalar_ap_constant(const ScalarField& w, const ExponentField& p,
                                  const CubeFamily& family);
/// sup_Q |Q|^{-1} || || |W(x) W^{-1}(y)|_op 1_Q(y) ||_{p',y} 1_Q(x) ||_{p,x}.
WeightConstant matrix_ap_constant(const MatrixWeightField& w, const ExponentField& p,
                                  const CubeFamily& family);
/// sup_Q |A_Q Abar_Q|_op.
WeightConstant reduced_ap_constant(const ReducingCache& cache);
WeightConstant reduced_ap_constant(const MatrixWeightField& w, const ExponentField& p,
                                   const CubeFamily& family);

struct SymmetryReport {
  double forward = 0.0;   // [W]^R for (W, p)
  double backward = 0.0;  // [W^{-1}]^R for (W^{-1}, p')
  double ratio = 1.0;
};
SymmetryReport symmetry_check(const MatrixWeightField& w, const ExponentField& p,
                              const CubeFamily& family);

struct ScalarizationReport {
  double matrix_constant = 0.0;
  double worst_scalar = 0.0;
  std::size_t worst_direction = 0;
  double ratio = 0.0;  // worst_scalar / matrix_constant
};
ScalarizationReport scalarization_check(const MatrixWeightField& w, const ExponentField& p,
                                        const CubeFamily& family, const DirectionSet& directions);

struct ReverseHolderRow {
  double r = 1.0;
  double tightest = 0.0;  // smallest C for which the inequality holds on the family
  std::size_t argmax = 0;
  bool pass = false;
};
struct ReverseHolderReport {
  std::vector<ReverseHolderRow> rows;
  std::optional<double> largest_passing;
};
/// For each r: sup_Q |Q|^{-1/(r p_Q)} ||w 1_Q||_{r p} / (|Q|^{-1/p_Q} ||w 1_Q||_p),
/// compared against c_budget.
ReverseHolderReport reverse_holder_probe(const ScalarField& w, const ExponentField& p,
                                         const CubeFamily& family, std::span<const double> r_grid,
                                         double c_budget);
/// 1 + 2^{-k}, k = 0..10.
std::vector<double> default_r_grid();

}  // namespace vls
