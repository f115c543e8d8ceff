#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/linalg.hpp"
#include "vlspace/maximal.hpp"
#include "vlspace/varnorm.hpp"
#include "vlspace/weights.hpp"

namespace vls {

/// Symmetric convex body given by support-function samples h(u_j) on a
/// shared antipodal direction set.
class ConvexBody {
 public:
  ConvexBody() = default;
  ConvexBody(std::shared_ptr<const DirectionSet> dirs, std::vector<double> h);

  const DirectionSet& directions() const { return *dirs_; }
  std::shared_ptr<const DirectionSet> shared_directions() const { return dirs_; }
  std::span<const double> support() const { return h_; }
  double operator[](std::size_t j) const { return h_[j]; }

  ConvexBody& operator+=(const ConvexBody& other);  // Minkowski sum
  ConvexBody& operator*=(double c);                 // dilation by |c|

 private:
  std::shared_ptr<const DirectionSet> dirs_;
  std::vector<double> h_;
};

/// K(v): the segment [-v, v], h(u) = |v . u|.
ConvexBody segment_body(const Vec& v, std::shared_ptr<const DirectionSet> dirs);

/// Per-cell convex bodies stored as cell-major support samples.
class ConvexBodyField {
 public:
  ConvexBodyField() = default;
  ConvexBodyField(const LatticeDomain& domain, std::shared_ptr<const DirectionSet> dirs,
                  std::vector<double> h);

  const LatticeDomain& domain() const { return domain_; }
  const DirectionSet& directions() const { return *dirs_; }
  std::shared_ptr<const DirectionSet> shared_directions() const { return dirs_; }
  std::size_t direction_count() const { return dirs_->size(); }
  std::span<const double> at(Index cell) const {
    return {h_.data() + static_cast<std::size_t>(cell) * direction_count(), direction_count()};
  }
  ConvexBody body(Index cell) const;
  std::span<const double> values() const { return h_; }

 private:
  LatticeDomain domain_;
  std::shared_ptr<const DirectionSet> dirs_;
  std::vector<double> h_;
};

/// x -> K(f(x)).
ConvexBodyField segment_field(const VectorField& f, std::shared_ptr<const DirectionSet> dirs);

/// Support function of the Aumann average over Q: overlap-weighted mean of h.
ConvexBody aumann_average(const ConvexBodyField& f, const CubeSupport& q);
/// sum over cubes containing x of <F>_Q.
ConvexBodyField convex_body_operator(const ConvexBodyField& f, const CubeFamily& family);
/// Closed convex hull of the averages over cubes containing x: pointwise max of h.
ConvexBodyField convex_maximal(const ConvexBodyField& f, const CubeFamily& family);

struct EquivalenceReport {
  double lower = INFINITY;  // min over cells of M_W f / |W M^K K(W^{-1} f)|
  double upper = 0.0;       // max of the same ratio
  double envelope = 0.0;    // d (1 + eps)
  Index worst_cell = -1;
  bool pass = true;
};
/// Compares M_W f with the norm of W(x) applied to the convex maximal
/// function of K(W^{-1} f), evaluated from the segment generators with the
/// sup over unit vectors replaced by a max over `dirs`.
EquivalenceReport christgoldberg_equivalence_check(const VectorField& f, const MatrixWeightField& w,
                                                   const CubeFamily& family, const DirectionSet& dirs);

struct SparseFamily {
  CubeFamily cubes;
  std::vector<int> level_k;                 // lambda = 2^k that selected each cube
  std::vector<std::vector<Index>> e_sets;   // cells of E_Q
  std::vector<double> e_fraction;           // |E_Q| / |Q|
  double gamma = 1.0;
  bool half_sparse = true;
};

/// Stopping cubes of the CZ decomposition at lambda = 2^k over the ladder,
/// with E_Q = Q minus the next level set. A cube selected at several levels
/// keeps its highest k.
SparseFamily sparse_from_cz(const std::vector<double>& averages, const CubeFamily& grid,
                            double one_constant, int d);
SparseFamily sparse_from_cz(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache);

/// Riesz-type transform along axis 1, kernel (x_1 - y_1) / |x - y|^{n+1},
/// applied componentwise by the midpoint rule with the diagonal cell dropped.
VectorField discrete_riesz(const VectorField& f, int axis = 1);
/// The same sum evaluated at an arbitrary point; the cell containing it is dropped.
std::vector<double> riesz_at(const VectorField& f, const Point& x, int axis = 1);

struct DominationReport {
  double c_emp = 0.0;
  Index witness_cell = -1;
  std::size_t witness_direction = 0;
  std::size_t uncovered = 0;  // cells where h vanishes but |Tf| > 1e-9
};
DominationReport domination_constant(const VectorField& tf, const ConvexBodyField& sparse_image);

/// || |W A_S K(f)| ||_p / || |W f| ||_p, with |W K|(x) = max_u h_K(W(x) u)
/// computed from the segment generators.
double sparse_operator_ratio(const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                             const CubeFamily& family, const DirectionSet& dirs);

}  // namespace vls
