#pragma once

// Small dense linear algebra for d <= 3: operator norms, direction sets and
// the minimum-volume enclosing ellipsoid used to build reducing operators.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vls {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Largest singular value. Closed form for d <= 2, symmetric QR for d = 3.
double op_norm(const Mat& m);

/// Symmetrise and clamp eigenvalues from below.
Mat clamp_spd(const Mat& m, double floor);
Mat spd_sqrt(const Mat& m);
Mat spd_inverse(const Mat& m);
double min_eigenvalue(const Mat& m);

/// Antipodally symmetric unit vectors: entries [0, m/2) are the
/// representatives, entry j + m/2 is the negative of entry j.
class DirectionSet {
 public:
  DirectionSet() = default;
  DirectionSet(int d, std::vector<Vec> half);

  int dim() const { return d_; }
  std::size_t size() const { return dirs_.size(); }
  std::size_t half_size() const { return dirs_.size() / 2; }
  const Vec& operator[](std::size_t j) const { return dirs_[j]; }

 private:
  int d_ = 1;
  std::vector<Vec> dirs_;
};

/// Default counts: 2 (d=1), 64 (d=2), 512 (d=3). Always contains +-e_i.
DirectionSet default_directions(int d, std::size_t count = 0);
/// Directions disjoint from default_directions(d, count), for certificates.
DirectionSet heldout_directions(int d, std::size_t count = 0);
std::size_t default_direction_count(int d);

struct MveeResult {
  Mat root;          // A with ellipsoid {x : |A x| <= 1}
  int iterations = 0;
  double gap = 0.0;  // max_i x_i^T X^{-1} x_i / d - 1 at termination
};

/// Minimum-volume origin-centred ellipsoid containing +-points. Khachiyan-type
/// multiplicative updates with away steps, finished if needed by a log-barrier
/// Newton phase on the entries of H. `gap` is max_i x_i^T H x_i / d - 1 for
/// the first phase and the barrier's log-det duality gap for the second.
/// The returned ellipsoid is rescaled so that every point lies inside it.
/// Throws Degenerate if the points do not span R^d and NoConvergence if
/// the gap is not reached within max_iterations.
MveeResult mvee(std::span<const Vec> points, double gap = 1e-9, int max_iterations = 100000);

}  // namespace vls
