#pragma once

// Bounded dyadic lattice domains and cube families.
//
// The box is [-L, L)^n split into cells of side h = 2^-J. All cube
// arithmetic is done in integer "lattice units" of h/3 so that the
// one-third shifted grids are represented exactly.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace vls {

inline constexpr int kMaxDim = 3;
using Index = std::int64_t;
using Coords = std::array<Index, kMaxDim>;
using Point = std::array<double, kMaxDim>;

/// Axis-parallel box in lattice units, half-open per axis.
struct UnitBox {
  Coords lo{};
  Coords hi{};
  friend bool operator==(const UnitBox&, const UnitBox&) = default;
};

/// Cube of the grid D^t: side 2^level, corner 2^level (m + (-1)^level t).
/// Bit a of `shift` set means t_a = 1/3.
struct Cube {
  std::uint8_t shift = 0;
  int level = 0;
  Coords corner{};

  double side() const;
  friend bool operator==(const Cube&, const Cube&) = default;
  friend auto operator<=>(const Cube&, const Cube&) = default;
};

/// Arbitrary axis-parallel cube given by real lower corner and side.
struct RealCube {
  Point lo{};
  double side = 0.0;
};

/// Quadrature data for a cube: overlapping cells with exact overlap
/// measures, plus the cells whose centre lies in the cube ("members").
/// Pointwise operators evaluate at cell centres, so membership decides
/// which cells a cube's value is assigned to.
struct CubeSupport {
  std::vector<Index> cells;
  std::vector<double> weights;
  std::vector<Index> members;
  double measure = 0.0;
};

class LatticeDomain {
 public:
  LatticeDomain() = default;

  int dim() const { return n_; }
  Index half_width() const { return half_width_; }
  int refinement() const { return refinement_; }
  Index cells_per_axis() const { return per_axis_; }
  Index cell_count() const { return cell_count_; }
  double cell_side() const { return cell_side_; }
  double cell_measure() const { return cell_measure_; }
  double box_measure() const;

  Coords cell_coords(Index cell) const;
  Index cell_index(const Coords& c) const;
  Point cell_center(Index cell) const;

  /// Smallest admissible cube level (cube side equals the cell side).
  int min_level() const { return -refinement_; }
  /// Largest level whose cubes can fit inside the box.
  int max_level() const;

  UnitBox extent(const Cube& q) const;
  bool contains(const UnitBox& b) const;
  bool contains(const Cube& q) const;
  CubeSupport support(const UnitBox& b) const;

  double unit_to_real(Index u) const { return static_cast<double>(u) * cell_side_ / 3.0; }
  /// Half-width of the box in lattice units.
  Index box_units() const { return 3 * per_axis_ / 2; }

  friend bool operator==(const LatticeDomain& a, const LatticeDomain& b) {
    return a.n_ == b.n_ && a.half_width_ == b.half_width_ && a.refinement_ == b.refinement_;
  }

 private:
  friend LatticeDomain build_domain(int n, Index half_width, int refinement);

  int n_ = 1;
  Index half_width_ = 1;
  int refinement_ = 0;
  Index per_axis_ = 0;
  Index cell_count_ = 0;
  double cell_side_ = 1.0;
  double cell_measure_ = 1.0;
};

/// n in {1,2,3}; L a power of two; 2L 2^J cells per axis, at least 4.
LatticeDomain build_domain(int n, Index half_width, int refinement);

enum class Provenance { AllDyadic, ShiftedGrid, Custom };

struct FamilyCube {
  std::optional<Cube> grid;
  UnitBox box;
};

/// Ordered list of cubes inside a domain with their quadrature supports.
class CubeFamily {
 public:
  CubeFamily() = default;
  CubeFamily(const LatticeDomain& domain, Provenance provenance, std::uint8_t shift,
             std::vector<FamilyCube> cubes);

  const LatticeDomain& domain() const { return domain_; }
  Provenance provenance() const { return provenance_; }
  std::uint8_t shift() const { return shift_; }
  std::size_t size() const { return cubes_.size(); }
  bool empty() const { return cubes_.empty(); }

  const FamilyCube& at(std::size_t i) const { return cubes_[i]; }
  const CubeSupport& support(std::size_t i) const { return supports_[i]; }
  /// Real side length of cube i.
  double side(std::size_t i) const;
  /// Indices of cubes whose member set includes the cell, in family order.
  const std::vector<std::uint32_t>& containing(Index cell) const {
    return containing_[static_cast<std::size_t>(cell)];
  }

 private:
  LatticeDomain domain_;
  Provenance provenance_ = Provenance::Custom;
  std::uint8_t shift_ = 0;
  std::vector<FamilyCube> cubes_;
  std::vector<CubeSupport> supports_;
  std::vector<std::vector<std::uint32_t>> containing_;
};

/// All cubes of grid `shift` with levels in [kmin, kmax] fully inside the
/// box, ordered by (level, lexicographic corner).
CubeFamily enumerate_cubes(const LatticeDomain& domain, std::uint8_t shift, int kmin, int kmax);
/// enumerate_cubes over every admissible level.
CubeFamily grid_family(const LatticeDomain& domain, std::uint8_t shift);
CubeFamily single_cube_family(const LatticeDomain& domain, const Cube& q);
/// Cubes with corners on the cell lattice and side s*h, s in [smin, smax].
/// With `coverable_only`, keeps only cubes for which one_third_cover
/// succeeds inside the box.
CubeFamily lattice_family(const LatticeDomain& domain, Index smin, Index smax,
                          bool coverable_only);

/// Parent in the same grid; throws OutOfDomain if it leaves the box.
Cube parent_cube(const LatticeDomain& domain, const Cube& q);
/// Grid cubes one level down whose parent is q.
std::vector<Cube> children(const LatticeDomain& domain, const Cube& q);

struct ShiftedCover {
  std::uint8_t shift = 0;
  Cube cube;
};

/// Smallest grid cube (over all 2^n grids) containing q with side at most
/// 6 side(q), restricted to cubes inside the box. Ties go to the smallest
/// side, then the lexicographically smallest shift vector.
ShiftedCover one_third_cover(const LatticeDomain& domain, const RealCube& q);
/// Same search on all of R^n (no box), down to `min_level`.
std::optional<ShiftedCover> one_third_cover_free(int n, const RealCube& q, int min_level);

/// Real lower corner of a grid cube.
Point cube_lower(int n, const Cube& q);
RealCube to_real(const LatticeDomain& domain, const UnitBox& b);

CubeSupport cells_in_cube(const LatticeDomain& domain, const Cube& q);

}  // namespace vls
