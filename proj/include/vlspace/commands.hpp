#pragma once

// Table-producing operations behind the command-line subcommands.

#include <optional>
#include <string>

#include "vlspace/domain.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/maximal.hpp"
#include "vlspace/varnorm.hpp"
#include "vlspace/weights.hpp"

namespace vls {

/// `grid` is a shift mask 0..2^n-1 (bit a set: t_a = 1/3) or "lattice" for
/// all lattice cubes whose one-third cover fits; levels default to all.
struct FamilySpec {
  std::string grid = "0";
  std::optional<int> level_min;
  std::optional<int> level_max;
};

/// Parses "a..b", "a.." or "..b" into the level bounds of `spec`.
void parse_levels(const std::string& text, FamilySpec& spec);
CubeFamily build_family(const LatticeDomain& domain, const FamilySpec& spec);

/// "[lo,hi)" per axis joined by "x", in real coordinates.
std::string cube_interval(const LatticeDomain& domain, const FamilyCube& q);

MaximalOp parse_maximal_op(const std::string& name);

struct Constants {
  double one = 0.0;       // [1]
  double scalar = NAN;    // [w] when d = 1
  double matrix = 0.0;    // [W]
  double reduced = 0.0;   // [W]^R
};
Constants compute_constants(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                            std::size_t direction_count = 0);

/// cube,kind,a11,...,c_lo,c_hi with kind primal or dual.
std::string reduce_csv(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                       std::size_t direction_count = 0);

/// cell,x1[,x2,x3],value,argmax. M and M_p act on |f|.
std::string maximal_csv(MaximalOp op, const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                        const CubeFamily& family, std::size_t direction_count = 0);

/// lambda,k,cube,level,average,root for the grid `shift`, one lambda or the ladder.
std::string czdecomp_csv(const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                         unsigned shift, std::optional<double> lambda, std::size_t direction_count = 0);

struct SparseOutput {
  std::string cells_csv;  // cell,x1[,x2,x3],value: radius of A_S K(f)(x)
  std::string cubes_csv;  // index,cube,level,k,e_fraction
  double gamma = 1.0;
  double ratio = 0.0;     // || |W A_S K(f)| ||_p / || |W f| ||_p
};
SparseOutput sparse_apply(const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                          unsigned shift, std::size_t direction_count = 0);

}  // namespace vls
