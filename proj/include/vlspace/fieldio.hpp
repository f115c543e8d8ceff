#pragma once

// Text field files:
//
//   vlfield 1
//   kind scalar          exponent | scalar | vector | matrix
//   n 1
//   d 1
//   L 1
//   J 6
//   p_inf 2              exponent files only, optional
//   data
//   <one row per cell, row-major cell order, whitespace separated>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vlspace/domain.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/varnorm.hpp"
#include "vlspace/weights.hpp"

namespace vls {

enum class FieldKind { Exponent, Scalar, Vector, Matrix };

const char* field_kind_name(FieldKind kind);

struct FieldFile {
  FieldKind kind = FieldKind::Scalar;
  int n = 1;
  int d = 1;
  Index half_width = 1;
  int refinement = 0;
  std::optional<double> p_inf;
  std::vector<double> data;  // cell-major, row_width() values per cell

  LatticeDomain domain() const;
  int row_width() const;
};

/// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_number(double x);

FieldFile parse_field(std::string_view text);
std::string format_field(const FieldFile& f);
FieldFile read_field_file(const std::string& path);
void write_field_file(const std::string& path, const FieldFile& f);

FieldFile to_file(const ExponentField& p);
FieldFile to_file(const ScalarField& f);
FieldFile to_file(const VectorField& f);
FieldFile to_file(const MatrixWeightField& w);

ExponentField as_exponent(const FieldFile& f);
ScalarField as_scalar(const FieldFile& f);
/// Scalar files are read as d = 1 vector fields.
VectorField as_vector(const FieldFile& f);
/// Scalar files are read as d = 1 weights.
MatrixWeightField as_weight(const FieldFile& f);

}  // namespace vls
