#include "vlspace/fieldio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vlspace/error.hpp"

namespace vls {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  require(ec == std::errc() && ptr == tok.data() + tok.size(), ErrorCode::Data,
          "line " + std::to_string(line) + ": not a number: '" + std::string(tok) + "'");
  return v;
}

long long parse_int(std::string_view tok, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require(ec == std::errc() && ptr == tok.data() + tok.size(), ErrorCode::Data,
          "line " + std::to_string(line) + ": not an integer: '" + std::string(tok) + "'");
  return v;
}

FieldKind parse_kind(std::string_view s, std::size_t line) {
  if (s == "exponent") return FieldKind::Exponent;
  if (s == "scalar") return FieldKind::Scalar;
  if (s == "vector") return FieldKind::Vector;
  if (s == "matrix") return FieldKind::Matrix;
  throw Error(ErrorCode::Data, "line " + std::to_string(line) + ": unknown field kind '" + std::string(s) + "'");
}

// Configuration errors raised while building a field from file contents are
// data errors from the caller's point of view.
template <class F>
auto as_data(F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw Error(ErrorCode::Data, e.what());
    throw;
  }
}

void expect_kind(const FieldFile& f, FieldKind kind) {
  require(f.kind == kind, ErrorCode::Data,
          std::string("expected a ") + field_kind_name(kind) + " field, got " + field_kind_name(f.kind));
}

}  // namespace

const char* field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::Exponent: return "exponent";
    case FieldKind::Scalar: return "scalar";
    case FieldKind::Vector: return "vector";
    case FieldKind::Matrix: return "matrix";
  }
  return "?";
}

LatticeDomain FieldFile::domain() const { return as_data([&] { return build_domain(n, half_width, refinement); }); }

int FieldFile::row_width() const {
  switch (kind) {
    case FieldKind::Exponent:
    case FieldKind::Scalar: return 1;
    case FieldKind::Vector: return d;
    case FieldKind::Matrix: return d * d;
  }
  return 1;
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ptr);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

FieldFile parse_field(std::string_view text) {
  FieldFile f;
  std::size_t line_no = 0;
  bool have_n = false, have_d = false, have_l = false, have_j = false, in_data = false;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  require(next_line(line) && line == "vlfield 1", ErrorCode::Data, "missing 'vlfield 1' header");
  while (!in_data && next_line(line)) {
    if (line.empty() || line.front() == '#') continue;
    if (line == "data") {
      in_data = true;
      break;
    }
    const auto sp = line.find_first_of(" \t");
    require(sp != std::string_view::npos, ErrorCode::Data,
            "line " + std::to_string(line_no) + ": expected 'key value'");
    const auto key = line.substr(0, sp);
    const auto value = trim(line.substr(sp));
    if (key == "kind") {
      f.kind = parse_kind(value, line_no);
    } else if (key == "n") {
      f.n = static_cast<int>(parse_int(value, line_no));
      have_n = true;
    } else if (key == "d") {
      f.d = static_cast<int>(parse_int(value, line_no));
      have_d = true;
    } else if (key == "L") {
      f.half_width = parse_int(value, line_no);
      have_l = true;
    } else if (key == "J") {
      f.refinement = static_cast<int>(parse_int(value, line_no));
      have_j = true;
    } else if (key == "p_inf") {
      f.p_inf = parse_double(value, line_no);
    } else {
      throw Error(ErrorCode::Data, "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  require(in_data, ErrorCode::Data, "missing 'data' section");
  require(have_n && have_l && have_j, ErrorCode::Data, "header needs n, L and J");
  if (!have_d) f.d = 1;
  require(f.d >= 1 && f.d <= 3, ErrorCode::Data, "d must be 1, 2 or 3");
  if (f.kind == FieldKind::Exponent || f.kind == FieldKind::Scalar)
    require(f.d == 1, ErrorCode::Data, "scalar and exponent files have d = 1");
  require(!f.p_inf || f.kind == FieldKind::Exponent, ErrorCode::Data, "p_inf only applies to exponent files");

  const LatticeDomain dom = f.domain();
  const auto width = static_cast<std::size_t>(f.row_width());
  f.data.reserve(static_cast<std::size_t>(dom.cell_count()) * width);
  std::size_t rows = 0;
  while (next_line(line)) {
    if (line.empty() || line.front() == '#') continue;
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      const auto b = line.find_first_not_of(" \t", i);
      if (b == std::string_view::npos) break;
      auto e = line.find_first_of(" \t", b);
      if (e == std::string_view::npos) e = line.size();
      const double v = parse_double(line.substr(b, e - b), line_no);
      require(std::isfinite(v), ErrorCode::Data, "line " + std::to_string(line_no) + ": non-finite value");
      f.data.push_back(v);
      ++count;
      i = e;
    }
    require(count == width, ErrorCode::Data,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " values, got " +
                std::to_string(count));
    ++rows;
  }
  require(static_cast<Index>(rows) == dom.cell_count(), ErrorCode::Data,
          "expected " + std::to_string(dom.cell_count()) + " data rows, got " + std::to_string(rows));
  return f;
}

std::string format_field(const FieldFile& f) {
  std::ostringstream os;
  os << "vlfield 1\n"
     << "kind " << field_kind_name(f.kind) << "\n"
     << "n " << f.n << "\n"
     << "d " << f.d << "\n"
     << "L " << f.half_width << "\n"
     << "J " << f.refinement << "\n";
  if (f.p_inf) os << "p_inf " << format_number(*f.p_inf) << "\n";
  os << "data\n";
  const auto width = static_cast<std::size_t>(f.row_width());
  for (std::size_t i = 0; i < f.data.size(); i += width) {
    for (std::size_t j = 0; j < width; ++j) os << (j ? " " : "") << format_number(f.data[i + j]);
    os << "\n";
  }
  return os.str();
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_field(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_field_file(const std::string& path, const FieldFile& f) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  out << format_field(f);
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path);
}

namespace {

FieldFile header_for(const LatticeDomain& dom, FieldKind kind, int d) {
  FieldFile f;
  f.kind = kind;
  f.n = dom.dim();
  f.d = d;
  f.half_width = dom.half_width();
  f.refinement = dom.refinement();
  return f;
}

}  // namespace

FieldFile to_file(const ExponentField& p) {
  FieldFile f = header_for(p.domain(), FieldKind::Exponent, 1);
  f.p_inf = p.p_inf();
  f.data.assign(p.values().begin(), p.values().end());
  return f;
}

FieldFile to_file(const ScalarField& s) {
  FieldFile f = header_for(s.domain(), FieldKind::Scalar, 1);
  f.data.assign(s.values().begin(), s.values().end());
  return f;
}

FieldFile to_file(const VectorField& v) {
  FieldFile f = header_for(v.domain(), FieldKind::Vector, v.components());
  f.data.assign(v.values().begin(), v.values().end());
  return f;
}

FieldFile to_file(const MatrixWeightField& w) {
  FieldFile f = header_for(w.domain(), FieldKind::Matrix, w.dim());
  f.data = w.entries();
  return f;
}

ExponentField as_exponent(const FieldFile& f) {
  expect_kind(f, FieldKind::Exponent);
  return as_data([&] {
    // Without a declared p_inf the value at the last cell stands in.
    const double p_inf = f.p_inf.value_or(f.data.empty() ? 2.0 : f.data.back());
    return ExponentField(f.domain(), f.data, p_inf);
  });
}

ScalarField as_scalar(const FieldFile& f) {
  expect_kind(f, FieldKind::Scalar);
  return as_data([&] { return ScalarField(f.domain(), f.data); });
}

VectorField as_vector(const FieldFile& f) {
  require(f.kind == FieldKind::Vector || f.kind == FieldKind::Scalar, ErrorCode::Data,
          std::string("expected a vector or scalar field, got ") + field_kind_name(f.kind));
  return as_data([&] { return VectorField(f.domain(), f.d, f.data); });
}

MatrixWeightField as_weight(const FieldFile& f) {
  if (f.kind == FieldKind::Scalar) {
    for (double v : f.data) require(v > 0.0, ErrorCode::Data, "scalar weights must be positive");
    return as_data([&] { return MatrixWeightField::from_scalar(ScalarField(f.domain(), f.data)); });
  }
  expect_kind(f, FieldKind::Matrix);
  return as_data([&] { return MatrixWeightField(f.domain(), f.d, f.data); });
}

}  // namespace vls
