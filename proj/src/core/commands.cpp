#include "vlspace/commands.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include "vlspace/error.hpp"
#include "vlspace/fieldio.hpp"
#include "vlspace/sparse.hpp"

namespace vls {

namespace {

int parse_level(std::string_view s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), ErrorCode::Config,
          "bad level '" + std::string(s) + "'");
  return v;
}

void cell_columns(std::ostringstream& os, const LatticeDomain& dom) {
  os << "cell";
  for (int a = 0; a < dom.dim(); ++a) os << ",x" << a + 1;
}

void cell_prefix(std::ostringstream& os, const LatticeDomain& dom, Index c) {
  const Point x = dom.cell_center(c);
  os << c;
  for (int a = 0; a < dom.dim(); ++a) os << "," << format_number(x[static_cast<std::size_t>(a)]);
}

void check_same_domain(const LatticeDomain& a, const LatticeDomain& b, const char* what) {
  require(a == b, ErrorCode::Data, std::string(what) + " lives on a different domain");
}

}  // namespace

void parse_levels(const std::string& text, FamilySpec& spec) {
  const auto dots = text.find("..");
  require(dots != std::string::npos, ErrorCode::Config, "levels must look like a..b");
  const std::string_view s(text);
  if (dots > 0) spec.level_min = parse_level(s.substr(0, dots));
  if (dots + 2 < s.size()) spec.level_max = parse_level(s.substr(dots + 2));
}

CubeFamily build_family(const LatticeDomain& domain, const FamilySpec& spec) {
  const int kmin = spec.level_min.value_or(domain.min_level());
  const int kmax = spec.level_max.value_or(domain.max_level());
  if (spec.grid == "lattice") {
    const double h = domain.cell_side();
    const auto smin = std::max<Index>(1, static_cast<Index>(std::ceil(std::ldexp(1.0, kmin) / h)));
    const auto smax = std::min<Index>(domain.cells_per_axis(), static_cast<Index>(std::floor(std::ldexp(1.0, kmax) / h)));
    require(smin <= smax, ErrorCode::Config, "empty level range");
    return lattice_family(domain, smin, smax, true);
  }
  unsigned shift = 0;
  const auto [p, ec] = std::from_chars(spec.grid.data(), spec.grid.data() + spec.grid.size(), shift);
  require(ec == std::errc() && p == spec.grid.data() + spec.grid.size() && shift < (1u << domain.dim()),
          ErrorCode::Config, "grid must be a shift mask below 2^n or 'lattice'");
  return enumerate_cubes(domain, static_cast<std::uint8_t>(shift), kmin, kmax);
}

std::string cube_interval(const LatticeDomain& domain, const FamilyCube& q) {
  std::string out;
  for (int a = 0; a < domain.dim(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    if (a) out += "x";
    out += "[" + format_number(domain.unit_to_real(q.box.lo[i])) + "," + format_number(domain.unit_to_real(q.box.hi[i])) + ")";
  }
  // Integral endpoints read better without the trailing ".0".
  std::string clean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.compare(i, 2, ".0") == 0 && (i + 2 == out.size() || out[i + 2] == ',' || out[i + 2] == ')')) {
      ++i;
      continue;
    }
    clean += out[i];
  }
  return clean;
}

MaximalOp parse_maximal_op(const std::string& name) {
  if (name == "m") return MaximalOp::HardyLittlewood;
  if (name == "mp") return MaximalOp::NormMaximal;
  if (name == "mw") return MaximalOp::ChristGoldberg;
  if (name == "mprime") return MaximalOp::AuxPrime;
  if (name == "mdprime") return MaximalOp::AuxDoublePrime;
  throw Error(ErrorCode::Config, "unknown maximal operator '" + name + "' (m|mp|mw|mprime|mdprime)");
}

Constants compute_constants(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                            std::size_t direction_count) {
  check_same_domain(w.domain(), p.domain(), "weight");
  require(!family.empty(), ErrorCode::Config, "cube family is empty");
  Constants c;
  c.one = one_constant(p, family).value;
  if (w.dim() == 1) c.scalar = scalar_ap_constant(w.scalar(), p, family).value;
  c.matrix = matrix_ap_constant(w, p, family).value;
  c.reduced = reduced_ap_constant(ReducingCache(w, p, family, direction_count)).value;
  return c;
}

std::string reduce_csv(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                       std::size_t direction_count) {
  check_same_domain(w.domain(), p.domain(), "weight");
  const ReducingCache cache(w, p, family, direction_count);
  const int d = w.dim();
  std::ostringstream os;
  os << "cube,kind";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) os << ",a" << i + 1 << j + 1;
  os << ",c_lo,c_hi\n";
  for (std::size_t q = 0; q < cache.size(); ++q) {
    const std::string name = cube_interval(family.domain(), family.at(q));
    for (int kind = 0; kind < 2; ++kind) {
      const ReducingOperator& r = kind == 0 ? cache.primal(q) : cache.dual(q);
      os << name << "," << (kind == 0 ? "primal" : "dual");
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) os << "," << format_number(r.a(i, j));
      os << "," << format_number(r.c_lo) << "," << format_number(r.c_hi) << "\n";
    }
  }
  return os.str();
}

std::string maximal_csv(MaximalOp op, const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                        const CubeFamily& family, std::size_t direction_count) {
  check_same_domain(f.domain(), family.domain(), "field");
  MaximalField m;
  switch (op) {
    case MaximalOp::HardyLittlewood: m = hardy_littlewood(f.magnitude(), family); break;
    case MaximalOp::NormMaximal:
      check_same_domain(p.domain(), family.domain(), "exponent");
      m = norm_maximal_field(f.magnitude(), p, family);
      break;
    case MaximalOp::ChristGoldberg:
      check_same_domain(w.domain(), family.domain(), "weight");
      m = christ_goldberg(f, w, family);
      break;
    case MaximalOp::AuxPrime:
    case MaximalOp::AuxDoublePrime: {
      check_same_domain(w.domain(), family.domain(), "weight");
      check_same_domain(p.domain(), family.domain(), "exponent");
      const ReducingCache cache(w, p, family, direction_count);
      m = op == MaximalOp::AuxPrime ? aux_prime(f, w, cache) : aux_double_prime(f, w, cache);
      break;
    }
  }
  const LatticeDomain& dom = family.domain();
  std::ostringstream os;
  cell_columns(os, dom);
  os << ",value,argmax\n";
  for (Index c = 0; c < dom.cell_count(); ++c) {
    cell_prefix(os, dom, c);
    os << "," << format_number(m.values[c]) << "," << m.argmax[static_cast<std::size_t>(c)] << "\n";
  }
  return os.str();
}

std::string czdecomp_csv(const VectorField& f, const MatrixWeightField& w, const ExponentField& p, unsigned shift,
                         std::optional<double> lambda, std::size_t direction_count) {
  const LatticeDomain& dom = f.domain();
  check_same_domain(w.domain(), dom, "weight");
  check_same_domain(p.domain(), dom, "exponent");
  require(shift < (1u << dom.dim()), ErrorCode::Config, "grid shift out of range");
  require(!lambda || (std::isfinite(*lambda) && *lambda > 0.0), ErrorCode::Config, "lambda must be positive");
  const CubeFamily fam = grid_family(dom, static_cast<std::uint8_t>(shift));
  const ReducingCache cache(w, p, fam, direction_count, false);
  const std::vector<double> avg = aux_prime_averages(f, w, cache);
  const double one = one_constant(p, fam).value;

  std::vector<std::pair<double, std::optional<int>>> levels;
  if (lambda) {
    levels.emplace_back(*lambda, std::nullopt);
  } else {
    for (int k : lambda_ladder(avg)) levels.emplace_back(std::ldexp(1.0, k), k);
  }
  std::ostringstream os;
  os << "lambda,k,cube,level,average,root\n";
  for (const auto& [lam, k] : levels) {
    const CZDecomposition cz = cz_decompose(avg, fam, lam, one, w.dim());
    auto row = [&](std::size_t i, bool root) {
      os << format_number(lam) << "," << (k ? std::to_string(*k) : "") << "," << cube_interval(dom, fam.at(i)) << ","
         << fam.at(i).grid->level << "," << format_number(avg[i]) << "," << (root ? 1 : 0) << "\n";
    };
    for (std::size_t i : cz.stops) row(i, false);
    for (std::size_t i : cz.root_hits) row(i, true);
  }
  return os.str();
}

SparseOutput sparse_apply(const VectorField& f, const MatrixWeightField& w, const ExponentField& p, unsigned shift,
                          std::size_t direction_count) {
  const LatticeDomain& dom = f.domain();
  check_same_domain(w.domain(), dom, "weight");
  check_same_domain(p.domain(), dom, "exponent");
  require(shift < (1u << dom.dim()), ErrorCode::Config, "grid shift out of range");
  const CubeFamily fam = grid_family(dom, static_cast<std::uint8_t>(shift));
  const ReducingCache cache(w, p, fam, direction_count, false);
  const SparseFamily s = sparse_from_cz(f, w, cache);
  const auto dirs = std::make_shared<const DirectionSet>(default_directions(f.components(), direction_count));
  const ConvexBodyField image = convex_body_operator(segment_field(f, dirs), s.cubes);

  SparseOutput out;
  out.gamma = s.gamma;
  out.ratio = sparse_operator_ratio(f, w, p, s.cubes, *dirs);
  std::ostringstream cells;
  cell_columns(cells, dom);
  cells << ",value\n";
  for (Index c = 0; c < dom.cell_count(); ++c) {
    double r = 0.0;
    for (double h : image.at(c)) r = std::max(r, h);
    cell_prefix(cells, dom, c);
    cells << "," << format_number(r) << "\n";
  }
  out.cells_csv = cells.str();
  std::ostringstream cubes;
  cubes << "index,cube,level,k,e_fraction\n";
  for (std::size_t i = 0; i < s.cubes.size(); ++i)
    cubes << i << "," << cube_interval(dom, s.cubes.at(i)) << "," << s.cubes.at(i).grid->level << "," << s.level_k[i]
          << "," << format_number(s.e_fraction[i]) << "\n";
  out.cubes_csv = cubes.str();
  return out;
}

}  // namespace vls
