#include "vlspace/domain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "vlspace/error.hpp"

namespace vls {
namespace {

Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Offset sigma such that the level-k grid interval m has lower end
// 2^(k+J) (3m + sigma) in lattice units.
Index grid_sigma(bool shifted, int level) {
  if (!shifted) return 0;
  return (level % 2 == 0) ? 1 : -1;
}

Index level_scale(const LatticeDomain& d, int level) {
  require(level >= d.min_level(), ErrorCode::Config,
          "cube level " + std::to_string(level) + " is finer than the cell lattice");
  return Index{1} << (level + d.refinement());
}

std::vector<std::uint8_t> lexicographic_shifts(int n) {
  std::vector<std::uint8_t> shifts;
  for (unsigned mask = 0; mask < (1u << n); ++mask) shifts.push_back(static_cast<std::uint8_t>(mask));
  // Lexicographic order of the vector (t_0, ..., t_{n-1}).
  std::sort(shifts.begin(), shifts.end(), [n](std::uint8_t a, std::uint8_t b) {
    for (int ax = 0; ax < n; ++ax) {
      const bool ta = (a >> ax) & 1u, tb = (b >> ax) & 1u;
      if (ta != tb) return tb;
    }
    return false;
  });
  return shifts;
}

// Per-axis search for a grid interval of level k containing [a, a+len).
std::optional<Index> containing_index(double a, double len, int level, bool shifted) {
  const double side = std::ldexp(1.0, level);
  const double s = shifted ? ((level % 2 == 0) ? 1.0 / 3.0 : -1.0 / 3.0) : 0.0;
  const double m = std::floor(a / side - s);
  const double lo = side * (m + s);
  const double hi = side * (m + 1.0 + s);
  if (lo <= a && a + len <= hi) return static_cast<Index>(m);
  return std::nullopt;
}

std::optional<ShiftedCover> cover_search(int n, const RealCube& q, int min_level,
                                         const LatticeDomain* domain) {
  require(q.side > 0.0, ErrorCode::Config, "cube side must be positive");
  const auto shifts = lexicographic_shifts(n);
  int k = std::max(min_level, static_cast<int>(std::ceil(std::log2(q.side))) - 1);
  for (; std::ldexp(1.0, k) <= 6.0 * q.side; ++k) {
    if (std::ldexp(1.0, k) < q.side) continue;
    if (domain && k > domain->max_level()) break;
    for (auto shift : shifts) {
      Cube c;
      c.shift = shift;
      c.level = k;
      bool ok = true;
      for (int ax = 0; ax < n && ok; ++ax) {
        auto m = containing_index(q.lo[ax], q.side, k, (shift >> ax) & 1u);
        if (!m) ok = false;
        else c.corner[ax] = *m;
      }
      if (!ok) continue;
      if (domain && !domain->contains(c)) continue;
      return ShiftedCover{shift, c};
    }
  }
  return std::nullopt;
}

}  // namespace

double Cube::side() const { return std::ldexp(1.0, level); }

LatticeDomain build_domain(int n, Index half_width, int refinement) {
  require(n >= 1 && n <= kMaxDim, ErrorCode::Config, "dimension must be 1, 2 or 3");
  require(half_width >= 1 && std::has_single_bit(static_cast<std::uint64_t>(half_width)),
          ErrorCode::Config, "box half-width must be a power of two");
  require(refinement > -62 && refinement < 30, ErrorCode::Config, "refinement out of range");
  // cells per axis = 2L * 2^J
  Index per_axis = 0;
  if (refinement >= 0) {
    per_axis = 2 * half_width * (Index{1} << refinement);
  } else {
    const Index div = Index{1} << (-refinement);
    require((2 * half_width) % div == 0, ErrorCode::Config, "cell side exceeds the box");
    per_axis = 2 * half_width / div;
  }
  require(per_axis >= 4, ErrorCode::Config,
          "lattice needs at least 4 cells per axis (got " + std::to_string(per_axis) + ")");
  LatticeDomain d;
  d.n_ = n;
  d.half_width_ = half_width;
  d.refinement_ = refinement;
  d.per_axis_ = per_axis;
  d.cell_count_ = 1;
  for (int i = 0; i < n; ++i) d.cell_count_ *= per_axis;
  d.cell_side_ = std::ldexp(1.0, -refinement);
  d.cell_measure_ = std::pow(d.cell_side_, n);
  return d;
}

double LatticeDomain::box_measure() const {
  return std::pow(2.0 * static_cast<double>(half_width_), n_);
}

Coords LatticeDomain::cell_coords(Index cell) const {
  Coords c{};
  for (int ax = n_ - 1; ax >= 0; --ax) {
    c[ax] = cell % per_axis_;
    cell /= per_axis_;
  }
  return c;
}

Index LatticeDomain::cell_index(const Coords& c) const {
  Index idx = 0;
  for (int ax = 0; ax < n_; ++ax) idx = idx * per_axis_ + c[ax];
  return idx;
}

Point LatticeDomain::cell_center(Index cell) const {
  const auto c = cell_coords(cell);
  Point p{};
  for (int ax = 0; ax < n_; ++ax)
    p[ax] = -static_cast<double>(half_width_) + (static_cast<double>(c[ax]) + 0.5) * cell_side_;
  return p;
}

int LatticeDomain::max_level() const {
  // 2^k <= 2L
  return std::countr_zero(static_cast<std::uint64_t>(half_width_)) + 1;
}

UnitBox LatticeDomain::extent(const Cube& q) const {
  const Index scale = level_scale(*this, q.level);
  UnitBox b;
  for (int ax = 0; ax < n_; ++ax) {
    const Index sigma = grid_sigma((q.shift >> ax) & 1u, q.level);
    b.lo[ax] = scale * (3 * q.corner[ax] + sigma);
    b.hi[ax] = b.lo[ax] + 3 * scale;
  }
  return b;
}

bool LatticeDomain::contains(const UnitBox& b) const {
  const Index edge = box_units();
  for (int ax = 0; ax < n_; ++ax)
    if (b.lo[ax] < -edge || b.hi[ax] > edge || b.lo[ax] >= b.hi[ax]) return false;
  return true;
}

bool LatticeDomain::contains(const Cube& q) const {
  if (q.level < min_level() || q.level > max_level()) return false;
  return contains(extent(q));
}

CubeSupport LatticeDomain::support(const UnitBox& b) const {
  CubeSupport s;
  const Index off = box_units();
  std::array<std::vector<std::pair<Index, double>>, kMaxDim> axis_overlap;
  std::array<std::vector<Index>, kMaxDim> axis_members;
  for (int ax = 0; ax < n_; ++ax) {
    const Index first = std::max<Index>(0, floor_div(b.lo[ax] + off, 3));
    const Index last = std::min<Index>(per_axis_ - 1, floor_div(b.hi[ax] + off - 1, 3));
    for (Index i = first; i <= last; ++i) {
      const Index clo = 3 * i - off, chi = clo + 3;
      const Index ov = std::min(b.hi[ax], chi) - std::max(b.lo[ax], clo);
      if (ov <= 0) continue;
      axis_overlap[ax].emplace_back(i, static_cast<double>(ov) / 3.0 * cell_side_);
      const Index twice_center = 6 * i + 3 - 2 * off;
      if (2 * b.lo[ax] <= twice_center && twice_center < 2 * b.hi[ax]) axis_members[ax].push_back(i);
    }
  }
  // Tensor product, row-major (axis 0 slowest).
  Coords idx{};
  std::array<std::size_t, kMaxDim> pos{};
  bool done = false;
  for (int ax = 0; ax < n_; ++ax)
    if (axis_overlap[ax].empty()) done = true;
  while (!done) {
    double w = 1.0;
    for (int ax = 0; ax < n_; ++ax) {
      idx[ax] = axis_overlap[ax][pos[ax]].first;
      w *= axis_overlap[ax][pos[ax]].second;
    }
    s.cells.push_back(cell_index(idx));
    s.weights.push_back(w);
    int ax = n_ - 1;
    while (ax >= 0 && ++pos[ax] == axis_overlap[ax].size()) pos[ax--] = 0;
    if (ax < 0) done = true;
  }
  s.measure = 1.0;
  for (int ax = 0; ax < n_; ++ax) s.measure *= unit_to_real(b.hi[ax] - b.lo[ax]);

  pos = {};
  done = false;
  for (int ax = 0; ax < n_; ++ax)
    if (axis_members[ax].empty()) done = true;
  while (!done) {
    for (int ax = 0; ax < n_; ++ax) idx[ax] = axis_members[ax][pos[ax]];
    s.members.push_back(cell_index(idx));
    int ax = n_ - 1;
    while (ax >= 0 && ++pos[ax] == axis_members[ax].size()) pos[ax--] = 0;
    if (ax < 0) done = true;
  }
  return s;
}

CubeFamily::CubeFamily(const LatticeDomain& domain, Provenance provenance, std::uint8_t shift,
                       std::vector<FamilyCube> cubes)
    : domain_(domain), provenance_(provenance), shift_(shift), cubes_(std::move(cubes)) {
  supports_.reserve(cubes_.size());
  containing_.assign(static_cast<std::size_t>(domain_.cell_count()), {});
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    require(domain_.contains(cubes_[i].box), ErrorCode::OutOfDomain, "family cube leaves the box");
    supports_.push_back(domain_.support(cubes_[i].box));
    for (Index c : supports_.back().members)
      containing_[static_cast<std::size_t>(c)].push_back(static_cast<std::uint32_t>(i));
  }
}

double CubeFamily::side(std::size_t i) const {
  const auto& b = cubes_[i].box;
  return domain_.unit_to_real(b.hi[0] - b.lo[0]);
}

CubeFamily enumerate_cubes(const LatticeDomain& domain, std::uint8_t shift, int kmin, int kmax) {
  require(kmin >= domain.min_level(), ErrorCode::Config,
          "smallest cube level must not be finer than the cells");
  const int n = domain.dim();
  std::vector<FamilyCube> out;
  for (int k = kmin; k <= std::min(kmax, domain.max_level()); ++k) {
    const Index scale = level_scale(domain, k);
    const Index edge = domain.box_units();
    std::array<std::vector<Index>, kMaxDim> valid;
    for (int ax = 0; ax < n; ++ax) {
      const Index sigma = grid_sigma((shift >> ax) & 1u, k);
      const Index span = edge / scale + 2;
      for (Index m = -span; m <= span; ++m) {
        const Index lo = scale * (3 * m + sigma), hi = lo + 3 * scale;
        if (lo >= -edge && hi <= edge) valid[ax].push_back(m);
      }
    }
    bool any = true;
    for (int ax = 0; ax < n; ++ax) any = any && !valid[ax].empty();
    if (!any) continue;
    std::array<std::size_t, kMaxDim> pos{};
    while (true) {
      Cube c;
      c.shift = shift;
      c.level = k;
      for (int ax = 0; ax < n; ++ax) c.corner[ax] = valid[ax][pos[ax]];
      out.push_back(FamilyCube{c, domain.extent(c)});
      int ax = n - 1;
      while (ax >= 0 && ++pos[ax] == valid[ax].size()) pos[ax--] = 0;
      if (ax < 0) break;
    }
  }
  return CubeFamily(domain, shift == 0 ? Provenance::AllDyadic : Provenance::ShiftedGrid, shift,
                    std::move(out));
}

CubeFamily grid_family(const LatticeDomain& domain, std::uint8_t shift) {
  return enumerate_cubes(domain, shift, domain.min_level(), domain.max_level());
}

CubeFamily single_cube_family(const LatticeDomain& domain, const Cube& q) {
  require(domain.contains(q), ErrorCode::OutOfDomain, "cube leaves the box");
  return CubeFamily(domain, Provenance::Custom, q.shift, {FamilyCube{q, domain.extent(q)}});
}

CubeFamily lattice_family(const LatticeDomain& domain, Index smin, Index smax, bool coverable_only) {
  const int n = domain.dim();
  const Index N = domain.cells_per_axis();
  const Index off = domain.box_units();
  std::vector<FamilyCube> out;
  for (Index s = std::max<Index>(1, smin); s <= std::min(N, smax); ++s) {
    std::array<Index, kMaxDim> pos{};
    while (true) {
      UnitBox b;
      for (int ax = 0; ax < n; ++ax) {
        b.lo[ax] = 3 * pos[ax] - off;
        b.hi[ax] = b.lo[ax] + 3 * s;
      }
      bool keep = true;
      if (coverable_only) {
        try {
          one_third_cover(domain, to_real(domain, b));
        } catch (const Error&) {
          keep = false;
        }
      }
      if (keep) out.push_back(FamilyCube{std::nullopt, b});
      int ax = n - 1;
      while (ax >= 0 && ++pos[ax] == N - s + 1) pos[ax--] = 0;
      if (ax < 0) break;
    }
  }
  return CubeFamily(domain, Provenance::Custom, 0, std::move(out));
}

Cube parent_cube(const LatticeDomain& domain, const Cube& q) {
  const UnitBox b = domain.extent(q);
  Cube p;
  p.shift = q.shift;
  p.level = q.level + 1;
  const Index scale = Index{1} << (p.level + domain.refinement());
  for (int ax = 0; ax < domain.dim(); ++ax) {
    const Index sigma = grid_sigma((q.shift >> ax) & 1u, p.level);
    p.corner[ax] = floor_div(floor_div(b.lo[ax], scale) - sigma, 3);
  }
  if (!domain.contains(p))
    throw Error(ErrorCode::OutOfDomain, "parent cube leaves the domain box");
  return p;
}

std::vector<Cube> children(const LatticeDomain& domain, const Cube& q) {
  std::vector<Cube> out;
  if (q.level - 1 < domain.min_level()) return out;
  const UnitBox b = domain.extent(q);
  const int n = domain.dim();
  const int k = q.level - 1;
  const Index scale = level_scale(domain, k);
  std::array<std::vector<Index>, kMaxDim> valid;
  for (int ax = 0; ax < n; ++ax) {
    const Index sigma = grid_sigma((q.shift >> ax) & 1u, k);
    const Index m0 = floor_div(floor_div(b.lo[ax], scale) - sigma, 3);
    for (Index m = m0 - 1; m <= m0 + 3; ++m) {
      const Index lo = scale * (3 * m + sigma), hi = lo + 3 * scale;
      if (lo >= b.lo[ax] && hi <= b.hi[ax]) valid[ax].push_back(m);
    }
  }
  std::array<std::size_t, kMaxDim> pos{};
  while (true) {
    Cube c;
    c.shift = q.shift;
    c.level = k;
    for (int ax = 0; ax < n; ++ax) c.corner[ax] = valid[ax][pos[ax]];
    out.push_back(c);
    int ax = n - 1;
    while (ax >= 0 && ++pos[ax] == valid[ax].size()) pos[ax--] = 0;
    if (ax < 0) break;
  }
  return out;
}

ShiftedCover one_third_cover(const LatticeDomain& domain, const RealCube& q) {
  auto found = cover_search(domain.dim(), q, domain.min_level(), &domain);
  if (!found) throw Error(ErrorCode::OutOfDomain, "no grid cube inside the box covers this cube");
  return *found;
}

std::optional<ShiftedCover> one_third_cover_free(int n, const RealCube& q, int min_level) {
  return cover_search(n, q, min_level, nullptr);
}

Point cube_lower(int n, const Cube& q) {
  Point p{};
  const double side = q.side();
  for (int ax = 0; ax < n; ++ax) {
    const double s = ((q.shift >> ax) & 1u) ? ((q.level % 2 == 0) ? 1.0 / 3.0 : -1.0 / 3.0) : 0.0;
    p[ax] = side * (static_cast<double>(q.corner[ax]) + s);
  }
  return p;
}

RealCube to_real(const LatticeDomain& domain, const UnitBox& b) {
  RealCube r;
  for (int ax = 0; ax < domain.dim(); ++ax) r.lo[ax] = domain.unit_to_real(b.lo[ax]);
  r.side = domain.unit_to_real(b.hi[0] - b.lo[0]);
  return r;
}

CubeSupport cells_in_cube(const LatticeDomain& domain, const Cube& q) {
  return domain.support(domain.extent(q));
}

}  // namespace vls
