#include "vlspace/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vlspace/error.hpp"
#include "vlspace/parallel.hpp"

namespace vls {

ConvexBody::ConvexBody(std::shared_ptr<const DirectionSet> dirs, std::vector<double> h)
    : dirs_(std::move(dirs)), h_(std::move(h)) {
  require(dirs_ && h_.size() == dirs_->size(), ErrorCode::Config, "support samples do not match directions");
  for (double v : h_) require(std::isfinite(v) && v >= 0.0, ErrorCode::Data, "support function must be finite and >= 0");
}

ConvexBody& ConvexBody::operator+=(const ConvexBody& other) {
  require(other.h_.size() == h_.size(), ErrorCode::Config, "bodies live on different direction sets");
  for (std::size_t j = 0; j < h_.size(); ++j) h_[j] += other.h_[j];
  return *this;
}

ConvexBody& ConvexBody::operator*=(double c) {
  for (double& v : h_) v *= std::abs(c);
  return *this;
}

ConvexBody segment_body(const Vec& v, std::shared_ptr<const DirectionSet> dirs) {
  std::vector<double> h(dirs->size());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = std::abs(v.dot((*dirs)[j]));
  return ConvexBody(std::move(dirs), std::move(h));
}

ConvexBodyField::ConvexBodyField(const LatticeDomain& domain, std::shared_ptr<const DirectionSet> dirs,
                                 std::vector<double> h)
    : domain_(domain), dirs_(std::move(dirs)), h_(std::move(h)) {
  require(h_.size() == static_cast<std::size_t>(domain.cell_count()) * dirs_->size(), ErrorCode::Data,
          "body field has wrong sample count");
  for (double v : h_) require(std::isfinite(v), ErrorCode::Data, "body field sample is not finite");
}

ConvexBody ConvexBodyField::body(Index cell) const {
  const auto s = at(cell);
  return ConvexBody(dirs_, std::vector<double>(s.begin(), s.end()));
}

namespace {

Vec cell_vector(const VectorField& f, Index c) {
  const auto v = f.at(c);
  Vec x(f.components());
  for (int i = 0; i < f.components(); ++i) x[i] = v[static_cast<std::size_t>(i)];
  return x;
}

std::vector<double> cube_average(const ConvexBodyField& f, const CubeSupport& q) {
  const std::size_t m = f.direction_count();
  std::vector<double> h(m, 0.0);
  for (std::size_t k = 0; k < q.cells.size(); ++k) {
    const auto s = f.at(q.cells[k]);
    for (std::size_t j = 0; j < m; ++j) h[j] += q.weights[k] * s[j];
  }
  for (double& v : h) v /= q.measure;
  return h;
}

}  // namespace

ConvexBodyField segment_field(const VectorField& f, std::shared_ptr<const DirectionSet> dirs) {
  require(f.components() == dirs->dim(), ErrorCode::Config, "field and direction set dimensions differ");
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  const std::size_t m = dirs->size();
  std::vector<double> h(cells * m);
  for (std::size_t c = 0; c < cells; ++c) {
    const Vec v = cell_vector(f, static_cast<Index>(c));
    for (std::size_t j = 0; j < m; ++j) h[c * m + j] = std::abs(v.dot((*dirs)[j]));
  }
  return ConvexBodyField(f.domain(), std::move(dirs), std::move(h));
}

ConvexBody aumann_average(const ConvexBodyField& f, const CubeSupport& q) {
  return ConvexBody(f.shared_directions(), cube_average(f, q));
}

namespace {

template <class Combine>
ConvexBodyField combine_over_cubes(const ConvexBodyField& f, const CubeFamily& family, Combine combine) {
  std::vector<std::vector<double>> avg(family.size());
  parallel_for(family.size(), [&](std::size_t i) { avg[i] = cube_average(f, family.support(i)); });
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  const std::size_t m = f.direction_count();
  std::vector<double> h(cells * m, 0.0);
  for (std::size_t c = 0; c < cells; ++c)
    for (auto q : family.containing(static_cast<Index>(c)))
      for (std::size_t j = 0; j < m; ++j) h[c * m + j] = combine(h[c * m + j], avg[q][j]);
  return ConvexBodyField(f.domain(), f.shared_directions(), std::move(h));
}

}  // namespace

ConvexBodyField convex_body_operator(const ConvexBodyField& f, const CubeFamily& family) {
  return combine_over_cubes(f, family, [](double a, double b) { return a + b; });
}

ConvexBodyField convex_maximal(const ConvexBodyField& f, const CubeFamily& family) {
  return combine_over_cubes(f, family, [](double a, double b) { return std::max(a, b); });
}

EquivalenceReport christgoldberg_equivalence_check(const VectorField& f, const MatrixWeightField& w,
                                                   const CubeFamily& family, const DirectionSet& dirs) {
  const int d = w.dim();
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  std::vector<Vec> g(cells);
  for (std::size_t c = 0; c < cells; ++c) g[c] = w.inverse(static_cast<Index>(c)) * cell_vector(f, static_cast<Index>(c));
  const MaximalField mw = christ_goldberg(f, w, family);

  std::vector<double> body(cells, 0.0);
  parallel_for(cells, [&](std::size_t c) {
    const Mat& wx = w.at(static_cast<Index>(c));
    std::vector<Vec> z(dirs.half_size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = wx * dirs[j];
    double best = 0.0;
    for (auto qi : family.containing(static_cast<Index>(c))) {
      const CubeSupport& q = family.support(qi);
      for (const Vec& zj : z) {
        double s = 0.0;
        for (std::size_t k = 0; k < q.cells.size(); ++k)
          s += q.weights[k] * std::abs(g[static_cast<std::size_t>(q.cells[k])].dot(zj));
        best = std::max(best, s / q.measure);
      }
    }
    body[c] = best;
  });

  EquivalenceReport r;
  r.envelope = static_cast<double>(d) * 1.05;
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = mw.values.values()[c], b = body[c];
    if (a <= 1e-12 && b <= 1e-12) continue;
    const double ratio = b > 0.0 ? a / b : INFINITY;
    if (ratio < r.lower) r.lower = ratio;
    if (ratio > r.upper) {
      r.upper = ratio;
      r.worst_cell = static_cast<Index>(c);
    }
  }
  if (r.upper == 0.0) r.lower = 1.0;
  r.pass = r.lower >= 1.0 - 1e-12 && r.upper <= r.envelope;
  return r;
}

SparseFamily sparse_from_cz(const std::vector<double>& averages, const CubeFamily& grid,
                            double one_constant, int d) {
  const LatticeDomain& dom = grid.domain();
  const auto cells = static_cast<std::size_t>(dom.cell_count());
  const std::vector<int> ks = lambda_ladder(averages);

  std::vector<CZDecomposition> levels;
  for (int k : ks) levels.push_back(cz_decompose(averages, grid, std::ldexp(1.0, k), one_constant, d));

  // Highest level wins for cubes selected more than once.
  std::map<std::size_t, std::size_t> chosen;  // family index -> ladder position
  for (std::size_t li = 0; li < levels.size(); ++li)
    for (auto list : {&levels[li].stops, &levels[li].root_hits})
      for (std::size_t i : *list) chosen[i] = li;

  SparseFamily out;
  std::vector<FamilyCube> cubes;
  const std::vector<std::uint8_t> none(cells, 0);
  for (const auto& [i, li] : chosen) {
    const std::vector<std::uint8_t>& next = li + 1 < levels.size() ? levels[li + 1].omega : none;
    std::vector<Index> e;
    for (Index c : grid.support(i).members)
      if (!next[static_cast<std::size_t>(c)]) e.push_back(c);
    const double frac = static_cast<double>(e.size()) * dom.cell_measure() / grid.support(i).measure;
    cubes.push_back(grid.at(i));
    out.level_k.push_back(ks[li]);
    out.e_sets.push_back(std::move(e));
    out.e_fraction.push_back(frac);
    out.gamma = std::min(out.gamma, frac);
  }
  out.cubes = CubeFamily(dom, Provenance::Custom, grid.shift(), std::move(cubes));
  out.half_sparse = out.gamma >= 0.5;
  return out;
}

SparseFamily sparse_from_cz(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache) {
  // The upper-bound fields of the intermediate decompositions are not used here.
  return sparse_from_cz(aux_prime_averages(f, w, cache), cache.family(), 0.0, w.dim());
}

namespace {

double kernel(const Point& x, const Point& y, int n, int axis) {
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
  const double diff = x[axis - 1] - y[axis - 1];
  if (n == 1) return 1.0 / diff;
  return diff / (r2 * std::sqrt(r2));
}

}  // namespace

VectorField discrete_riesz(const VectorField& f, int axis) {
  const LatticeDomain& dom = f.domain();
  const int n = dom.dim();
  require(n == 1 || n == 2, ErrorCode::Config, "the discrete transform supports n = 1, 2");
  require(axis >= 1 && axis <= n, ErrorCode::Config, "transform axis out of range");
  const auto cells = static_cast<std::size_t>(dom.cell_count());
  const auto d = static_cast<std::size_t>(f.components());
  std::vector<Point> centre(cells);
  for (std::size_t c = 0; c < cells; ++c) centre[c] = dom.cell_center(static_cast<Index>(c));
  std::vector<double> out(cells * d, 0.0);
  const double h = dom.cell_measure();
  const auto vals = f.values();
  parallel_for(cells, [&](std::size_t x) {
    for (std::size_t y = 0; y < cells; ++y) {
      if (y == x) continue;
      const double k = kernel(centre[x], centre[y], n, axis) * h;
      for (std::size_t i = 0; i < d; ++i) out[x * d + i] += k * vals[y * d + i];
    }
  });
  return VectorField(dom, f.components(), std::move(out));
}

std::vector<double> riesz_at(const VectorField& f, const Point& x, int axis) {
  const LatticeDomain& dom = f.domain();
  const int n = dom.dim();
  require(n == 1 || n == 2, ErrorCode::Config, "the discrete transform supports n = 1, 2");
  require(axis >= 1 && axis <= n, ErrorCode::Config, "transform axis out of range");
  Coords home{};
  for (int a = 0; a < n; ++a)
    home[a] = static_cast<Index>(std::floor(x[a] / dom.cell_side())) + dom.cells_per_axis() / 2;
  const auto d = static_cast<std::size_t>(f.components());
  std::vector<double> out(d, 0.0);
  for (Index y = 0; y < dom.cell_count(); ++y) {
    if (dom.cell_coords(y) == home) continue;
    const double k = kernel(x, dom.cell_center(y), n, axis) * dom.cell_measure();
    for (std::size_t i = 0; i < d; ++i) out[i] += k * f.values()[static_cast<std::size_t>(y) * d + i];
  }
  return out;
}

DominationReport domination_constant(const VectorField& tf, const ConvexBodyField& image) {
  require(tf.components() == image.directions().dim(), ErrorCode::Config, "dimensions differ");
  DominationReport r;
  const DirectionSet& dirs = image.directions();
  for (Index c = 0; c < tf.domain().cell_count(); ++c) {
    const Vec v = cell_vector(tf, c);
    const auto h = image.at(c);
    bool any = false;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (h[j] <= 1e-12) continue;
      any = true;
      const double ratio = std::abs(v.dot(dirs[j])) / h[j];
      if (ratio > r.c_emp) {
        r.c_emp = ratio;
        r.witness_cell = c;
        r.witness_direction = j;
      }
    }
    if (!any && v.norm() > 1e-9) ++r.uncovered;
  }
  return r;
}

double sparse_operator_ratio(const VectorField& f, const MatrixWeightField& w, const ExponentField& p,
                             const CubeFamily& family, const DirectionSet& dirs) {
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  std::vector<Vec> g(cells);
  std::vector<double> wf(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    g[c] = cell_vector(f, static_cast<Index>(c));
    wf[c] = (w.at(static_cast<Index>(c)) * g[c]).norm();
  }
  std::vector<double> lhs(cells, 0.0);
  parallel_for(cells, [&](std::size_t c) {
    const Mat& wx = w.at(static_cast<Index>(c));
    const auto& cover = family.containing(static_cast<Index>(c));
    if (cover.empty()) return;
    double best = 0.0;
    for (std::size_t j = 0; j < dirs.half_size(); ++j) {
      const Vec z = wx * dirs[j];
      double h = 0.0;
      for (auto qi : cover) {
        const CubeSupport& q = family.support(qi);
        double s = 0.0;
        for (std::size_t k = 0; k < q.cells.size(); ++k)
          s += q.weights[k] * std::abs(g[static_cast<std::size_t>(q.cells[k])].dot(z));
        h += s / q.measure;
      }
      best = std::max(best, h);
    }
    lhs[c] = best;
  });
  const double denom = luxemburg_norm(ScalarField(f.domain(), std::move(wf)), p);
  if (denom <= 0.0) return 0.0;
  return luxemburg_norm(ScalarField(f.domain(), std::move(lhs)), p) / denom;
}

}  // namespace vls
