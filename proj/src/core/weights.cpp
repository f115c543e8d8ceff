#include "vlspace/weights.hpp"

#include <algorithm>
#include <cmath>

#include "vlspace/error.hpp"
#include "vlspace/parallel.hpp"

namespace vls {

MatrixWeightField::MatrixWeightField(const LatticeDomain& domain, int d,
                                     std::span<const double> entries)
    : domain_(domain), d_(d) {
  require(d >= 1 && d <= 3, ErrorCode::Config, "matrix weights need d in {1,2,3}");
  const auto cells = static_cast<std::size_t>(domain.cell_count());
  const auto dd = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
  require(entries.size() == cells * dd, ErrorCode::Data, "matrix weight has wrong entry count");
  w_.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    Mat m(d, d);
    double scale = 1.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double v = entries[c * dd + static_cast<std::size_t>(i * d + j)];
        require(std::isfinite(v), ErrorCode::Data, "matrix weight entry is not finite");
        m(i, j) = v;
        scale = std::max(scale, std::abs(v));
      }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        require(std::abs(m(i, j) - m(j, i)) <= 1e-12 * scale, ErrorCode::Data,
                "matrix weight is not symmetric");
    w_.push_back(m);
  }
  cache();
}

MatrixWeightField::MatrixWeightField(const LatticeDomain& domain, std::vector<Mat> matrices)
    : domain_(domain), w_(std::move(matrices)) {
  require(static_cast<Index>(w_.size()) == domain.cell_count(), ErrorCode::Data,
          "matrix weight has wrong cell count");
  d_ = w_.empty() ? 1 : static_cast<int>(w_[0].rows());
  require(d_ >= 1 && d_ <= 3, ErrorCode::Config, "matrix weights need d in {1,2,3}");
  for (const auto& m : w_) {
    require(m.rows() == d_ && m.cols() == d_, ErrorCode::Data, "matrix weight has mixed sizes");
    require(m.allFinite(), ErrorCode::Data, "matrix weight entry is not finite");
  }
  cache();
}

MatrixWeightField MatrixWeightField::from_scalar(const ScalarField& w) {
  std::vector<Mat> m;
  m.reserve(w.values().size());
  for (double v : w.values()) {
    Mat a(1, 1);
    a(0, 0) = v;
    m.push_back(a);
  }
  return MatrixWeightField(w.domain(), std::move(m));
}

MatrixWeightField MatrixWeightField::identity(const LatticeDomain& domain, int d) {
  return MatrixWeightField(domain, std::vector<Mat>(static_cast<std::size_t>(domain.cell_count()),
                                                    Mat::Identity(d, d)));
}

void MatrixWeightField::cache() {
  const std::size_t cells = w_.size();
  inv_.assign(cells, Mat());
  op_.assign(cells, 0.0);
  inv_op_.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    Mat m = 0.5 * (w_[c] + w_[c].transpose());
    if (min_eigenvalue(m) < kEigenFloor) m = clamp_spd(m, kEigenFloor);
    w_[c] = m;
    Mat inv = m.inverse();
    inv_[c] = 0.5 * (inv + inv.transpose());
    op_[c] = op_norm(m);
    inv_op_[c] = op_norm(inv_[c]);
  }
}

MatrixWeightField MatrixWeightField::inverted() const { return MatrixWeightField(domain_, inv_); }

ScalarField MatrixWeightField::scalarize(const Vec& u) const {
  std::vector<double> v(w_.size());
  for (std::size_t c = 0; c < w_.size(); ++c) v[c] = (w_[c] * u).norm();
  return ScalarField(domain_, std::move(v));
}

ScalarField MatrixWeightField::scalar() const {
  require(d_ == 1, ErrorCode::Config, "scalar() needs d = 1");
  std::vector<double> v(w_.size());
  for (std::size_t c = 0; c < w_.size(); ++c) v[c] = w_[c](0, 0);
  return ScalarField(domain_, std::move(v));
}

std::vector<double> MatrixWeightField::entries() const {
  std::vector<double> out;
  out.reserve(w_.size() * static_cast<std::size_t>(d_ * d_));
  for (const auto& m : w_)
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) out.push_back(m(i, j));
  return out;
}

namespace {

// Exponent and quadrature samples of a cube, plus the |Q|^{-1/p_Q} factor.
struct LocalSample {
  std::vector<double> p, w, vals;
  double scale = 1.0;
};

LocalSample local_sample(const ExponentField& p, const CubeSupport& q) {
  LocalSample s;
  s.p.reserve(q.cells.size());
  for (Index c : q.cells) s.p.push_back(p[c]);
  s.w = q.weights;
  s.vals.assign(q.cells.size(), 0.0);
  s.scale = std::pow(q.measure, -1.0 / harmonic_mean(p, q));
  return s;
}

template <class MatrixAt>
double sample_norm(LocalSample& s, const CubeSupport& q, const MatrixAt& at, const Vec& u) {
  for (std::size_t i = 0; i < q.cells.size(); ++i) s.vals[i] = (at(q.cells[i]) * u).norm();
  return s.scale * luxemburg(s.vals, s.p, s.w);
}

template <class MatrixAt>
ReducingOperator reduce(int d, const ExponentField& p, const CubeSupport& q, const MatrixAt& at,
                        const DirectionSet& fit, const DirectionSet& heldout) {
  require(!q.cells.empty(), ErrorCode::Degenerate, "reducing operator on an empty cube");
  LocalSample s = local_sample(p, q);
  ReducingOperator r;
  if (d == 1) {
    Vec one = Vec::Ones(1);
    const double n = sample_norm(s, q, at, one);
    require(n > 0.0, ErrorCode::Degenerate, "localized norm vanished");
    r.a = Mat::Constant(1, 1, n);
    return r;
  }
  require(fit.dim() == d && heldout.dim() == d, ErrorCode::Config, "direction set has wrong dimension");
  const std::size_t half = fit.half_size();
  std::vector<double> norms(half);
  std::vector<Vec> points(half);
  for (std::size_t j = 0; j < half; ++j) {
    norms[j] = sample_norm(s, q, at, fit[j]);
    require(norms[j] > 0.0, ErrorCode::Degenerate, "localized norm vanished");
    points[j] = fit[j] / norms[j];
  }
  // The ellipsoid is symmetric, so one representative per antipodal pair
  // gives the same fit.
  const Mat root = mvee(points).root;
  double c_fit = INFINITY;
  for (std::size_t j = 0; j < half; ++j) c_fit = std::min(c_fit, (root * fit[j]).norm() / norms[j]);
  r.a = root / c_fit;
  r.c_lo = INFINITY;
  r.c_hi = 0.0;
  for (std::size_t j = 0; j < heldout.half_size(); ++j) {
    const double ratio = (r.a * heldout[j]).norm() / sample_norm(s, q, at, heldout[j]);
    r.c_lo = std::min(r.c_lo, ratio);
    r.c_hi = std::max(r.c_hi, ratio);
  }
  return r;
}

}  // namespace

double localized_norm(const MatrixWeightField& w, const ExponentField& p, const CubeSupport& q,
                      const Vec& u) {
  LocalSample s = local_sample(p, q);
  return sample_norm(s, q, [&](Index c) -> const Mat& { return w.at(c); }, u);
}

ReducingOperator reducing_operator(const MatrixWeightField& w, const ExponentField& p,
                                   const CubeSupport& q, const DirectionSet& fit,
                                   const DirectionSet& heldout) {
  return reduce(w.dim(), p, q, [&](Index c) -> const Mat& { return w.at(c); }, fit, heldout);
}

ReducingOperator dual_reducing_operator(const MatrixWeightField& w, const ExponentField& p,
                                        const CubeSupport& q, const DirectionSet& fit,
                                        const DirectionSet& heldout) {
  const ExponentField pc = conjugate(p);
  return reduce(w.dim(), pc, q, [&](Index c) -> const Mat& { return w.inverse(c); }, fit, heldout);
}

ReducingCache::ReducingCache(const MatrixWeightField& w, const ExponentField& p,
                             const CubeFamily& family, std::size_t direction_count, bool with_dual)
    : family_(&family) {
  const int d = w.dim();
  const DirectionSet fit = default_directions(d, direction_count);
  const DirectionSet heldout = heldout_directions(d, direction_count);
  const ExponentField pc = conjugate(p);
  primal_.resize(family.size());
  if (with_dual) dual_.resize(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    primal_[i] = reduce(d, p, q, [&](Index c) -> const Mat& { return w.at(c); }, fit, heldout);
    if (with_dual) dual_[i] = reduce(d, pc, q, [&](Index c) -> const Mat& { return w.inverse(c); }, fit, heldout);
  });
}

namespace {

WeightConstant take_max(std::vector<double> per_cube) {
  WeightConstant r;
  for (std::size_t i = 0; i < per_cube.size(); ++i)
    if (per_cube[i] > r.value || i == 0) {
      r.value = per_cube[i];
      r.argmax = i;
    }
  r.per_cube = std::move(per_cube);
  return r;
}

}  // namespace

WeightConstant scalar_ap_constant(const ScalarField& w, const ExponentField& p,
                                  const CubeFamily& family) {
  std::vector<double> inv(w.values().size());
  for (std::size_t c = 0; c < inv.size(); ++c) {
    require(w.values()[c] > 0.0, ErrorCode::Data, "scalar weight must be positive");
    inv[c] = 1.0 / w.values()[c];
  }
  const ExponentField pc = conjugate(p);
  std::vector<double> per(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    per[i] = restricted_norm(w.values(), p, q) * restricted_norm(inv, pc, q) / q.measure;
  });
  return take_max(std::move(per));
}

WeightConstant matrix_ap_constant(const MatrixWeightField& w, const ExponentField& p,
                                  const CubeFamily& family) {
  const ExponentField pc = conjugate(p);
  std::vector<double> per(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    const std::size_t m = q.cells.size();
    std::vector<double> pin(m), pout(m), inner(m), g(m);
    for (std::size_t k = 0; k < m; ++k) {
      pin[k] = pc[q.cells[k]];
      pout[k] = p[q.cells[k]];
    }
    for (std::size_t a = 0; a < m; ++a) {
      const Mat& wx = w.at(q.cells[a]);
      for (std::size_t b = 0; b < m; ++b) inner[b] = op_norm(wx * w.inverse(q.cells[b]));
      g[a] = luxemburg(inner, pin, q.weights);
    }
    per[i] = luxemburg(g, pout, q.weights) / q.measure;
  });
  return take_max(std::move(per));
}

WeightConstant reduced_ap_constant(const ReducingCache& cache) {
  std::vector<double> per(cache.size());
  for (std::size_t i = 0; i < per.size(); ++i) per[i] = op_norm(cache.primal(i).a * cache.dual(i).a);
  return take_max(std::move(per));
}

WeightConstant reduced_ap_constant(const MatrixWeightField& w, const ExponentField& p,
                                   const CubeFamily& family) {
  return reduced_ap_constant(ReducingCache(w, p, family));
}

SymmetryReport symmetry_check(const MatrixWeightField& w, const ExponentField& p,
                              const CubeFamily& family) {
  SymmetryReport r;
  r.forward = reduced_ap_constant(w, p, family).value;
  r.backward = reduced_ap_constant(w.inverted(), conjugate(p), family).value;
  r.ratio = r.backward / r.forward;
  return r;
}

ScalarizationReport scalarization_check(const MatrixWeightField& w, const ExponentField& p,
                                        const CubeFamily& family, const DirectionSet& directions) {
  ScalarizationReport r;
  r.matrix_constant = matrix_ap_constant(w, p, family).value;
  for (std::size_t j = 0; j < directions.half_size(); ++j) {
    const double v = scalar_ap_constant(w.scalarize(directions[j]), p, family).value;
    if (v > r.worst_scalar) {
      r.worst_scalar = v;
      r.worst_direction = j;
    }
  }
  r.ratio = r.worst_scalar / r.matrix_constant;
  return r;
}

ReverseHolderReport reverse_holder_probe(const ScalarField& w, const ExponentField& p,
                                         const CubeFamily& family, std::span<const double> r_grid,
                                         double c_budget) {
  const std::size_t m = family.size();
  std::vector<double> base(m), pq(m);
  parallel_for(m, [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    pq[i] = harmonic_mean(p, q);
    base[i] = std::pow(q.measure, -1.0 / pq[i]) * restricted_norm(w.values(), p, q);
  });
  ReverseHolderReport report;
  for (double r : r_grid) {
    const ExponentField rp = scaled(p, r);
    std::vector<double> ratio(m);
    parallel_for(m, [&](std::size_t i) {
      const CubeSupport& q = family.support(i);
      ratio[i] = std::pow(q.measure, -1.0 / (r * pq[i])) * restricted_norm(w.values(), rp, q) / base[i];
    });
    const WeightConstant worst = take_max(std::move(ratio));
    ReverseHolderRow row{r, worst.value, worst.argmax, worst.value <= c_budget * (1.0 + 1e-12)};
    if (row.pass && (!report.largest_passing || r > *report.largest_passing)) report.largest_passing = r;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> default_r_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 10; ++k) g.push_back(1.0 + std::ldexp(1.0, -k));
  return g;
}

}  // namespace vls
