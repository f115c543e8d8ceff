#include "vlspace/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "vlspace/error.hpp"
#include "vlspace/parallel.hpp"
#include "vlspace/rng.hpp"

namespace vls {

const char* maximal_op_name(MaximalOp op) {
  switch (op) {
    case MaximalOp::HardyLittlewood: return "M";
    case MaximalOp::NormMaximal: return "Mp";
    case MaximalOp::ChristGoldberg: return "MW";
    case MaximalOp::AuxPrime: return "Mprime";
    case MaximalOp::AuxDoublePrime: return "Mdprime";
  }
  return "?";
}

MaximalField sup_over_cubes(const std::vector<double>& per_cube, const CubeFamily& family, MaximalOp op) {
  const auto cells = static_cast<std::size_t>(family.domain().cell_count());
  std::vector<double> vals(cells, 0.0);
  MaximalField out;
  out.argmax.assign(cells, -1);
  for (std::size_t c = 0; c < cells; ++c)
    for (auto q : family.containing(static_cast<Index>(c)))
      if (out.argmax[c] < 0 || per_cube[q] > vals[c]) {
        vals[c] = per_cube[q];
        out.argmax[c] = q;
      }
  out.values = ScalarField(family.domain(), std::move(vals));
  out.op = op;
  out.provenance = family.provenance();
  out.shift = family.shift();
  return out;
}

MaximalField hardy_littlewood(const ScalarField& f, const CubeFamily& family) {
  std::vector<double> avg(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    double s = 0.0;
    for (std::size_t k = 0; k < q.cells.size(); ++k) s += q.weights[k] * std::abs(f[q.cells[k]]);
    avg[i] = s / q.measure;
  });
  return sup_over_cubes(avg, family, MaximalOp::HardyLittlewood);
}

MaximalField norm_maximal_field(const ScalarField& f, const ExponentField& p, const CubeFamily& family) {
  NormMaximalResult r = norm_maximal(f, p, family);
  MaximalField out;
  out.values = std::move(r.values);
  out.argmax = std::move(r.argmax);
  out.op = MaximalOp::NormMaximal;
  out.provenance = family.provenance();
  out.shift = family.shift();
  return out;
}

namespace {

// g(y) = W^{-1}(y) f(y) for every cell.
std::vector<Vec> unweighted(const VectorField& f, const MatrixWeightField& w) {
  require(f.components() == w.dim(), ErrorCode::Config, "field and weight dimensions differ");
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  std::vector<Vec> g(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const auto v = f.at(static_cast<Index>(c));
    Vec x(w.dim());
    for (int i = 0; i < w.dim(); ++i) x[i] = v[static_cast<std::size_t>(i)];
    g[c] = w.inverse(static_cast<Index>(c)) * x;
  }
  return g;
}

double transformed_average(const std::vector<Vec>& g, const CubeSupport& q, const Mat& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.cells.size(); ++k)
    s += q.weights[k] * (b * g[static_cast<std::size_t>(q.cells[k])]).norm();
  return s / q.measure;
}

}  // namespace

MaximalField christ_goldberg(const VectorField& f, const MatrixWeightField& w, const CubeFamily& family) {
  const std::vector<Vec> g = unweighted(f, w);
  const auto cells = static_cast<std::size_t>(family.domain().cell_count());
  std::vector<double> vals(cells, 0.0);
  std::vector<std::int64_t> arg(cells, -1);
  parallel_for(cells, [&](std::size_t c) {
    const Mat& wx = w.at(static_cast<Index>(c));
    for (auto q : family.containing(static_cast<Index>(c))) {
      const double a = transformed_average(g, family.support(q), wx);
      if (arg[c] < 0 || a > vals[c]) {
        vals[c] = a;
        arg[c] = q;
      }
    }
  });
  MaximalField out;
  out.values = ScalarField(family.domain(), std::move(vals));
  out.argmax = std::move(arg);
  out.op = MaximalOp::ChristGoldberg;
  out.provenance = family.provenance();
  out.shift = family.shift();
  return out;
}

std::vector<double> aux_prime_averages(const VectorField& f, const MatrixWeightField& w,
                                       const ReducingCache& cache) {
  const std::vector<Vec> g = unweighted(f, w);
  const CubeFamily& family = cache.family();
  std::vector<double> avg(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    avg[i] = transformed_average(g, family.support(i), cache.primal(i).a);
  });
  return avg;
}

std::vector<double> aux_double_prime_averages(const VectorField& f, const MatrixWeightField& w,
                                              const ReducingCache& cache) {
  const std::vector<Vec> g = unweighted(f, w);
  const CubeFamily& family = cache.family();
  std::vector<double> avg(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    avg[i] = transformed_average(g, family.support(i), spd_inverse(cache.dual(i).a));
  });
  return avg;
}

MaximalField aux_prime(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache) {
  return sup_over_cubes(aux_prime_averages(f, w, cache), cache.family(), MaximalOp::AuxPrime);
}

MaximalField aux_double_prime(const VectorField& f, const MatrixWeightField& w,
                              const ReducingCache& cache) {
  return sup_over_cubes(aux_double_prime_averages(f, w, cache), cache.family(), MaximalOp::AuxDoublePrime);
}

FiniteSumReport finite_sum_bound_check(const VectorField& f, const MatrixWeightField& w,
                                       const ExponentField& p, std::size_t direction_count) {
  const LatticeDomain& dom = f.domain();
  const int n = dom.dim();
  const CubeFamily all = lattice_family(dom, 1, dom.cells_per_axis(), true);
  FiniteSumReport r;
  r.one_constant = one_constant(p, all).value;
  r.constant = std::pow(6.0, 2 * n) * 24.0 * 2.0 * r.one_constant * std::sqrt(static_cast<double>(w.dim())) * 1.05;
  const ReducingCache all_cache(w, p, all, direction_count);
  const MaximalField lhs = aux_prime(f, w, all_cache);
  std::vector<double> rhs(static_cast<std::size_t>(dom.cell_count()), 0.0);
  for (unsigned t = 0; t < (1u << n); ++t) {
    const CubeFamily grid = grid_family(dom, static_cast<std::uint8_t>(t));
    const ReducingCache cache(w, p, grid, direction_count);
    const MaximalField term = aux_prime(f, w, cache);
    for (std::size_t c = 0; c < rhs.size(); ++c) rhs[c] += term.values.values()[c];
  }
  for (std::size_t c = 0; c < rhs.size(); ++c) {
    const double l = lhs.values.values()[c];
    if (l <= 0.0) continue;
    const double ratio = rhs[c] > 0.0 ? l / rhs[c] : INFINITY;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_cell = static_cast<Index>(c);
    }
  }
  r.pass = r.max_ratio <= r.constant;
  return r;
}

bool is_root(const LatticeDomain& domain, const Cube& q) {
  try {
    parent_cube(domain, q);
    return false;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OutOfDomain) throw;
    return true;
  }
}

CZDecomposition cz_decompose(const std::vector<double>& averages, const CubeFamily& family,
                             double lambda, double one_constant, int d) {
  require(family.provenance() != Provenance::Custom, ErrorCode::Config,
          "the stopping-time decomposition needs a dyadic grid family");
  require(averages.size() == family.size(), ErrorCode::Config, "one average per cube is required");
  require(lambda > 0.0, ErrorCode::Config, "lambda must be positive");
  const LatticeDomain& dom = family.domain();
  CZDecomposition out;
  out.lambda = lambda;
  out.shift = family.shift();
  out.averages = averages;

  std::map<Cube, std::size_t> index;
  for (std::size_t i = 0; i < family.size(); ++i) index.emplace(*family.at(i).grid, i);

  std::vector<std::size_t> stack;
  for (std::size_t i = family.size(); i-- > 0;)
    if (is_root(dom, *family.at(i).grid)) stack.push_back(i);
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const Cube& q = *family.at(i).grid;
    if (exceeds(averages[i], lambda)) {
      (is_root(dom, q) ? out.root_hits : out.stops).push_back(i);
      continue;
    }
    if (q.level <= dom.min_level()) continue;
    for (const Cube& c : children(dom, q)) {
      auto it = index.find(c);
      if (it != index.end()) stack.push_back(it->second);
    }
  }
  std::sort(out.stops.begin(), out.stops.end());
  std::sort(out.root_hits.begin(), out.root_hits.end());

  const auto cells = static_cast<std::size_t>(dom.cell_count());
  out.omega.assign(cells, 0);
  for (auto list : {&out.stops, &out.root_hits})
    for (std::size_t i : *list)
      for (Index c : family.support(i).members) out.omega[static_cast<std::size_t>(c)] = 1;
  const MaximalField sup = sup_over_cubes(averages, family, MaximalOp::AuxPrime);
  out.superlevel.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c)
    out.superlevel[c] = sup.argmax[c] >= 0 && exceeds(sup.values[static_cast<Index>(c)], lambda) ? 1 : 0;
  out.cover_exact = out.omega == out.superlevel;

  out.bound_constant = 24.0 * std::pow(4.0, dom.dim()) * 2.0 * one_constant * std::sqrt(static_cast<double>(d)) * 1.05;
  for (std::size_t i : out.stops) {
    out.worst_bound_ratio = std::max(out.worst_bound_ratio, averages[i] / lambda);
    if (averages[i] > out.bound_constant * lambda) out.bound_ok = false;
  }
  return out;
}

CZDecomposition cz_decompose(const VectorField& f, const MatrixWeightField& w, const ReducingCache& cache,
                             double lambda, double one_constant) {
  return cz_decompose(aux_prime_averages(f, w, cache), cache.family(), lambda, one_constant, w.dim());
}

std::vector<int> lambda_ladder(const std::vector<double>& averages) {
  double lo = INFINITY, hi = 0.0;
  for (double a : averages)
    if (a > 0.0) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  std::vector<int> ks;
  if (!(hi > 0.0)) return ks;
  for (int k = static_cast<int>(std::floor(std::log2(lo))) - 1; exceeds(hi, std::ldexp(1.0, k)); ++k)
    ks.push_back(k);
  return ks;
}

UniformBound uniform_bound_check(const MatrixWeightField& w, const ExponentField& p,
                                 const ReducingCache& cache, double r) {
  require(r > 1.0, ErrorCode::Config, "the uniform bound needs r > 1");
  const ExponentField u = scaled(conjugate(p), r);
  const CubeFamily& family = cache.family();
  std::vector<double> per(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const CubeSupport& q = family.support(i);
    std::vector<double> h(q.cells.size()), e(q.cells.size());
    for (std::size_t k = 0; k < q.cells.size(); ++k) {
      h[k] = op_norm(w.inverse(q.cells[k]) * cache.primal(i).a);
      e[k] = u[q.cells[k]];
    }
    per[i] = luxemburg(h, e, q.weights) / char_norm(u, q);
  });
  UniformBound out;
  out.r = r;
  for (std::size_t i = 0; i < per.size(); ++i)
    if (i == 0 || per[i] > out.value) {
      out.value = per[i];
      out.argmax = i;
    }
  return out;
}

double default_uniform_r(const MatrixWeightField& w, const ExponentField& p, const CubeFamily& family,
                         double c_budget) {
  const std::vector<double> grid = default_r_grid();
  double best = INFINITY;
  for (int i = 0; i < w.dim(); ++i) {
    const ReverseHolderReport rh =
        reverse_holder_probe(w.scalarize(Vec::Unit(w.dim(), i)), p, family, grid, c_budget);
    best = std::min(best, rh.largest_passing.value_or(1.0));
  }
  if (!(best > 1.0)) return 1.0 + std::ldexp(1.0, -11);
  return 1.0 + (best - 1.0) / 2.0;
}

std::vector<VectorField> test_function_battery(const LatticeDomain& domain, const MatrixWeightField& w,
                                               std::uint64_t seed, std::size_t random_count) {
  const int d = w.dim();
  const auto cells = static_cast<std::size_t>(domain.cell_count());
  const auto du = static_cast<std::size_t>(d);
  std::vector<VectorField> out;
  std::vector<double> e1(du, 0.0);
  e1[0] = 1.0;

  // Indicators of the grid cubes with lower corner at the origin.
  for (int k = domain.min_level(); std::ldexp(1.0, k) <= static_cast<double>(domain.half_width()); ++k) {
    Cube q{0, k, {}};
    const CubeSupport s = cells_in_cube(domain, q);
    std::vector<double> v(cells * du, 0.0);
    for (Index c : s.members)
      for (std::size_t i = 0; i < du; ++i) v[static_cast<std::size_t>(c) * du + i] = e1[i];
    out.emplace_back(domain, d, std::move(v));
  }
  for (std::size_t c : {std::size_t{0}, cells / 2, cells - 1}) {
    std::vector<double> v(cells * du, 0.0);
    for (std::size_t i = 0; i < du; ++i) v[c * du + i] = 1.0 / std::sqrt(static_cast<double>(d));
    out.emplace_back(domain, d, std::move(v));
  }
  for (std::size_t k = 0; k < random_count; ++k) {
    auto g = stream_rng(seed, 0x7465737466ULL, k);
    std::vector<double> v(cells * du);
    for (auto& x : v) x = (g() >> 63) ? 1.0 : -1.0;
    out.emplace_back(domain, d, std::move(v));
  }
  for (bool smallest : {true, false}) {
    std::vector<double> v(cells * du);
    for (std::size_t c = 0; c < cells; ++c) {
      Eigen::SelfAdjointEigenSolver<Mat> es(w.at(static_cast<Index>(c)));
      const Vec u = es.eigenvectors().col(smallest ? 0 : d - 1);
      for (std::size_t i = 0; i < du; ++i) v[c * du + i] = u[static_cast<Eigen::Index>(i)];
    }
    out.emplace_back(domain, d, std::move(v));
  }
  return out;
}

NormEstimate operator_norm_estimate(MaximalOp op, const MatrixWeightField& w, const ExponentField& p,
                                    const ReducingCache& cache, const std::vector<VectorField>& battery) {
  NormEstimate out;
  const CubeFamily& family = cache.family();
  for (const VectorField& f : battery) {
    const ScalarField mag = f.magnitude();
    const double denom = luxemburg_norm(mag, p);
    MaximalField m;
    switch (op) {
      case MaximalOp::HardyLittlewood: m = hardy_littlewood(mag, family); break;
      case MaximalOp::NormMaximal: m = norm_maximal_field(mag, p, family); break;
      case MaximalOp::ChristGoldberg: m = christ_goldberg(f, w, family); break;
      case MaximalOp::AuxPrime: m = aux_prime(f, w, cache); break;
      case MaximalOp::AuxDoublePrime: m = aux_double_prime(f, w, cache); break;
    }
    out.ratios.push_back(denom > 0.0 ? luxemburg_norm(m.values, p) / denom : 0.0);
  }
  for (std::size_t i = 0; i < out.ratios.size(); ++i)
    if (out.ratios[i] > out.ratio) {
      out.ratio = out.ratios[i];
      out.argmax = i;
    }
  return out;
}

}  // namespace vls
