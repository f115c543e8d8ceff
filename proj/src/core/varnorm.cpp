#include "vlspace/varnorm.hpp"

#include <algorithm>
#include <cmath>

#include "vlspace/error.hpp"
#include "vlspace/parallel.hpp"

namespace vls {
namespace {

constexpr double kLogSpaceThreshold = 1e100;

void gather(std::span<const double> f, const ExponentField& p, const CubeSupport& q,
            std::vector<double>& vals, std::vector<double>& exps) {
  vals.resize(q.cells.size());
  exps.resize(q.cells.size());
  for (std::size_t i = 0; i < q.cells.size(); ++i) {
    vals[i] = f[static_cast<std::size_t>(q.cells[i])];
    exps[i] = p[q.cells[i]];
  }
}

}  // namespace

ScalarField::ScalarField(const LatticeDomain& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  require(static_cast<Index>(values_.size()) == domain_.cell_count(), ErrorCode::Data,
          "scalar field size does not match the domain");
  for (double v : values_) require(std::isfinite(v), ErrorCode::Data, "field entries must be finite");
}

ScalarField ScalarField::constant(const LatticeDomain& domain, double value) {
  return ScalarField(domain, std::vector<double>(static_cast<std::size_t>(domain.cell_count()), value));
}

VectorField::VectorField(const LatticeDomain& domain, int d, std::vector<double> values)
    : domain_(domain), d_(d), values_(std::move(values)) {
  require(d >= 1 && d <= 3, ErrorCode::Config, "vector dimension must be 1, 2 or 3");
  require(static_cast<Index>(values_.size()) == domain_.cell_count() * d, ErrorCode::Data,
          "vector field size does not match the domain");
  for (double v : values_) require(std::isfinite(v), ErrorCode::Data, "field entries must be finite");
}

ScalarField VectorField::magnitude() const {
  std::vector<double> m(static_cast<std::size_t>(domain_.cell_count()));
  for (Index c = 0; c < domain_.cell_count(); ++c) {
    double s = 0.0;
    for (double v : at(c)) s += v * v;
    m[static_cast<std::size_t>(c)] = std::sqrt(s);
  }
  return ScalarField(domain_, std::move(m));
}

double modular(std::span<const double> f, std::span<const double> p, std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    if (a == 0.0 || w[i] == 0.0) continue;
    if (a > kLogSpaceThreshold)
      sum += std::exp(p[i] * std::log(a) + std::log(w[i]));
    else
      sum += w[i] * std::pow(a, p[i]);
  }
  return sum;
}

double modular(const ScalarField& f, const ExponentField& p) {
  const std::vector<double> w(static_cast<std::size_t>(f.domain().cell_count()),
                              f.domain().cell_measure());
  return modular(f.values(), p.values(), w);
}

double luxemburg(std::span<const double> f, std::span<const double> p, std::span<const double> w,
                 NormSolveTrace* trace) {
  double fmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(std::isfinite(f[i]), ErrorCode::Data, "Luxemburg norm of a non-finite field");
    if (w[i] > 0.0) fmax = std::max(fmax, std::abs(f[i]));
  }
  if (trace) *trace = NormSolveTrace{};
  if (fmax == 0.0) return 0.0;

  // rho(s) = sum w exp(p (log(|f|/fmax) - s)), lambda = fmax e^s.
  std::vector<double> a, e, m;
  a.reserve(f.size());
  e.reserve(f.size());
  m.reserve(f.size());
  double pmin = INFINITY, pmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f[i]);
    if (v == 0.0 || w[i] <= 0.0) continue;
    a.push_back(std::log(v / fmax));
    e.push_back(p[i]);
    m.push_back(w[i]);
    pmin = std::min(pmin, p[i]);
    pmax = std::max(pmax, p[i]);
  }
  auto rho = [&](double s, double& slope) {
    double sum = 0.0, ds = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double t = m[i] * std::exp(e[i] * (a[i] - s));
      sum += t;
      ds -= e[i] * t;
    }
    slope = ds;
    return sum;
  };

  double slope = 0.0;
  const double r0 = rho(0.0, slope);
  const double lr = std::log(r0);
  double lo = r0 >= 1.0 ? lr / pmax : lr / pmin;
  double hi = r0 >= 1.0 ? lr / pmin : lr / pmax;
  const double lo0 = lo, hi0 = hi;

  // log rho is convex and decreasing in s, so Newton from the left end
  // approaches the root monotonically; bisection is only a fallback.
  double s = lo;
  double val = 1.0;
  int it = 0;
  for (; it < 200; ++it) {
    val = rho(s, slope);
    const double phi = std::log(val);
    if (phi > 0.0) lo = s;
    else hi = s;
    if (std::abs(val - 1.0) <= 1e-15 || hi - lo <= 1e-16 * std::max(1.0, std::abs(s))) break;
    double next = s - phi * val / slope;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
  }
  if (trace) {
    trace->bracket_lo = fmax * std::exp(lo0);
    trace->bracket_hi = fmax * std::exp(hi0);
    trace->iterations = it + 1;
    trace->residual = std::abs(val - 1.0);
  }
  return fmax * std::exp(s);
}

double luxemburg_norm(const ScalarField& f, const ExponentField& p, NormSolveTrace* trace) {
  require(f.domain() == p.domain(), ErrorCode::Config, "field and exponent domains differ");
  const std::vector<double> w(static_cast<std::size_t>(f.domain().cell_count()),
                              f.domain().cell_measure());
  return luxemburg(f.values(), p.values(), w, trace);
}

double restricted_norm(std::span<const double> f, const ExponentField& p, const CubeSupport& q) {
  std::vector<double> vals, exps;
  gather(f, p, q, vals, exps);
  return luxemburg(vals, exps, q.weights);
}

double char_norm(const ExponentField& p, const CubeSupport& q) {
  std::vector<double> ones(q.cells.size(), 1.0), exps(q.cells.size());
  for (std::size_t i = 0; i < q.cells.size(); ++i) exps[i] = p[q.cells[i]];
  return luxemburg(ones, exps, q.weights);
}

std::vector<double> char_norms(const ExponentField& p, const CubeFamily& family) {
  std::vector<double> out(family.size());
  parallel_for(family.size(), [&](std::size_t i) { out[i] = char_norm(p, family.support(i)); });
  return out;
}

HolderPair holder_pairing(const ScalarField& f, const ScalarField& g, const ExponentField& p) {
  HolderPair r;
  const double h = f.domain().cell_measure();
  for (Index c = 0; c < f.domain().cell_count(); ++c) r.lhs += std::abs(f[c] * g[c]) * h;
  r.rhs = 2.0 * luxemburg_norm(f, p) * luxemburg_norm(g, conjugate(p));
  return r;
}

double averaging_functional(const ScalarField& f, const CubeSupport& q, const ExponentField& p) {
  return restricted_norm(f.values(), p, q) / char_norm(p, q);
}

NormMaximalResult norm_maximal(const ScalarField& f, const ExponentField& p, const CubeFamily& family) {
  require(!family.empty(), ErrorCode::Config, "maximal operator over an empty family");
  std::vector<double> avg(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    avg[i] = averaging_functional(f, family.support(i), p);
  });
  const auto cells = static_cast<std::size_t>(f.domain().cell_count());
  std::vector<double> vals(cells, 0.0);
  NormMaximalResult out;
  out.argmax.assign(cells, -1);
  out.uncovered.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    const auto& cover = family.containing(static_cast<Index>(c));
    if (cover.empty()) {
      out.uncovered[c] = 1;
      continue;
    }
    for (auto q : cover) {
      if (out.argmax[c] < 0 || avg[q] > vals[c]) {
        vals[c] = avg[q];
        out.argmax[c] = q;
      }
    }
  }
  out.values = ScalarField(f.domain(), std::move(vals));
  return out;
}

ConstantResult one_constant(const ExponentField& p, const CubeFamily& family) {
  require(!family.empty(), ErrorCode::Config, "constant over an empty family");
  const ExponentField pc = conjugate(p);
  std::vector<double> v(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const auto& q = family.support(i);
    v[i] = char_norm(p, q) * char_norm(pc, q) / q.measure;
  });
  ConstantResult r;
  r.value = v[0];
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > r.value) {
      r.value = v[i];
      r.argmax = i;
    }
  return r;
}

DualityResult duality_check(const ScalarField& f, const ScalarField& g, const CubeSupport& q,
                            const ExponentField& p) {
  const ExponentField pc = conjugate(p);
  DualityResult r;
  for (std::size_t i = 0; i < q.cells.size(); ++i)
    r.lhs += std::abs(f[q.cells[i]] * g[q.cells[i]]) * q.weights[i];
  r.lhs /= q.measure;
  r.c_used = 2.0 * char_norm(p, q) * char_norm(pc, q) / q.measure;
  r.rhs = r.c_used * averaging_functional(f, q, p) * averaging_functional(g, q, pc);
  return r;
}

}  // namespace vls
