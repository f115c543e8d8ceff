#include "vlspace/exponent.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "vlspace/error.hpp"
#include "vlspace/parallel.hpp"

namespace vls {
namespace {

double radius(const Point& x, int n) {
  double s = 0.0;
  for (int ax = 0; ax < n; ++ax) s += x[ax] * x[ax];
  return std::sqrt(s);
}

double parse_number(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::Config,
          "bad number in exponent spec: '" + s + "'");
  return v;
}

}  // namespace

ExponentSpec parse_exponent_spec(const std::string& text) {
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorCode::Config, "exponent spec needs 'family:params'");
  const std::string family = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  const auto comma = params.find(',');
  ExponentSpec spec;
  if (family == "constant") {
    spec.kind = ExponentKind::Constant;
    spec.a = parse_number(params);
  } else if (family == "lh" || family == "twostep") {
    require(comma != std::string::npos, ErrorCode::Config, family + " needs two parameters");
    spec.kind = family == "lh" ? ExponentKind::LogHolder : ExponentKind::TwoStep;
    spec.a = parse_number(params.substr(0, comma));
    spec.b = parse_number(params.substr(comma + 1));
  } else {
    throw Error(ErrorCode::Config, "unknown exponent family '" + family + "'");
  }
  return spec;
}

ExponentField::ExponentField(const LatticeDomain& domain, std::vector<double> values, double p_inf,
                             ExponentKind kind)
    : domain_(domain), values_(std::move(values)), p_inf_(p_inf), kind_(kind) {
  require(static_cast<Index>(values_.size()) == domain_.cell_count(), ErrorCode::Data,
          "exponent field size does not match the domain");
  require(std::isfinite(p_inf_) && p_inf_ > 1.0, ErrorCode::Config, "p_inf must lie in (1, inf)");
  p_minus_ = INFINITY;
  p_plus_ = -INFINITY;
  for (double v : values_) {
    require(std::isfinite(v), ErrorCode::Data, "exponent values must be finite");
    p_minus_ = std::min(p_minus_, v);
    p_plus_ = std::max(p_plus_, v);
  }
  require(p_minus_ > 1.0, ErrorCode::Config, "exponent must satisfy p_- > 1");
}

double lh_family_value(double c, double b, double r) { return c + b / std::log(std::numbers::e + r); }

ExponentField make_exponent(const LatticeDomain& domain, const ExponentSpec& spec) {
  std::vector<double> v(static_cast<std::size_t>(domain.cell_count()));
  double p_inf = spec.a;
  for (Index c = 0; c < domain.cell_count(); ++c) {
    const Point x = domain.cell_center(c);
    double p = spec.a;
    switch (spec.kind) {
      case ExponentKind::Constant: break;
      case ExponentKind::LogHolder: p = lh_family_value(spec.a, spec.b, radius(x, domain.dim())); break;
      case ExponentKind::TwoStep: p = x[0] < 0.0 ? spec.a : spec.b; break;
      case ExponentKind::Sampled: throw Error(ErrorCode::Config, "sampled exponents need values");
    }
    v[static_cast<std::size_t>(c)] = p;
  }
  if (spec.kind == ExponentKind::TwoStep) p_inf = spec.b;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  require(*lo > 1.0, ErrorCode::Config, "exponent family violates p_- > 1");
  require(*hi <= spec.p_max, ErrorCode::Config, "exponent family exceeds p_max");
  return ExponentField(domain, std::move(v), p_inf, spec.kind);
}

ExponentField conjugate(const ExponentField& p) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) x = x / (x - 1.0);
  const double pi = p.p_inf();
  return ExponentField(p.domain(), std::move(v), pi / (pi - 1.0),
                       p.kind() == ExponentKind::Constant ? ExponentKind::Constant : ExponentKind::Sampled);
}

ExponentField scaled(const ExponentField& p, double factor) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) x *= factor;
  return ExponentField(p.domain(), std::move(v), p.p_inf() * factor,
                       p.kind() == ExponentKind::Constant ? ExponentKind::Constant : ExponentKind::Sampled);
}

double harmonic_mean(const ExponentField& p, const CubeSupport& q) {
  double acc = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < q.cells.size(); ++i) {
    acc += q.weights[i] / p[q.cells[i]];
    mass += q.weights[i];
  }
  return mass / acc;
}

LogHolderConstants estimate_log_holder(const LatticeDomain& domain, std::span<const double> r,
                                       double r_inf) {
  const auto cells = static_cast<std::size_t>(domain.cell_count());
  require(r.size() == cells, ErrorCode::Data, "field size does not match the domain");
  const int n = domain.dim();
  std::vector<Point> centers(cells);
  for (std::size_t c = 0; c < cells; ++c) centers[c] = domain.cell_center(static_cast<Index>(c));

  std::vector<double> local(cells, 0.0);
  parallel_for(cells, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < cells; ++j) {
      double d2 = 0.0;
      for (int ax = 0; ax < n; ++ax) {
        const double t = centers[i][ax] - centers[j][ax];
        d2 += t * t;
      }
      if (d2 >= 0.25) continue;
      const double dist = std::sqrt(d2);
      best = std::max(best, std::abs(r[i] - r[j]) * -std::log(dist));
    }
    local[i] = best;
  });
  LogHolderConstants out;
  for (std::size_t i = 0; i < cells; ++i) {
    out.c0 = std::max(out.c0, local[i]);
    out.cinf = std::max(out.cinf, std::abs(r[i] - r_inf) *
                                      std::log(std::numbers::e + radius(centers[i], n)));
  }
  return out;
}

double diening_constant(int n, double r_range, double c0) {
  const double sn = std::sqrt(static_cast<double>(n));
  return std::max(std::pow(2.0 * sn, n * r_range), std::exp(c0 * (1.0 + std::log2(sn))));
}

double diening_constant(const LatticeDomain& domain, std::span<const double> r) {
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  const auto lh = estimate_log_holder(domain, r, *lo);
  return diening_constant(domain.dim(), *hi - *lo, lh.c0);
}

LogHolderReport estimate_log_holder(const ExponentField& p) {
  LogHolderReport rep;
  rep.exponent = estimate_log_holder(p.domain(), p.values(), p.p_inf());
  std::vector<double> recip(p.values().begin(), p.values().end());
  for (double& x : recip) x = 1.0 / x;
  rep.reciprocal = estimate_log_holder(p.domain(), recip, 1.0 / p.p_inf());
  rep.diening = diening_constant(p.domain().dim(), 1.0 / p.p_minus() - 1.0 / p.p_plus(),
                                 rep.reciprocal.c0);
  return rep;
}

ClosureReport lh_closure_check(const ExponentField& p, const ExponentField& u, double s) {
  require(p.domain() == u.domain(), ErrorCode::Config, "exponents live on different domains");
  require(s > 0.0, ErrorCode::Config, "scale factor must be positive");
  std::vector<double> sp(p.values().begin(), p.values().end());
  for (double& x : sp) x *= s;
  std::vector<double> q(sp.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = u.values()[i] / p.values()[i];
  ClosureReport rep;
  rep.scaled = estimate_log_holder(p.domain(), sp, s * p.p_inf());
  rep.quotient = estimate_log_holder(p.domain(), q, u.p_inf() / p.p_inf());
  rep.pass = std::isfinite(rep.scaled.c0) && std::isfinite(rep.scaled.cinf) &&
             std::isfinite(rep.quotient.c0) && std::isfinite(rep.quotient.cinf);
  return rep;
}

}  // namespace vls
