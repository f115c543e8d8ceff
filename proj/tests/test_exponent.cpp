#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vlspace/error.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/rng.hpp"

using namespace vls;

namespace {

ExponentField random_exponent(const LatticeDomain& dom, std::uint64_t seed) {
  auto g = stream_rng(seed, 3, 0);
  std::vector<double> v(static_cast<std::size_t>(dom.cell_count()));
  for (double& x : v) x = uniform(g, 1.2, 6.0);
  return ExponentField(dom, v, 2.0);
}

// Plain double loop over every ordered pair of cell centres.
LogHolderConstants scan(const LatticeDomain& dom, std::span<const double> r, double r_inf) {
  LogHolderConstants out;
  const int n = dom.dim();
  for (Index i = 0; i < dom.cell_count(); ++i) {
    const Point x = dom.cell_center(i);
    double rx = 0.0;
    for (int a = 0; a < n; ++a) rx += x[a] * x[a];
    out.cinf = std::max(out.cinf, std::abs(r[i] - r_inf) * std::log(std::numbers::e + std::sqrt(rx)));
    for (Index j = 0; j < dom.cell_count(); ++j) {
      const Point y = dom.cell_center(j);
      double d = 0.0;
      for (int a = 0; a < n; ++a) d += (x[a] - y[a]) * (x[a] - y[a]);
      d = std::sqrt(d);
      if (d > 0.0 && d < 0.5) out.c0 = std::max(out.c0, std::abs(r[i] - r[j]) * -std::log(d));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("closed-form exponent families") {
  const auto dom = build_domain(1, 1, 4);
  const auto c = make_exponent(dom, {ExponentKind::Constant, 2.0});
  CHECK(c.p_minus() == 2.0);
  CHECK(c.p_plus() == 2.0);
  CHECK(c.p_inf() == 2.0);

  CHECK(lh_family_value(2.0, 1.0, 0.0) == doctest::Approx(3.0).epsilon(1e-15));
  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 2.0, 1.0});
  CHECK(lh.p_inf() == 2.0);
  CHECK(lh.p_plus() < 3.0);
  CHECK(lh.p_minus() > 2.0);

  const auto two = make_exponent(dom, {ExponentKind::TwoStep, 2.0, 4.0});
  CHECK(two.p_minus() == 2.0);
  CHECK(two.p_plus() == 4.0);

  CHECK_THROWS_AS(make_exponent(dom, {ExponentKind::Constant, 1.0}), Error);
  CHECK_THROWS_AS(make_exponent(dom, {ExponentKind::Constant, 9.0}), Error);
  CHECK_THROWS_AS(make_exponent(dom, {ExponentKind::LogHolder, 0.5, 0.2}), Error);
}

TEST_CASE("exponent spec parsing") {
  CHECK(parse_exponent_spec("constant:1.5").a == 1.5);
  const auto s = parse_exponent_spec("lh:2,1");
  CHECK(s.kind == ExponentKind::LogHolder);
  CHECK(s.b == 1.0);
  CHECK(parse_exponent_spec("twostep:2,4").kind == ExponentKind::TwoStep);
  CHECK_THROWS_AS(parse_exponent_spec("cubic:2"), Error);
  CHECK_THROWS_AS(parse_exponent_spec("lh:2"), Error);
  CHECK_THROWS_AS(parse_exponent_spec("constant:x"), Error);
}

TEST_CASE("conjugate exponent") {
  const auto dom = build_domain(1, 1, 3);
  CHECK(conjugate(make_exponent(dom, {ExponentKind::Constant, 2.0}))[0] == 2.0);
  CHECK(conjugate(make_exponent(dom, {ExponentKind::Constant, 1.5}))[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(conjugate(make_exponent(dom, {ExponentKind::Constant, 4.0}))[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  const auto p = random_exponent(dom, 11);
  const auto q = conjugate(p);
  const auto back = conjugate(q);
  CHECK(q.p_minus() == doctest::Approx(p.p_plus() / (p.p_plus() - 1.0)).epsilon(1e-14));
  CHECK(q.p_plus() == doctest::Approx(p.p_minus() / (p.p_minus() - 1.0)).epsilon(1e-14));
  for (Index c = 0; c < dom.cell_count(); ++c) {
    CHECK(std::abs(1.0 / p[c] + 1.0 / q[c] - 1.0) <= 1e-14);
    CHECK(std::abs(back[c] - p[c]) <= 1e-12 * p[c]);
  }
}

TEST_CASE("harmonic mean") {
  const auto dom = build_domain(1, 1, 2);
  const auto three = make_exponent(dom, {ExponentKind::Constant, 3.0});
  for (const auto& q : {Cube{0, 0, {0, 0, 0}}, Cube{0, -2, {1, 0, 0}}, Cube{1, 0, {-1, 0, 0}}})
    CHECK(harmonic_mean(three, cells_in_cube(dom, q)) == doctest::Approx(3.0).epsilon(1e-15));

  const auto two = make_exponent(dom, {ExponentKind::TwoStep, 2.0, 4.0});
  const Index e = dom.box_units();
  CHECK(harmonic_mean(two, dom.support(UnitBox{{-e, 0, 0}, {e, 0, 0}})) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));

  const auto d2 = build_domain(2, 1, 2);
  const auto p = random_exponent(d2, 5);
  for (std::uint8_t t = 0; t < 4; ++t) {
    const auto fam = grid_family(d2, t);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto& s = fam.support(i);
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < s.cells.size(); ++k) {
        num += s.weights[k];
        den += s.weights[k] / p[s.cells[k]];
      }
      const double pq = harmonic_mean(p, s);
      CHECK(pq == doctest::Approx(num / den).epsilon(1e-12));
      CHECK(pq >= p.p_minus() - 1e-12);
      CHECK(pq <= p.p_plus() + 1e-12);
    }
  }
}

TEST_CASE("log-Holder estimates") {
  const auto dom = build_domain(1, 1, 5);
  const auto c = estimate_log_holder(make_exponent(dom, {ExponentKind::Constant, 2.5}));
  CHECK(c.exponent.c0 == 0.0);
  CHECK(c.exponent.cinf == 0.0);
  CHECK(c.diening == 1.0);

  // |p(x) - 2| log(e + |x|) = 1 identically; C0 is at most b / e^2 because
  // r -> 1/log(e + r) is (1/e)-Lipschitz and t (-log t) <= 1/e.
  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 2.0, 1.0});
  const auto rep = estimate_log_holder(lh);
  CHECK(rep.exponent.cinf <= 1.0 + 1e-9);
  CHECK(rep.exponent.cinf >= 1.0 - 1e-9);
  CHECK(rep.exponent.c0 <= 1.0 / (std::numbers::e * std::numbers::e) + 1e-9);

  const auto oracle = scan(dom, lh.values(), lh.p_inf());
  CHECK(rep.exponent.c0 == doctest::Approx(oracle.c0).epsilon(1e-14));
  CHECK(rep.exponent.cinf == doctest::Approx(oracle.cinf).epsilon(1e-14));

  const auto d2 = build_domain(2, 1, 2);
  const auto p = random_exponent(d2, 9);
  const auto got = estimate_log_holder(d2, p.values(), 2.0);
  const auto want = scan(d2, p.values(), 2.0);
  CHECK(got.c0 == doctest::Approx(want.c0).epsilon(1e-14));
  CHECK(got.cinf == doctest::Approx(want.cinf).epsilon(1e-14));
}

TEST_CASE("Diening constant") {
  CHECK(diening_constant(1, 0.0, 0.0) == 1.0);
  CHECK(diening_constant(1, 1.0, 1.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(diening_constant(2, 0.5, 0.0) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("log-Holder closure") {
  const auto dom = build_domain(1, 1, 4);
  const auto p = make_exponent(dom, {ExponentKind::Constant, 2.0});
  const auto u = make_exponent(dom, {ExponentKind::Constant, 3.0});
  const auto r = lh_closure_check(p, u, 2.0);
  CHECK(r.pass);
  CHECK(r.scaled.c0 == 0.0);
  CHECK(r.quotient.cinf == 0.0);

  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 2.0, 1.0});
  const auto self = lh_closure_check(lh, lh, 1.0);
  CHECK(self.quotient.c0 == 0.0);
  CHECK(self.quotient.cinf == 0.0);

  const auto mixed = lh_closure_check(lh, u, 1.5);
  std::vector<double> sp(lh.values().begin(), lh.values().end()), q(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) {
    q[i] = 3.0 / sp[i];
    sp[i] *= 1.5;
  }
  CHECK(mixed.scaled.c0 == doctest::Approx(scan(dom, sp, 3.0).c0).epsilon(1e-14));
  CHECK(mixed.quotient.cinf == doctest::Approx(scan(dom, q, 1.5).cinf).epsilon(1e-14));
}
