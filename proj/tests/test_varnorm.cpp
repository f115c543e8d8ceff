#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "vlspace/error.hpp"
#include "vlspace/exponent.hpp"
#include "vlspace/rng.hpp"
#include "vlspace/varnorm.hpp"

using namespace vls;

namespace {

// Plain bisection on lambda, kept deliberately separate from the library solver.
double bisect_norm(const std::vector<double>& f, const std::vector<double>& p, const std::vector<double>& w) {
  auto rho = [&](double lam) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(std::abs(f[i]) / lam, p[i]);
    return s;
  };
  if (std::all_of(f.begin(), f.end(), [](double x) { return x == 0.0; })) return 0.0;
  double lo = 1e-300, hi = 1.0;
  while (rho(hi) > 1.0) hi *= 2.0;
  lo = hi / 2.0;
  while (rho(lo) <= 1.0) lo /= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (rho(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double oracle_restricted(const std::vector<double>& f, const ExponentField& p, const CubeSupport& q) {
  std::vector<double> v, e;
  for (auto c : q.cells) {
    v.push_back(f[static_cast<std::size_t>(c)]);
    e.push_back(p[c]);
  }
  return bisect_norm(v, e, q.weights);
}

std::vector<double> random_values(std::size_t size, std::uint64_t seed, double lo, double hi) {
  auto g = stream_rng(seed, 17, 0);
  std::vector<double> v(size);
  for (double& x : v) x = uniform(g, lo, hi);
  return v;
}

ExponentField random_exponent(const LatticeDomain& dom, std::uint64_t seed) {
  return ExponentField(dom, random_values(static_cast<std::size_t>(dom.cell_count()), seed, 1.1, 7.0), 2.0);
}

}  // namespace

TEST_CASE("modular") {
  const std::vector<double> w4(4, 0.25), p2(4, 2.0), f3(4, 3.0);
  CHECK(modular(f3, p2, w4) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(modular(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0, 3.0}, std::vector<double>{0.5, 0.5}) == 4.5);
  CHECK(modular(std::vector<double>(4, 0.0), p2, w4) == 0.0);
  // log-space branch
  const double big = 1e150;
  CHECK(modular(std::vector<double>{big}, std::vector<double>{2.0}, std::vector<double>{1.0}) ==
        doctest::Approx(1e300).epsilon(1e-12));
}

TEST_CASE("Luxemburg norm examples") {
  const std::vector<double> w4(4, 0.25), p2(4, 2.0), f3(4, 3.0);
  CHECK(luxemburg(f3, p2, w4) == doctest::Approx(3.0).epsilon(1e-12));
  const std::vector<double> step{2.0, 2.0, 4.0, 4.0}, ones(4, 1.0);
  CHECK(luxemburg(ones, step, w4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(luxemburg(std::vector<double>(4, 0.0), p2, w4) == 0.0);
  CHECK_THROWS_AS(luxemburg(std::vector<double>{NAN, 1.0, 1.0, 1.0}, p2, w4), Error);

  const auto dom = build_domain(1, 1, 2);
  std::vector<double> f(8, 0.0);
  for (Index c = 0; c < 8; ++c)
    if (dom.cell_center(c)[0] > 0.0) f[static_cast<std::size_t>(c)] = 3.0;
  CHECK(luxemburg_norm(ScalarField(dom, f), make_exponent(dom, {ExponentKind::Constant, 2.0})) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Luxemburg norm against bisection and the modular bounds") {
  const auto dom = build_domain(1, 1, 4);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto p = random_exponent(dom, seed);
    const double scale = std::exp2(static_cast<double>(seed % 13) - 6.0);
    auto v = random_values(static_cast<std::size_t>(dom.cell_count()), seed + 1000, -scale, scale);
    const ScalarField f(dom, v);
    NormSolveTrace tr;
    const double norm = luxemburg_norm(f, p, &tr);
    const std::vector<double> w(v.size(), dom.cell_measure());
    const std::vector<double> pv(p.values().begin(), p.values().end());
    CHECK(norm == doctest::Approx(bisect_norm(v, pv, w)).epsilon(1e-10));
    CHECK(tr.residual <= 1e-10);

    const double rho = modular(f, p);
    const double a = std::pow(rho, 1.0 / p.p_plus()), b = std::pow(rho, 1.0 / p.p_minus());
    CHECK(norm >= std::min(a, b) * (1.0 - 1e-9));
    CHECK(norm <= std::max(a, b) * (1.0 + 1e-9));

    // homogeneity
    const double c = -3.7;
    for (double& x : v) x *= c;
    CHECK(luxemburg_norm(ScalarField(dom, v), p) == doctest::Approx(std::abs(c) * norm).epsilon(1e-10));
  }
}

TEST_CASE("truncations increase to the norm") {
  const auto dom = build_domain(1, 1, 4);
  const auto p = random_exponent(dom, 3);
  const auto v = random_values(static_cast<std::size_t>(dom.cell_count()), 4, -10.0, 10.0);
  double prev = 0.0;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    std::vector<double> t = v;
    for (double& x : t)
      if (std::abs(x) > k) x = 0.0;
    const double nk = luxemburg_norm(ScalarField(dom, t), p);
    CHECK(nk >= prev * (1.0 - 1e-12));
    prev = nk;
  }
  CHECK(prev == doctest::Approx(luxemburg_norm(ScalarField(dom, v), p)).epsilon(1e-12));
}

TEST_CASE("Holder pairing") {
  const auto dom = build_domain(1, 1, 3);
  const auto two = make_exponent(dom, {ExponentKind::Constant, 2.0});
  std::vector<double> ones(static_cast<std::size_t>(dom.cell_count()), 0.0);
  for (Index c = 0; c < dom.cell_count(); ++c)
    if (dom.cell_center(c)[0] > 0.0) ones[static_cast<std::size_t>(c)] = 1.0;
  const auto hp = holder_pairing(ScalarField(dom, ones), ScalarField(dom, ones), two);
  CHECK(hp.lhs == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hp.rhs == doctest::Approx(2.0).epsilon(1e-12));

  const ScalarField r(dom, random_values(static_cast<std::size_t>(dom.cell_count()), 8, -2.0, 2.0));
  const auto eq = holder_pairing(r, r, two);
  CHECK(eq.rhs == doctest::Approx(2.0 * eq.lhs).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto p = random_exponent(dom, seed + 50);
    const auto fv = random_values(static_cast<std::size_t>(dom.cell_count()), 2 * seed, -5.0, 5.0);
    const auto gv = random_values(static_cast<std::size_t>(dom.cell_count()), 2 * seed + 1, -5.0, 5.0);
    double lhs = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) lhs += std::abs(fv[i] * gv[i]) * dom.cell_measure();
    const auto h = holder_pairing(ScalarField(dom, fv), ScalarField(dom, gv), p);
    CHECK(h.lhs == doctest::Approx(lhs).epsilon(1e-13));
    CHECK(h.lhs <= h.rhs);
  }
}

TEST_CASE("averaging functional") {
  const auto dom = build_domain(1, 1, 4);
  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 1.5, 1.0});
  const auto fam = grid_family(dom, 1);
  const auto c = ScalarField::constant(dom, 2.5);
  for (std::size_t i = 0; i < fam.size(); ++i)
    CHECK(averaging_functional(c, fam.support(i), lh) == doctest::Approx(2.5).epsilon(1e-10));

  const auto three = make_exponent(dom, {ExponentKind::Constant, 3.0});
  const auto v = random_values(static_cast<std::size_t>(dom.cell_count()), 21, -3.0, 3.0);
  const ScalarField f(dom, v);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& s = fam.support(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < s.cells.size(); ++k) acc += s.weights[k] * std::pow(std::abs(v[s.cells[k]]), 3.0);
    CHECK(averaging_functional(f, s, three) == doctest::Approx(std::cbrt(acc / s.measure)).epsilon(1e-10));
  }

  const auto step = make_exponent(dom, {ExponentKind::TwoStep, 1.5, 3.0});
  std::vector<double> sv(v.size());
  for (Index c2 = 0; c2 < dom.cell_count(); ++c2) sv[static_cast<std::size_t>(c2)] = dom.cell_center(c2)[0] < 0.25 ? 1.0 : 4.0;
  const auto full = grid_family(dom, 0);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const auto& s = full.support(i);
    const std::vector<double> one(v.size(), 1.0);
    const double want = oracle_restricted(sv, step, s) / oracle_restricted(one, step, s);
    CHECK(averaging_functional(ScalarField(dom, sv), s, step) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("norm maximal operator") {
  const auto dom = build_domain(1, 1, 4);
  const auto fam = grid_family(dom, 0);
  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 2.0, 1.0});
  const auto mc = norm_maximal(ScalarField::constant(dom, 1.75), lh, fam);
  for (Index c = 0; c < dom.cell_count(); ++c) CHECK(mc.values[c] == doctest::Approx(1.75).epsilon(1e-10));

  // constant exponent: (M(|f|^p))^{1/p} over the same dyadic cubes
  const auto two = make_exponent(dom, {ExponentKind::Constant, 2.0});
  const auto v = random_values(static_cast<std::size_t>(dom.cell_count()), 5, -4.0, 4.0);
  const auto m = norm_maximal(ScalarField(dom, v), two, fam);
  const double h = dom.cell_side();
  for (Index c = 0; c < dom.cell_count(); ++c) {
    const double x = dom.cell_center(c)[0];
    double best = 0.0;
    for (double side = h; side <= 1.0; side *= 2.0) {
      const double a = std::floor(x / side) * side;
      if (a < -1.0 || a + side > 1.0) continue;
      double acc = 0.0;
      int cnt = 0;
      for (Index y = 0; y < dom.cell_count(); ++y) {
        const double cy = dom.cell_center(y)[0];
        if (cy >= a && cy < a + side) {
          acc += v[static_cast<std::size_t>(y)] * v[static_cast<std::size_t>(y)];
          ++cnt;
        }
      }
      best = std::max(best, std::sqrt(acc / cnt));
    }
    CHECK(m.values[c] == doctest::Approx(best).epsilon(1e-10));
    CHECK(m.values[c] >= std::abs(v[static_cast<std::size_t>(c)]) * (1.0 - 1e-10));
  }
}

TEST_CASE("the [1] constant") {
  const auto dom = build_domain(1, 1, 4);
  const auto fam = lattice_family(dom, 1, dom.cells_per_axis(), true);
  CHECK(one_constant(make_exponent(dom, {ExponentKind::Constant, 3.0}), fam).value == doctest::Approx(1.0).epsilon(1e-10));

  const auto lh = make_exponent(dom, {ExponentKind::LogHolder, 2.0, 1.0});
  const double one_lh = one_constant(lh, fam).value;
  CHECK(std::isfinite(one_lh));
  CHECK(one_lh >= 1.0 - 1e-9);
  CHECK(one_lh <= 8.0 * estimate_log_holder(lh).diening);

  const auto step = make_exponent(dom, {ExponentKind::TwoStep, 1.5, 3.0});
  const auto pc = conjugate(step);
  const std::vector<double> one(static_cast<std::size_t>(dom.cell_count()), 1.0);
  double brute = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& s = fam.support(i);
    brute = std::max(brute, oracle_restricted(one, step, s) * oracle_restricted(one, pc, s) / s.measure);
  }
  const double got = one_constant(step, fam).value;
  CHECK(got == doctest::Approx(brute).epsilon(1e-9));
  CHECK(got > 1.0);
}

TEST_CASE("characteristic-function bounds and cube comparison") {
  const auto dom = build_domain(1, 1, 4);
  const auto fam = lattice_family(dom, 1, dom.cells_per_axis(), true);
  for (const auto& spec : {ExponentSpec{ExponentKind::TwoStep, 1.5, 3.0}, ExponentSpec{ExponentKind::LogHolder, 1.5, 0.5},
                           ExponentSpec{ExponentKind::Constant, 2.0}}) {
    const auto p = make_exponent(dom, spec);
    const double one = one_constant(p, fam).value;
    const auto norms = char_norms(p, fam);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto& s = fam.support(i);
      const double base = std::pow(s.measure, 1.0 / harmonic_mean(p, s));
      CHECK(norms[i] >= base / 6.0 * (1.0 - 1e-9));
      CHECK(norms[i] <= 8.0 * one * base * (1.0 + 1e-9));
    }
    // nested grid cubes with |Q2| = 2|Q1|
    const auto g = grid_family(dom, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& q1 = *g.at(i).grid;
      if (q1.level >= 0) continue;
      const auto s1 = g.support(i);
      const auto s2 = cells_in_cube(dom, parent_cube(dom, q1));
      const double l = std::pow(s1.measure, -1.0 / harmonic_mean(p, s1));
      const double r = 48.0 * one * 2.0 * std::pow(s2.measure, -1.0 / harmonic_mean(p, s2));
      CHECK(l <= r);
    }
  }
}

TEST_CASE("duality on cubes") {
  const auto dom = build_domain(1, 1, 3);
  const auto fam = grid_family(dom, 0);
  const auto ones = ScalarField::constant(dom, 1.0);
  const auto two = make_exponent(dom, {ExponentKind::Constant, 2.0});
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto r = duality_check(ones, ones, fam.support(i), two);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.c_used == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.lhs <= r.rhs);
  }
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto p = seed % 5 == 0 ? two : random_exponent(dom, seed + 7);
    const ScalarField f(dom, random_values(static_cast<std::size_t>(dom.cell_count()), 3 * seed, -1.0, 1.0));
    const ScalarField g(dom, random_values(static_cast<std::size_t>(dom.cell_count()), 3 * seed + 1, -1.0, 1.0));
    const auto& s = fam.support(seed % fam.size());
    const auto r = duality_check(f, g, s, p);
    double avg = 0.0;
    for (std::size_t k = 0; k < s.cells.size(); ++k) avg += std::abs(f[s.cells[k]] * g[s.cells[k]]) * s.weights[k];
    CHECK(r.lhs == doctest::Approx(avg / s.measure).epsilon(1e-13));
    CHECK(r.lhs <= r.rhs * (1.0 + 1e-12));
  }
}
