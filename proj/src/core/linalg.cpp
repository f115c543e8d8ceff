#include "vlspace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vlspace/error.hpp"

namespace vls {

double op_norm(const Mat& m) {
  const auto d = m.rows();
  if (d == 1 && m.cols() == 1) return std::abs(m(0, 0));
  const Mat g = m.transpose() * m;
  if (g.rows() == 2) {
    const double a = g(0, 0), b = g(0, 1), c = g(1, 1);
    const double disc = std::hypot(a - c, 2.0 * b);
    return std::sqrt(std::max(0.0, 0.5 * (a + c + disc)));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Mat clamp_spd(const Mat& m, double floor) {
  const Mat s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  Vec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat spd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  Vec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(ev[i], 0.0));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat spd_inverse(const Mat& m) {
  if (m.rows() == 1) {
    Mat r(1, 1);
    r(0, 0) = 1.0 / m(0, 0);
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  Vec ev = es.eigenvalues().cwiseInverse();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DirectionSet::DirectionSet(int d, std::vector<Vec> half) : d_(d) {
  dirs_ = half;
  for (const auto& v : half) dirs_.push_back(-v);
}

std::size_t default_direction_count(int d) {
  switch (d) {
    case 1: return 2;
    case 2: return 64;
    default: return 512;
  }
}

namespace {

Vec unit(int d, int i) {
  Vec v = Vec::Zero(d);
  v[i] = 1.0;
  return v;
}

std::vector<Vec> circle_half(std::size_t half, double offset) {
  std::vector<Vec> out;
  for (std::size_t j = 0; j < half; ++j) {
    const double t = std::numbers::pi * (static_cast<double>(j) + offset) / static_cast<double>(half);
    Vec v(2);
    v << std::cos(t), std::sin(t);
    out.push_back(v);
  }
  return out;
}

// Spherical Fibonacci points on the open upper hemisphere.
std::vector<Vec> hemisphere(std::size_t count, double z_offset, double phase) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double z = (static_cast<double>(i) + z_offset) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = phase + golden * static_cast<double>(i);
    Vec v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(v);
  }
  return out;
}

}  // namespace

DirectionSet default_directions(int d, std::size_t count) {
  require(d >= 1 && d <= 3, ErrorCode::Config, "direction sets exist for d = 1, 2, 3");
  if (count == 0) count = default_direction_count(d);
  require(count % 2 == 0 && count >= static_cast<std::size_t>(2 * d), ErrorCode::Config,
          "direction count must be even and at least 2d");
  if (d == 1) return DirectionSet(1, {unit(1, 0)});
  if (d == 2) return DirectionSet(2, circle_half(count / 2, 0.0));
  std::vector<Vec> half{unit(3, 0), unit(3, 1), unit(3, 2)};
  for (auto& v : hemisphere(count / 2 - 3, 0.5, 0.0)) half.push_back(v);
  return DirectionSet(3, std::move(half));
}

DirectionSet heldout_directions(int d, std::size_t count) {
  require(d >= 1 && d <= 3, ErrorCode::Config, "direction sets exist for d = 1, 2, 3");
  if (count == 0) count = default_direction_count(d);
  if (d == 1) return DirectionSet(1, {unit(1, 0)});
  if (d == 2) return DirectionSet(2, circle_half(count / 2, 0.5));
  return DirectionSet(3, hemisphere(count / 2, 0.25, 0.7));
}

namespace {

// Symmetric basis E_k of S_d: e_a e_a^T on the diagonal, e_a e_b^T + e_b e_a^T off it.
std::vector<Eigen::MatrixXd> sym_basis(Eigen::Index d) {
  std::vector<Eigen::MatrixXd> basis;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a; b < d; ++b) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
      e(a, b) = 1.0;
      e(b, a) = 1.0;
      basis.push_back(e);
    }
  return basis;
}

// Log-barrier path following for min -log det H s.t. x_i^T H x_i <= 1,
// started from a strictly feasible H. Returns the final barrier gap m/t.
double barrier_polish(const Eigen::MatrixXd& x, Eigen::MatrixXd& h, double start_gap, double gap,
                      int& newton_budget) {
  const Eigen::Index d = x.rows(), m = x.cols();
  const auto basis = sym_basis(d);
  const auto k = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd a(m, k);  // a(i, j) = x_i^T E_j x_i
  for (Eigen::Index j = 0; j < k; ++j)
    a.col(j) = (x.array() * (basis[static_cast<std::size_t>(j)] * x).array()).colwise().sum().transpose();

  auto to_vec = [&](const Eigen::MatrixXd& hm) {
    Eigen::VectorXd v(k);
    Eigen::Index j = 0;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = r; c < d; ++c) v[j++] = hm(r, c);
    return v;
  };
  auto to_mat = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd hm(d, d);
    Eigen::Index j = 0;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = r; c < d; ++c) hm(r, c) = hm(c, r) = v[j++];
    return hm;
  };
  // Objective t (-log det H) - sum log(1 - a h); +inf outside the domain.
  auto objective = [&](const Eigen::VectorXd& v, double t) -> double {
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(m) - a * v;
    if (g.minCoeff() <= 0.0) return INFINITY;
    Eigen::LLT<Eigen::MatrixXd> llt(to_mat(v));
    if (llt.info() != Eigen::Success) return INFINITY;
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -t * logdet - g.array().log().sum();
  };

  Eigen::VectorXd v = to_vec(h);
  const double md = static_cast<double>(m);
  // Start on the part of the path matching the warm start's accuracy.
  double t = md / std::clamp(start_gap, gap, 1.0);
  while (true) {
    // Loose centring until the last stage.
    const double centred = md / t <= gap ? 1e-14 : 1e-6;
    for (int inner = 0; inner < 100; ++inner) {
      if (--newton_budget < 0) return md / t;
      const Eigen::MatrixXd hinv = to_mat(v).inverse();
      const Eigen::VectorXd g = Eigen::VectorXd::Ones(m) - a * v;
      const Eigen::VectorXd ginv = g.cwiseInverse();
      Eigen::VectorXd grad = a.transpose() * ginv;
      Eigen::MatrixXd hess = a.transpose() * ginv.cwiseAbs2().asDiagonal() * a;
      for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::MatrixXd pi = hinv * basis[static_cast<std::size_t>(i)];
        grad[i] -= t * pi.trace();
        for (Eigen::Index j = 0; j < k; ++j)
          hess(i, j) += t * (pi * hinv * basis[static_cast<std::size_t>(j)]).trace();
      }
      const Eigen::VectorXd step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!(decrement > centred)) break;
      const double f0 = objective(v, t);
      double s = 1.0;
      while (s > 1e-20 && objective(v + s * step, t) > f0 - 0.25 * s * decrement) s *= 0.5;
      if (s <= 1e-20) break;
      v += s * step;
    }
    if (md / t <= gap) break;
    t = std::min(t * 32.0, md / gap);
  }
  h = to_mat(v);
  return md / t;
}

}  // namespace

MveeResult mvee(std::span<const Vec> points, double gap, int max_iterations) {
  require(!points.empty(), ErrorCode::Degenerate, "MVEE of an empty point set");
  const auto d = points[0].size();
  const std::size_t m = points.size();
  Eigen::MatrixXd x(d, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) x.col(static_cast<Eigen::Index>(i)) = points[i];

  Eigen::VectorXd u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  const double dd = static_cast<double>(d);

  auto scatter = [&]() -> Eigen::MatrixXd { return x * u.asDiagonal() * x.transpose(); };
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scatter(), Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    require(top > 0.0 && es.eigenvalues().minCoeff() > 1e-14 * top, ErrorCode::Degenerate,
            "point set does not span R^d");
  }

  // Multiplicative updates with away steps. Exact optimality is often
  // reached here; otherwise the iterate warm-starts a Newton barrier phase.
  MveeResult res;
  Eigen::VectorXd mah(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd h;
  const int warm_iterations = std::min(max_iterations, 50);
  for (int it = 0;; ++it) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(scatter());
    const Eigen::MatrixXd sol = ldlt.solve(x);
    mah = (x.array() * sol.array()).colwise().sum().transpose();

    Eigen::Index j = 0;
    const double mmax = mah.maxCoeff(&j);
    Eigen::Index k = -1;
    double mmin = INFINITY;
    for (Eigen::Index i = 0; i < mah.size(); ++i)
      if (u[i] > 0.0 && mah[i] < mmin) {
        mmin = mah[i];
        k = i;
      }
    res.gap = mmax / dd - 1.0;
    res.iterations = it;
    if (res.gap <= gap || it >= warm_iterations) {
      // H = X^{-1} / max_i M_i puts every point inside the ellipsoid.
      h = ldlt.solve(Eigen::MatrixXd::Identity(d, d)) / mmax;
      break;
    }
    if (mmax / dd - 1.0 >= 1.0 - mmin / dd || k < 0) {
      const double step = (mmax - dd) / (dd * (mmax - 1.0));
      u *= (1.0 - step);
      u[j] += step;
    } else {
      double step = u[k] / (1.0 - u[k]);
      if (mmin > 1.0) step = std::min(step, (dd - mmin) / (dd * (mmin - 1.0)));
      u *= (1.0 + step);
      u[k] -= step;
      if (u[k] < 1e-300) u[k] = 0.0;
    }
  }

  if (res.gap > gap) {
    // Pull strictly inside before the barrier phase.
    h /= 1.0 + 1e-3;
    int budget = max_iterations - res.iterations;
    res.gap = barrier_polish(x, h, res.gap, gap, budget);
    res.iterations = max_iterations - std::max(budget, 0);
    if (res.gap > gap) throw Error(ErrorCode::NoConvergence, "MVEE iteration did not reach the duality gap");
    const double worst = (x.array() * (h * x).array()).colwise().sum().maxCoeff();
    h /= worst;
  }
  res.root = spd_sqrt(Mat(h));
  return res;
}

}  // namespace vls
