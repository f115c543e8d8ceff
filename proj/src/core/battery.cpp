#include "vlspace/battery.hpp"

#include <cmath>

#include "vlspace/error.hpp"
#include "vlspace/rng.hpp"

namespace vls {

namespace {

constexpr std::uint64_t kExponentStream = 0x65787001;
constexpr std::uint64_t kWeightStream = 0x77677402;

double radius(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a] * x[a];
  return std::sqrt(s);
}

double coordinate_sum(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += x[a];
  return s;
}

std::string fmt(double v) {
  std::string s = std::to_string(v);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::vector<NamedExponent> gen_exponent_battery(const LatticeDomain& domain, const BatteryConfig& config) {
  const std::vector<std::string> fixed = {"constant:1.5", "constant:2",   "constant:3",  "twostep:2,4",
                                          "twostep:1.5,3", "lh:2,1",      "lh:1.5,0.5",  "lh:3,2"};
  std::vector<NamedExponent> out;
  for (std::size_t i = 0; i < config.exponent_count; ++i) {
    std::string spec;
    if (i < fixed.size()) {
      spec = fixed[i];
    } else {
      auto g = stream_rng(config.seed, kExponentStream, i);
      const double c = uniform(g, 1.2, 4.0);
      const double b = uniform(g, -0.5 * (c - 1.1), 2.0);
      spec = "lh:" + fmt(c) + "," + fmt(b);
    }
    out.push_back({spec, make_exponent(domain, parse_exponent_spec(spec))});
  }
  return out;
}

Mat rotation(int d, double theta) {
  Mat r = Mat::Identity(d, d);
  if (d >= 2) {
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
  }
  if (d == 3) {
    Mat s = Mat::Identity(3, 3);
    s(1, 1) = std::cos(theta / 2);
    s(1, 2) = -std::sin(theta / 2);
    s(2, 1) = std::sin(theta / 2);
    s(2, 2) = std::cos(theta / 2);
    r = s * r;
  }
  return r;
}

MatrixWeightField rotated_power_weight(const LatticeDomain& domain, int d, double a, double b) {
  const int n = domain.dim();
  std::vector<Mat> ms(static_cast<std::size_t>(domain.cell_count()));
  for (Index c = 0; c < domain.cell_count(); ++c) {
    const Point x = domain.cell_center(c);
    const double r = radius(x, n);
    Mat m(d, d);
    if (d == 1) {
      m(0, 0) = std::pow(r, a - b);
    } else {
      Mat diag = Mat::Identity(d, d);
      diag(0, 0) = std::pow(r, a);
      diag(1, 1) = std::pow(r, -b);
      const Mat rot = rotation(d, coordinate_sum(x, n));
      m = rot * diag * rot.transpose();
    }
    ms[static_cast<std::size_t>(c)] = m;
  }
  return MatrixWeightField(domain, std::move(ms));
}

std::vector<NamedWeight> gen_weight_battery(const LatticeDomain& domain, int d, const BatteryConfig& config) {
  require(d >= 1 && d <= 3, ErrorCode::Config, "weights need d in {1,2,3}");
  const int n = domain.dim();
  std::vector<NamedWeight> out;
  auto push = [&](std::string name, MatrixWeightField w) {
    if (out.size() < config.weight_count) out.push_back({std::move(name), std::move(w)});
  };

  push("identity", MatrixWeightField::identity(domain, d));
  {
    Mat m = Mat::Identity(d, d) * 0.5;
    m(0, 0) = 2.0;
    const Mat rot = rotation(d, 0.6);
    std::vector<Mat> ms(static_cast<std::size_t>(domain.cell_count()), rot * m * rot.transpose());
    push("constant-spd", MatrixWeightField(domain, std::move(ms)));
  }
  const double powers[] = {0.0, 0.125, 0.25};
  for (double a : powers)
    for (double b : powers) {
      if (a == 0.0 && b == 0.0) continue;
      push("rotated-power:" + fmt(a) + "," + fmt(b), rotated_power_weight(domain, d, a, b));
    }

  // Smooth random fields: eigenvalues exp(s_i(x)) with |s_i| <= 1.5 so the
  // condition number stays below e^3 ~ 20, rotated by a smooth angle.
  for (std::size_t k = 0; out.size() < config.weight_count; ++k) {
    auto g = stream_rng(config.seed, kWeightStream, k);
    double amp[3], freq[3][3], phase[3];
    for (int i = 0; i < 3; ++i) {
      amp[i] = uniform(g, 0.3, 1.5);
      phase[i] = uniform(g, 0.0, 6.283185307179586);
      for (int a = 0; a < 3; ++a) freq[i][a] = uniform(g, -2.0, 2.0);
    }
    const double spin = uniform(g, -2.0, 2.0);
    std::vector<Mat> ms(static_cast<std::size_t>(domain.cell_count()));
    for (Index c = 0; c < domain.cell_count(); ++c) {
      const Point x = domain.cell_center(c);
      Mat diag = Mat::Identity(d, d);
      for (int i = 0; i < d; ++i) {
        double arg = phase[i];
        for (int a = 0; a < n; ++a) arg += freq[i][a] * x[a];
        diag(i, i) = std::exp(amp[i] * std::sin(arg));
      }
      const Mat rot = rotation(d, spin * coordinate_sum(x, n));
      ms[static_cast<std::size_t>(c)] = rot * diag * rot.transpose();
    }
    push("smooth-random:" + std::to_string(k), MatrixWeightField(domain, std::move(ms)));
  }
  return out;
}

}  // namespace vls
