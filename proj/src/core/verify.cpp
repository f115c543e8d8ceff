#include "vlspace/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "vlspace/error.hpp"
#include "vlspace/maximal.hpp"
#include "vlspace/rng.hpp"
#include "vlspace/sparse.hpp"
#include "vlspace/varnorm.hpp"
#include "vlspace/weights.hpp"

namespace vls {

namespace {

struct CheckInfo {
  const char* id;
  const char* lemma;
  const char* quote;
  bool hard;
};

const CheckInfo kChecks[] = {
    {"norm-modular", "modular-norm bounds",
     "rho(f)^(1/p+) <= ||f|| <= rho(f)^(1/p-) if ||f|| > 1, reversed if ||f|| <= 1; rho(f/||f||) = 1", true},
    {"holder", "Holder inequality with K = 2", "int |f g| <= 2 ||f||_p ||g||_p'", true},
    {"char-norm", "characteristic-function bounds",
     "(1/6) |Q|^(1/p_Q) <= ||1_Q||_p <= 4 K [1] |Q|^(1/p_Q), K = 2", true},
    {"cube-comparison", "nested cube comparison",
     "Q1 in Q2, |Q2| <= C |Q1|  =>  |Q1|^(-1/p_Q1) <= 24 K [1] C |Q2|^(-1/p_Q2)", true},
    {"one-constant", "[1] bounded by the Diening constant", "[1]_A_p <= 8 C_D(1/p)", true},
    {"opnorm-equivalence", "operator norm vs columns", "(1/d) sum |V e_i| <= |V|_op <= sum |V e_i|", true},
    {"uv-vu", "symmetric product norms", "|U V|_op = |V U|_op for symmetric U, V", true},
    {"ellipsoid-sandwich", "reducing-operator sandwich",
     "N(u) <= |A_Q u| <= sqrt(d) N(u), relaxed by (1 + 0.05) on held-out directions", true},
    {"scalarization", "scalarised weights", "[|W u|]_A_p <= 4 [W]_A_p", true},
    {"reduced-equivalence", "reducing-operator characterisation",
     "[W]^R = sup_Q |A_Q Abar_Q|_op is comparable to [W]_A_p within 16 d^2", true},
    {"symmetry", "duality symmetry", "[W]^R for (W, p) equals [W^-1]^R for (W^-1, p')", true},
    {"reverse-holder", "reverse Holder probe",
     "exists r > 1: |Q|^(-1/(r p_Q)) ||w 1_Q||_(r p) <= C |Q|^(-1/p_Q) ||w 1_Q||_p", true},
    {"one-third", "one-third trick", "every cube Q lies in a shifted dyadic cube Q_t with l(Q_t) <= 6 l(Q)", true},
    {"finite-sum", "finite sum over shifted grids",
     "M'_all f <= 6^(2n) 24 K [1] sqrt(d) sum_t M'_(D^t) f", true},
    {"monotone", "monotone convergence", "f_k = f 1_{|f| <= k} increasing  =>  M' f_k increases to M' f", true},
    {"cz-decomposition", "stopping-time decomposition",
     "Omega_lambda = union Q_j exactly; lambda < avg_Qj |A_Qj W^-1 f| <= 24 4^n K [1] sqrt(d) lambda", true},
    {"duality", "averaging duality", "avg_Q |f g| <= 2 [1]_Q A_(p,Q)(f) A_(p',Q)(g)", true},
    {"norm-maximal-finite", "norm maximal function finiteness", "|f(x)| <= M_p f(x) < infinity", true},
    {"mprime-domination", "M' dominated by the norm maximal function",
     "M' f(x) <= 4 K [1] d [W]^R (1 + 0.05) M_p |f|(x)", true},
    {"uniform-bound", "uniform reducing-operator bound",
     "sup_Q A_(u',Q)(|W^-1 A_Q|_op) < infinity with u' = r p'", true},
    {"aux-equivalence", "auxiliary maximal operator equivalence",
     "M'' <= d (1.05)^2 M' and M' <= d (1.05)^2 [W]^R M''", true},
    {"mprime-norm", "M' operator norm", "||M' f||_p / ||f||_p finite over the test battery", true},
    {"christ-goldberg-convex", "Christ-Goldberg vs convex maximal",
     "|W M^K K(W^-1 f)| <= M_W f <= d (1 + 0.05) |W M^K K(W^-1 f)|", true},
    {"sparse-operator", "convex-body sparse operator",
     "|| |W A_S K(f)| ||_p / || |W f| ||_p finite; single-cube family reproduces the Aumann average", true},
    {"riesz-domination", "sparse domination of the Riesz transform",
     "T f(x) in C A_S K(f)(x); C_emp observed", false},
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string cube_name(const FamilyCube& q) {
  std::ostringstream os;
  if (q.grid) {
    os << "t" << int(q.grid->shift) << ":k" << q.grid->level << ":m";
    for (int a = 0; a < kMaxDim; ++a) os << (a ? "," : "") << q.grid->corner[static_cast<std::size_t>(a)];
  } else {
    os << "box";
    for (int a = 0; a < kMaxDim; ++a)
      os << (a ? "," : ":") << q.box.lo[static_cast<std::size_t>(a)] << ".." << q.box.hi[static_cast<std::size_t>(a)];
  }
  return os.str();
}

// Accumulates cases: margin is the relative slack, negative when violated.
class Tally {
 public:
  explicit Tally(CheckRecord& r) : r_(r) {}

  void add(bool ok, double margin, const std::string& witness) {
    ++r_.n_cases;
    if (ok) ++r_.n_pass;
    if (std::isnan(margin)) margin = -INFINITY;
    const bool first_failure = !ok && !failed_;
    if (first_failure || (ok == !failed_ && margin < r_.worst_margin)) {
      r_.worst_margin = margin;
      r_.witness = witness;
    }
    if (!ok) failed_ = true;
  }
  // Pass iff margin >= -tol.
  void margin(double m, double tol, const std::string& witness) { add(m >= -tol, m, witness); }
  void error(const std::string& witness, const std::exception& e) {
    add(false, -INFINITY, witness + ": " + e.what());
  }

 private:
  CheckRecord& r_;
  bool failed_ = false;
};

double slack_upper(double value, double bound) { return bound > 0.0 ? 1.0 - value / bound : -INFINITY; }
double slack_lower(double value, double bound) { return value > 0.0 ? 1.0 - bound / value : (bound > 0.0 ? -INFINITY : 0.0); }

// Shared battery state with per-(weight, exponent, grid) reducing-operator caches.
class Context {
 public:
  explicit Context(const SuiteConfig& cfg) : cfg_(cfg), dom_(suite_domain(cfg)) {
    BatteryConfig bc;
    bc.seed = cfg.seed;
    bc.exponent_count = cfg.exponent_count;
    bc.weight_count = cfg.weight_count;
    exps_ = gen_exponent_battery(dom_, bc);
    weights_ = gen_weight_battery(dom_, cfg.d, bc);
    for (unsigned t = 0; t < (1u << dom_.dim()); ++t) grids_.push_back(grid_family(dom_, static_cast<std::uint8_t>(t)));
  }

  const SuiteConfig& config() const { return cfg_; }
  const LatticeDomain& domain() const { return dom_; }
  const std::vector<NamedExponent>& exponents() const { return exps_; }
  const std::vector<NamedWeight>& weights() const { return weights_; }
  const CubeFamily& grid(unsigned t) const { return grids_[t]; }
  unsigned grid_count() const { return static_cast<unsigned>(grids_.size()); }

  // Shifted grids other than D^0 only feed the CZ decomposition, which
  // needs the primal operators alone.
  const ReducingCache& cache(std::size_t wi, std::size_t pi, unsigned t = 0) {
    auto key = std::make_tuple(wi, pi, t);
    auto it = caches_.find(key);
    if (it == caches_.end())
      it = caches_
               .emplace(key, std::make_unique<ReducingCache>(weights_[wi].field, exps_[pi].field, grids_[t],
                                                             cfg_.direction_count, t == 0))
               .first;
    return *it->second;
  }

  const CubeFamily& all_cubes() {
    if (!all_) all_ = std::make_unique<CubeFamily>(lattice_family(dom_, 1, dom_.cells_per_axis(), false));
    return *all_;
  }

  // [1] over every lattice cube in the box for n = 1, over the union of
  // the shifted grids otherwise.
  double one(std::size_t pi) {
    auto it = one_.find(pi);
    if (it == one_.end()) {
      double v = 0.0;
      if (dom_.dim() == 1) {
        v = one_constant(exps_[pi].field, all_cubes()).value;
      } else {
        for (const CubeFamily& g : grids_) v = std::max(v, one_constant(exps_[pi].field, g).value);
      }
      it = one_.emplace(pi, v).first;
    }
    return it->second;
  }

  double reduced(std::size_t wi, std::size_t pi) {
    auto key = std::make_pair(wi, pi);
    auto it = reduced_.find(key);
    if (it == reduced_.end()) it = reduced_.emplace(key, reduced_ap_constant(cache(wi, pi)).value).first;
    return it->second;
  }

  const std::vector<VectorField>& test_functions(std::size_t wi) {
    auto it = tests_.find(wi);
    if (it == tests_.end()) it = tests_.emplace(wi, test_function_battery(dom_, weights_[wi].field, cfg_.seed)).first;
    return it->second;
  }

  // Weight x exponent pairs: every pair, or the core exponents only.
  std::vector<std::pair<std::size_t, std::size_t>> pairs(bool core) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t wi = 0; wi < weights_.size(); ++wi)
      for (std::size_t pi = 0; pi < exps_.size(); ++pi) {
        const std::string& name = exps_[pi].name;
        if (core && name != "constant:2" && name != "lh:2,1" && name != "twostep:1.5,3") continue;
        out.emplace_back(wi, pi);
      }
    return out;
  }

  std::string pair_name(std::size_t wi, std::size_t pi) const {
    return weights_[wi].name + "/" + exps_[pi].name;
  }

 private:
  SuiteConfig cfg_;
  LatticeDomain dom_;
  std::vector<NamedExponent> exps_;
  std::vector<NamedWeight> weights_;
  std::vector<CubeFamily> grids_;
  std::map<std::tuple<std::size_t, std::size_t, unsigned>, std::unique_ptr<ReducingCache>> caches_;
  std::unique_ptr<CubeFamily> all_;
  std::map<std::size_t, double> one_;
  std::map<std::pair<std::size_t, std::size_t>, double> reduced_;
  std::map<std::size_t, std::vector<VectorField>> tests_;
};

// Random scalar field with magnitudes spread over several decades and a
// random fraction of zero cells.
std::vector<double> random_values(std::mt19937_64& g, std::size_t cells) {
  std::vector<double> v(cells);
  const double scale = std::pow(10.0, uniform(g, -2.0, 2.0));
  const double zero_fraction = uniform(g, 0.0, 0.5);
  for (auto& x : v) {
    const double mag = scale * std::exp(uniform(g, -2.0, 2.0));
    x = uniform(g, 0.0, 1.0) < zero_fraction ? 0.0 : ((g() >> 63) ? mag : -mag);
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = scale;
  return v;
}

// Random exponent: a battery entry or a fresh sampled field in (1.05, 6).
ExponentField random_exponent(std::mt19937_64& g, Context& ctx) {
  if (uniform(g, 0.0, 1.0) < 0.5) {
    const auto& e = ctx.exponents();
    return e[static_cast<std::size_t>(g() % e.size())].field;
  }
  const auto cells = static_cast<std::size_t>(ctx.domain().cell_count());
  std::vector<double> p(cells);
  const double lo = uniform(g, 1.05, 3.0), hi = lo + uniform(g, 0.0, 3.0);
  for (auto& x : p) x = uniform(g, lo, hi);
  return ExponentField(ctx.domain(), std::move(p), lo);
}

using CheckFn = std::function<void(Context&, CheckRecord&, Tally&)>;

std::uint64_t check_stream(const std::string& id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

void check_norm_modular(Context& ctx, CheckRecord& rec, Tally& t) {
  const auto cells = static_cast<std::size_t>(ctx.domain().cell_count());
  for (std::size_t k = 0; k < 2 * ctx.config().random_cases; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    const std::string w = "case " + std::to_string(k);
    try {
      const ScalarField f(ctx.domain(), random_values(g, cells));
      const ExponentField p = random_exponent(g, ctx);
      NormSolveTrace trace;
      const double norm = luxemburg_norm(f, p, &trace);
      const double rho = modular(f, p);
      const double a = std::pow(rho, 1.0 / p.p_plus()), b = std::pow(rho, 1.0 / p.p_minus());
      const double lo = norm > 1.0 ? a : b, hi = norm > 1.0 ? b : a;
      const double m = std::min(slack_lower(norm, lo), slack_upper(norm, hi));
      t.add(m >= -1e-9 && trace.residual <= 1e-10, std::min(m, 1e-10 - trace.residual), w);
    } catch (const std::exception& e) {
      t.error(w, e);
    }
  }
}

void check_holder(Context& ctx, CheckRecord& rec, Tally& t) {
  const auto cells = static_cast<std::size_t>(ctx.domain().cell_count());
  for (std::size_t k = 0; k < 5 * ctx.config().random_cases / 2; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    const std::string w = "case " + std::to_string(k);
    try {
      const ScalarField f(ctx.domain(), random_values(g, cells));
      const ScalarField h(ctx.domain(), random_values(g, cells));
      const ExponentField p = random_exponent(g, ctx);
      const HolderPair r = holder_pairing(f, h, p);
      t.margin(slack_upper(r.lhs, r.rhs), 1e-12, w);
    } catch (const std::exception& e) {
      t.error(w, e);
    }
  }
}

void check_char_norm(Context& ctx, CheckRecord&, Tally& t) {
  for (std::size_t pi = 0; pi < ctx.exponents().size(); ++pi) {
    const ExponentField& p = ctx.exponents()[pi].field;
    const double one = ctx.one(pi);
    for (unsigned s = 0; s < ctx.grid_count(); ++s) {
      const CubeFamily& fam = ctx.grid(s);
      const std::vector<double> norms = char_norms(p, fam);
      for (std::size_t i = 0; i < fam.size(); ++i) {
        const CubeSupport& q = fam.support(i);
        const double base = std::pow(q.measure, 1.0 / harmonic_mean(p, q));
        const double m = std::min(slack_lower(norms[i], base / 6.0), slack_upper(norms[i], 4.0 * 2.0 * one * base));
        t.margin(m, 1e-9, ctx.exponents()[pi].name + " " + cube_name(fam.at(i)));
      }
    }
  }
}

void check_cube_comparison(Context& ctx, CheckRecord&, Tally& t) {
  const LatticeDomain& dom = ctx.domain();
  for (std::size_t pi = 0; pi < ctx.exponents().size(); ++pi) {
    const ExponentField& p = ctx.exponents()[pi].field;
    const double one = ctx.one(pi);
    for (unsigned s = 0; s < ctx.grid_count(); ++s) {
      const CubeFamily& fam = ctx.grid(s);
      for (std::size_t i = 0; i < fam.size(); ++i) {
        const CubeSupport& q1 = fam.support(i);
        const double lhs = std::pow(q1.measure, -1.0 / harmonic_mean(p, q1));
        Cube up = *fam.at(i).grid;
        for (int step = 0; step < 3; ++step) {
          try {
            up = parent_cube(dom, up);
          } catch (const Error&) {
            break;
          }
          const CubeSupport q2 = cells_in_cube(dom, up);
          const double c = q2.measure / q1.measure;
          const double rhs = 24.0 * 2.0 * one * c * std::pow(q2.measure, -1.0 / harmonic_mean(p, q2));
          t.margin(slack_upper(lhs, rhs), 1e-9, ctx.exponents()[pi].name + " " + cube_name(fam.at(i)));
        }
      }
    }
  }
}

void check_one_constant(Context& ctx, CheckRecord& rec, Tally& t) {
  for (std::size_t pi = 0; pi < ctx.exponents().size(); ++pi) {
    const ExponentField& p = ctx.exponents()[pi].field;
    std::vector<double> r(p.values().size());
    for (std::size_t c = 0; c < r.size(); ++c) r[c] = 1.0 / p.values()[c];
    const double cd = diening_constant(ctx.domain(), r);
    const double one = ctx.one(pi);
    rec.observations["max_one_constant"] = std::max(rec.observations["max_one_constant"], one);
    t.margin(slack_upper(one, 8.0 * cd), 1e-9, ctx.exponents()[pi].name);
  }
}

Mat random_matrix(std::mt19937_64& g, int d, bool symmetric) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = uniform(g, -2.0, 2.0);
  if (symmetric) m = 0.5 * (m + m.transpose()).eval();
  return m;
}

void check_opnorm(Context& ctx, CheckRecord& rec, Tally& t) {
  const int d = ctx.config().d;
  for (std::size_t k = 0; k < ctx.config().random_cases; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    const Mat v = random_matrix(g, d, k % 2 == 1);
    double cols = 0.0;
    for (int i = 0; i < d; ++i) cols += v.col(i).norm();
    const double op = op_norm(v);
    const double m = std::min(slack_lower(op, cols / d), slack_upper(op, cols));
    t.margin(m, 1e-12, "case " + std::to_string(k));
  }
}

void check_uv(Context& ctx, CheckRecord& rec, Tally& t) {
  const int d = ctx.config().d;
  for (std::size_t k = 0; k < 1000; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    const Mat u = random_matrix(g, d, true), v = random_matrix(g, d, true);
    const double a = op_norm(u * v), b = op_norm(v * u);
    const double rel = std::abs(a - b) / std::max({a, b, 1e-300});
    t.margin(1.0 - rel / 1e-10, 0.0, "case " + std::to_string(k));
  }
}

void check_sandwich(Context& ctx, CheckRecord&, Tally& t) {
  const double d = ctx.config().d;
  for (auto [wi, pi] : ctx.pairs(false)) {
    try {
      const ReducingCache& c = ctx.cache(wi, pi);
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string w = ctx.pair_name(wi, pi) + " " + cube_name(c.family().at(i));
        for (const ReducingOperator* r : {&c.primal(i), &c.dual(i)}) {
          if (d == 1) {
            t.margin(1.0 - std::max(std::abs(r->c_lo - 1.0), std::abs(r->c_hi - 1.0)) / 1e-9, 0.0, w);
            continue;
          }
          const double m = std::min({slack_lower(r->c_lo, 1.0 - 0.05), slack_upper(r->c_hi, std::sqrt(d) * 1.05),
                                      slack_upper(r->c_hi / r->c_lo, std::sqrt(d) * 1.05 * 1.05)});
          t.margin(m, 0.0, w);
        }
      }
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_scalarization(Context& ctx, CheckRecord& rec, Tally& t) {
  const int d = ctx.config().d;
  const DirectionSet dirs = default_directions(d, ctx.config().direction_count);
  for (auto [wi, pi] : ctx.pairs(true)) {
    try {
      const ScalarizationReport r =
          scalarization_check(ctx.weights()[wi].field, ctx.exponents()[pi].field, ctx.grid(0), dirs);
      rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], r.ratio);
      t.margin(slack_upper(r.ratio, 4.0 * (1.0 + 1e-6)), 0.0, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_reduced(Context& ctx, CheckRecord& rec, Tally& t) {
  const double d = ctx.config().d;
  const double env = 16.0 * d * d;
  rec.observations["min_ratio"] = INFINITY;
  for (auto [wi, pi] : ctx.pairs(false)) {
    try {
      const double m = matrix_ap_constant(ctx.weights()[wi].field, ctx.exponents()[pi].field, ctx.grid(0)).value;
      const double r = ctx.reduced(wi, pi);
      const double ratio = r / m;
      rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], ratio);
      rec.observations["min_ratio"] = std::min(rec.observations["min_ratio"], ratio);
      double margin = std::min(slack_lower(ratio, 1.0 / env), slack_upper(ratio, env));
      if (d == 1) margin = std::min(margin, 1.0 - std::abs(ratio - 1.0) / 1e-6);
      t.margin(margin, 0.0, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_symmetry(Context& ctx, CheckRecord&, Tally& t) {
  const int d = ctx.config().d;
  for (auto [wi, pi] : ctx.pairs(true)) {
    try {
      const MatrixWeightField inv = ctx.weights()[wi].field.inverted();
      const double back =
          reduced_ap_constant(ReducingCache(inv, conjugate(ctx.exponents()[pi].field), ctx.grid(0),
                                            ctx.config().direction_count))
              .value;
      const double ratio = back / ctx.reduced(wi, pi);
      const double m = d == 1 ? 1.0 - std::abs(ratio - 1.0) / 1e-6
                              : std::min(slack_lower(ratio, 0.8), slack_upper(ratio, 1.25));
      t.margin(m, 0.0, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_reverse_holder(Context& ctx, CheckRecord& rec, Tally& t) {
  const std::vector<double> grid = default_r_grid();
  rec.observations["min_largest_r"] = INFINITY;
  for (auto [wi, pi] : ctx.pairs(true)) {
    const MatrixWeightField& w = ctx.weights()[wi].field;
    const ScalarField s = w.scalarize(Vec::Unit(w.dim(), 0));
    const ReverseHolderReport r = reverse_holder_probe(s, ctx.exponents()[pi].field, ctx.grid(0), grid, 2.0);
    const double best = r.largest_passing.value_or(1.0);
    rec.observations["min_largest_r"] = std::min(rec.observations["min_largest_r"], best);
    t.add(r.largest_passing.has_value(), best - 1.0, ctx.pair_name(wi, pi));
  }
}

void check_one_third(Context& ctx, CheckRecord& rec, Tally& t) {
  const LatticeDomain& dom = ctx.domain();
  const int n = dom.dim();
  const double box = static_cast<double>(dom.half_width());
  std::size_t in_box = 0;
  for (std::size_t k = 0; k < 1000; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    RealCube q;
    q.side = std::exp(uniform(g, std::log(dom.cell_side() / 3.0), std::log(box / 2.0)));
    for (int a = 0; a < n; ++a) q.lo[static_cast<std::size_t>(a)] = uniform(g, -box, box - q.side);
    const std::string w = "case " + std::to_string(k);
    auto check = [&](const ShiftedCover& c) {
      const Point lo = cube_lower(n, c.cube);
      const double side = c.cube.side();
      double inside = INFINITY;
      for (int a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a);
        inside = std::min({inside, q.lo[i] - lo[i], lo[i] + side - (q.lo[i] + q.side)});
      }
      t.add(inside >= -1e-12 * side && side <= 6.0 * q.side * (1.0 + 1e-12),
            std::min(inside / side, 1.0 - side / (6.0 * q.side)), w);
    };
    const auto free = one_third_cover_free(n, q, dom.min_level() - 4);
    if (!free) {
      t.add(false, -INFINITY, w + ": no cover");
      continue;
    }
    check(*free);
    try {
      check(one_third_cover(dom, q));
      ++in_box;
    } catch (const Error&) {
    }
  }
  rec.observations["covered_inside_box"] = static_cast<double>(in_box);
}

void check_finite_sum(Context& ctx, CheckRecord& rec, Tally& t) {
  // The all-cubes family is large; a few representative pairs suffice.
  const auto pairs = ctx.pairs(true);
  for (std::size_t k = 0; k < pairs.size(); k += std::max<std::size_t>(1, pairs.size() / 4)) {
    auto [wi, pi] = pairs[k];
    try {
      const auto& fs = ctx.test_functions(wi);
      const VectorField& f = fs[fs.size() - 3];  // a random-sign field
      const FiniteSumReport r = finite_sum_bound_check(f, ctx.weights()[wi].field, ctx.exponents()[pi].field,
                                                       ctx.config().direction_count);
      rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], r.max_ratio);
      t.margin(slack_upper(r.max_ratio, r.constant), 0.0, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_monotone(Context& ctx, CheckRecord& rec, Tally& t) {
  const auto cells = static_cast<std::size_t>(ctx.domain().cell_count());
  const int d = ctx.config().d;
  for (auto [wi, pi] : ctx.pairs(true)) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), wi * 1000 + pi);
    std::vector<double> v(cells * static_cast<std::size_t>(d));
    for (auto& x : v) x = std::exp(3.0 * uniform(g, -1.0, 1.0)) * ((g() >> 63) ? 1.0 : -1.0);
    const VectorField f(ctx.domain(), d, v);
    const ScalarField mag = f.magnitude();
    std::vector<double> levels(mag.values().begin(), mag.values().end());
    std::sort(levels.begin(), levels.end());
    const MatrixWeightField& w = ctx.weights()[wi].field;
    try {
      const ReducingCache& c = ctx.cache(wi, pi);
      const ScalarField full = aux_prime(f, w, c).values;
      std::vector<double> prev(cells, 0.0);
      double worst = INFINITY;
      for (int q = 1; q <= 8; ++q) {
        const double k = levels[std::min(cells - 1, q * cells / 8 - (q == 8 ? 1 : 0))];
        std::vector<double> fk(v);
        for (std::size_t c2 = 0; c2 < cells; ++c2)
          if (mag.values()[c2] > k)
            for (int i = 0; i < d; ++i) fk[c2 * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = 0.0;
        const ScalarField mk = aux_prime(VectorField(ctx.domain(), d, fk), w, c).values;
        for (std::size_t c2 = 0; c2 < cells; ++c2) {
          const double scale = std::max(full.values()[c2], 1e-300);
          worst = std::min(worst, (mk.values()[c2] - prev[c2]) / scale);
          if (q == 8) worst = std::min(worst, 1.0 - std::abs(mk.values()[c2] - full.values()[c2]) / scale / 1e-12);
        }
        prev.assign(mk.values().begin(), mk.values().end());
      }
      t.margin(worst, 1e-12, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_cz(Context& ctx, CheckRecord& rec, Tally& t) {
  // The hand-checkable example: f = 1_[0,1) on a box of half-width 2, lambda = 1/2.
  try {
    const LatticeDomain dom = build_domain(1, 2, 2);
    const ExponentField p = make_exponent(dom, parse_exponent_spec("constant:2"));
    std::vector<double> v(static_cast<std::size_t>(dom.cell_count()));
    for (Index c = 0; c < dom.cell_count(); ++c) v[static_cast<std::size_t>(c)] = dom.cell_center(c)[0] >= 0.0 && dom.cell_center(c)[0] < 1.0;
    const MatrixWeightField w = MatrixWeightField::identity(dom, 1);
    const CubeFamily fam = grid_family(dom, 0);
    const ReducingCache cache(w, p, fam);
    const CZDecomposition cz = cz_decompose(VectorField(dom, 1, v), w, cache, 0.5, one_constant(p, fam).value);
    const bool ok = cz.stops.size() == 1 && cz.root_hits.empty() && fam.at(cz.stops[0]).grid->level == 0 &&
                    fam.at(cz.stops[0]).grid->corner[0] == 0 && cz.cover_exact;
    t.add(ok, ok ? 0.0 : -1.0, "example f = 1_[0,1), lambda = 1/2");
  } catch (const std::exception& e) {
    t.error("example", e);
  }

  // Every pair on D^0 and on one shifted grid, cycling through the shifts.
  std::size_t root_hits = 0;
  const auto pairs = ctx.pairs(true);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [wi, pi] = pairs[k];
    const MatrixWeightField& w = ctx.weights()[wi].field;
    const double one = ctx.one(pi);
    const auto& fs = ctx.test_functions(wi);
    const unsigned shifted = 1 + static_cast<unsigned>(k % (ctx.grid_count() - 1));
    for (unsigned s : {0u, shifted}) {
      try {
        const ReducingCache& cache = ctx.cache(wi, pi, s);
        for (std::size_t fi = 0; fi < fs.size(); fi += 2) {
          const std::vector<double> avg = aux_prime_averages(fs[fi], w, cache);
          for (int k : lambda_ladder(avg)) {
            const CZDecomposition cz = cz_decompose(avg, cache.family(), std::ldexp(1.0, k), one, w.dim());
            root_hits += cz.root_hits.size();
            const std::string wit = ctx.pair_name(wi, pi) + " t" + std::to_string(s) + " f" + std::to_string(fi) +
                                    " k" + std::to_string(k);
            const double m = cz.stops.empty() ? 1.0 : slack_upper(cz.worst_bound_ratio, cz.bound_constant);
            t.add(cz.cover_exact && cz.bound_ok, cz.cover_exact ? m : -INFINITY, wit);
            rec.observations["max_stop_ratio"] = std::max(rec.observations["max_stop_ratio"], cz.worst_bound_ratio);
          }
        }
      } catch (const std::exception& e) {
        t.error(ctx.pair_name(wi, pi), e);
      }
    }
  }
  rec.observations["root_hits"] = static_cast<double>(root_hits);
}

void check_duality(Context& ctx, CheckRecord& rec, Tally& t) {
  const auto cells = static_cast<std::size_t>(ctx.domain().cell_count());
  const CubeFamily& fam = ctx.grid(0);
  for (std::size_t k = 0; k < 5 * ctx.config().random_cases / 2; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    const std::string w = "case " + std::to_string(k);
    try {
      const ScalarField f(ctx.domain(), random_values(g, cells));
      const ScalarField h(ctx.domain(), random_values(g, cells));
      const ExponentField p = random_exponent(g, ctx);
      const CubeSupport& q = fam.support(static_cast<std::size_t>(g() % fam.size()));
      const DualityResult r = duality_check(f, h, q, p);
      if (r.rhs == 0.0 && r.lhs == 0.0) {
        t.add(true, 1.0, w);
        continue;
      }
      t.margin(slack_upper(r.lhs, r.rhs), 1e-12, w);
    } catch (const std::exception& e) {
      t.error(w, e);
    }
  }
}

void check_norm_maximal(Context& ctx, CheckRecord&, Tally& t) {
  const CubeFamily& fam = ctx.grid(0);
  for (std::size_t pi = 0; pi < ctx.exponents().size(); ++pi) {
    const auto& fs = ctx.test_functions(0);
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const ScalarField mag = fs[fi].magnitude();
      const MaximalField m = norm_maximal_field(mag, ctx.exponents()[pi].field, fam);
      double worst = INFINITY;
      for (Index c = 0; c < ctx.domain().cell_count(); ++c) {
        const double v = m.values[c];
        if (!std::isfinite(v)) worst = -INFINITY;
        else if (mag[c] > 0.0) worst = std::min(worst, 1.0 - mag[c] / v);
      }
      t.margin(worst, 1e-9, ctx.exponents()[pi].name + " f" + std::to_string(fi));
    }
  }
}

void check_mprime_domination(Context& ctx, CheckRecord& rec, Tally& t) {
  const CubeFamily& fam = ctx.grid(0);
  const double d = ctx.config().d;
  for (auto [wi, pi] : ctx.pairs(true)) {
    try {
      const MatrixWeightField& w = ctx.weights()[wi].field;
      const ExponentField& p = ctx.exponents()[pi].field;
      const double c = 4.0 * 2.0 * ctx.one(pi) * d * ctx.reduced(wi, pi) * 1.05;
      const auto& fs = ctx.test_functions(wi);
      for (std::size_t fi = 0; fi < fs.size(); ++fi) {
        const ScalarField mp = aux_prime(fs[fi], w, ctx.cache(wi, pi)).values;
        const ScalarField mn = norm_maximal_field(fs[fi].magnitude(), p, fam).values;
        double worst = INFINITY, ratio = 0.0;
        for (Index x = 0; x < ctx.domain().cell_count(); ++x) {
          if (mp[x] <= 1e-12) continue;
          ratio = std::max(ratio, mp[x] / mn[x]);
          worst = std::min(worst, slack_upper(mp[x], c * mn[x]));
        }
        rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], ratio);
        t.margin(worst, 0.0, ctx.pair_name(wi, pi) + " f" + std::to_string(fi));
      }
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_uniform_bound(Context& ctx, CheckRecord& rec, Tally& t) {
  for (auto [wi, pi] : ctx.pairs(true)) {
    try {
      const MatrixWeightField& w = ctx.weights()[wi].field;
      const ExponentField& p = ctx.exponents()[pi].field;
      const double r = default_uniform_r(w, p, ctx.grid(0), 2.0);
      const UniformBound u = uniform_bound_check(w, p, ctx.cache(wi, pi), r);
      rec.observations["max_value"] = std::max(rec.observations["max_value"], u.value);
      t.add(std::isfinite(u.value), std::isfinite(u.value) ? 1.0 / (1.0 + u.value) : -INFINITY,
            ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_aux_equivalence(Context& ctx, CheckRecord& rec, Tally& t) {
  const double d = ctx.config().d;
  const double env = d * 1.05 * 1.05;
  for (auto [wi, pi] : ctx.pairs(false)) {
    try {
      const MatrixWeightField& w = ctx.weights()[wi].field;
      const ReducingCache& c = ctx.cache(wi, pi);
      const double wr = ctx.reduced(wi, pi);
      const auto& fs = ctx.test_functions(wi);
      double worst = INFINITY;
      for (const VectorField& f : fs) {
        const ScalarField a = aux_prime(f, w, c).values;
        const ScalarField b = aux_double_prime(f, w, c).values;
        for (Index x = 0; x < ctx.domain().cell_count(); ++x) {
          if (a[x] <= 1e-12 || b[x] <= 1e-12) continue;
          rec.observations["max_dprime_over_prime"] = std::max(rec.observations["max_dprime_over_prime"], b[x] / a[x]);
          rec.observations["max_prime_over_dprime"] = std::max(rec.observations["max_prime_over_dprime"], a[x] / b[x]);
          worst = std::min({worst, slack_upper(b[x], env * a[x]), slack_upper(a[x], env * wr * b[x])});
        }
      }
      t.margin(worst, 0.0, ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_mprime_norm(Context& ctx, CheckRecord& rec, Tally& t) {
  for (auto [wi, pi] : ctx.pairs(true)) {
    try {
      const NormEstimate e = operator_norm_estimate(MaximalOp::AuxPrime, ctx.weights()[wi].field,
                                                    ctx.exponents()[pi].field, ctx.cache(wi, pi),
                                                    ctx.test_functions(wi));
      rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], e.ratio);
      t.add(std::isfinite(e.ratio), std::isfinite(e.ratio) ? 1.0 / (1.0 + e.ratio) : -INFINITY,
            ctx.pair_name(wi, pi));
    } catch (const std::exception& e) {
      t.error(ctx.pair_name(wi, pi), e);
    }
  }
}

void check_christ_goldberg(Context& ctx, CheckRecord& rec, Tally& t) {
  const DirectionSet dirs = default_directions(ctx.config().d, ctx.config().direction_count);
  for (std::size_t wi = 0; wi < ctx.weights().size(); ++wi) {
    const auto& fs = ctx.test_functions(wi);
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const std::string w = ctx.weights()[wi].name + " f" + std::to_string(fi);
      try {
        const EquivalenceReport r = christgoldberg_equivalence_check(fs[fi], ctx.weights()[wi].field, ctx.grid(0), dirs);
        rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], r.upper);
        t.add(r.pass, std::min(slack_lower(r.lower, 1.0 - 1e-12), slack_upper(r.upper, r.envelope)), w);
      } catch (const std::exception& e) {
        t.error(w, e);
      }
    }
  }
}

void check_sparse_operator(Context& ctx, CheckRecord& rec, Tally& t) {
  const int d = ctx.config().d;
  const auto dirs = std::make_shared<const DirectionSet>(default_directions(d, ctx.config().direction_count));
  for (auto [wi, pi] : ctx.pairs(true)) {
    const MatrixWeightField& w = ctx.weights()[wi].field;
    const auto& fs = ctx.test_functions(wi);
    for (std::size_t fi = 0; fi < fs.size(); fi += 2) {
      const std::string wit = ctx.pair_name(wi, pi) + " f" + std::to_string(fi);
      try {
        const SparseFamily s = sparse_from_cz(fs[fi], w, ctx.cache(wi, pi));
        const double ratio = sparse_operator_ratio(fs[fi], w, ctx.exponents()[pi].field, s.cubes, *dirs);
        rec.observations["max_ratio"] = std::max(rec.observations["max_ratio"], ratio);
        auto [g, fresh] = rec.observations.try_emplace("min_gamma", s.gamma);
        if (!fresh) g->second = std::min(g->second, s.gamma);
        // Single-cube family against the Aumann average.
        const ConvexBodyField kf = segment_field(fs[fi], dirs);
        double dev = 0.0;
        if (!s.cubes.empty()) {
          const FamilyCube& q = s.cubes.at(0);
          const CubeFamily one = CubeFamily(ctx.domain(), Provenance::Custom, 0, {q});
          const ConvexBodyField a = convex_body_operator(kf, one);
          const ConvexBody avg = aumann_average(kf, one.support(0));
          for (Index c : one.support(0).members)
            for (std::size_t j = 0; j < dirs->size(); ++j)
              dev = std::max(dev, std::abs(a.at(c)[j] - avg[j]) / std::max(1.0, avg[j]));
        }
        t.add(std::isfinite(ratio) && dev <= 1e-12, std::isfinite(ratio) ? 1.0 - dev / 1e-12 : -INFINITY, wit);
      } catch (const std::exception& e) {
        t.error(wit, e);
      }
    }
  }
}

void check_riesz(Context& ctx, CheckRecord& rec, Tally& t) {
  const LatticeDomain& dom = ctx.domain();
  if (dom.dim() > 2) return;
  const int d = ctx.config().d;
  const auto dirs = std::make_shared<const DirectionSet>(default_directions(d, ctx.config().direction_count));
  const auto cells = static_cast<std::size_t>(dom.cell_count());
  const MatrixWeightField w = MatrixWeightField::identity(dom, d);
  const ExponentField p = make_exponent(dom, parse_exponent_spec("constant:2"));
  const ReducingCache cache(w, p, ctx.grid(0), ctx.config().direction_count);
  std::vector<double> cs;
  std::size_t uncovered = 0;
  const std::size_t count = std::max<std::size_t>(1, ctx.config().random_cases / 4);
  for (std::size_t k = 0; k < count; ++k) {
    auto g = stream_rng(ctx.config().seed, check_stream(rec.id), k);
    std::vector<double> v(cells * static_cast<std::size_t>(d));
    for (auto& x : v) x = uniform(g, -1.0, 1.0);
    const VectorField f(dom, d, v);
    const std::string wit = "case " + std::to_string(k);
    try {
      const SparseFamily s = sparse_from_cz(f, w, cache);
      const DominationReport r = domination_constant(discrete_riesz(f), convex_body_operator(segment_field(f, dirs), s.cubes));
      cs.push_back(r.c_emp);
      uncovered += r.uncovered;
      t.add(std::isfinite(r.c_emp), std::isfinite(r.c_emp) ? 0.0 : -INFINITY, wit);
    } catch (const std::exception& e) {
      t.error(wit, e);
    }
  }
  if (!cs.empty()) {
    std::sort(cs.begin(), cs.end());
    rec.observations["c_emp_min"] = cs.front();
    rec.observations["c_emp_median"] = cs[cs.size() / 2];
    rec.observations["c_emp_max"] = cs.back();
  }
  rec.observations["uncovered_cells"] = static_cast<double>(uncovered);
}

const std::map<std::string, CheckFn>& check_functions() {
  static const std::map<std::string, CheckFn> fns = {
      {"norm-modular", check_norm_modular},
      {"holder", check_holder},
      {"char-norm", check_char_norm},
      {"cube-comparison", check_cube_comparison},
      {"one-constant", check_one_constant},
      {"opnorm-equivalence", check_opnorm},
      {"uv-vu", check_uv},
      {"ellipsoid-sandwich", check_sandwich},
      {"scalarization", check_scalarization},
      {"reduced-equivalence", check_reduced},
      {"symmetry", check_symmetry},
      {"reverse-holder", check_reverse_holder},
      {"one-third", check_one_third},
      {"finite-sum", check_finite_sum},
      {"monotone", check_monotone},
      {"cz-decomposition", check_cz},
      {"duality", check_duality},
      {"norm-maximal-finite", check_norm_maximal},
      {"mprime-domination", check_mprime_domination},
      {"uniform-bound", check_uniform_bound},
      {"aux-equivalence", check_aux_equivalence},
      {"mprime-norm", check_mprime_norm},
      {"christ-goldberg-convex", check_christ_goldberg},
      {"sparse-operator", check_sparse_operator},
      {"riesz-domination", check_riesz},
  };
  return fns;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& c : kChecks) v.emplace_back(c.id);
    return v;
  }();
  return ids;
}

LatticeDomain suite_domain(const SuiteConfig& config) {
  require(config.cells >= 4 && (config.cells & (config.cells - 1)) == 0, ErrorCode::Config,
          "cells per axis must be a power of two >= 4");
  require(config.cells >= 2 * config.half_width, ErrorCode::Config, "cells per axis must be at least 2L");
  int j = 0;
  while ((2 * config.half_width << j) < config.cells) ++j;
  require((2 * config.half_width << j) == config.cells, ErrorCode::Config, "cells per axis must be 2L 2^J");
  return build_domain(config.n, config.half_width, j);
}

SuiteReport run_suite(const SuiteConfig& config) {
  require(config.d >= 1 && config.d <= 3, ErrorCode::Config, "d must be 1, 2 or 3");
  require(config.d < 3 || config.allow_d3, ErrorCode::Config, "d = 3 needs the opt-in flag");
  require(config.random_cases >= 1, ErrorCode::Config, "battery sizes must be at least 1");
  if (config.suites)
    for (const auto& s : *config.suites)
      require(check_functions().count(s) == 1, ErrorCode::Config, "unknown check id: " + s);

  const auto t0 = Clock::now();
  SuiteReport report;
  report.config = config;
  std::unique_ptr<Context> ctx;
  for (const CheckInfo& info : kChecks) {
    if (config.suites && std::find(config.suites->begin(), config.suites->end(), info.id) == config.suites->end())
      continue;
    if (!ctx) ctx = std::make_unique<Context>(config);
    CheckRecord rec;
    rec.id = info.id;
    rec.lemma = info.lemma;
    rec.quote = info.quote;
    rec.hard = info.hard;
    Tally tally(rec);
    const auto c0 = Clock::now();
    try {
      check_functions().at(info.id)(*ctx, rec, tally);
    } catch (const std::exception& e) {
      tally.error("check aborted", e);
    }
    rec.seconds = seconds_since(c0);
    if (!rec.passed()) report.pass = false;
    report.checks.push_back(std::move(rec));
  }
  report.seconds = seconds_since(t0);
  return report;
}

std::string report_json(const SuiteReport& report, bool include_timing) {
  using nlohmann::ordered_json;
  const SuiteConfig& c = report.config;
  ordered_json j;
  j["version"] = 1;
  ordered_json cfg;
  cfg["seed"] = c.seed;
  cfg["n"] = c.n;
  cfg["cells"] = c.cells;
  cfg["L"] = c.half_width;
  cfg["d"] = c.d;
  cfg["exponent_count"] = c.exponent_count;
  cfg["weight_count"] = c.weight_count;
  cfg["random_cases"] = c.random_cases;
  cfg["direction_count"] = c.direction_count;
  if (c.suites) cfg["suites"] = *c.suites;
  j["config"] = cfg;
  ordered_json checks = ordered_json::array();
  for (const CheckRecord& r : report.checks) {
    ordered_json e;
    e["id"] = r.id;
    e["lemma"] = r.lemma;
    e["quote"] = r.quote;
    e["hard"] = r.hard;
    e["n_cases"] = r.n_cases;
    e["n_pass"] = r.n_pass;
    e["pass"] = r.passed();
    e["worst_margin"] = r.worst_margin;  // non-finite values serialise as null
    e["witness"] = r.witness;
    ordered_json obs = ordered_json::object();
    for (const auto& [k, v] : r.observations) obs[k] = v;
    e["observations"] = obs;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["pass"] = report.pass;
  if (include_timing) {
    ordered_json timing;
    timing["total_seconds"] = report.seconds;
    for (const CheckRecord& r : report.checks) timing["checks"][r.id] = r.seconds;
    j["timing"] = timing;
  }
  return j.dump(2) + "\n";
}

}  // namespace vls
