// vlspace command-line frontend. Links only the C interface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vlspace/vlspace.h"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kData = 3 };

struct Failure {
  int code;
  std::string message;
};

using FieldPtr = std::unique_ptr<vls_field, decltype(&vls_field_free)>;
using BufferPtr = std::unique_ptr<vls_buffer, decltype(&vls_buffer_free)>;

void check(vls_status s) {
  if (s == VLS_OK) return;
  throw Failure{s == VLS_ERR_CONFIG ? kUsage : kData, vls_last_error()};
}

std::string fmt(double x) {
  char buf[64];
  vls_format_double(x, buf, sizeof buf);
  return buf;
}

FieldPtr load(const std::string& path) {
  vls_field* f = nullptr;
  check(vls_field_read(path.c_str(), &f));
  return FieldPtr(f, vls_field_free);
}

FieldPtr load_optional(const std::string& path) {
  if (path.empty()) return FieldPtr(nullptr, vls_field_free);
  return load(path);
}

BufferPtr own(vls_buffer* b) { return BufferPtr(b, vls_buffer_free); }

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kData, "cannot write " + path};
}

void emit(const vls_buffer* b, const std::string& path) {
  emit(std::string(vls_buffer_data(b), vls_buffer_size(b)), path);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{kUsage, "not a number list: " + text};
    }
  }
  return out;
}

struct DomainOpts {
  int n = 1;
  int64_t half_width = 1;
  int refinement = 6;

  void add(CLI::App* app) {
    app->add_option("--n", n, "Spatial dimension (1, 2 or 3)")->capture_default_str();
    app->add_option("--L", half_width, "Box half-width, a power of two")->capture_default_str();
    app->add_option("--J", refinement, "Cells have side 2^-J")->capture_default_str();
  }
};

struct FamilyOpts {
  std::string grid = "0";
  std::string levels;

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "Shift mask 0..2^n-1 or 'lattice'")->capture_default_str();
    app->add_option("--levels", levels, "Level range a..b (default: all)");
  }

  vls_family get() const {
    vls_family f{0, 0, 0, 0};
    if (grid == "lattice") {
      f.grid = -1;
    } else {
      try {
        std::size_t used = 0;
        f.grid = std::stoi(grid, &used);
        if (used != grid.size() || f.grid < 0) throw std::invalid_argument(grid);
      } catch (const std::exception&) {
        throw Failure{kUsage, "--grid must be a shift mask or 'lattice'"};
      }
    }
    if (!levels.empty()) {
      const auto dots = levels.find("..");
      if (dots == std::string::npos || dots == 0 || dots + 2 >= levels.size())
        throw Failure{kUsage, "--levels must look like a..b"};
      try {
        f.level_min = std::stoi(levels.substr(0, dots));
        f.level_max = std::stoi(levels.substr(dots + 2));
      } catch (const std::exception&) {
        throw Failure{kUsage, "--levels must look like a..b"};
      }
      f.has_levels = 1;
    }
    return f;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent matrix-weighted function space toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = auto)")->capture_default_str();

  std::function<void()> action;
  int result = kOk;

  // gen
  auto* gen = app.add_subcommand("gen", "Write generated fields");
  DomainOpts gen_dom;
  gen_dom.add(gen);
  int gen_d = 2;
  uint64_t gen_seed = 42;
  std::size_t gen_exp_count = 10, gen_weight_count = 12;
  std::string gen_exponent, gen_weight, gen_support, gen_out;
  std::optional<double> gen_value;
  bool gen_battery = false;
  gen->add_flag("--battery", gen_battery, "Write the seeded exponent and weight batteries into --out");
  gen->add_option("--exponent", gen_exponent, "Exponent spec: constant:a, lh:a,b or twostep:a,b");
  gen->add_option("--weight", gen_weight, "Weight spec: identity, constant-spd or rotated-power:a,b");
  gen->add_option("--value", gen_value, "Scalar field value");
  gen->add_option("--support", gen_support, "Restrict --value to [lo,hi)^n, given as lo,hi");
  gen->add_option("--d", gen_d, "Matrix size for weights")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Battery seed")->capture_default_str();
  gen->add_option("--exponents", gen_exp_count, "Battery exponent count")->capture_default_str();
  gen->add_option("--weights", gen_weight_count, "Battery weight count")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (directory for --battery)")->required();
  gen->callback([&] {
    action = [&] {
      const int modes = gen_battery + !gen_exponent.empty() + !gen_weight.empty() + gen_value.has_value();
      if (modes != 1) throw Failure{kUsage, "gen needs exactly one of --battery, --exponent, --weight, --value"};
      if (gen_battery) {
        vls_buffer* list = nullptr;
        check(vls_gen_battery(gen_seed, gen_dom.n, gen_dom.half_width, gen_dom.refinement, gen_d, gen_exp_count,
                              gen_weight_count, gen_out.c_str(), &list));
        emit(own(list).get(), "");
        return;
      }
      vls_field* f = nullptr;
      if (!gen_exponent.empty()) {
        check(vls_gen_exponent(gen_exponent.c_str(), gen_dom.n, gen_dom.half_width, gen_dom.refinement, &f));
      } else if (!gen_weight.empty()) {
        check(vls_gen_weight(gen_weight.c_str(), gen_dom.n, gen_dom.half_width, gen_dom.refinement, gen_d, &f));
      } else {
        double lo = -INFINITY, hi = INFINITY;
        if (!gen_support.empty()) {
          const auto v = parse_list(gen_support);
          if (v.size() != 2) throw Failure{kUsage, "--support needs lo,hi"};
          lo = v[0];
          hi = v[1];
        }
        check(vls_gen_indicator(gen_dom.n, gen_dom.half_width, gen_dom.refinement, *gen_value, lo, hi, &f));
      }
      FieldPtr owned(f, vls_field_free);
      check(vls_field_write(owned.get(), gen_out.c_str()));
    };
  });

  // norm
  auto* norm = app.add_subcommand("norm", "Print the Luxemburg norm of |f|");
  std::string norm_field, norm_exponent;
  norm->add_option("--field", norm_field, "Scalar or vector field file")->required();
  norm->add_option("--exponent", norm_exponent, "Exponent field file")->required();
  norm->callback([&] {
    action = [&] {
      auto f = load(norm_field);
      auto p = load(norm_exponent);
      double v = 0.0;
      check(vls_norm(f.get(), p.get(), &v));
      std::cout << fmt(v) << "\n";
    };
  });

  // constant
  auto* constant = app.add_subcommand("constant", "Print [1], [w], [W] and [W]^R over a cube family");
  std::string const_weight, const_exponent;
  std::size_t const_dirs = 0;
  FamilyOpts const_fam;
  const_fam.add(constant);
  constant->add_option("--weight", const_weight, "Weight file (default: identity, d = 1)");
  constant->add_option("--exponent", const_exponent, "Exponent field file")->required();
  constant->add_option("--directions", const_dirs, "Direction count for reducing operators (0 = default)");
  constant->callback([&] {
    action = [&] {
      auto w = load_optional(const_weight);
      auto p = load(const_exponent);
      const vls_family fam = const_fam.get();
      vls_constants c{};
      check(vls_constant(w.get(), p.get(), &fam, const_dirs, &c));
      std::cout << "one " << fmt(c.one) << "\n";
      if (!std::isnan(c.scalar)) std::cout << "scalar " << fmt(c.scalar) << "\n";
      std::cout << "matrix " << fmt(c.matrix) << "\n"
                << "reduced " << fmt(c.reduced) << "\n";
    };
  });

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Reducing operators per cube as CSV");
  std::string red_weight, red_exponent, red_out;
  std::size_t red_dirs = 0;
  FamilyOpts red_fam;
  red_fam.add(reduce);
  reduce->add_option("--weight", red_weight, "Weight file")->required();
  reduce->add_option("--exponent", red_exponent, "Exponent field file")->required();
  reduce->add_option("--directions", red_dirs, "Direction count (0 = default)");
  reduce->add_option("--out", red_out, "CSV output (default: stdout)");
  reduce->callback([&] {
    action = [&] {
      auto w = load(red_weight);
      auto p = load(red_exponent);
      const vls_family fam = red_fam.get();
      vls_buffer* csv = nullptr;
      check(vls_reduce(w.get(), p.get(), &fam, red_dirs, &csv));
      emit(own(csv).get(), red_out);
    };
  });

  // maximal
  auto* maximal = app.add_subcommand("maximal", "Maximal function values per cell as CSV");
  std::string max_op = "m", max_field, max_weight, max_exponent, max_out;
  std::size_t max_dirs = 0;
  FamilyOpts max_fam;
  max_fam.add(maximal);
  maximal->add_option("--op", max_op, "m | mp | mw | mprime | mdprime")
      ->check(CLI::IsMember({"m", "mp", "mw", "mprime", "mdprime"}))
      ->capture_default_str();
  maximal->add_option("--field", max_field, "Scalar or vector field file")->required();
  maximal->add_option("--weight", max_weight, "Weight file (default: identity)");
  maximal->add_option("--exponent", max_exponent, "Exponent field file (mp, mprime, mdprime)");
  maximal->add_option("--directions", max_dirs, "Direction count (0 = default)");
  maximal->add_option("--out", max_out, "CSV output (default: stdout)");
  maximal->callback([&] {
    action = [&] {
      auto f = load(max_field);
      auto w = load_optional(max_weight);
      auto p = load_optional(max_exponent);
      const vls_family fam = max_fam.get();
      vls_buffer* csv = nullptr;
      check(vls_maximal(max_op.c_str(), f.get(), w.get(), p.get(), &fam, max_dirs, &csv));
      emit(own(csv).get(), max_out);
    };
  });

  // czdecomp
  auto* cz = app.add_subcommand("czdecomp", "Stopping cubes of the decomposition as CSV");
  std::string cz_field, cz_weight, cz_exponent, cz_out;
  int cz_shift = 0;
  std::optional<double> cz_lambda;
  bool cz_ladder = false;
  std::size_t cz_dirs = 0;
  cz->add_option("--field", cz_field, "Scalar or vector field file")->required();
  cz->add_option("--weight", cz_weight, "Weight file (default: identity)");
  cz->add_option("--exponent", cz_exponent, "Exponent field file")->required();
  cz->add_option("--grid", cz_shift, "Shift mask of the grid")->capture_default_str();
  auto* lam = cz->add_option("--lambda", cz_lambda, "Threshold");
  auto* lad = cz->add_flag("--ladder", cz_ladder, "Run lambda = 2^k over the ladder");
  lam->excludes(lad);
  cz->add_option("--directions", cz_dirs, "Direction count (0 = default)");
  cz->add_option("--out", cz_out, "CSV output (default: stdout)");
  cz->callback([&] {
    action = [&] {
      if (!cz_lambda && !cz_ladder) throw Failure{kUsage, "czdecomp needs --lambda or --ladder"};
      if (cz_lambda && !(*cz_lambda > 0.0)) throw Failure{kUsage, "--lambda must be positive"};
      auto f = load(cz_field);
      auto w = load_optional(cz_weight);
      auto p = load(cz_exponent);
      vls_buffer* csv = nullptr;
      check(vls_czdecomp(f.get(), w.get(), p.get(), cz_shift, cz_lambda.value_or(0.0), cz_dirs, &csv));
      emit(own(csv).get(), cz_out);
    };
  });

  // sparse
  auto* sparse = app.add_subcommand("sparse", "Build the sparse family and apply the convex-body operator");
  std::string sp_field, sp_weight, sp_exponent, sp_out, sp_cubes;
  int sp_shift = 0;
  std::size_t sp_dirs = 0;
  sparse->add_option("--field", sp_field, "Scalar or vector field file")->required();
  sparse->add_option("--weight", sp_weight, "Weight file (default: identity)");
  sparse->add_option("--exponent", sp_exponent, "Exponent field file")->required();
  sparse->add_option("--grid", sp_shift, "Shift mask of the grid")->capture_default_str();
  sparse->add_option("--directions", sp_dirs, "Direction count (0 = default)");
  sparse->add_option("--out", sp_out, "Per-cell CSV (default: stdout)");
  sparse->add_option("--cubes-out", sp_cubes, "Sparse family CSV");
  sparse->callback([&] {
    action = [&] {
      auto f = load(sp_field);
      auto w = load_optional(sp_weight);
      auto p = load(sp_exponent);
      vls_buffer *cells = nullptr, *cubes = nullptr;
      double gamma = 0.0, ratio = 0.0;
      check(vls_sparse(f.get(), w.get(), p.get(), sp_shift, sp_dirs, &cells, &cubes, &gamma, &ratio));
      auto cells_owned = own(cells);
      auto cubes_owned = own(cubes);
      emit(cells_owned.get(), sp_out);
      if (!sp_cubes.empty()) emit(cubes_owned.get(), sp_cubes);
      std::cerr << "gamma " << fmt(gamma) << "\nratio " << fmt(ratio) << "\n";
    };
  });

  // transform
  auto* transform = app.add_subcommand("transform", "Apply the discrete Riesz transform");
  std::string tr_field, tr_out, tr_at;
  int tr_axis = 1;
  transform->add_option("--field", tr_field, "Scalar or vector field file")->required();
  transform->add_option("--axis", tr_axis, "Kernel axis (1-based)")->capture_default_str();
  transform->add_option("--out", tr_out, "Output field file (default: stdout)");
  transform->add_option("--at", tr_at, "Evaluate at the point x1[,x2] instead");
  transform->callback([&] {
    action = [&] {
      auto f = load(tr_field);
      if (!tr_at.empty()) {
        const auto x = parse_list(tr_at);
        vls_field_info info{};
        check(vls_field_info_get(f.get(), &info));
        if (static_cast<int>(x.size()) != info.n) throw Failure{kUsage, "--at needs n coordinates"};
        std::vector<double> out(static_cast<std::size_t>(info.d));
        check(vls_transform_at(f.get(), x.data(), tr_axis, out.data()));
        for (std::size_t i = 0; i < out.size(); ++i) std::cout << (i ? " " : "") << fmt(out[i]);
        std::cout << "\n";
        return;
      }
      vls_field* t = nullptr;
      check(vls_transform(f.get(), tr_axis, &t));
      FieldPtr owned(t, vls_field_free);
      vls_buffer* text = nullptr;
      check(vls_field_format(owned.get(), &text));
      emit(own(text).get(), tr_out);
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "Run the inequality suite and write a JSON report");
  vls_verify_options vo;
  vls_verify_defaults(&vo);
  std::string ver_out, ver_suites;
  bool ver_no_timing = false, ver_d3 = false;
  verify->add_option("--seed", vo.seed, "Seed")->capture_default_str();
  verify->add_option("--n", vo.n, "Spatial dimension")->capture_default_str();
  verify->add_option("--cells", vo.cells, "Cells per axis")->capture_default_str();
  verify->add_option("--L", vo.half_width, "Box half-width")->capture_default_str();
  verify->add_option("--d", vo.d, "Matrix size")->capture_default_str();
  verify->add_option("--exponents", vo.exponent_count, "Exponent battery size")->capture_default_str();
  verify->add_option("--weights", vo.weight_count, "Weight battery size")->capture_default_str();
  verify->add_option("--cases", vo.random_cases, "Base size of the randomised checks")->capture_default_str();
  verify->add_option("--directions", vo.direction_count, "Direction count (0 = default)");
  verify->add_flag("--allow-d3", ver_d3, "Permit d = 3");
  verify->add_option("--suites", ver_suites, "Comma-separated check ids (default: all)");
  verify->add_flag("--no-timing", ver_no_timing, "Omit wall-clock fields from the report");
  verify->add_option("--out", ver_out, "JSON output (default: stdout)");
  verify->callback([&] {
    action = [&] {
      vo.allow_d3 = ver_d3;
      vo.include_timing = !ver_no_timing;
      vo.suites = ver_suites.empty() ? nullptr : ver_suites.c_str();
      vls_buffer* json = nullptr;
      int pass = 0;
      check(vls_verify(&vo, &json, &pass));
      emit(own(json).get(), ver_out);
      result = pass ? kOk : kCheckFailed;
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Render an SVG plot from a CSV table or verify report");
  std::string rep_in, rep_out, rep_format = "auto", rep_title, rep_column;
  bool rep_log = false;
  report->add_option("--input", rep_in, "CSV or JSON input")->required();
  report->add_option("--format", rep_format, "csv | json | auto")
      ->check(CLI::IsMember({"csv", "json", "auto"}))
      ->capture_default_str();
  report->add_option("--title", rep_title, "Plot title");
  report->add_option("--column", rep_column, "CSV value column");
  report->add_flag("--log-y", rep_log, "Logarithmic value axis for line plots");
  report->add_option("--out", rep_out, "SVG output (default: stdout)");
  report->callback([&] {
    action = [&] {
      std::ifstream in(rep_in, std::ios::binary);
      if (!in) throw Failure{kData, "cannot open " + rep_in};
      std::stringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      vls_buffer* svg = nullptr;
      check(vls_report(text.data(), text.size(), rep_format.c_str(), rep_title.empty() ? nullptr : rep_title.c_str(),
                       rep_column.empty() ? nullptr : rep_column.c_str(), rep_log, &svg));
      emit(own(svg).get(), rep_out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    vls_set_threads(threads);
    if (action) action();
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return result;
}
