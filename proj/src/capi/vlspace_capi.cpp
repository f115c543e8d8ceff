#include "vlspace/vlspace.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "vlspace/battery.hpp"
#include "vlspace/commands.hpp"
#include "vlspace/error.hpp"
#include "vlspace/fieldio.hpp"
#include "vlspace/parallel.hpp"
#include "vlspace/sparse.hpp"
#include "vlspace/svg_report.hpp"
#include "vlspace/verify.hpp"

struct vls_field {
  vls::FieldFile file;
};

struct vls_buffer {
  std::string text;
};

namespace {

thread_local std::string last_error;

vls_status code_of(vls::ErrorCode c) {
  switch (c) {
    case vls::ErrorCode::Config: return VLS_ERR_CONFIG;
    case vls::ErrorCode::Data: return VLS_ERR_DATA;
    case vls::ErrorCode::OutOfDomain: return VLS_ERR_OUT_OF_DOMAIN;
    case vls::ErrorCode::Degenerate: return VLS_ERR_DEGENERATE;
    case vls::ErrorCode::NoConvergence: return VLS_ERR_NO_CONVERGENCE;
    case vls::ErrorCode::Io: return VLS_ERR_IO;
  }
  return VLS_ERR_INTERNAL;
}

template <class F>
vls_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return VLS_OK;
  } catch (const vls::Error& e) {
    last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return VLS_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  vls::require(p != nullptr, vls::ErrorCode::Config, std::string(what) + " must not be NULL");
}

vls_buffer* make_buffer(std::string s) { return new vls_buffer{std::move(s)}; }

vls::MatrixWeightField weight_or_identity(const vls_field* w, const vls::LatticeDomain& dom, int d) {
  if (!w) return vls::MatrixWeightField::identity(dom, d);
  return vls::as_weight(w->file);
}

vls::CubeFamily family_of(const vls::LatticeDomain& dom, const vls_family* f) {
  vls::FamilySpec spec;
  if (f) {
    spec.grid = f->grid < 0 ? "lattice" : std::to_string(f->grid);
    if (f->has_levels) {
      spec.level_min = f->level_min;
      spec.level_max = f->level_max;
    }
  }
  return vls::build_family(dom, spec);
}

}  // namespace

extern "C" {

const char* vls_last_error(void) { return last_error.c_str(); }
const char* vls_version(void) { return "1.0.0"; }
size_t vls_format_double(double x, char* buf, size_t cap) {
  const std::string s = vls::format_number(x);
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

void vls_set_threads(int threads) { vls::set_thread_count(threads); }

vls_status vls_field_create(vls_kind kind, int n, int64_t half_width, int refinement, int d, const double* p_inf,
                            const double* data, size_t count, vls_field** out) {
  return guarded([&] {
    need(out, "out");
    need(data, "data");
    vls::FieldFile f;
    vls::require(kind >= VLS_EXPONENT && kind <= VLS_MATRIX, vls::ErrorCode::Config, "unknown field kind");
    f.kind = static_cast<vls::FieldKind>(kind);
    f.n = n;
    f.d = d;
    f.half_width = half_width;
    f.refinement = refinement;
    if (p_inf) f.p_inf = *p_inf;
    f.data.assign(data, data + count);
    // Round trip through the text format so every invariant is checked once.
    vls::FieldFile checked = vls::parse_field(vls::format_field(f));
    *out = new vls_field{std::move(checked)};
  });
}

vls_status vls_field_read(const char* path, vls_field** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new vls_field{vls::read_field_file(path)};
  });
}

vls_status vls_field_parse(const char* text, size_t length, vls_field** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new vls_field{vls::parse_field(std::string_view(text, length))};
  });
}

vls_status vls_field_write(const vls_field* field, const char* path) {
  return guarded([&] {
    need(field, "field");
    need(path, "path");
    vls::write_field_file(path, field->file);
  });
}

vls_status vls_field_format(const vls_field* field, vls_buffer** out) {
  return guarded([&] {
    need(field, "field");
    need(out, "out");
    *out = make_buffer(vls::format_field(field->file));
  });
}

vls_status vls_field_info_get(const vls_field* field, vls_field_info* out) {
  return guarded([&] {
    need(field, "field");
    need(out, "out");
    const vls::FieldFile& f = field->file;
    out->kind = static_cast<vls_kind>(f.kind);
    out->n = f.n;
    out->d = f.d;
    out->half_width = f.half_width;
    out->refinement = f.refinement;
    out->cells = f.domain().cell_count();
    out->has_p_inf = f.p_inf.has_value();
    out->p_inf = f.p_inf.value_or(NAN);
  });
}

vls_status vls_field_data(const vls_field* field, const double** data, size_t* count) {
  return guarded([&] {
    need(field, "field");
    need(data, "data");
    need(count, "count");
    *data = field->file.data.data();
    *count = field->file.data.size();
  });
}

void vls_field_free(vls_field* field) { delete field; }

const char* vls_buffer_data(const vls_buffer* buffer) { return buffer ? buffer->text.c_str() : ""; }
size_t vls_buffer_size(const vls_buffer* buffer) { return buffer ? buffer->text.size() : 0; }
void vls_buffer_free(vls_buffer* buffer) { delete buffer; }

void vls_verify_defaults(vls_verify_options* o) {
  if (!o) return;
  const vls::SuiteConfig c;
  o->seed = c.seed;
  o->n = c.n;
  o->cells = c.cells;
  o->half_width = c.half_width;
  o->d = c.d;
  o->exponent_count = c.exponent_count;
  o->weight_count = c.weight_count;
  o->random_cases = c.random_cases;
  o->direction_count = c.direction_count;
  o->allow_d3 = c.allow_d3;
  o->suites = nullptr;
  o->include_timing = 1;
}

vls_status vls_default_family(vls_family* out) {
  return guarded([&] {
    need(out, "out");
    *out = vls_family{0, 0, 0, 0};
  });
}

vls_status vls_gen_battery(uint64_t seed, int n, int64_t half_width, int refinement, int d, size_t exponent_count,
                           size_t weight_count, const char* out_dir, vls_buffer** manifest) {
  return guarded([&] {
    need(out_dir, "out_dir");
    const vls::LatticeDomain dom = vls::build_domain(n, half_width, refinement);
    vls::BatteryConfig cfg;
    cfg.seed = seed;
    cfg.exponent_count = exponent_count;
    cfg.weight_count = weight_count;
    std::filesystem::create_directories(out_dir);
    std::string list;
    auto file_name = [](std::string prefix, const std::string& name) {
      for (char c : name) prefix += (c == ':' || c == ',' || c == '/') ? '_' : c;
      return prefix + ".vlf";
    };
    for (const auto& e : vls::gen_exponent_battery(dom, cfg)) {
      const std::string path = (std::filesystem::path(out_dir) / file_name("exponent_", e.name)).string();
      vls::write_field_file(path, vls::to_file(e.field));
      list += path + "\n";
    }
    for (const auto& w : vls::gen_weight_battery(dom, d, cfg)) {
      const std::string path = (std::filesystem::path(out_dir) / file_name("weight_", w.name)).string();
      vls::write_field_file(path, vls::to_file(w.field));
      list += path + "\n";
    }
    if (manifest) *manifest = make_buffer(std::move(list));
  });
}

vls_status vls_gen_exponent(const char* spec, int n, int64_t half_width, int refinement, vls_field** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    const vls::LatticeDomain dom = vls::build_domain(n, half_width, refinement);
    *out = new vls_field{vls::to_file(vls::make_exponent(dom, vls::parse_exponent_spec(spec)))};
  });
}

vls_status vls_gen_indicator(int n, int64_t half_width, int refinement, double value, double lo, double hi,
                             vls_field** out) {
  return guarded([&] {
    need(out, "out");
    vls::require(std::isfinite(value), vls::ErrorCode::Config, "value must be finite");
    const vls::LatticeDomain dom = vls::build_domain(n, half_width, refinement);
    std::vector<double> v(static_cast<std::size_t>(dom.cell_count()), 0.0);
    for (vls::Index c = 0; c < dom.cell_count(); ++c) {
      const vls::Point x = dom.cell_center(c);
      bool inside = true;
      for (int a = 0; a < n; ++a) inside = inside && x[static_cast<std::size_t>(a)] >= lo && x[static_cast<std::size_t>(a)] < hi;
      if (inside) v[static_cast<std::size_t>(c)] = value;
    }
    *out = new vls_field{vls::to_file(vls::ScalarField(dom, std::move(v)))};
  });
}

vls_status vls_gen_weight(const char* spec, int n, int64_t half_width, int refinement, int d, vls_field** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    const vls::LatticeDomain dom = vls::build_domain(n, half_width, refinement);
    const std::string s(spec);
    if (s == "identity") {
      *out = new vls_field{vls::to_file(vls::MatrixWeightField::identity(dom, d))};
    } else if (s == "constant-spd") {
      vls::BatteryConfig cfg;
      cfg.weight_count = 2;
      *out = new vls_field{vls::to_file(vls::gen_weight_battery(dom, d, cfg).at(1).field)};
    } else if (s.rfind("rotated-power:", 0) == 0) {
      const auto args = s.substr(14);
      const auto comma = args.find(',');
      vls::require(comma != std::string::npos, vls::ErrorCode::Config, "rotated-power needs a,b");
      double a = 0, b = 0;
      try {
        a = std::stod(args.substr(0, comma));
        b = std::stod(args.substr(comma + 1));
      } catch (const std::exception&) {
        throw vls::Error(vls::ErrorCode::Config, "bad rotated-power parameters");
      }
      *out = new vls_field{vls::to_file(vls::rotated_power_weight(dom, d, a, b))};
    } else {
      throw vls::Error(vls::ErrorCode::Config, "unknown weight spec '" + s + "'");
    }
  });
}

vls_status vls_norm(const vls_field* f, const vls_field* p, double* out) {
  return guarded([&] {
    need(f, "f");
    need(p, "p");
    need(out, "out");
    const vls::ExponentField pe = vls::as_exponent(p->file);
    const vls::VectorField v = vls::as_vector(f->file);
    vls::require(v.domain() == pe.domain(), vls::ErrorCode::Data, "field and exponent live on different domains");
    *out = vls::luxemburg_norm(v.magnitude(), pe);
  });
}

vls_status vls_constant(const vls_field* weight, const vls_field* p, const vls_family* family,
                        size_t direction_count, vls_constants* out) {
  return guarded([&] {
    need(p, "p");
    need(out, "out");
    const vls::ExponentField pe = vls::as_exponent(p->file);
    const vls::MatrixWeightField w = weight_or_identity(weight, pe.domain(), 1);
    const vls::CubeFamily fam = family_of(pe.domain(), family);
    const vls::Constants c = vls::compute_constants(w, pe, fam, direction_count);
    *out = vls_constants{c.one, c.scalar, c.matrix, c.reduced};
  });
}

vls_status vls_reduce(const vls_field* weight, const vls_field* p, const vls_family* family, size_t direction_count,
                      vls_buffer** csv) {
  return guarded([&] {
    need(weight, "weight");
    need(p, "p");
    need(csv, "csv");
    const vls::ExponentField pe = vls::as_exponent(p->file);
    const vls::MatrixWeightField w = vls::as_weight(weight->file);
    *csv = make_buffer(vls::reduce_csv(w, pe, family_of(pe.domain(), family), direction_count));
  });
}

vls_status vls_maximal(const char* op, const vls_field* f, const vls_field* weight, const vls_field* p,
                       const vls_family* family, size_t direction_count, vls_buffer** csv) {
  return guarded([&] {
    need(op, "op");
    need(f, "f");
    need(csv, "csv");
    const vls::MaximalOp mop = vls::parse_maximal_op(op);
    const vls::VectorField v = vls::as_vector(f->file);
    const bool needs_p = mop == vls::MaximalOp::NormMaximal || mop == vls::MaximalOp::AuxPrime ||
                         mop == vls::MaximalOp::AuxDoublePrime;
    vls::require(!needs_p || p, vls::ErrorCode::Config, std::string("operator ") + op + " needs an exponent");
    const vls::ExponentField pe = p ? vls::as_exponent(p->file) : vls::ExponentField();
    const vls::MatrixWeightField w = weight_or_identity(weight, v.domain(), v.components());
    vls::require(w.dim() == v.components(), vls::ErrorCode::Data, "weight and field dimensions differ");
    *csv = make_buffer(vls::maximal_csv(mop, v, w, pe, family_of(v.domain(), family), direction_count));
  });
}

vls_status vls_czdecomp(const vls_field* f, const vls_field* weight, const vls_field* p, int shift, double lambda,
                        size_t direction_count, vls_buffer** csv) {
  return guarded([&] {
    need(f, "f");
    need(p, "p");
    need(csv, "csv");
    vls::require(shift >= 0, vls::ErrorCode::Config, "grid shift must be non-negative");
    const vls::VectorField v = vls::as_vector(f->file);
    const vls::MatrixWeightField w = weight_or_identity(weight, v.domain(), v.components());
    vls::require(w.dim() == v.components(), vls::ErrorCode::Data, "weight and field dimensions differ");
    std::optional<double> lam;
    if (lambda > 0.0) lam = lambda;
    *csv = make_buffer(vls::czdecomp_csv(v, w, vls::as_exponent(p->file), static_cast<unsigned>(shift), lam,
                                         direction_count));
  });
}

vls_status vls_sparse(const vls_field* f, const vls_field* weight, const vls_field* p, int shift,
                      size_t direction_count, vls_buffer** cells_csv, vls_buffer** cubes_csv, double* gamma,
                      double* ratio) {
  return guarded([&] {
    need(f, "f");
    need(p, "p");
    vls::require(shift >= 0, vls::ErrorCode::Config, "grid shift must be non-negative");
    const vls::VectorField v = vls::as_vector(f->file);
    const vls::MatrixWeightField w = weight_or_identity(weight, v.domain(), v.components());
    vls::require(w.dim() == v.components(), vls::ErrorCode::Data, "weight and field dimensions differ");
    vls::SparseOutput s =
        vls::sparse_apply(v, w, vls::as_exponent(p->file), static_cast<unsigned>(shift), direction_count);
    if (cells_csv) *cells_csv = make_buffer(std::move(s.cells_csv));
    if (cubes_csv) *cubes_csv = make_buffer(std::move(s.cubes_csv));
    if (gamma) *gamma = s.gamma;
    if (ratio) *ratio = s.ratio;
  });
}

vls_status vls_transform(const vls_field* f, int axis, vls_field** out) {
  return guarded([&] {
    need(f, "f");
    need(out, "out");
    *out = new vls_field{vls::to_file(vls::discrete_riesz(vls::as_vector(f->file), axis))};
  });
}

vls_status vls_transform_at(const vls_field* f, const double* point, int axis, double* out) {
  return guarded([&] {
    need(f, "f");
    need(point, "point");
    need(out, "out");
    const vls::VectorField v = vls::as_vector(f->file);
    vls::Point x{};
    for (int a = 0; a < v.domain().dim(); ++a) x[static_cast<std::size_t>(a)] = point[a];
    const std::vector<double> r = vls::riesz_at(v, x, axis);
    std::copy(r.begin(), r.end(), out);
  });
}

vls_status vls_verify(const vls_verify_options* options, vls_buffer** json, int* pass) {
  return guarded([&] {
    need(json, "json");
    vls_verify_options o;
    vls_verify_defaults(&o);
    if (options) o = *options;
    vls::SuiteConfig c;
    c.seed = o.seed;
    c.n = o.n;
    c.cells = o.cells;
    c.half_width = o.half_width;
    c.d = o.d;
    c.exponent_count = o.exponent_count;
    c.weight_count = o.weight_count;
    c.random_cases = o.random_cases;
    c.direction_count = o.direction_count;
    c.allow_d3 = o.allow_d3 != 0;
    if (o.suites) {
      std::vector<std::string> ids;
      std::string_view s(o.suites);
      while (!s.empty()) {
        const auto comma = s.find(',');
        if (const auto id = s.substr(0, comma); !id.empty()) ids.emplace_back(id);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
      }
      c.suites = std::move(ids);
    }
    const vls::SuiteReport r = vls::run_suite(c);
    *json = make_buffer(vls::report_json(r, o.include_timing != 0));
    if (pass) *pass = r.pass ? 1 : 0;
  });
}

vls_status vls_report(const char* text, size_t length, const char* format, const char* title, const char* column,
                      int log_y, vls_buffer** svg) {
  return guarded([&] {
    need(text, "text");
    need(svg, "svg");
    vls::ReportOptions opt;
    if (title) opt.title = title;
    if (column) opt.column = column;
    opt.log_y = log_y != 0;
    *svg = make_buffer(vls::render_report(std::string_view(text, length), format ? format : "auto", opt));
  });
}

}  // extern "C"
