#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "vlspace/vlspace.h"

namespace {

std::string take(vls_buffer* b) {
  std::string s(vls_buffer_data(b), vls_buffer_size(b));
  vls_buffer_free(b);
  return s;
}

}  // namespace

TEST_CASE("number formatting through the C interface") {
  char buf[32];
  CHECK(vls_format_double(3.0, buf, sizeof buf) == 3);
  CHECK(std::string(buf) == "3.0");
  char tiny[2];
  const std::size_t need = vls_format_double(0.125, tiny, sizeof tiny);
  CHECK(need == 5);
  CHECK(std::strlen(tiny) < sizeof tiny);
  CHECK(std::string(vls_version()).size() > 0);
}

TEST_CASE("field lifecycle") {
  const std::vector<double> data{1.0, 2.0, 3.0, 4.0};
  vls_field* f = nullptr;
  REQUIRE(vls_field_create(VLS_SCALAR, 1, 1, 1, 1, nullptr, data.data(), data.size(), &f) == VLS_OK);
  CHECK(std::string(vls_last_error()).empty());

  vls_field_info info{};
  REQUIRE(vls_field_info_get(f, &info) == VLS_OK);
  CHECK(info.kind == VLS_SCALAR);
  CHECK(info.cells == 4);
  CHECK(info.has_p_inf == 0);

  vls_buffer* text = nullptr;
  REQUIRE(vls_field_format(f, &text) == VLS_OK);
  const std::string s = take(text);
  vls_field* g = nullptr;
  REQUIRE(vls_field_parse(s.data(), s.size(), &g) == VLS_OK);
  const double* values = nullptr;
  std::size_t count = 0;
  REQUIRE(vls_field_data(g, &values, &count) == VLS_OK);
  REQUIRE(count == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(values[i] == data[i]);
  vls_field_free(g);
  vls_field_free(f);
  vls_field_free(nullptr);
}

TEST_CASE("error codes") {
  vls_field* f = nullptr;
  const std::vector<double> short_data{1.0, 2.0};
  CHECK(vls_field_create(VLS_SCALAR, 1, 1, 1, 1, nullptr, short_data.data(), short_data.size(), &f) != VLS_OK);
  CHECK(f == nullptr);
  CHECK(std::string(vls_last_error()).size() > 0);

  const std::string bad = "vlfield 1\nkind scalar\nn 1\nd 1\nL 1\nJ 1\ndata\n1\n2\n";
  CHECK(vls_field_parse(bad.data(), bad.size(), &f) == VLS_ERR_DATA);
  CHECK(vls_field_read("/nonexistent/dir/x.vlf", &f) == VLS_ERR_IO);
  CHECK(vls_gen_exponent("nonsense:1", 1, 1, 2, &f) != VLS_OK);

  vls_field* p = nullptr;
  REQUIRE(vls_gen_exponent("constant:2", 1, 1, 2, &p) == VLS_OK);
  vls_field* wrong = nullptr;
  REQUIRE(vls_gen_indicator(1, 1, 3, 1.0, 0.0, 1.0, &wrong) == VLS_OK);
  double out = 0.0;
  CHECK(vls_norm(wrong, p, &out) != VLS_OK);
  vls_field_free(wrong);
  vls_field_free(p);
}

TEST_CASE("norm of a scaled indicator") {
  vls_field* f = nullptr;
  vls_field* p = nullptr;
  REQUIRE(vls_gen_indicator(1, 1, 4, 3.0, 0.0, 1.0, &f) == VLS_OK);
  REQUIRE(vls_gen_exponent("constant:2", 1, 1, 4, &p) == VLS_OK);
  double v = 0.0;
  REQUIRE(vls_norm(f, p, &v) == VLS_OK);
  CHECK(v == doctest::Approx(3.0).epsilon(1e-12));

  vls_field* q = nullptr;
  REQUIRE(vls_gen_exponent("lh:2,1", 1, 1, 4, &q) == VLS_OK);
  vls_field* w = nullptr;
  REQUIRE(vls_gen_weight("rotated-power:0.25,0.125", 1, 1, 4, 2, &w) == VLS_OK);
  vls_family fam{};
  REQUIRE(vls_default_family(&fam) == VLS_OK);
  vls_constants c{};
  REQUIRE(vls_constant(w, q, &fam, 0, &c) == VLS_OK);
  CHECK(c.one >= 1.0 - 1e-12);
  CHECK(std::isnan(c.scalar));
  CHECK(c.matrix >= 1.0 - 1e-9);
  CHECK(std::isfinite(c.reduced));

  double at[2] = {0.0, 0.0};
  const double point = 2.0;
  vls_field* g = nullptr;
  REQUIRE(vls_gen_indicator(1, 4, 4, 1.0, 0.0, 1.0, &g) == VLS_OK);
  REQUIRE(vls_transform_at(g, &point, 1, at) == VLS_OK);
  CHECK(at[0] == doctest::Approx(std::log(2.0)).epsilon(0.02));
  vls_field_free(g);
  vls_field_free(w);
  vls_field_free(q);
  vls_field_free(p);
  vls_field_free(f);
}

TEST_CASE("verify through the C interface") {
  vls_verify_options o{};
  vls_verify_defaults(&o);
  CHECK(o.seed == 42);
  o.cells = 32;
  o.exponent_count = 2;
  o.weight_count = 2;
  o.random_cases = 10;
  o.suites = "holder,uv-vu";
  o.include_timing = 0;
  vls_buffer* a = nullptr;
  vls_buffer* b = nullptr;
  int pass_a = 0, pass_b = 0;
  REQUIRE(vls_verify(&o, &a, &pass_a) == VLS_OK);
  REQUIRE(vls_verify(&o, &b, &pass_b) == VLS_OK);
  CHECK(pass_a == 1);
  CHECK(take(a) == take(b));

  o.suites = "holder,bogus";
  vls_buffer* c = nullptr;
  int pass_c = 0;
  CHECK(vls_verify(&o, &c, &pass_c) == VLS_ERR_CONFIG);
}

TEST_CASE("report rendering") {
  const std::string csv = "x1,value\n0.5,1.0\n1.5,2.0\n";
  vls_buffer* svg = nullptr;
  REQUIRE(vls_report(csv.data(), csv.size(), "auto", "demo", nullptr, 0, &svg) == VLS_OK);
  const std::string s = take(svg);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("demo") != std::string::npos);
}
