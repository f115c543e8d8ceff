#ifndef VLSPACE_H
#define VLSPACE_H

/* C interface: opaque handles, status codes, thread-local error text. */

#include <stddef.h>
#include <stdint.h>

#if defined(VLS_BUILDING_LIBRARY)
#define VLS_API __attribute__((visibility("default")))
#else
#define VLS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vls_status {
  VLS_OK = 0,
  VLS_ERR_CONFIG = 1,
  VLS_ERR_DATA = 2,
  VLS_ERR_OUT_OF_DOMAIN = 3,
  VLS_ERR_DEGENERATE = 4,
  VLS_ERR_NO_CONVERGENCE = 5,
  VLS_ERR_IO = 6,
  VLS_ERR_INTERNAL = 7
} vls_status;

typedef enum vls_kind { VLS_EXPONENT = 0, VLS_SCALAR = 1, VLS_VECTOR = 2, VLS_MATRIX = 3 } vls_kind;

typedef struct vls_field vls_field;
typedef struct vls_buffer vls_buffer;

typedef struct vls_field_info {
  vls_kind kind;
  int n;
  int d;
  int64_t half_width;
  int refinement;
  int64_t cells;
  int has_p_inf;
  double p_inf;
} vls_field_info;

/* Cube family: grid is a shift mask 0..2^n-1, or -1 for every lattice cube
   whose one-third cover fits in the box. Levels apply when has_levels. */
typedef struct vls_family {
  int grid;
  int has_levels;
  int level_min;
  int level_max;
} vls_family;

typedef struct vls_constants {
  double one;
  double scalar; /* NaN unless d = 1 */
  double matrix;
  double reduced;
} vls_constants;

typedef struct vls_verify_options {
  uint64_t seed;
  int n;
  int64_t cells;
  int64_t half_width;
  int d;
  size_t exponent_count;
  size_t weight_count;
  size_t random_cases;
  size_t direction_count;
  int allow_d3;
  const char* suites; /* comma-separated ids, or NULL for all */
  int include_timing;
} vls_verify_options;

/* Message of the last failed call on this thread; empty after success. */
VLS_API const char* vls_last_error(void);
VLS_API const char* vls_version(void);
/* Shortest round-trip decimal ("3.0" for 3); returns the length needed
   excluding the terminator, writing at most cap bytes. */
VLS_API size_t vls_format_double(double x, char* buf, size_t cap);
/* 0 keeps the OpenMP default. */
VLS_API void vls_set_threads(int threads);

VLS_API vls_status vls_field_create(vls_kind kind, int n, int64_t half_width, int refinement, int d,
                                    const double* p_inf, const double* data, size_t count, vls_field** out);
VLS_API vls_status vls_field_read(const char* path, vls_field** out);
VLS_API vls_status vls_field_parse(const char* text, size_t length, vls_field** out);
VLS_API vls_status vls_field_write(const vls_field* field, const char* path);
VLS_API vls_status vls_field_format(const vls_field* field, vls_buffer** out);
VLS_API vls_status vls_field_info_get(const vls_field* field, vls_field_info* out);
/* Borrowed pointer valid until the field is freed. */
VLS_API vls_status vls_field_data(const vls_field* field, const double** data, size_t* count);
VLS_API void vls_field_free(vls_field* field);

VLS_API const char* vls_buffer_data(const vls_buffer* buffer);
VLS_API size_t vls_buffer_size(const vls_buffer* buffer);
VLS_API void vls_buffer_free(vls_buffer* buffer);

VLS_API void vls_verify_defaults(vls_verify_options* options);
VLS_API vls_status vls_default_family(vls_family* out);

/* Battery fields written to out_dir as <name>.vlf; returns the file list. */
VLS_API vls_status vls_gen_battery(uint64_t seed, int n, int64_t half_width, int refinement, int d,
                                   size_t exponent_count, size_t weight_count, const char* out_dir,
                                   vls_buffer** manifest);
/* Exponent from "constant:2", "lh:2,1" or "twostep:2,4". */
VLS_API vls_status vls_gen_exponent(const char* spec, int n, int64_t half_width, int refinement, vls_field** out);
/* value on the cells whose centre lies in [lo, hi)^n, 0 elsewhere. */
VLS_API vls_status vls_gen_indicator(int n, int64_t half_width, int refinement, double value, double lo, double hi,
                                     vls_field** out);
/* "identity", "constant-spd" or "rotated-power:a,b". */
VLS_API vls_status vls_gen_weight(const char* spec, int n, int64_t half_width, int refinement, int d,
                                  vls_field** out);

VLS_API vls_status vls_norm(const vls_field* f, const vls_field* p, double* out);
/* weight may be NULL (identity of the field's dimension). */
VLS_API vls_status vls_constant(const vls_field* weight, const vls_field* p, const vls_family* family,
                                size_t direction_count, vls_constants* out);
VLS_API vls_status vls_reduce(const vls_field* weight, const vls_field* p, const vls_family* family,
                              size_t direction_count, vls_buffer** csv);
/* op: "m", "mp", "mw", "mprime" or "mdprime". */
VLS_API vls_status vls_maximal(const char* op, const vls_field* f, const vls_field* weight, const vls_field* p,
                               const vls_family* family, size_t direction_count, vls_buffer** csv);
/* lambda <= 0 runs the 2^k ladder. */
VLS_API vls_status vls_czdecomp(const vls_field* f, const vls_field* weight, const vls_field* p, int shift,
                                double lambda, size_t direction_count, vls_buffer** csv);
VLS_API vls_status vls_sparse(const vls_field* f, const vls_field* weight, const vls_field* p, int shift,
                              size_t direction_count, vls_buffer** cells_csv, vls_buffer** cubes_csv,
                              double* gamma, double* ratio);
VLS_API vls_status vls_transform(const vls_field* f, int axis, vls_field** out);
/* Writes d values into out. */
VLS_API vls_status vls_transform_at(const vls_field* f, const double* point, int axis, double* out);
VLS_API vls_status vls_verify(const vls_verify_options* options, vls_buffer** json, int* pass);
/* format: "csv", "json" or "auto"; title and column may be NULL. */
VLS_API vls_status vls_report(const char* text, size_t length, const char* format, const char* title,
                              const char* column, int log_y, vls_buffer** svg);

#ifdef __cplusplus
}
#endif

#endif
