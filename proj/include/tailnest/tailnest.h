#ifndef TAILNEST_H
#define TAILNEST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Piecewise-uniform copulas with prescribed corner decay, built by nesting
 * vertex measures toward the lower-left corner of the unit cube.  Models are
 * described by JSON documents holding either explicit levels or a builder
 * recipe; the repository README documents the schema.
 *
 * Every function returns TN_OK on success.  On failure outputs are left
 * untouched, a description is written into errmsg when one is given (always
 * zero-terminated, truncated to errcap), and the matching status comes back. */

typedef struct tn_model tn_model;

typedef enum tn_status {
  TN_OK = 0,
  TN_ERR_PARSE = 1,      /* malformed document */
  TN_ERR_VALIDATION = 2, /* well-formed but violates a model invariant */
  TN_ERR_BOUNDS = 3,     /* argument outside its domain */
  TN_ERR_BUDGET = 4,     /* resolution or cell budget exceeded */
  TN_ERR_IO = 5,         /* file system failure */
  TN_ERR_NOMEM = 6,
  TN_ERR_INTERNAL = 7
} tn_status;

const char* tn_status_name(tn_status status);

tn_status tn_model_load_json(const char* text, tn_model** out, char* errmsg, size_t errcap);
tn_status tn_model_load_file(const char* path, tn_model** out, char* errmsg, size_t errcap);
void tn_model_free(tn_model* model);

int tn_model_dimension(const tn_model* model);
int tn_model_order(const tn_model* model);
int tn_model_depth(const tn_model* model);
uint64_t tn_model_seed(const tn_model* model);

/* Largest per-level mass on vertices that keep the sampler nesting; expected
 * vertex draws per sample stay below 1 / (1 - bound). */
double tn_model_deep_mass_bound(const tn_model* model);

/* Returns 0 for identity margins, 1 for power margins; with power margins and
 * a non-NULL alpha, writes one tail index per coordinate. */
int tn_model_margins(const tn_model* model, double* alpha);

/* Serialized explicit form.  *out is allocated by the library; release it
 * with tn_string_free. */
tn_status tn_model_serialize(const tn_model* model, char** out);
void tn_string_free(char* text);
void tn_doubles_free(double* values);

/* Validation without keeping the model: *valid receives 0 or 1 and *message a
 * one-line summary or the failure description (release with tn_string_free). */
tn_status tn_validate_json(const char* text, int* valid, char** message);
tn_status tn_validate_file(const char* path, int* valid, char** message);

/* Distribution function of the copula itself on the unit cube; margins play
 * no role here.  point carries `dimension` coordinates in [0, 1]. */
tn_status tn_cdf(const tn_model* model, const double* point, int len, double* out, char* errmsg,
                 size_t errcap);

/* Corner of the shrinking lower-left box after `levels` levels (writes
 * `dimension` values). */
tn_status tn_corner(const tn_model* model, int levels, double* out, char* errmsg, size_t errcap);

/* Mass that the projection onto the zero coordinates of `vertex` gives its
 * own lower-left box after `levels` levels. */
tn_status tn_corner_mass(const tn_model* model, int levels, uint32_t vertex, double* out,
                         char* errmsg, size_t errcap);

/* Model of the projection onto the zero coordinates of `vertex` (at least one
 * coordinate must survive); power margins keep the surviving tail indices. */
tn_status tn_project(const tn_model* model, uint32_t vertex, tn_model** out, char* errmsg,
                     size_t errcap);

typedef struct tn_work_stats {
  uint64_t samples;
  uint64_t vertex_draws;
  double deep_mass_bound;
} tn_work_stats;

/* count rows of `dimension` values, row-major, with the model's margins
 * applied.  The output is a pure function of (model, count, seed); the thread
 * count only partitions the work.  stats may be NULL. */
tn_status tn_sample(const tn_model* model, uint64_t count, uint64_t seed, int threads,
                    double* out, tn_work_stats* stats, char* errmsg, size_t errcap);

/* Mass of the shrinking diagonal box on the face at `vertex`, one value per
 * scale. */
tn_status tn_tail_scan(const tn_model* model, uint32_t vertex, const double* scales, int count,
                       double* mass, char* errmsg, size_t errcap);

/* Natural scan scales for the face at `vertex`: the corner coordinates of its
 * projected levels.  max_points = 0 keeps every level.  *scales is allocated
 * by the library (release with tn_doubles_free); *count receives the length. */
tn_status tn_schedule(const tn_model* model, uint32_t vertex, int max_points, double** scales,
                      int* count, char* errmsg, size_t errcap);

typedef struct tn_tail_fit_result {
  double degree;
  double coefficient;
  double residual;     /* rms log-space misfit of the fitted power law */
  double ratio_spread; /* max over min of mass / scale^degree near zero */
  int degenerate;      /* 1 when some scanned mass vanished */
} tn_tail_fit_result;

/* Least-squares power-law fit mass ~ coefficient * scale^degree. */
tn_status tn_tail_fit(const double* scales, const double* mass, int count, tn_tail_fit_result* out,
                      char* errmsg, size_t errcap);

typedef enum tn_reference_family {
  TN_REF_INDEPENDENCE = 0,
  TN_REF_CLAYTON = 1,
  TN_REF_GUMBEL = 2
} tn_reference_family;

tn_status tn_reference_cdf(tn_reference_family family, double theta, const double* u, int len,
                           double* out, char* errmsg, size_t errcap);

typedef struct tn_gof {
  uint64_t samples;
  uint64_t buckets; /* cells entering the statistic after pooling */
  double chi_square;
  int dof;
  double p_value;
  double max_sigma;          /* worst standardized deviation of an unpooled cell */
  uint64_t off_support_hits; /* samples that landed in zero-mass cells */
  int pass;                  /* 1 when p > 1e-3, max_sigma <= 4, no off-support hits */
} tn_gof;

/* Draws fresh copula samples (margins ignored) and bins them on the depth-n
 * refinement grid against the exact cell masses. */
tn_status tn_oracle_check(const tn_model* model, int depth, uint64_t samples, uint64_t seed,
                          int threads, tn_gof* out, char* errmsg, size_t errcap);

#ifdef __cplusplus
}
#endif

#endif
