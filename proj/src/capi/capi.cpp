#include "tailnest/tailnest.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/margins.hpp"
#include "core/sampler.hpp"

// Exceptions stop here: every entry point funnels through guarded(), which
// maps internal error codes onto the C status values.

struct tn_model {
  tailnest::Model m;
};

namespace {

using tailnest::Errc;
using tailnest::Error;

tn_status status_of(Errc code) {
  switch (code) {
    case Errc::parse:
      return TN_ERR_PARSE;
    case Errc::validation:
      return TN_ERR_VALIDATION;
    case Errc::bounds:
      return TN_ERR_BOUNDS;
    case Errc::budget:
      return TN_ERR_BUDGET;
    case Errc::io:
      return TN_ERR_IO;
    case Errc::internal:
      return TN_ERR_INTERNAL;
  }
  return TN_ERR_INTERNAL;
}

void put_message(char* errmsg, size_t errcap, const char* text) {
  if (errmsg == nullptr || errcap == 0) return;
  std::snprintf(errmsg, errcap, "%s", text);
}

template <typename Fn>
tn_status guarded(char* errmsg, size_t errcap, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    put_message(errmsg, errcap, e.what());
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    put_message(errmsg, errcap, "out of memory");
    return TN_ERR_NOMEM;
  } catch (const std::exception& e) {
    put_message(errmsg, errcap, e.what());
    return TN_ERR_INTERNAL;
  } catch (...) {
    put_message(errmsg, errcap, "unknown failure");
    return TN_ERR_INTERNAL;
  }
}

tn_status null_argument(char* errmsg, size_t errcap) {
  put_message(errmsg, errcap, "null argument");
  return TN_ERR_BOUNDS;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* tn_status_name(tn_status status) {
  switch (status) {
    case TN_OK:
      return "ok";
    case TN_ERR_PARSE:
      return "parse";
    case TN_ERR_VALIDATION:
      return "validation";
    case TN_ERR_BOUNDS:
      return "bounds";
    case TN_ERR_BUDGET:
      return "budget";
    case TN_ERR_IO:
      return "io";
    case TN_ERR_NOMEM:
      return "nomem";
    case TN_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

tn_status tn_model_load_json(const char* text, tn_model** out, char* errmsg, size_t errcap) {
  if (text == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    *out = new tn_model{tailnest::load_model_json(text)};
    return TN_OK;
  });
}

tn_status tn_model_load_file(const char* path, tn_model** out, char* errmsg, size_t errcap) {
  if (path == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    *out = new tn_model{tailnest::load_model_file(path)};
    return TN_OK;
  });
}

void tn_model_free(tn_model* model) { delete model; }

int tn_model_dimension(const tn_model* model) { return model ? model->m.seq.dimension() : 0; }

int tn_model_order(const tn_model* model) { return model ? model->m.seq.order() : 0; }

int tn_model_depth(const tn_model* model) { return model ? model->m.seq.depth() : 0; }

uint64_t tn_model_seed(const tn_model* model) { return model ? model->m.seed : 0; }

double tn_model_deep_mass_bound(const tn_model* model) {
  return model ? model->m.seq.deep_mass_bound() : 0.0;
}

int tn_model_margins(const tn_model* model, double* alpha) {
  if (model == nullptr) return 0;
  const tailnest::MarginSpec& spec = model->m.margins;
  if (spec.kind != tailnest::MarginSpec::Kind::pareto) return 0;
  if (alpha != nullptr) std::copy(spec.alpha.begin(), spec.alpha.end(), alpha);
  return 1;
}

tn_status tn_model_serialize(const tn_model* model, char** out) {
  if (model == nullptr || out == nullptr) return TN_ERR_BOUNDS;
  return guarded(nullptr, 0, [&] {
    *out = dup_string(tailnest::serialize_model(model->m));
    return TN_OK;
  });
}

void tn_string_free(char* text) { delete[] text; }

void tn_doubles_free(double* values) { delete[] values; }

tn_status tn_validate_json(const char* text, int* valid, char** message) {
  if (text == nullptr || valid == nullptr) return TN_ERR_BOUNDS;
  return guarded(nullptr, 0, [&] {
    const tailnest::ValidationReport rep = tailnest::validate_model_json(text);
    *valid = rep.valid ? 1 : 0;
    if (message != nullptr) *message = dup_string(rep.message);
    return TN_OK;
  });
}

tn_status tn_validate_file(const char* path, int* valid, char** message) {
  if (path == nullptr || valid == nullptr) return TN_ERR_BOUNDS;
  return guarded(nullptr, 0, [&] {
    const tailnest::ValidationReport rep = tailnest::validate_model_file(path);
    *valid = rep.valid ? 1 : 0;
    if (message != nullptr) *message = dup_string(rep.message);
    return TN_OK;
  });
}

tn_status tn_cdf(const tn_model* model, const double* point, int len, double* out, char* errmsg,
                 size_t errcap) {
  if (model == nullptr || point == nullptr || out == nullptr)
    return null_argument(errmsg, errcap);
  if (len < 0) {
    put_message(errmsg, errcap, "negative length");
    return TN_ERR_BOUNDS;
  }
  return guarded(errmsg, errcap, [&] {
    *out = model->m.seq.cdf(std::span<const double>(point, std::size_t(len)));
    return TN_OK;
  });
}

tn_status tn_corner(const tn_model* model, int levels, double* out, char* errmsg, size_t errcap) {
  if (model == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    const std::vector<double> c = model->m.seq.corner(levels);
    std::copy(c.begin(), c.end(), out);
    return TN_OK;
  });
}

tn_status tn_corner_mass(const tn_model* model, int levels, uint32_t vertex, double* out,
                         char* errmsg, size_t errcap) {
  if (model == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    *out = model->m.seq.corner_mass(levels, vertex);
    return TN_OK;
  });
}

tn_status tn_project(const tn_model* model, uint32_t vertex, tn_model** out, char* errmsg,
                     size_t errcap) {
  if (model == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    tailnest::Model proj;
    proj.seq = model->m.seq.project(vertex);
    proj.seed = model->m.seed;
    if (model->m.margins.kind == tailnest::MarginSpec::Kind::pareto) {
      std::vector<double> alpha;
      const int r = model->m.seq.dimension();
      for (int i = 0; i < r; ++i) {
        if (!(vertex >> i & 1u)) alpha.push_back(model->m.margins.alpha[i]);
      }
      proj.margins = tailnest::MarginSpec::pareto(std::move(alpha));
    }
    *out = new tn_model{std::move(proj)};
    return TN_OK;
  });
}

tn_status tn_sample(const tn_model* model, uint64_t count, uint64_t seed, int threads,
                    double* out, tn_work_stats* stats, char* errmsg, size_t errcap) {
  if (model == nullptr || (out == nullptr && count > 0)) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    tailnest::SampleOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    tailnest::WorkStats ws;
    std::vector<double> rows = tailnest::sample(model->m.seq, std::size_t(count), opt, &ws);
    tailnest::apply_margins(rows, model->m.seq.dimension(), model->m.margins);
    std::copy(rows.begin(), rows.end(), out);
    if (stats != nullptr) {
      stats->samples = ws.samples;
      stats->vertex_draws = ws.vertex_draws;
      stats->deep_mass_bound = ws.deep_mass_bound;
    }
    return TN_OK;
  });
}

tn_status tn_tail_scan(const tn_model* model, uint32_t vertex, const double* scales, int count,
                       double* mass, char* errmsg, size_t errcap) {
  if (model == nullptr || scales == nullptr || mass == nullptr)
    return null_argument(errmsg, errcap);
  if (count <= 0) {
    put_message(errmsg, errcap, "need at least one scale");
    return TN_ERR_BOUNDS;
  }
  return guarded(errmsg, errcap, [&] {
    const tailnest::TailScan scan = tailnest::tail_scan(
        model->m.seq, vertex, std::span<const double>(scales, std::size_t(count)));
    std::copy(scan.mass.begin(), scan.mass.end(), mass);
    return TN_OK;
  });
}

tn_status tn_schedule(const tn_model* model, uint32_t vertex, int max_points, double** scales,
                      int* count, char* errmsg, size_t errcap) {
  if (model == nullptr || scales == nullptr || count == nullptr)
    return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    const std::vector<double> pts = tailnest::schedule_points(model->m.seq, vertex, max_points);
    double* buf = new double[pts.size()];
    std::copy(pts.begin(), pts.end(), buf);
    *scales = buf;
    *count = static_cast<int>(pts.size());
    return TN_OK;
  });
}

tn_status tn_tail_fit(const double* scales, const double* mass, int count, tn_tail_fit_result* out,
                      char* errmsg, size_t errcap) {
  if (scales == nullptr || mass == nullptr || out == nullptr)
    return null_argument(errmsg, errcap);
  if (count <= 0) {
    put_message(errmsg, errcap, "need at least one scan point");
    return TN_ERR_BOUNDS;
  }
  return guarded(errmsg, errcap, [&] {
    const tailnest::TailFit fit =
        tailnest::fit_tail(std::span<const double>(scales, std::size_t(count)),
                           std::span<const double>(mass, std::size_t(count)));
    out->degree = fit.degree;
    out->coefficient = fit.coefficient;
    out->residual = fit.residual;
    out->ratio_spread = fit.ratio_spread;
    out->degenerate = fit.degenerate ? 1 : 0;
    return TN_OK;
  });
}

tn_status tn_reference_cdf(tn_reference_family family, double theta, const double* u, int len,
                           double* out, char* errmsg, size_t errcap) {
  if (u == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  if (len <= 0) {
    put_message(errmsg, errcap, "need at least one coordinate");
    return TN_ERR_BOUNDS;
  }
  tailnest::ReferenceFamily fam;
  switch (family) {
    case TN_REF_INDEPENDENCE:
      fam = tailnest::ReferenceFamily::independence;
      break;
    case TN_REF_CLAYTON:
      fam = tailnest::ReferenceFamily::clayton;
      break;
    case TN_REF_GUMBEL:
      fam = tailnest::ReferenceFamily::gumbel;
      break;
    default:
      put_message(errmsg, errcap, "unknown reference family");
      return TN_ERR_BOUNDS;
  }
  return guarded(errmsg, errcap, [&] {
    *out = tailnest::reference_cdf(fam, theta, std::span<const double>(u, std::size_t(len)));
    return TN_OK;
  });
}

tn_status tn_oracle_check(const tn_model* model, int depth, uint64_t samples, uint64_t seed,
                          int threads, tn_gof* out, char* errmsg, size_t errcap) {
  if (model == nullptr || out == nullptr) return null_argument(errmsg, errcap);
  return guarded(errmsg, errcap, [&] {
    tailnest::SampleOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    const std::vector<double> rows = tailnest::sample(model->m.seq, std::size_t(samples), opt);
    const tailnest::GofReport rep = tailnest::gof_report(model->m.seq, rows, depth);
    out->samples = rep.samples;
    out->buckets = static_cast<uint64_t>(rep.buckets);
    out->chi_square = rep.chi_square;
    out->dof = rep.dof;
    out->p_value = rep.p_value;
    out->max_sigma = rep.max_sigma;
    out->off_support_hits = rep.off_support_hits;
    out->pass = rep.pass() ? 1 : 0;
    return TN_OK;
  });
}

}  // extern "C"
