#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tailnest/tailnest.h"

// Command line front end.  Exit codes: 0 success, 1 invalid model or failed
// check, 2 usage error, 3 resolution/cell budget exceeded.

namespace {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

bool parse_doubles(const std::string& text, std::vector<double>& out) {
  out.clear();
  const char* p = text.c_str();
  const char* end = p + text.size();
  while (p < end) {
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) return false;
    out.push_back(v);
    p = res.ptr;
    if (p == end) break;
    if (*p != ',') return false;
    ++p;
  }
  return !out.empty();
}

int failure_code(tn_status st) { return st == TN_ERR_BUDGET ? 3 : 1; }

int report_failure(tn_status st, const char* err) {
  std::fprintf(stderr, "error: %s\n", err[0] != '\0' ? err : tn_status_name(st));
  return failure_code(st);
}

struct ModelHandle {
  tn_model* m = nullptr;
  ~ModelHandle() { tn_model_free(m); }
};

int load_model(const std::string& path, ModelHandle& h) {
  char err[512] = {0};
  const tn_status st = tn_model_load_file(path.c_str(), &h.m, err, sizeof err);
  if (st != TN_OK) return report_failure(st, err);
  return 0;
}

// --threads beats TAILNEST_THREADS beats 1
int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  const char* env = std::getenv("TAILNEST_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 4096) {
    std::fprintf(stderr, "error: invalid TAILNEST_THREADS value \"%s\"\n", env);
    return -1;
  }
  return static_cast<int>(v);
}

struct ValidateArgs {
  std::string config;
};

int run_validate(const ValidateArgs& args) {
  int valid = 0;
  char* message = nullptr;
  const tn_status st = tn_validate_file(args.config.c_str(), &valid, &message);
  if (st != TN_OK) {
    std::fprintf(stderr, "error: %s\n", tn_status_name(st));
    return failure_code(st);
  }
  if (valid != 0) {
    std::printf("%s\n", message != nullptr ? message : "ok");
  } else {
    std::fprintf(stderr, "invalid: %s\n", message != nullptr ? message : "unknown failure");
  }
  tn_string_free(message);
  return valid != 0 ? 0 : 1;
}

struct SampleArgs {
  std::string config;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string out_path;
  bool stats = false;
};

int run_sample(const SampleArgs& args) {
  ModelHandle h;
  if (const int code = load_model(args.config, h); code != 0) return code;
  const int threads = resolve_threads(args.threads);
  if (threads < 0) return 2;
  const std::uint64_t seed = args.seed_given ? args.seed : tn_model_seed(h.m);
  const int r = tn_model_dimension(h.m);

  std::vector<double> rows(args.count * static_cast<std::uint64_t>(r));
  tn_work_stats stats = {};
  char err[512] = {0};
  const tn_status st =
      tn_sample(h.m, args.count, seed, threads, rows.data(), &stats, err, sizeof err);
  if (st != TN_OK) return report_failure(st, err);

  std::ofstream file;
  if (!args.out_path.empty()) {
    file.open(args.out_path, std::ios::binary);
    if (!file) {
      std::fprintf(stderr, "error: cannot write %s\n", args.out_path.c_str());
      return 1;
    }
  }
  std::ostream& out = args.out_path.empty() ? std::cout : file;
  std::string line;
  for (std::size_t i = 0; i < rows.size(); i += static_cast<std::size_t>(r)) {
    line.clear();
    for (int j = 0; j < r; ++j) {
      if (j > 0) line += ',';
      line += format_double(rows[i + static_cast<std::size_t>(j)]);
    }
    line += '\n';
    out << line;
  }
  out.flush();
  if (!out) {
    std::fprintf(stderr, "error: short write\n");
    return 1;
  }
  if (args.stats) {
    std::fprintf(stderr, "samples=%llu vertex_draws=%llu average_draws=%s deep_mass_bound=%s\n",
                 static_cast<unsigned long long>(stats.samples),
                 static_cast<unsigned long long>(stats.vertex_draws),
                 format_double(stats.samples != 0
                                   ? double(stats.vertex_draws) / double(stats.samples)
                                   : 0.0)
                     .c_str(),
                 format_double(stats.deep_mass_bound).c_str());
  }
  return 0;
}

struct CdfArgs {
  std::string config;
  std::vector<std::string> points;
};

int run_cdf(const CdfArgs& args) {
  ModelHandle h;
  if (const int code = load_model(args.config, h); code != 0) return code;
  std::vector<double> point;
  for (const std::string& text : args.points) {
    if (!parse_doubles(text, point)) {
      std::fprintf(stderr, "error: cannot parse point \"%s\"\n", text.c_str());
      return 2;
    }
    double value = 0.0;
    char err[512] = {0};
    const tn_status st = tn_cdf(h.m, point.data(), static_cast<int>(point.size()), &value, err,
                                sizeof err);
    if (st != TN_OK) return report_failure(st, err);
    std::printf("%s\n", format_double(value).c_str());
  }
  return 0;
}

struct TailscanArgs {
  std::string config;
  std::string reference;
  double theta = 1.0;
  int dim = 2;
  std::uint32_t face = 0;
  int points = 0;
  int min_exp = 4;
  int max_exp = 20;
  std::string scales_text;
  bool fit = false;
};

int print_scan(const std::vector<double>& scales, const std::vector<double>& mass, bool fit) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    std::printf("%s,%s\n", format_double(scales[i]).c_str(), format_double(mass[i]).c_str());
  }
  if (!fit) return 0;
  tn_tail_fit_result res = {};
  char err[512] = {0};
  const tn_status st = tn_tail_fit(scales.data(), mass.data(), static_cast<int>(scales.size()),
                                   &res, err, sizeof err);
  if (st != TN_OK) return report_failure(st, err);
  std::fprintf(stderr, "fit: degree=%s coefficient=%s residual=%s ratio_spread=%s degenerate=%d\n",
               format_double(res.degree).c_str(), format_double(res.coefficient).c_str(),
               format_double(res.residual).c_str(), format_double(res.ratio_spread).c_str(),
               res.degenerate);
  return 0;
}

int run_tailscan(const TailscanArgs& args) {
  const bool have_config = !args.config.empty();
  const bool have_reference = !args.reference.empty();
  if (have_config == have_reference) {
    std::fprintf(stderr, "error: give either a config file or --reference\n");
    return 2;
  }

  std::vector<double> scales;
  if (!args.scales_text.empty()) {
    if (!parse_doubles(args.scales_text, scales)) {
      std::fprintf(stderr, "error: cannot parse --scales \"%s\"\n", args.scales_text.c_str());
      return 2;
    }
  }

  if (have_reference) {
    tn_reference_family family = TN_REF_INDEPENDENCE;
    if (args.reference == "clayton") {
      family = TN_REF_CLAYTON;
    } else if (args.reference == "gumbel") {
      family = TN_REF_GUMBEL;
    } else if (args.reference != "independence") {
      std::fprintf(stderr, "error: unknown reference family \"%s\"\n", args.reference.c_str());
      return 2;
    }
    if (scales.empty()) {
      if (args.min_exp > args.max_exp || args.min_exp < 1) {
        std::fprintf(stderr, "error: need 1 <= min-exp <= max-exp\n");
        return 2;
      }
      for (int e = args.min_exp; e <= args.max_exp; ++e) scales.push_back(std::ldexp(1.0, -e));
    }
    std::vector<double> mass(scales.size(), 0.0);
    std::vector<double> point(static_cast<std::size_t>(args.dim), 0.0);
    for (std::size_t i = 0; i < scales.size(); ++i) {
      point.assign(static_cast<std::size_t>(args.dim), scales[i]);
      char err[512] = {0};
      const tn_status st =
          tn_reference_cdf(family, args.theta, point.data(), args.dim, &mass[i], err, sizeof err);
      if (st != TN_OK) return report_failure(st, err);
    }
    return print_scan(scales, mass, args.fit);
  }

  ModelHandle h;
  if (const int code = load_model(args.config, h); code != 0) return code;
  if (scales.empty()) {
    double* buf = nullptr;
    int count = 0;
    char err[512] = {0};
    const tn_status st = tn_schedule(h.m, args.face, args.points, &buf, &count, err, sizeof err);
    if (st != TN_OK) return report_failure(st, err);
    scales.assign(buf, buf + count);
    tn_doubles_free(buf);
    if (scales.empty()) {
      std::fprintf(stderr, "error: the model stores no levels to scan\n");
      return 1;
    }
  }
  std::vector<double> mass(scales.size(), 0.0);
  char err[512] = {0};
  const tn_status st = tn_tail_scan(h.m, args.face, scales.data(),
                                    static_cast<int>(scales.size()), mass.data(), err, sizeof err);
  if (st != TN_OK) return report_failure(st, err);
  return print_scan(scales, mass, args.fit);
}

struct OracleArgs {
  std::string config;
  int depth = 0;
  std::uint64_t count = 100000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
};

int run_oracle(const OracleArgs& args) {
  ModelHandle h;
  if (const int code = load_model(args.config, h); code != 0) return code;
  const int threads = resolve_threads(args.threads);
  if (threads < 0) return 2;
  const std::uint64_t seed = args.seed_given ? args.seed : tn_model_seed(h.m);

  tn_gof gof = {};
  char err[512] = {0};
  const tn_status st =
      tn_oracle_check(h.m, args.depth, args.count, seed, threads, &gof, err, sizeof err);
  if (st != TN_OK) return report_failure(st, err);
  std::printf("samples=%llu buckets=%llu dof=%d chi_square=%s\n",
              static_cast<unsigned long long>(gof.samples),
              static_cast<unsigned long long>(gof.buckets), gof.dof,
              format_double(gof.chi_square).c_str());
  std::printf("p_value=%s max_sigma=%s off_support_hits=%llu\n",
              format_double(gof.p_value).c_str(), format_double(gof.max_sigma).c_str(),
              static_cast<unsigned long long>(gof.off_support_hits));
  std::printf("verdict=%s\n", gof.pass != 0 ? "PASS" : "FAIL");
  return gof.pass != 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-uniform copulas with prescribed corner decay"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand("validate", "check a model description");
  validate->add_option("config", validate_args.config, "JSON model file")->required();

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "draw samples as CSV rows");
  sample->add_option("config", sample_args.config, "JSON model file")->required();
  sample->add_option("--count", sample_args.count, "number of rows")->required();
  CLI::Option* sample_seed = sample->add_option("--seed", sample_args.seed,
                                                "RNG seed (default: the model's seed)");
  sample->add_option("--threads", sample_args.threads,
                     "worker threads (default: TAILNEST_THREADS or 1)");
  sample->add_option("--out", sample_args.out_path, "output file (default: stdout)");
  sample->add_flag("--stats", sample_args.stats, "print work statistics to stderr");

  CdfArgs cdf_args;
  CLI::App* cdf = app.add_subcommand("cdf", "evaluate the distribution function");
  cdf->add_option("config", cdf_args.config, "JSON model file")->required();
  cdf->add_option("--point", cdf_args.points, "comma-separated coordinates, repeatable")
      ->required();

  TailscanArgs tailscan_args;
  CLI::App* tailscan = app.add_subcommand("tailscan", "scan diagonal corner masses");
  tailscan->add_option("config", tailscan_args.config, "JSON model file");
  tailscan->add_option("--reference", tailscan_args.reference,
                       "scan a reference family instead: independence, clayton, gumbel");
  tailscan->add_option("--theta", tailscan_args.theta, "reference dependence parameter");
  tailscan->add_option("--dim", tailscan_args.dim, "reference dimension")
      ->check(CLI::Range(1, 20));
  tailscan->add_option("--face", tailscan_args.face,
                       "vertex mask naming the face (zero bits are kept)");
  tailscan->add_option("--points", tailscan_args.points, "cap on schedule points (0 = all)");
  tailscan->add_option("--min-exp", tailscan_args.min_exp, "smallest dyadic exponent");
  tailscan->add_option("--max-exp", tailscan_args.max_exp, "largest dyadic exponent");
  tailscan->add_option("--scales", tailscan_args.scales_text, "explicit comma-separated scales");
  tailscan->add_flag("--fit", tailscan_args.fit, "fit a power law and report it on stderr");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "chi-square check of sampler against the law");
  oracle->add_option("config", oracle_args.config, "JSON model file")->required();
  oracle->add_option("--depth", oracle_args.depth, "refinement depth of the binning grid")
      ->required();
  oracle->add_option("--count", oracle_args.count, "number of samples");
  CLI::Option* oracle_seed = oracle->add_option("--seed", oracle_args.seed,
                                                "RNG seed (default: the model's seed)");
  oracle->add_option("--threads", oracle_args.threads,
                     "worker threads (default: TAILNEST_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  sample_args.seed_given = sample_seed->count() > 0;
  oracle_args.seed_given = oracle_seed->count() > 0;

  if (app.got_subcommand(validate)) return run_validate(validate_args);
  if (app.got_subcommand(sample)) return run_sample(sample_args);
  if (app.got_subcommand(cdf)) return run_cdf(cdf_args);
  if (app.got_subcommand(tailscan)) return run_tailscan(tailscan_args);
  if (app.got_subcommand(oracle)) return run_oracle(oracle_args);
  return 2;
}
