#include "core/sampler.hpp"

#include <algorithm>
#include <bit>
#include <thread>
#include <unordered_map>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace tailnest {

namespace {

// Cumulative sums of a level's vertex weights restricted to the still-active
// coordinates, built lazily per worker. Keys combine level and active mask.
class ProjectionCache {
 public:
  explicit ProjectionCache(const NestSequence& seq) : seq_(&seq) {}

  std::span<const double> prefix(int level, Vertex active) {
    const std::uint64_t key = (std::uint64_t(level) << 32) | active;
    const auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    const int r = seq_->dimension();
    const std::vector<double>& z = seq_->level(level).z;
    std::vector<double> cum =
        active == full_mask(r) ? z : project_onto(z, active, r);
    double acc = 0.0;
    for (double& v : cum) {
      acc += v;
      v = acc;
    }
    cum.back() = 1.0;  // guard against accumulated rounding
    return table_.emplace(key, std::move(cum)).first->second;
  }

 private:
  const NestSequence* seq_;
  std::unordered_map<std::uint64_t, std::vector<double>> table_;
};

Vertex draw_vertex(std::span<const double> cum, double u) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cum.begin(), std::ptrdiff_t(cum.size()) - 1);
  return Vertex(idx);
}

void sample_range(const NestSequence& seq, std::uint64_t seed, std::size_t begin,
                  std::size_t end, double* out, ProjectionCache& cache,
                  std::uint64_t& draws) {
  const int r = seq.dimension();
  const int k = seq.order();
  std::vector<double> hi(r);
  for (std::size_t s = begin; s < end; ++s) {
    Rng rng(seed, s);
    Vertex active = full_mask(r);
    std::fill(hi.begin(), hi.end(), 1.0);
    double* row = out + std::size_t(r) * s;
    for (int level = 0; level < seq.depth() && popcount(active) > k; ++level) {
      const std::vector<double>& u = seq.level(level).u;
      const Vertex drawn =
          unpack_bits(draw_vertex(cache.prefix(level, active), rng.uniform()), active);
      ++draws;
      for (Vertex bits = active; bits != 0;) {
        const int i = std::countr_zero(bits);
        bits &= bits - 1;
        const double split = u[i] * hi[i];
        if (drawn >> i & 1u) {
          // released: uniform in the upper part of the current window
          row[i] = split + (hi[i] - split) * rng.uniform();
          active ^= Vertex(1) << i;
        } else {
          hi[i] = split;
        }
      }
    }
    // at most k coordinates left, or levels exhausted: the remainder is uniform
    for (Vertex bits = active; bits != 0;) {
      const int i = std::countr_zero(bits);
      bits &= bits - 1;
      row[i] = hi[i] * rng.uniform();
    }
  }
}

int clamp_workers(int threads, std::size_t count) {
  require(threads >= 1, Errc::bounds, "thread count must be positive");
  if (count == 0) return 1;
  return int(std::min<std::size_t>(std::size_t(threads), count));
}

}  // namespace

std::vector<double> sample(const NestSequence& seq, std::size_t count,
                           const SampleOptions& opt, WorkStats* stats) {
  const int r = seq.dimension();
  const int workers = clamp_workers(opt.threads, count);
  std::vector<double> out(count * std::size_t(r));
  std::vector<std::uint64_t> draws(workers, 0);
  if (workers == 1) {
    ProjectionCache cache(seq);
    sample_range(seq, opt.seed, 0, count, out.data(), cache, draws[0]);
  } else {
    const std::size_t chunk = (count + std::size_t(workers) - 1) / std::size_t(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        ProjectionCache cache(seq);
        const std::size_t b = chunk * std::size_t(t);
        const std::size_t e = std::min(count, b + chunk);
        if (b < e) sample_range(seq, opt.seed, b, e, out.data(), cache, draws[t]);
      });
    }
    for (std::thread& th : pool) th.join();
  }
  if (stats != nullptr) {
    stats->samples = count;
    stats->vertex_draws = 0;
    for (std::uint64_t d : draws) stats->vertex_draws += d;
    stats->deep_mass_bound = seq.deep_mass_bound();
  }
  return out;
}

std::vector<double> sample_iterated_nest(const VertexCopula& c, int depth, std::size_t count,
                                         const SampleOptions& opt, WorkStats* stats) {
  require(depth >= 0, Errc::bounds, "depth must be nonnegative");
  const int r = c.dimension();
  const int workers = clamp_workers(opt.threads, count);
  std::vector<double> out(count * std::size_t(r));
  std::vector<double> cum = c.z;
  double acc = 0.0;
  for (double& v : cum) {
    acc += v;
    v = acc;
  }
  cum.back() = 1.0;

  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> lo(r), width(r);
    for (std::size_t s = begin; s < end; ++s) {
      Rng rng(opt.seed, s);
      std::fill(lo.begin(), lo.end(), 0.0);
      std::fill(width.begin(), width.end(), 1.0);
      for (int level = 0; level < depth; ++level) {
        const Vertex drawn = draw_vertex(cum, rng.uniform());
        for (int i = 0; i < r; ++i) {
          if (drawn >> i & 1u) {
            lo[i] += width[i] * c.u[i];
            width[i] *= 1.0 - c.u[i];
          } else {
            width[i] *= c.u[i];
          }
        }
      }
      double* row = out.data() + std::size_t(r) * s;
      for (int i = 0; i < r; ++i) row[i] = lo[i] + width[i] * rng.uniform();
    }
  };

  if (workers == 1) {
    run(0, count);
  } else {
    const std::size_t chunk = (count + std::size_t(workers) - 1) / std::size_t(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      const std::size_t b = chunk * std::size_t(t);
      const std::size_t e = std::min(count, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
    for (std::thread& th : pool) th.join();
  }
  if (stats != nullptr) {
    stats->samples = count;
    stats->vertex_draws = count * std::uint64_t(depth);
    stats->deep_mass_bound = 0.0;
  }
  return out;
}

}  // namespace tailnest
