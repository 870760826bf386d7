#include "torsionlab/qmc.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>

namespace torsionlab {

namespace {

std::vector<unsigned> first_primes(std::size_t n) {
  std::vector<unsigned> p;
  for (unsigned c = 2; p.size() < n; ++c) {
    bool prime = true;
    for (unsigned q : p) {
      if (q * q > c) break;
      if (c % q == 0) {
        prime = false;
        break;
      }
    }
    if (prime) p.push_back(c);
  }
  return p;
}

constexpr std::uint64_t kShard = 4096;

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ScrambledHalton::ScrambledHalton(std::size_t dim, std::uint64_t seed) : dim_(dim), bases_(first_primes(dim)) {
  std::mt19937_64 rng(mix64(seed));
  perms_.resize(dim);
  depth_.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    unsigned b = bases_[d];
    depth_[d] = static_cast<unsigned>(std::ceil(53.0 * std::log(2.0) / std::log(static_cast<double>(b))));
    perms_[d].resize(depth_[d]);
    for (auto& perm : perms_[d]) {
      perm.resize(b);
      for (unsigned v = 0; v < b; ++v) perm[v] = static_cast<std::uint16_t>(v);
      for (unsigned v = b - 1; v > 0; --v) {
        // Unbiased bounded draw; mt19937_64 output is fully specified.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % (v + 1ULL);
        std::uint64_t r;
        do r = rng();
        while (r >= limit);
        std::swap(perm[v], perm[r % (v + 1ULL)]);
      }
    }
  }
}

void ScrambledHalton::point(std::uint64_t index, double* out) const {
  for (std::size_t d = 0; d < dim_; ++d) {
    unsigned b = bases_[d];
    double inv = 1.0 / b, scale = inv, v = 0.0;
    std::uint64_t i = index;
    for (unsigned j = 0; j < depth_[d]; ++j) {
      unsigned digit = static_cast<unsigned>(i % b);
      i /= b;
      v += perms_[d][j][digit] * scale;
      scale *= inv;
    }
    out[d] = v < 1.0 ? v : std::nextafter(1.0, 0.0);
  }
}

std::vector<double> ScrambledHalton::point(std::uint64_t index) const {
  std::vector<double> p(dim_);
  point(index, p.data());
  return p;
}

double MeanAccumulator::stderr_of_mean() const {
  if (count < 2) return 0.0;
  double n = static_cast<double>(count);
  double m = sum / n;
  double var = std::max(0.0, (sum_sq / n - m * m) * n / (n - 1));
  return std::sqrt(var / n);
}

unsigned worker_count() {
  if (const char* env = std::getenv("TORSIONLAB_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void run_shards(std::size_t shards, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(shards, 1));
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < shards; s = next++) fn(s);
    });
  for (auto& t : pool) t.join();
}

std::vector<MeanAccumulator> qmc_means(std::size_t dim, std::uint64_t seed, std::uint64_t n, std::size_t outputs,
                                       const std::function<void(const double*, double*)>& fn) {
  ScrambledHalton seq(dim, seed);
  std::size_t shards = static_cast<std::size_t>((n + kShard - 1) / kShard);
  std::vector<std::vector<MeanAccumulator>> parts(shards, std::vector<MeanAccumulator>(outputs));
  run_shards(shards, [&](std::size_t s) {
    std::vector<double> x(dim), v(outputs);
    std::uint64_t begin = s * kShard, end = std::min<std::uint64_t>(n, begin + kShard);
    for (std::uint64_t i = begin; i < end; ++i) {
      seq.point(i, x.data());
      fn(x.data(), v.data());
      for (std::size_t k = 0; k < outputs; ++k) parts[s][k].add(v[k]);
    }
  });
  std::vector<MeanAccumulator> total(outputs);
  for (const auto& part : parts)
    for (std::size_t k = 0; k < outputs; ++k) total[k].merge(part[k]);
  return total;
}

MeanAccumulator qmc_mean(std::size_t dim, std::uint64_t seed, std::uint64_t n,
                         const std::function<double(const double*)>& fn) {
  return qmc_means(dim, seed, n, 1, [&](const double* x, double* out) { out[0] = fn(x); })[0];
}

}  // namespace torsionlab
