#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace torsionlab {

// Halton sequence with per-digit random permutations chosen from the seed.
// Identical output for a given (seed, dim) on every platform.
class ScrambledHalton {
 public:
  ScrambledHalton(std::size_t dim, std::uint64_t seed);
  std::size_t dim() const { return dim_; }
  // Point with the given index, coordinates in [0, 1).
  void point(std::uint64_t index, double* out) const;
  std::vector<double> point(std::uint64_t index) const;

 private:
  std::size_t dim_;
  std::vector<unsigned> bases_;
  std::vector<unsigned> depth_;
  std::vector<std::vector<std::vector<std::uint16_t>>> perms_;  // [dim][digit][value]
};

// Worker count from TORSIONLAB_THREADS, defaulting to the hardware count.
unsigned worker_count();

// Runs fn(shard) for shard in [0, shards) on worker_count() threads.
void run_shards(std::size_t shards, const std::function<void(std::size_t)>& fn);

// Running sums for a QMC estimate of a mean.
struct MeanAccumulator {
  double sum = 0, sum_sq = 0;
  std::uint64_t count = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double stderr_of_mean() const;
};

// Splits n samples into fixed-size shards, evaluates fn(point, acc) on each
// and merges shard results in index order. The result does not depend on the
// worker count.
MeanAccumulator qmc_mean(std::size_t dim, std::uint64_t seed, std::uint64_t n,
                         const std::function<double(const double*)>& fn);

// Same, with several accumulators per sample.
std::vector<MeanAccumulator> qmc_means(std::size_t dim, std::uint64_t seed, std::uint64_t n, std::size_t outputs,
                                       const std::function<void(const double*, double*)>& fn);

// Deterministic 64-bit generator state mixing (splitmix64).
std::uint64_t mix64(std::uint64_t x);

}  // namespace torsionlab
