#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "torsionlab/numeric.hpp"
#include "torsionlab/polytope.hpp"
#include "torsionlab/torsion.hpp"

namespace torsionlab {

// Ball B^I(x; alpha) = Phi^I_x(Q^I_alpha) with Q^I_alpha the box
// |t_i| < alpha^deg(w_i).
struct BallSpec {
  std::vector<Rat> center;
  std::vector<Word> words;
  std::array<Rat, 2> alpha{Rat(1), Rat(1)};
  void validate(std::size_t n) const;
};

// alpha1^d1 alpha2^d2 for each word.
std::vector<double> box_radii(const std::vector<Word>& words, const std::array<Rat, 2>& alpha);

struct PreimageOptions {
  unsigned starts = 8;
  double tol = 1e-9;
  unsigned max_iter = 80;
};

enum class Membership { Inside, Outside, Failed };

struct PreimageResult {
  Membership status = Membership::Failed;
  std::vector<double> t;
};

// Phi^I compiled in the variables (x, t) together with its t-Jacobian.
class BallMap {
 public:
  BallMap(FlowCache& cache, std::vector<Word> words);
  std::size_t dim() const { return n_; }
  const std::vector<Word>& words() const { return words_; }
  const IterFlowMap& flow() const { return psi_; }

  void eval(std::span<const double> x, std::span<const double> t, std::span<double> out) const;
  double jac_det(std::span<const double> x, std::span<const double> t) const;
  // Row-major n x n derivative in t.
  void jacobian(std::span<const double> x, std::span<const double> t, std::span<double> out) const;

  // Looks for t with Phi_x(t) = y and |t_i| < radii_i by damped Newton from
  // t = 0 and starts - 1 further points of the box.
  PreimageResult preimage(std::span<const double> x, std::span<const double> y, std::span<const double> radii,
                          const PreimageOptions& options = {}) const;

 private:
  std::vector<Word> words_;
  std::size_t n_ = 0;
  IterFlowMap psi_;
  CompiledMap map_;
  std::vector<CompiledPoly> jac_;
  CompiledPoly det_;
};

struct BallSample {
  BallSpec spec;
  std::vector<std::vector<double>> points;  // at most 1000 images
  double volume = 0;
  double stderr_ = 0;
  std::string method;  // "change_of_variables" or "occupancy"
  double jac_min = 0, jac_max = 0;  // of |det D_t Phi| over the samples
  double lambda = 0;                // |lambda_I(x)|
  double box_measure = 0;           // |Q^I_alpha|
  double sandwich_ratio = 0;        // volume / (|Q| |lambda|)
  double raw_ratio = 0;             // volume / (alpha^deg I |lambda|)
};

BallSample ball_sample(const BallMap& map, const BallSpec& spec, std::uint64_t samples, std::uint64_t seed);

// |lambda_I(x)| and the largest |lambda| over the table at x.
struct TupleChoice {
  std::vector<Word> words;
  double lambda = 0;
  double max_lambda = 0;
  double ratio() const { return max_lambda > 0 ? lambda / max_lambda : 0.0; }
};

// Default tuple: the table entry with the largest |lambda| at x.
TupleChoice best_tuple(const LambdaTable& table, std::span<const double> x);
TupleChoice tuple_at(const LambdaTable& table, const std::vector<Word>& words, std::span<const double> x);

struct DoublingOptions {
  double c = 1.0 / 8;
  double delta = 0.5;
  std::uint64_t samples = 2000;
  std::uint64_t seed = 1;
  PreimageOptions newton;
  // Fallback for points where Newton fails: nearest sampled image of the
  // large ball within this distance.
  double fallback_tol = 1e-6;
  std::uint64_t fallback_samples = 20000;
};

struct DoublingReport {
  bool applicable = false;
  std::string reason;
  double rho = 0, c = 0, delta = 0;
  double ratio1 = 0, ratio2 = 0;  // |lambda_I_j(x_j)| / max |lambda|
  std::size_t tested = 0, inside = 0, outside = 0, fallback_inside = 0, inconclusive = 0;
  double pass_fraction = 0;
  double inconclusive_fraction = 0;
  bool passed = false;  // pass_fraction >= 0.99
};

// If the radius c delta rho balls about x1 and x2 meet, tests whether samples
// of the first lie in the radius rho ball about x2. Balls use the isotropic
// box |t|_inf < r.
DoublingReport doubling_check(const BallMap& b1, const BallMap& b2, std::span<const double> x1,
                              std::span<const double> x2, const TupleChoice& tuple1, const TupleChoice& tuple2,
                              double rho, const DoublingOptions& options = {});

struct CoverOptions {
  double c = 1.0 / 8;
  unsigned grid = 4;  // points per axis
  std::uint64_t ball_samples = 128;
  std::uint64_t seed = 1;
  PreimageOptions newton;
  std::vector<Word> words;  // empty: best tuple per center
};

struct CoverReport {
  std::vector<std::vector<double>> centers;
  std::size_t grid_points = 0;
  std::size_t eligible = 0;  // grid points with some nonzero lambda
  double covered_fraction = 0;
  double region_volume = 0;
  double mean_ball_volume = 0;  // of the selection balls
  double volume_oracle = 0;     // region volume over mean ball volume
};

// Greedy maximal disjoint family of balls of radius c rho about grid points,
// then coverage of the grid by the radius rho balls.
CoverReport vitali_cover(FlowCache& cache, const LambdaTable& table, std::span<const double> lo,
                         std::span<const double> hi, double rho, const CoverOptions& options = {});

}  // namespace torsionlab
