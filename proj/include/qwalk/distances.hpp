#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qwalk/kernel.hpp"

namespace qwalk {

/// Probability vector: entries >= 0, sum 1 within 1e-9.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);
  static Distribution uniform(std::size_t n);
  static Distribution point(std::size_t n, std::size_t at);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// Parameter ranges of the two column-threshold facts:
/// alpha in (0,1), beta in (1/2,1], gamma > 0, epsilon in (0,1).
struct ThresholdParams {
  double alpha = 0.5;
  double beta = 1.0;
  double gamma = 1.0;
  double epsilon = 0.1;

  void validate() const;
};

/// Half the l1 distance.
double tv_distance(std::span<const double> a, std::span<const double> b);
double tv_distance(const Distribution& a, const Distribution& b);

/// 1/2 ||P(:,0) - u||_1. For translation-invariant kernels every column has
/// the same value, so this is also the max-column-sum norm 1/2 ||P - u 1^T||_1.
double distance_to_uniform(const Kernel& k);

/// d(P) = max_{j, j'} 1/2 ||P(:,j) - P(:,j')||_1, evaluated as the maximum over
/// nonzero shifts s of the distance between the first column and its shift.
double pairwise_column_distance(const Kernel& k);

/// Rounds ceil(log_{1/alpha}(2e)) after which d(P) <= alpha forces threshold mixing.
long prop1_rounds(double alpha);

/// Rounds ceil(log_{1/alpha}(1/epsilon)) so that alpha^rounds <= epsilon.
long contraction_rounds(double alpha, double epsilon);

/// Upper bound 1 - gamma [1 - 2(1 - beta)] on d(P) when at least beta N
/// entries of a column are >= gamma / N.
double prop2_bound(double beta, double gamma);

struct TimedKernel {
  double time;
  Kernel kernel;
};

struct MixingTime {
  std::optional<double> time;   // empty when never reached
  std::optional<std::size_t> index;
  std::vector<double> distances;
};

/// Smallest grid time from which the distance to uniform stays <= epsilon
/// for every later grid point.
MixingTime epsilon_mixing_time(std::span<const TimedKernel> family, double epsilon);

}  // namespace qwalk
