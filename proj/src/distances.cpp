#include "qwalk/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qwalk/error.hpp"
#include "qwalk/summation.hpp"

namespace qwalk {
namespace {

// ceil(x), treating values within 1e-12 relative of an integer as that integer.
long snapped_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidInput("distribution must be non-empty");
  CompensatedSum total;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw InvalidInput("distribution entries must be >= 0");
    total += p;
  }
  if (std::abs(total.value() - 1.0) > 1e-9) {
    throw InvalidInput("distribution sums to " + std::to_string(total.value()));
  }
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point(std::size_t n, std::size_t at) {
  std::vector<double> p(n, 0.0);
  p.at(at) = 1.0;
  return Distribution(std::move(p));
}

void ThresholdParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
  if (!(beta > 0.5 && beta <= 1.0)) throw InvalidInput("beta must lie in (1/2,1]");
  if (!(gamma > 0.0)) throw InvalidInput("gamma must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("tv_distance: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s.value();
}

double tv_distance(const Distribution& a, const Distribution& b) { return tv_distance(a.probs(), b.probs()); }

double distance_to_uniform(const Kernel& k) {
  const double u = 1.0 / static_cast<double>(k.size());
  CompensatedSum s;
  for (double p : k.first_column()) s += std::abs(p - u);
  return 0.5 * s.value();
}

double pairwise_column_distance(const Kernel& k) {
  const auto& lattice = k.lattice();
  const auto col = k.first_column();
  const std::size_t N = col.size();
  double best = 0.0;
  std::vector<double> shifted(N);
  for (std::size_t s = 1; s < N; ++s) {
    // Column s is the first column translated by s.
    for (std::size_t x = 0; x < N; ++x) shifted[lattice.sum(x, s)] = col[x];
    best = std::max(best, tv_distance(col, shifted));
  }
  return best;
}

long prop1_rounds(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("prop1_rounds: alpha must lie in (0,1)");
  return std::max(1L, snapped_ceil(std::log(2.0 * std::numbers::e) / -std::log(alpha)));
}

long contraction_rounds(double alpha, double epsilon) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("contraction_rounds: alpha must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("contraction_rounds: epsilon must lie in (0,1)");
  return std::max(1L, snapped_ceil(std::log(1.0 / epsilon) / -std::log(alpha)));
}

double prop2_bound(double beta, double gamma) {
  if (!(beta > 0.5 && beta <= 1.0)) throw InvalidInput("prop2_bound: beta must lie in (1/2,1]");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("prop2_bound: gamma must be > 0");
  return 1.0 - gamma * (1.0 - 2.0 * (1.0 - beta));
}

MixingTime epsilon_mixing_time(std::span<const TimedKernel> family, double epsilon) {
  if (family.empty()) throw InvalidInput("epsilon_mixing_time: empty time grid");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  for (std::size_t i = 1; i < family.size(); ++i) {
    if (!(family[i].time > family[i - 1].time)) throw InvalidInput("time grid must be increasing");
  }
  MixingTime out;
  out.distances.reserve(family.size());
  for (const auto& entry : family) out.distances.push_back(distance_to_uniform(entry.kernel));
  std::size_t first = family.size();
  for (std::size_t i = family.size(); i-- > 0;) {
    if (out.distances[i] > epsilon) break;
    first = i;
  }
  if (first < family.size()) {
    out.index = first;
    out.time = family[first].time;
  }
  return out;
}

}  // namespace qwalk
