#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/kernel.hpp"

namespace qwalk {

/// Lazy walk: stay with probability 1/2, otherwise step to one of the 2d
/// unit neighbours. Neighbours coincide when n_k = 2 and their mass merges.
Kernel lazy_kernel(const LatticeSpec& lattice);

/// 2 d n1^2 ceil(ln(d / epsilon)) with n1 the largest dimension; epsilon in (0, 1/2).
long theorem1_bound(const LatticeSpec& lattice, double epsilon);

struct ClassicalCurvePoint {
  long t = 0;
  double tv = 0.0;                  // 1/2 ||P^t(., 0) - u||_1
  double return_probability = 0.0;  // P^t(0, 0)
};

/// Exact lazy-walk distribution from vertex 0 for t = 0..t_max, stepped with
/// the (2d+1)-point stencil. Limited to 10^6 vertices.
std::vector<ClassicalCurvePoint> classical_mixing_curve(const LatticeSpec& lattice, long t_max);

/// Joint state of the coordinate coupling of two lazy walkers.
struct CouplingState {
  std::vector<int> x;
  std::vector<int> y;
  long t = 0;
  std::vector<bool> coupled;
};

struct CouplingSummary {
  long trials = 0;
  std::vector<double> mean_tau;     // per coordinate
  std::vector<double> stderr_tau;
  double mean_couple = 0.0;         // max_i tau_i
  double stderr_couple = 0.0;
  /// Steps at which an already coupled coordinate disagreed. Always 0 for a
  /// correct coupling.
  long absorption_violations = 0;
};

/// Monte Carlo of the coupling: each step picks a coordinate uniformly; if the
/// walkers agree there they move together by +1/-1/0 with probability
/// 1/4, 1/4, 1/2; otherwise a fair coin picks the walker that moves and a second
/// coin its direction. Walkers start antipodally, y_i = x_i + floor(n_i / 2).
/// Trial i draws from RandomStream(seed, i).
CouplingSummary coupling_simulation(const LatticeSpec& lattice, long trials, std::uint64_t seed);

}  // namespace qwalk
