#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/distances.hpp"
#include "qwalk/kernel.hpp"
#include "qwalk/trig_sums.hpp"

namespace qwalk {

// ---------------------------------------------------------------------------
// Repeated measurements: evolve for t ~ U[0, T], measure position, repeat.

enum class SamplingMode { Exact, Sampled };

struct Algorithm1Record {
  LatticeSpec lattice;
  double T = 0.0;
  long rounds = 0;
  SamplingMode mode = SamplingMode::Exact;
  std::vector<double> distribution;  // column of (P_T)^rounds
  double tv_to_uniform = 0.0;
  double d_single = 0.0;  // d(P_T)
  double d_power = 0.0;   // d((P_T)^rounds)
  // Sampled mode only.
  long trajectories = 0;
  std::vector<double> empirical;
  double empirical_tv_to_exact = 0.0;
  double empirical_tv_to_uniform = 0.0;
};

/// Exact mode powers the averaged kernel. Sampled mode additionally runs
/// `trajectories` walkers from vertex 0; each round draws t uniformly from
/// [0, T] and the next vertex from the instantaneous kernel, coordinate by
/// coordinate. Trajectory i draws from RandomStream(seed, i).
Algorithm1Record algorithm1_run(const LatticeSpec& lattice, double T, long rounds, SamplingMode mode,
                                std::uint64_t seed = 0, long trajectories = 100000);

// ---------------------------------------------------------------------------
// Coordinate-wise walk: e^{i A_k t} on one coordinate at a time, then measure.

/// Single-cycle measurement kernel with entries |<q|e^{i A t}|p>|^2.
Kernel cycle_measurement_kernel(int n, double t);

struct CoordinateFactor {
  int n = 0;
  double t = 0.0;
  bool in_interval = true;  // t in [n/3, n/2]
  double alpha = 0.0;       // d(Q_k(t))
  long rounds = 0;
  std::vector<double> distribution;
  double tv = 0.0;
};

struct CoordinateRecord {
  LatticeSpec lattice;
  double epsilon = 0.0;
  std::vector<CoordinateFactor> factors;
  double joint_tv = 0.0;
  bool reached = false;  // joint_tv <= epsilon
  double total_time = 0.0;
  std::vector<std::string> warnings;
};

struct CoordinateOptions {
  /// Evolution time per coordinate; defaults to n_k / 3.
  std::vector<double> times;
  /// Rounds per coordinate; defaults to prop1_rounds(d(Q_k)).
  std::optional<long> rounds;
};

CoordinateRecord coordinate_wise_run(const LatticeSpec& lattice, double epsilon, const CoordinateOptions& options = {});

/// Joint distribution of independent coordinates, row-major.
std::vector<double> product_distribution(const LatticeSpec& lattice, const std::vector<std::vector<double>>& factors);

struct MassProfile {
  int n = 0;
  double t = 0.0;
  double constant = 0.0;  // c: the ceil(2n/3)-th largest entry times n
  double fraction = 0.0;  // share of entries >= c / n
};

/// Largest c such that at least 2/3 of the single-cycle kernel column is >= c/n.
MassProfile two_thirds_mass(int n, double t);

// ---------------------------------------------------------------------------
// Case bounds for the averaged kernel on Z_{n1} x Z_{n2}.

struct Theorem3Options {
  bool strict = true;
  std::optional<std::string> checkpoint_path;
};

struct Theorem3Report {
  int n1 = 0;
  int n2 = 0;
  double T = 0.0;
  std::vector<BoundReport> cases;  // case0..case3, aggregate, d(P_T)
  double aggregate_l1 = 0.0;       // ||P_T(:,1) - u||_1
  double d_pt = 0.0;
  std::vector<double> column;
  bool all_satisfied() const;
};

/// 1600 (n1 + n2) (ln n1)^2.
double theorem3_time(int n1, int n2);

Theorem3Report theorem3_case_check(int n1, int n2, const Theorem3Options& options = {});

// ---------------------------------------------------------------------------
// Return probabilities of the quantum and classical walks.

struct Fig1Record {
  int n1 = 0;
  int n2 = 0;
  std::vector<double> times;
  std::vector<double> quantum_return;    // P_T(0,0) of the averaged kernel
  std::vector<double> classical_return;  // mean of lazy P^s(0,0) over s = 0..T
  double uniform_level = 0.0;
  double quantum_mark = 0.0;    // n1 + n2
  long classical_mark = 0;      // n1^2 + n2^2
  double classical_tv_at_mark = 0.0;
};

/// Integer grid T = 0..t_max (default n1^2 + n2^2).
Fig1Record fig1_experiment(int n1, int n2, std::optional<long> t_max = std::nullopt);

}  // namespace qwalk
