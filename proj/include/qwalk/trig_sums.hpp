#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

/// Parameters of the off-resonant sum n(t) on an odd cycle: cycle length n,
/// vertex offset l = q - p in [0, n-1], and horizon T >= 0.
struct TrigSumParams {
  int n = 3;
  int offset = 0;
  double T = 0.0;

  void validate() const;
};

enum class BoundMethod { Analytic, Quadrature };

std::string to_string(BoundMethod method);

struct BoundReport {
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;  // lhs <= rhs
  BoundMethod method = BoundMethod::Analytic;
};

BoundReport make_report(std::string params, double lhs, double rhs, BoundMethod method);

/// n(t) = sum_{j != k, j + k != n} e^{-i t sin(pi(j+k)/n) sin(pi(j-k)/n)} w^{l(j-k)}, O(n^2).
double n_of_t_direct(const TrigSumParams& params, double t);

/// n(t) = n^2 |<l|e^{i t A/2}|0>|^2 - n - (n [l = 0] - 1), O(n).
double n_of_t_fast(const TrigSumParams& params, double t);

/// int_0^T n(t) dt from the exact primitive of each conjugate pair k > j:
///   2 [sin(omega T + theta) - sin(theta)] / omega,
/// omega = sin(pi(j+k)/n) sin(pi(k-j)/n), theta = 2 pi l (j - k) / n.
double n_of_t_integral(const TrigSumParams& params);

/// |int_0^T n(t) dt|.
double lemma2_integral(const TrigSumParams& params);

/// 32 (n ln n)^2.
double lemma2_bound(int n);

/// 16 d sum_j (prod_{i != j} n_i) (n_j ln n_j)^2 for odd, pairwise coprime sizes.
double conjecture_rhs(std::span<const int> dims);

/// Signed int_0^T n1(t) n2(t) dt by exact per-frequency integration over the
/// eigenvalue classes of both cycles. Only requires odd sizes.
double n_product_integral(const TrigSumParams& p1, const TrigSumParams& p2, double T);

/// Signed running Simpson integral of n1(t) n2(t) with step dt, reported at each
/// (ascending) grid time. Grid times off the step lattice are closed with a
/// three-point Simpson tail.
std::vector<double> n_product_integral_curve(const TrigSumParams& p1, const TrigSumParams& p2,
                                             std::span<const double> T_grid, double dt);

inline constexpr double kMaxConjectureStep = 0.02;

/// |int_0^T n1 n2 dt| by quadrature; requires n1 > n2, odd, coprime, dt <= 0.02.
double conjecture_lhs(const TrigSumParams& p1, const TrigSumParams& p2, double T, double dt);

/// |int_0^T n1 n2 dt| by the exact frequency sum; same preconditions.
double conjecture_lhs_analytic(const TrigSumParams& p1, const TrigSumParams& p2, double T);

/// Odd coprime pairs with lo <= n2 < n1 <= hi, ordered by (n2, n1).
std::vector<std::pair<int, int>> conjecture_pairs(int lo, int hi);

/// `count` pairs drawn without replacement from conjecture_pairs(lo, hi)
/// using RandomStream(seed, 0); returned in (n2, n1) order.
std::vector<std::pair<int, int>> sample_conjecture_pairs(int lo, int hi, std::size_t count, std::uint64_t seed);

struct SweepOptions {
  double dt = 0.02;
  /// Also integrate with dt / 2 and record the relative change.
  bool check_halving = true;
};

struct ConjectureRow {
  int n1 = 0;
  int n2 = 0;
  int offset = 0;
  double T = 0.0;
  BoundReport report;
  /// |lhs(dt) - lhs(dt/2)| / |lhs(dt/2)|, when halving was requested.
  std::optional<double> halving_change;
};

/// One row per (pair, offset, T), ordered the same way as the inputs. The
/// offset l is applied to both cycles as l mod n_i.
std::vector<ConjectureRow> conjecture_sweep(std::span<const std::pair<int, int>> pairs,
                                            std::span<const double> T_grid, std::span<const int> offsets,
                                            const SweepOptions& options = {});

}  // namespace qwalk
