#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qwalk/lattice.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

enum class KernelKind { Identity, Uniform, Instant, Averaged, ClassicalLazy, Power };

std::string to_string(KernelKind kind);

/// How a kernel was produced. `time` is t for Instant and T for Averaged;
/// Power kernels carry the base kind and exponent.
struct KernelOrigin {
  KernelKind kind = KernelKind::Identity;
  double time = 0.0;
  KernelKind base = KernelKind::Identity;
  long exponent = 1;
};

/// Column-stochastic transition matrix that is invariant under lattice
/// translations, stored as its first column P(., 0). The full matrix is
/// P(q, p) = first_column[(q - p) mod dims].
class Kernel {
 public:
  /// Negative entries down to -1e-12 are clipped to zero; the column must sum
  /// to one within `sum_tolerance`.
  Kernel(LatticeSpec lattice, std::vector<double> first_column, KernelOrigin origin,
         double sum_tolerance = 1e-9);

  const LatticeSpec& lattice() const { return lattice_; }
  std::span<const double> first_column() const { return column_; }
  const KernelOrigin& origin() const { return origin_; }
  std::size_t size() const { return column_.size(); }

  /// P(target, source).
  double operator()(std::size_t target, std::size_t source) const {
    return column_[lattice_.difference(target, source)];
  }

  /// Row-major N x N matrix, rows indexed by target. Limited to N <= 4096.
  std::vector<double> dense() const;

 private:
  LatticeSpec lattice_;
  std::vector<double> column_;
  KernelOrigin origin_;
};

/// One term coeff * e^{i omega t} of |<l|U(t)|0>|^2 on a single cycle, built
/// from the eigenvalue classes (a, b). The pair (b, a) carries -omega and the
/// same real coefficient, so assembled probabilities are real.
struct FrequencyTerm {
  double omega = 0.0;
  double coeff = 0.0;
  int a = 0;
  int b = 0;
  /// omega vanishes identically (a == b), independent of rounding.
  bool structural_zero = false;
};

std::vector<FrequencyTerm> frequency_terms(int n, int offset, double rate);

/// (e^{i omega T} - 1) / (i omega T), and 1 at omega = 0.
cplx time_average_phase(double omega, double T, bool structural_zero);

inline constexpr double kZeroFrequencyTolerance = 1e-12;

Kernel identity_kernel(const LatticeSpec& lattice);
Kernel uniform_kernel(const LatticeSpec& lattice);

/// P_t(0, l) = |<l|e^{i t A'}|0>|^2.
Kernel instantaneous_kernel(const LatticeSpec& lattice, double t);

struct AnalyticOptions {
  /// When set, partial sums are written here after every batch and an
  /// existing compatible file is resumed from.
  std::optional<std::string> checkpoint_path;
  /// Factor-one eigenvalue classes processed between checkpoints.
  std::size_t batch = 8;
};

/// P_T(0, l) = (1/T) int_0^T P_t(0, l) dt by exact per-frequency integration.
/// Supports d = 1 and d = 2 with odd cycle lengths.
Kernel averaged_kernel_analytic(const LatticeSpec& lattice, double T, const AnalyticOptions& options = {});

/// Composite Simpson average of instantaneous kernels on [0, T] with step <= dt.
Kernel averaged_kernel_quadrature(const LatticeSpec& lattice, double T, double dt);

inline constexpr double kMaxQuadratureStep = 0.05;

/// Averaged kernel through the analytic path when supported, else quadrature.
Kernel averaged_kernel(const LatticeSpec& lattice, double T);

/// k^exponent by repeated circular convolution; exponent 0 gives the identity.
Kernel kernel_power(const Kernel& k, long exponent);

/// (a * b)[x] = sum_y a[y] b[x - y] over the lattice group.
std::vector<double> circular_convolve(const LatticeSpec& lattice, std::span<const double> a,
                                      std::span<const double> b);

}  // namespace qwalk
