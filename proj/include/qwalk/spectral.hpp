#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

using cplx = std::complex<double>;

/// Exponent convention for e^{i t s A/2}: FULL uses s = 1, HALF uses s = 1/2.
enum class TimeScale { Full, Half };

constexpr double rate_of(TimeScale scale) { return scale == TimeScale::Full ? 1.0 : 0.5; }

/// Eigenvalues lambda_j = cos(2 pi j / n) of the normalized cycle adjacency
/// and the roots of unity w^j, w = e^{2 pi i / n}.
struct EigenphaseTable {
  int n = 0;
  std::vector<double> lambdas;
  std::vector<cplx> unit_roots;
};

EigenphaseTable eigenphases(const CycleSpec& spec);

/// Column of U(t) = e^{i rate t A/2} on a cycle, entries indexed by target q.
struct AmplitudeVector {
  std::vector<cplx> entries;
  double t = 0.0;
  int source = 0;
  double rate = 1.0;
};

/// <q|U(t)|p> = (1/n) sum_j e^{i t rate lambda_j} w^{(q-p) j}, direct O(n) sum per entry.
AmplitudeVector cycle_amplitude(const CycleSpec& spec, int source, double t, TimeScale scale);
AmplitudeVector cycle_amplitude(const CycleSpec& spec, int source, double t, double rate);

/// Single entry <offset|U(t)|0>, O(n).
cplx cycle_amplitude_entry(const EigenphaseTable& table, int offset, double t, double rate);

/// Amplitudes of e^{i t A'} with A' = (1/d) sum_k A_k on the product lattice.
struct AmplitudeTensor {
  LatticeSpec lattice;
  std::vector<cplx> entries;
  double t = 0.0;
  std::size_t source = 0;
};

AmplitudeTensor product_amplitude(const LatticeSpec& lattice, std::span<const int> source, double t);

/// 1 minus the largest nontrivial eigenvalue of (1/d) sum_k A_k.
double spectral_gap(const LatticeSpec& lattice);

/// The distinct eigenvalues of a cycle grouped into classes a = 0..floor(n/2),
/// lambda_a = cos(2 pi a / n). With the class coefficients
///   c_a(l) = 1 (a = 0), (-1)^l (a = n/2), 2 cos(2 pi l a / n) otherwise,
/// an amplitude reads <l|U(t)|0> = (1/n) sum_a c_a(l) e^{i rate lambda_a t}.
/// The coefficients are real, which is what the fast paths exploit.
struct CosineClasses {
  int n = 0;
  std::vector<double> lambdas;

  explicit CosineClasses(int n_vertices);
  std::size_t size() const { return lambdas.size(); }
  double coefficient(std::size_t a, int offset) const;
  std::vector<double> coefficients(int offset) const;
};

/// Steps the class phasors e^{i rate lambda_a t} along t = m h.
/// Phasors are advanced by multiplication and re-anchored from exact
/// exponentials every kReanchor steps to bound drift.
class ClassPhasors {
 public:
  static constexpr long kReanchor = 256;

  ClassPhasors(const CosineClasses& classes, double rate, double step);

  void seek(long m);
  void advance();
  long position() const { return m_; }
  double time() const { return static_cast<double>(m_) * step_; }
  std::span<const cplx> values() const { return z_; }

 private:
  std::vector<double> freq_;
  std::vector<cplx> z_;
  std::vector<cplx> mult_;
  double step_;
  long m_ = 0;
};

}  // namespace qwalk
