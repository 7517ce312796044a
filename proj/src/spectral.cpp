#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qwalk/error.hpp"

namespace qwalk {
namespace {

constexpr std::size_t kMaxDenseVertices = std::size_t{1} << 26;

void require_finite_time(double t) {
  if (!std::isfinite(t)) throw InvalidInput("time must be finite");
}

int wrap(long value, int n) {
  long r = value % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

std::vector<cplx> phases(const EigenphaseTable& table, double t, double rate) {
  std::vector<cplx> out(table.lambdas.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::polar(1.0, t * rate * table.lambdas[j]);
  }
  return out;
}

cplx entry_from_phases(const EigenphaseTable& table, std::span<const cplx> phase, int offset) {
  const int n = table.n;
  cplx acc{0.0, 0.0};
  long idx = 0;
  for (int j = 0; j < n; ++j) {
    acc += phase[j] * table.unit_roots[static_cast<std::size_t>(idx)];
    idx += offset;
    if (idx >= n) idx -= n;
  }
  return acc / static_cast<double>(n);
}

std::vector<cplx> base_column(const EigenphaseTable& table, double t, double rate) {
  const auto phase = phases(table, t, rate);
  std::vector<cplx> base(static_cast<std::size_t>(table.n));
  for (int l = 0; l < table.n; ++l) base[l] = entry_from_phases(table, phase, l);
  return base;
}

}  // namespace

EigenphaseTable eigenphases(const CycleSpec& spec) {
  const int n = spec.size();
  EigenphaseTable table;
  table.n = n;
  table.lambdas.resize(n);
  table.unit_roots.resize(n);
  for (int j = 0; j < n; ++j) {
    // Fold j onto [0, n/2] so lambda_j == lambda_{n-j} bit for bit.
    const int folded = std::min(j, n - j);
    const double angle = 2.0 * std::numbers::pi * folded / n;
    table.lambdas[j] = folded == 0 ? 1.0 : std::cos(angle);
    const double root_angle = 2.0 * std::numbers::pi * j / n;
    table.unit_roots[j] = j == 0 ? cplx{1.0, 0.0} : cplx{std::cos(root_angle), std::sin(root_angle)};
  }
  return table;
}

cplx cycle_amplitude_entry(const EigenphaseTable& table, int offset, double t, double rate) {
  require_finite_time(t);
  const auto phase = phases(table, t, rate);
  return entry_from_phases(table, phase, wrap(offset, table.n));
}

AmplitudeVector cycle_amplitude(const CycleSpec& spec, int source, double t, double rate) {
  require_finite_time(t);
  if (!std::isfinite(rate)) throw InvalidInput("time rate must be finite");
  const int n = spec.size();
  const int p = wrap(source, n);
  const auto base = base_column(eigenphases(spec), t, rate);
  AmplitudeVector out;
  out.t = t;
  out.source = p;
  out.rate = rate;
  out.entries.resize(n);
  for (int q = 0; q < n; ++q) out.entries[q] = base[wrap(q - p, n)];
  return out;
}

AmplitudeVector cycle_amplitude(const CycleSpec& spec, int source, double t, TimeScale scale) {
  return cycle_amplitude(spec, source, t, rate_of(scale));
}

AmplitudeTensor product_amplitude(const LatticeSpec& lattice, std::span<const int> source, double t) {
  require_finite_time(t);
  if (source.size() != lattice.rank()) {
    throw InvalidInput("source has " + std::to_string(source.size()) + " coordinates, lattice has " +
                       std::to_string(lattice.rank()));
  }
  if (lattice.vertex_count() > kMaxDenseVertices) {
    throw SizeError("lattice too large for a dense amplitude tensor");
  }
  const std::size_t d = lattice.rank();
  const double rate = 1.0 / static_cast<double>(d);
  std::vector<std::vector<cplx>> bases;
  bases.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    bases.push_back(base_column(eigenphases(lattice.cycle(k)), t, rate));
  }

  AmplitudeTensor out{lattice, std::vector<cplx>(lattice.vertex_count()), t, lattice.index(source)};
  std::vector<int> q(d, 0);
  for (std::size_t idx = 0; idx < out.entries.size(); ++idx) {
    cplx value{1.0, 0.0};
    for (std::size_t k = 0; k < d; ++k) {
      value *= bases[k][wrap(q[k] - source[k], lattice.dim(k))];
    }
    out.entries[idx] = value;
    for (std::size_t k = d; k-- > 0;) {
      if (++q[k] < lattice.dim(k)) break;
      q[k] = 0;
    }
  }
  return out;
}

double spectral_gap(const LatticeSpec& lattice) {
  // The largest nontrivial joint eigenvalue keeps every coordinate at j = 0
  // except one, which takes its largest nontrivial cos(2 pi j / n).
  double best = -1.0;
  for (int n : lattice.dims()) {
    best = std::max(best, std::cos(2.0 * std::numbers::pi / n));
  }
  const auto d = static_cast<double>(lattice.rank());
  return (1.0 - best) / d;
}

CosineClasses::CosineClasses(int n_vertices) : n(n_vertices) {
  CycleSpec spec(n_vertices);
  lambdas.resize(static_cast<std::size_t>(spec.class_count()));
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    lambdas[a] = a == 0 ? 1.0 : std::cos(2.0 * std::numbers::pi * static_cast<double>(a) / n);
  }
}

double CosineClasses::coefficient(std::size_t a, int offset) const {
  if (a == 0) return 1.0;
  const int l = wrap(offset, n);
  if (n % 2 == 0 && static_cast<int>(a) == n / 2) return l % 2 == 0 ? 1.0 : -1.0;
  const long m = (static_cast<long>(l) * static_cast<long>(a)) % n;
  return 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / n);
}

std::vector<double> CosineClasses::coefficients(int offset) const {
  std::vector<double> out(size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = coefficient(a, offset);
  return out;
}

ClassPhasors::ClassPhasors(const CosineClasses& classes, double rate, double step)
    : freq_(classes.size()), z_(classes.size()), mult_(classes.size()), step_(step) {
  for (std::size_t a = 0; a < freq_.size(); ++a) {
    freq_[a] = rate * classes.lambdas[a];
    mult_[a] = std::polar(1.0, freq_[a] * step_);
  }
  seek(0);
}

void ClassPhasors::seek(long m) {
  m_ = m;
  const double t = time();
  for (std::size_t a = 0; a < z_.size(); ++a) z_[a] = std::polar(1.0, freq_[a] * t);
}

void ClassPhasors::advance() {
  if ((m_ + 1) % kReanchor == 0) {
    seek(m_ + 1);
    return;
  }
  ++m_;
  for (std::size_t a = 0; a < z_.size(); ++a) z_[a] *= mult_[a];
}

}  // namespace qwalk
