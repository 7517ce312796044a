#include "qwalk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "qwalk/error.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/summation.hpp"

namespace qwalk {
namespace {

constexpr std::size_t kMaxDenseMatrix = 4096;
constexpr double kClipFloor = -1e-12;
constexpr double kImagTolerance = 1e-9;

int fold(int q, int n) { return std::min(q, n - q); }

std::vector<double> delta_column(const LatticeSpec& lattice) {
  std::vector<double> col(lattice.vertex_count(), 0.0);
  col[0] = 1.0;
  return col;
}

std::vector<double> cycle_probabilities(int n, double t, double rate) {
  const auto amp = cycle_amplitude(CycleSpec(n), 0, t, rate);
  std::vector<double> out(amp.entries.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(amp.entries[i]);
  return out;
}

// Outer product of per-coordinate columns in the lattice's row-major order.
std::vector<double> outer_product(const LatticeSpec& lattice, const std::vector<std::vector<double>>& factors) {
  std::vector<double> out(lattice.vertex_count());
  const std::size_t d = lattice.rank();
  std::vector<int> q(d, 0);
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    double v = 1.0;
    for (std::size_t k = 0; k < d; ++k) v *= factors[k][q[k]];
    out[idx] = v;
    for (std::size_t k = d; k-- > 0;) {
      if (++q[k] < lattice.dim(k)) break;
      q[k] = 0;
    }
  }
  return out;
}

void require_positive_time(double T) {
  if (!std::isfinite(T) || T <= 0.0) throw InvalidInput("averaging time T must be finite and > 0");
}

void require_analytic_support(const LatticeSpec& lattice) {
  if (lattice.rank() > 2) {
    throw InvalidInput("analytic averaged kernel supports d <= 2; use the quadrature path");
  }
  if (!lattice.all_odd()) {
    throw UnsupportedParity("analytic averaged kernel requires odd cycle lengths, got " + lattice.to_string());
  }
}

// Representative offsets 0..m-1 with m = (n+1)/2 cover every l through l -> min(l, n-l).
std::vector<std::vector<double>> class_coefficients(const CosineClasses& classes) {
  const std::size_t m = classes.size();
  std::vector<std::vector<double>> out(m);
  for (std::size_t l = 0; l < m; ++l) out[l] = classes.coefficients(static_cast<int>(l));
  return out;
}

Kernel analytic_single(const LatticeSpec& lattice, double T) {
  const int n = lattice.dim(0);
  const CosineClasses classes(n);
  const std::size_t m = classes.size();
  const auto coeff = class_coefficients(classes);
  std::vector<double> reps(m);
  for (std::size_t l = 0; l < m; ++l) {
    CompensatedSum re;
    CompensatedSum im;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        const double omega = classes.lambdas[a] - classes.lambdas[b];
        const cplx g = time_average_phase(omega, T, a == b);
        const double c = coeff[l][a] * coeff[l][b];
        re += c * g.real();
        im += c * g.imag();
      }
    }
    const double scale = 1.0 / (static_cast<double>(n) * n);
    if (std::abs(im.value() * scale) > kImagTolerance) {
      throw std::logic_error("averaged kernel entry has a non-negligible imaginary part");
    }
    reps[l] = re.value() * scale;
  }
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) col[q] = reps[fold(q, n)];
  return Kernel(lattice, std::move(col), {KernelOrigin{KernelKind::Averaged, T}});
}

struct PairAccumulator {
  std::vector<cplx> values;  // m1 x m2, row-major
};

bool load_checkpoint(const std::string& path, const LatticeSpec& lattice, double T, std::size_t expected,
                     std::size_t& next_class, std::vector<cplx>& acc) {
  std::ifstream in(path);
  if (!in) return false;
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("version").get<int>() != 1) return false;
    if (j.at("dims").get<std::vector<int>>() != std::vector<int>(lattice.dims().begin(), lattice.dims().end())) {
      return false;
    }
    if (j.at("T").get<double>() != T) return false;
    const auto re = j.at("acc_re").get<std::vector<double>>();
    const auto im = j.at("acc_im").get<std::vector<double>>();
    if (re.size() != expected || im.size() != expected) return false;
    next_class = j.at("next_class").get<std::size_t>();
    acc.resize(expected);
    for (std::size_t i = 0; i < expected; ++i) acc[i] = {re[i], im[i]};
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  return true;
}

void save_checkpoint(const std::string& path, const LatticeSpec& lattice, double T, std::size_t next_class,
                     const std::vector<cplx>& acc) {
  nlohmann::json j;
  j["version"] = 1;
  j["dims"] = std::vector<int>(lattice.dims().begin(), lattice.dims().end());
  j["T"] = T;
  j["next_class"] = next_class;
  std::vector<double> re(acc.size());
  std::vector<double> im(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    re[i] = acc[i].real();
    im[i] = acc[i].imag();
  }
  j["acc_re"] = re;
  j["acc_im"] = im;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

// For d = 2 the factor-one class a1 is one task: it sweeps b1, and for each
// frequency omega1 contracts the factor-two terms into
//   C(l2, omega1) = sum_{a2, b2} c_{a2}(l2) c_{b2}(l2) g(omega1 + omega2, T).
Kernel analytic_pair(const LatticeSpec& lattice, double T, const AnalyticOptions& options) {
  const int n1 = lattice.dim(0);
  const int n2 = lattice.dim(1);
  const double rate = 0.5;
  const CosineClasses classes1(n1);
  const CosineClasses classes2(n2);
  const std::size_t m1 = classes1.size();
  const std::size_t m2 = classes2.size();
  const auto coeff1 = class_coefficients(classes1);
  const auto coeff2 = class_coefficients(classes2);

  std::vector<double> omega2(m2 * m2);
  for (std::size_t a = 0; a < m2; ++a) {
    for (std::size_t b = 0; b < m2; ++b) omega2[a * m2 + b] = rate * (classes2.lambdas[a] - classes2.lambdas[b]);
  }

  auto task = [&](std::size_t a1) {
    PairAccumulator out{std::vector<cplx>(m1 * m2, cplx{0.0, 0.0})};
    std::vector<cplx> g(m2 * m2);
    std::vector<cplx> contracted(m2);
    std::vector<cplx> gv(m2);
    for (std::size_t b1 = 0; b1 < m1; ++b1) {
      const double omega1 = rate * (classes1.lambdas[a1] - classes1.lambdas[b1]);
      for (std::size_t a2 = 0; a2 < m2; ++a2) {
        for (std::size_t b2 = 0; b2 < m2; ++b2) {
          const bool structural = a1 == b1 && a2 == b2;
          g[a2 * m2 + b2] = time_average_phase(omega1 + omega2[a2 * m2 + b2], T, structural);
        }
      }
      for (std::size_t l2 = 0; l2 < m2; ++l2) {
        const auto& c2 = coeff2[l2];
        for (std::size_t a2 = 0; a2 < m2; ++a2) {
          cplx s{0.0, 0.0};
          const cplx* row = &g[a2 * m2];
          for (std::size_t b2 = 0; b2 < m2; ++b2) s += row[b2] * c2[b2];
          gv[a2] = s;
        }
        cplx s{0.0, 0.0};
        for (std::size_t a2 = 0; a2 < m2; ++a2) s += c2[a2] * gv[a2];
        contracted[l2] = s;
      }
      for (std::size_t l1 = 0; l1 < m1; ++l1) {
        const double c1 = coeff1[l1][a1] * coeff1[l1][b1];
        cplx* row = &out.values[l1 * m2];
        for (std::size_t l2 = 0; l2 < m2; ++l2) row[l2] += c1 * contracted[l2];
      }
    }
    return out;
  };

  std::vector<cplx> acc(m1 * m2, cplx{0.0, 0.0});
  std::size_t next = 0;
  if (options.checkpoint_path) {
    load_checkpoint(*options.checkpoint_path, lattice, T, acc.size(), next, acc);
  }
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  while (next < m1) {
    const std::size_t count = std::min(batch, m1 - next);
    std::vector<PairAccumulator> partial(count);
    parallel_for(count, [&](std::size_t i) { partial[i] = task(next + i); });
    for (const auto& p : partial) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p.values[i];
    }
    next += count;
    if (options.checkpoint_path) save_checkpoint(*options.checkpoint_path, lattice, T, next, acc);
  }

  const double scale = 1.0 / std::pow(static_cast<double>(n1) * n2, 2);
  std::vector<double> reps(m1 * m2);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (std::abs(acc[i].imag() * scale) > kImagTolerance) {
      throw std::logic_error("averaged kernel entry has a non-negligible imaginary part");
    }
    reps[i] = acc[i].real() * scale;
  }
  std::vector<double> col(lattice.vertex_count());
  for (int q1 = 0; q1 < n1; ++q1) {
    for (int q2 = 0; q2 < n2; ++q2) {
      col[static_cast<std::size_t>(q1) * n2 + q2] = reps[fold(q1, n1) * m2 + fold(q2, n2)];
    }
  }
  return Kernel(lattice, std::move(col), {KernelOrigin{KernelKind::Averaged, T}});
}

}  // namespace

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Identity: return "identity";
    case KernelKind::Uniform: return "uniform";
    case KernelKind::Instant: return "instant";
    case KernelKind::Averaged: return "averaged";
    case KernelKind::ClassicalLazy: return "classical_lazy";
    case KernelKind::Power: return "power";
  }
  return "unknown";
}

Kernel::Kernel(LatticeSpec lattice, std::vector<double> first_column, KernelOrigin origin, double sum_tolerance)
    : lattice_(std::move(lattice)), column_(std::move(first_column)), origin_(origin) {
  if (column_.size() != lattice_.vertex_count()) {
    throw InvalidInput("kernel column has " + std::to_string(column_.size()) + " entries, lattice has " +
                       std::to_string(lattice_.vertex_count()) + " vertices");
  }
  CompensatedSum total;
  for (double& v : column_) {
    if (!std::isfinite(v) || v < kClipFloor) {
      throw InvalidInput("kernel entry " + std::to_string(v) + " is not a probability");
    }
    if (v < 0.0) v = 0.0;
    total += v;
  }
  if (std::abs(total.value() - 1.0) > sum_tolerance) {
    throw InvalidInput("kernel column sums to " + std::to_string(total.value()));
  }
}

std::vector<double> Kernel::dense() const {
  const std::size_t n = column_.size();
  if (n > kMaxDenseMatrix) throw SizeError("dense kernel limited to 4096 vertices");
  std::vector<double> out(n * n);
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t p = 0; p < n; ++p) out[q * n + p] = (*this)(q, p);
  }
  return out;
}

std::vector<FrequencyTerm> frequency_terms(int n, int offset, double rate) {
  const CosineClasses classes(n);
  const auto c = classes.coefficients(offset);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  std::vector<FrequencyTerm> out;
  out.reserve(classes.size() * classes.size());
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = 0; b < classes.size(); ++b) {
      out.push_back(FrequencyTerm{rate * (classes.lambdas[a] - classes.lambdas[b]), c[a] * c[b] * norm,
                                  static_cast<int>(a), static_cast<int>(b), a == b});
    }
  }
  return out;
}

cplx time_average_phase(double omega, double T, bool structural_zero) {
  if (structural_zero || std::abs(omega) <= kZeroFrequencyTolerance) return {1.0, 0.0};
  const double x = omega * T;
  if (std::abs(x) < 1e-8) return {1.0 - x * x / 6.0, 0.5 * x};
  const double half = std::sin(0.5 * x);
  return {std::sin(x) / x, 2.0 * half * half / x};
}

Kernel identity_kernel(const LatticeSpec& lattice) {
  return Kernel(lattice, delta_column(lattice), {KernelOrigin{KernelKind::Identity}});
}

Kernel uniform_kernel(const LatticeSpec& lattice) {
  const double u = 1.0 / static_cast<double>(lattice.vertex_count());
  return Kernel(lattice, std::vector<double>(lattice.vertex_count(), u), {KernelOrigin{KernelKind::Uniform}});
}

Kernel instantaneous_kernel(const LatticeSpec& lattice, double t) {
  if (!std::isfinite(t) || t < 0.0) throw InvalidInput("time t must be finite and >= 0");
  const std::vector<int> origin(lattice.rank(), 0);
  const auto amp = product_amplitude(lattice, origin, t);
  std::vector<double> col(amp.entries.size());
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = std::norm(amp.entries[i]);
  return Kernel(lattice, std::move(col), {KernelOrigin{KernelKind::Instant, t}});
}

Kernel averaged_kernel_analytic(const LatticeSpec& lattice, double T, const AnalyticOptions& options) {
  require_positive_time(T);
  require_analytic_support(lattice);
  return lattice.rank() == 1 ? analytic_single(lattice, T) : analytic_pair(lattice, T, options);
}

Kernel averaged_kernel_quadrature(const LatticeSpec& lattice, double T, double dt) {
  require_positive_time(T);
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("quadrature step must be > 0");
  if (dt > kMaxQuadratureStep) {
    throw ResolutionError("quadrature step " + std::to_string(dt) + " exceeds 0.05");
  }
  const long intervals = 2 * static_cast<long>(std::ceil(T / (2.0 * dt)));
  const double h = T / static_cast<double>(intervals);
  const std::size_t nodes = static_cast<std::size_t>(intervals) + 1;
  const std::size_t d = lattice.rank();
  const double rate = 1.0 / static_cast<double>(d);
  const std::size_t N = lattice.vertex_count();

  constexpr std::size_t kChunks = 64;
  const std::size_t chunks = std::min(kChunks, nodes);
  std::vector<std::vector<double>> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = nodes * c / chunks;
    const std::size_t end = nodes * (c + 1) / chunks;
    std::vector<CompensatedSum> sums(N);
    std::vector<std::vector<double>> factors(d);
    for (std::size_t k = begin; k < end; ++k) {
      const double weight = (k == 0 || k + 1 == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      const double t = static_cast<double>(k) * h;
      for (std::size_t f = 0; f < d; ++f) factors[f] = cycle_probabilities(lattice.dim(f), t, rate);
      const auto col = outer_product(lattice, factors);
      for (std::size_t i = 0; i < N; ++i) sums[i] += weight * col[i];
    }
    partial[c].resize(N);
    for (std::size_t i = 0; i < N; ++i) partial[c][i] = sums[i].value();
  });

  std::vector<double> col(N);
  for (std::size_t i = 0; i < N; ++i) {
    CompensatedSum s;
    for (std::size_t c = 0; c < chunks; ++c) s += partial[c][i];
    col[i] = s.value() * h / 3.0 / T;
  }
  return Kernel(lattice, std::move(col), {KernelOrigin{KernelKind::Averaged, T}}, 1e-8);
}

Kernel averaged_kernel(const LatticeSpec& lattice, double T) {
  if (lattice.rank() <= 2 && lattice.all_odd()) return averaged_kernel_analytic(lattice, T);
  return averaged_kernel_quadrature(lattice, T, 0.02);
}

std::vector<double> circular_convolve(const LatticeSpec& lattice, std::span<const double> a,
                                      std::span<const double> b) {
  const std::size_t N = lattice.vertex_count();
  if (a.size() != N || b.size() != N) throw InvalidInput("convolution operands must match the lattice");
  const std::size_t d = lattice.rank();
  // Coordinates of every vertex, stored once.
  std::vector<int> coords(N * d);
  for (std::size_t i = 0; i < N; ++i) {
    const auto c = lattice.coords(i);
    std::copy(c.begin(), c.end(), coords.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  std::vector<std::size_t> strides(d, 1);
  for (std::size_t k = d; k-- > 1;) strides[k - 1] = strides[k] * static_cast<std::size_t>(lattice.dim(k));

  std::vector<double> out(N, 0.0);
  for (std::size_t y = 0; y < N; ++y) {
    if (a[y] == 0.0) continue;
    const int* cy = &coords[y * d];
    for (std::size_t z = 0; z < N; ++z) {
      if (b[z] == 0.0) continue;
      const int* cz = &coords[z * d];
      std::size_t idx = 0;
      for (std::size_t k = 0; k < d; ++k) {
        int s = cy[k] + cz[k];
        if (s >= lattice.dim(k)) s -= lattice.dim(k);
        idx += static_cast<std::size_t>(s) * strides[k];
      }
      out[idx] += a[y] * b[z];
    }
  }
  return out;
}

Kernel kernel_power(const Kernel& k, long exponent) {
  if (exponent < 0) throw InvalidInput("kernel exponent must be >= 0");
  const auto& lattice = k.lattice();
  if (exponent == 0) return identity_kernel(lattice);
  std::vector<double> result;
  std::vector<double> base(k.first_column().begin(), k.first_column().end());
  long e = exponent;
  while (e > 0) {
    if (e & 1) result = result.empty() ? base : circular_convolve(lattice, result, base);
    e >>= 1;
    if (e > 0) base = circular_convolve(lattice, base, base);
  }
  const KernelOrigin origin{KernelKind::Power, k.origin().time,
                            k.origin().kind == KernelKind::Power ? k.origin().base : k.origin().kind,
                            k.origin().kind == KernelKind::Power ? k.origin().exponent * exponent : exponent};
  return Kernel(lattice, std::move(result), origin, 1e-9 * static_cast<double>(exponent));
}

}  // namespace qwalk
