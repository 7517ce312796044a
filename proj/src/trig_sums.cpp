#include "qwalk/trig_sums.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qwalk/error.hpp"
#include "qwalk/kernel.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/summation.hpp"

namespace qwalk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfRate = 0.5;

void require_odd(int n) {
  if (n % 2 == 0) throw UnsupportedParity("n(t) requires odd n, got " + std::to_string(n));
}

// Constant removed from n^2 P_t to leave n(t): n + (n [l = 0] - 1).
double resonant_part(const TrigSumParams& p) {
  return p.n + (p.offset == 0 ? p.n - 1.0 : -1.0);
}

// n(t) in class form: |sum_a c_a e^{i lambda_a t / 2}|^2 minus the resonant part.
class ClassSeries {
 public:
  explicit ClassSeries(const TrigSumParams& p)
      : classes_(p.n), coeff_(classes_.coefficients(p.offset)), constant_(resonant_part(p)) {}

  const CosineClasses& classes() const { return classes_; }
  std::span<const double> coefficients() const { return coeff_; }

  double from_phasors(std::span<const cplx> z) const {
    cplx s{0.0, 0.0};
    for (std::size_t a = 0; a < z.size(); ++a) s += coeff_[a] * z[a];
    return std::norm(s) - constant_;
  }

  double at(double t) const {
    cplx s{0.0, 0.0};
    for (std::size_t a = 0; a < coeff_.size(); ++a) s += coeff_[a] * std::polar(1.0, kHalfRate * classes_.lambdas[a] * t);
    return std::norm(s) - constant_;
  }

 private:
  CosineClasses classes_;
  std::vector<double> coeff_;
  double constant_;
};

void require_conjecture_pair(const TrigSumParams& p1, const TrigSumParams& p2) {
  p1.validate();
  p2.validate();
  if (!(p1.n > p2.n)) throw InvalidInput("conjecture needs n1 > n2");
  if (std::gcd(p1.n, p2.n) != 1) throw InvalidInput("conjecture needs coprime n1, n2");
}

std::string pair_label(int n1, int n2, int offset, double T) {
  std::ostringstream os;
  os.precision(17);
  os << "n1=" << n1 << ",n2=" << n2 << ",l=" << offset << ",T=" << T;
  return os.str();
}

}  // namespace

void TrigSumParams::validate() const {
  require_odd(n);
  if (n < 3) throw InvalidInput("n must be >= 3");
  if (offset < 0 || offset >= n) throw InvalidInput("offset must lie in [0, n-1]");
  if (!std::isfinite(T) || T < 0.0) throw InvalidInput("T must be finite and >= 0");
}

std::string to_string(BoundMethod method) {
  return method == BoundMethod::Analytic ? "analytic" : "quadrature";
}

BoundReport make_report(std::string params, double lhs, double rhs, BoundMethod method) {
  return BoundReport{std::move(params), lhs, rhs, lhs <= rhs, method};
}

double n_of_t_direct(const TrigSumParams& params, double t) {
  params.validate();
  const int n = params.n;
  const int l = params.offset;
  cplx acc{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k || j + k == n) continue;
      const double omega = -std::sin(kPi * (j + k) / n) * std::sin(kPi * (j - k) / n);
      const long phase = ((static_cast<long>(l) * (j - k)) % n + n) % n;
      acc += std::polar(1.0, omega * t + 2.0 * kPi * static_cast<double>(phase) / n);
    }
  }
  if (std::abs(acc.imag()) > 1e-9) throw std::logic_error("n(t) has a non-negligible imaginary part");
  return acc.real();
}

double n_of_t_fast(const TrigSumParams& params, double t) {
  params.validate();
  const auto table = eigenphases(CycleSpec(params.n));
  const double n = params.n;
  const double p = std::norm(cycle_amplitude_entry(table, params.offset, t, rate_of(TimeScale::Half)));
  return n * n * p - resonant_part(params);
}

double n_of_t_integral(const TrigSumParams& params) {
  params.validate();
  const int n = params.n;
  const int l = params.offset;
  const double T = params.T;
  CompensatedSum acc;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      if (j + k == n) continue;
      const double omega = std::sin(kPi * (j + k) / n) * std::sin(kPi * (k - j) / n);
      const long phase = ((static_cast<long>(l) * (j - k)) % n + n) % n;
      const double theta = 2.0 * kPi * static_cast<double>(phase) / n;
      acc += 2.0 * (std::sin(omega * T + theta) - std::sin(theta)) / omega;
    }
  }
  return acc.value();
}

double lemma2_integral(const TrigSumParams& params) { return std::abs(n_of_t_integral(params)); }

double lemma2_bound(int n) {
  require_odd(n);
  if (n < 3) throw InvalidInput("lemma2_bound needs n >= 3");
  const double v = n * std::log(static_cast<double>(n));
  return 32.0 * v * v;
}

double conjecture_rhs(std::span<const int> dims) {
  if (dims.empty()) throw InvalidInput("conjecture_rhs needs at least one size");
  for (int n : dims) {
    require_odd(n);
    if (n < 3) throw InvalidInput("conjecture sizes must be >= 3");
  }
  if (!pairwise_coprime(dims)) throw InvalidInput("conjecture sizes must be pairwise coprime");
  const auto d = static_cast<double>(dims.size());
  double total = 0.0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    double others = 1.0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (i != j) others *= dims[i];
    }
    const double v = dims[j] * std::log(static_cast<double>(dims[j]));
    total += others * v * v;
  }
  return 16.0 * d * total;
}

double n_product_integral(const TrigSumParams& p1, const TrigSumParams& p2, double T) {
  p1.validate();
  p2.validate();
  if (!std::isfinite(T) || T < 0.0) throw InvalidInput("T must be finite and >= 0");
  const ClassSeries s1(p1);
  const ClassSeries s2(p2);
  const auto& l1 = s1.classes().lambdas;
  const auto& l2 = s2.classes().lambdas;
  const auto c1 = s1.coefficients();
  const auto c2 = s2.coefficients();
  const std::size_t m2 = l2.size();

  // n(t) = sum_{a != b} c_a c_b e^{i (lambda_a - lambda_b) t / 2}; it has no constant term.
  std::vector<double> omega2;
  std::vector<double> coeff2;
  for (std::size_t a = 0; a < m2; ++a) {
    for (std::size_t b = 0; b < m2; ++b) {
      if (a == b) continue;
      omega2.push_back(kHalfRate * (l2[a] - l2[b]));
      coeff2.push_back(c2[a] * c2[b]);
    }
  }
  CompensatedSum acc;
  for (std::size_t a = 0; a < l1.size(); ++a) {
    for (std::size_t b = 0; b < l1.size(); ++b) {
      if (a == b) continue;
      const double omega1 = kHalfRate * (l1[a] - l1[b]);
      const double w1 = c1[a] * c1[b];
      double inner = 0.0;
      for (std::size_t i = 0; i < omega2.size(); ++i) {
        inner += coeff2[i] * time_average_phase(omega1 + omega2[i], T, false).real();
      }
      acc += w1 * inner;
    }
  }
  return acc.value() * T;
}

std::vector<double> n_product_integral_curve(const TrigSumParams& p1, const TrigSumParams& p2,
                                             std::span<const double> T_grid, double dt) {
  p1.validate();
  p2.validate();
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidInput("step must be > 0");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (!std::isfinite(T_grid[i]) || T_grid[i] < 0.0) throw InvalidInput("grid times must be >= 0");
    if (i > 0 && T_grid[i] < T_grid[i - 1]) throw InvalidInput("grid times must be ascending");
  }
  const ClassSeries s1(p1);
  const ClassSeries s2(p2);
  ClassPhasors z1(s1.classes(), kHalfRate, dt);
  ClassPhasors z2(s2.classes(), kHalfRate, dt);
  auto node = [&] { return s1.from_phasors(z1.values()) * s2.from_phasors(z2.values()); };
  auto direct = [&](double t) { return s1.at(t) * s2.at(t); };

  std::vector<double> out(T_grid.size());
  std::size_t next = 0;
  CompensatedSum running;
  double f0 = node();
  long panel = 0;
  while (next < T_grid.size()) {
    const double start = static_cast<double>(2 * panel) * dt;
    const double end = static_cast<double>(2 * panel + 2) * dt;
    while (next < T_grid.size() && T_grid[next] < end) {
      const double gap = T_grid[next] - start;
      double tail = 0.0;
      if (gap > 0.0) {
        tail = gap / 6.0 * (f0 + 4.0 * direct(start + 0.5 * gap) + direct(T_grid[next]));
      }
      out[next] = running.value() + tail;
      ++next;
    }
    if (next == T_grid.size()) break;
    z1.advance();
    z2.advance();
    const double f1 = node();
    z1.advance();
    z2.advance();
    const double f2 = node();
    running += dt / 3.0 * (f0 + 4.0 * f1 + f2);
    f0 = f2;
    ++panel;
  }
  return out;
}

double conjecture_lhs(const TrigSumParams& p1, const TrigSumParams& p2, double T, double dt) {
  require_conjecture_pair(p1, p2);
  if (dt > kMaxConjectureStep) throw ResolutionError("conjecture quadrature step must be <= 0.02");
  const double grid[] = {T};
  return std::abs(n_product_integral_curve(p1, p2, grid, dt)[0]);
}

double conjecture_lhs_analytic(const TrigSumParams& p1, const TrigSumParams& p2, double T) {
  require_conjecture_pair(p1, p2);
  return std::abs(n_product_integral(p1, p2, T));
}

std::vector<std::pair<int, int>> conjecture_pairs(int lo, int hi) {
  if (lo > hi) throw InvalidInput("pair range must satisfy lo <= hi");
  std::vector<std::pair<int, int>> out;
  for (int n2 = std::max(lo, 3); n2 <= hi; ++n2) {
    if (n2 % 2 == 0) continue;
    for (int n1 = n2 + 2; n1 <= hi; n1 += 2) {
      if (std::gcd(n1, n2) == 1) out.emplace_back(n1, n2);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> sample_conjecture_pairs(int lo, int hi, std::size_t count, std::uint64_t seed) {
  auto all = conjecture_pairs(lo, hi);
  if (count >= all.size()) return all;
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(all.size() - i));
    std::swap(all[i], all[j]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return std::pair{x.second, x.first} < std::pair{y.second, y.first};
  });
  return all;
}

std::vector<ConjectureRow> conjecture_sweep(std::span<const std::pair<int, int>> pairs,
                                            std::span<const double> T_grid, std::span<const int> offsets,
                                            const SweepOptions& options) {
  if (options.dt > kMaxConjectureStep) throw ResolutionError("conjecture quadrature step must be <= 0.02");
  const std::size_t tasks = pairs.size() * offsets.size();
  std::vector<std::vector<ConjectureRow>> blocks(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const auto [n1, n2] = pairs[task / offsets.size()];
    const int offset = offsets[task % offsets.size()];
    const TrigSumParams p1{n1, ((offset % n1) + n1) % n1, 0.0};
    const TrigSumParams p2{n2, ((offset % n2) + n2) % n2, 0.0};
    require_conjecture_pair(p1, p2);
    const std::array<int, 2> sizes{n1, n2};
    const double rhs = conjecture_rhs(sizes);
    const auto coarse = n_product_integral_curve(p1, p2, T_grid, options.dt);
    std::vector<double> fine;
    if (options.check_halving) fine = n_product_integral_curve(p1, p2, T_grid, 0.5 * options.dt);
    auto& rows = blocks[task];
    rows.reserve(T_grid.size());
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
      ConjectureRow row;
      row.n1 = n1;
      row.n2 = n2;
      row.offset = offset;
      row.T = T_grid[i];
      row.report = make_report(pair_label(n1, n2, offset, T_grid[i]), std::abs(coarse[i]), rhs,
                               BoundMethod::Quadrature);
      if (options.check_halving) {
        const double denom = std::abs(fine[i]);
        row.halving_change = denom > 0.0 ? std::abs(coarse[i] - fine[i]) / denom : std::abs(coarse[i] - fine[i]);
      }
      rows.push_back(std::move(row));
    }
  });
  std::vector<ConjectureRow> out;
  out.reserve(tasks * T_grid.size());
  for (auto& b : blocks) {
    for (auto& r : b) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qwalk
