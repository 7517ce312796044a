#include "qwalk/classical.hpp"

#include <algorithm>
#include <cmath>

#include "qwalk/distances.hpp"
#include "qwalk/error.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/summation.hpp"

namespace qwalk {
namespace {

constexpr std::size_t kMaxCurveVertices = 1'000'000;

struct Neighbours {
  std::vector<std::size_t> plus;   // N x d
  std::vector<std::size_t> minus;  // N x d
};

Neighbours neighbour_table(const LatticeSpec& lattice) {
  const std::size_t N = lattice.vertex_count();
  const std::size_t d = lattice.rank();
  Neighbours nb{std::vector<std::size_t>(N * d), std::vector<std::size_t>(N * d)};
  for (std::size_t i = 0; i < N; ++i) {
    auto c = lattice.coords(i);
    for (std::size_t k = 0; k < d; ++k) {
      const int orig = c[k];
      c[k] = orig + 1;
      nb.plus[i * d + k] = lattice.index(c);
      c[k] = orig - 1;
      nb.minus[i * d + k] = lattice.index(c);
      c[k] = orig;
    }
  }
  return nb;
}

}  // namespace

Kernel lazy_kernel(const LatticeSpec& lattice) {
  const std::size_t d = lattice.rank();
  std::vector<double> col(lattice.vertex_count(), 0.0);
  col[0] = 0.5;
  const double share = 1.0 / (4.0 * static_cast<double>(d));
  std::vector<int> c(d, 0);
  for (std::size_t k = 0; k < d; ++k) {
    c[k] = 1;
    col[lattice.index(c)] += share;
    c[k] = -1;
    col[lattice.index(c)] += share;
    c[k] = 0;
  }
  return Kernel(lattice, std::move(col), {KernelOrigin{KernelKind::ClassicalLazy, 1.0}});
}

long theorem1_bound(const LatticeSpec& lattice, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InvalidInput("theorem1_bound: epsilon must lie in (0, 1/2)");
  const auto d = static_cast<long>(lattice.rank());
  const long n1 = lattice.max_dim();
  const long logs = static_cast<long>(std::ceil(std::log(static_cast<double>(d) / epsilon)));
  return 2 * d * n1 * n1 * logs;
}

std::vector<ClassicalCurvePoint> classical_mixing_curve(const LatticeSpec& lattice, long t_max) {
  if (t_max < 0) throw InvalidInput("t_max must be >= 0");
  const std::size_t N = lattice.vertex_count();
  if (N > kMaxCurveVertices) throw SizeError("classical curve limited to 10^6 vertices");
  const std::size_t d = lattice.rank();
  const auto nb = neighbour_table(lattice);
  const double share = 1.0 / (4.0 * static_cast<double>(d));
  const double u = 1.0 / static_cast<double>(N);

  std::vector<double> cur(N, 0.0);
  std::vector<double> next(N);
  cur[0] = 1.0;
  std::vector<ClassicalCurvePoint> out;
  out.reserve(static_cast<std::size_t>(t_max) + 1);
  for (long t = 0;; ++t) {
    CompensatedSum dev;
    for (double p : cur) dev += std::abs(p - u);
    out.push_back({t, 0.5 * dev.value(), cur[0]});
    if (t == t_max) break;
    for (std::size_t x = 0; x < N; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += cur[nb.minus[x * d + k]] + cur[nb.plus[x * d + k]];
      next[x] = 0.5 * cur[x] + share * acc;
    }
    cur.swap(next);
  }
  return out;
}

CouplingSummary coupling_simulation(const LatticeSpec& lattice, long trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("coupling_simulation needs at least one trial");
  const std::size_t d = lattice.rank();

  struct TrialOutcome {
    std::vector<long> tau;
    long couple = 0;
    long violations = 0;
  };
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));

  parallel_for(outcomes.size(), [&](std::size_t trial) {
    RandomStream rng(seed, trial);
    CouplingState s{std::vector<int>(d, 0), std::vector<int>(d), 0, std::vector<bool>(d, false)};
    TrialOutcome out{std::vector<long>(d, 0), 0, 0};
    std::size_t remaining = d;
    for (std::size_t k = 0; k < d; ++k) s.y[k] = lattice.dim(k) / 2;
    while (remaining > 0) {
      ++s.t;
      const auto k = static_cast<std::size_t>(rng.below(d));
      const int n = lattice.dim(k);
      if (s.x[k] == s.y[k]) {
        const auto r = rng.below(4);
        const int step = r == 0 ? 1 : (r == 1 ? -1 : 0);
        s.x[k] = (s.x[k] + step + n) % n;
        s.y[k] = (s.y[k] + step + n) % n;
      } else {
        const bool move_x = rng.below(2) == 0;
        const int step = rng.below(2) == 0 ? 1 : -1;
        int& mover = move_x ? s.x[k] : s.y[k];
        mover = (mover + step + n) % n;
        if (s.x[k] == s.y[k]) {
          s.coupled[k] = true;
          out.tau[k] = s.t;
          --remaining;
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        if (s.coupled[i] && s.x[i] != s.y[i]) ++out.violations;
      }
    }
    out.couple = s.t;
    outcomes[trial] = std::move(out);
  });

  CouplingSummary summary;
  summary.trials = trials;
  const auto count = static_cast<double>(trials);
  auto mean_and_error = [&](auto&& value) {
    CompensatedSum s;
    CompensatedSum s2;
    for (const auto& o : outcomes) {
      const double v = value(o);
      s += v;
      s2 += v * v;
    }
    const double mean = s.value() / count;
    const double var = trials > 1 ? std::max(0.0, (s2.value() - count * mean * mean) / (count - 1.0)) : 0.0;
    return std::pair{mean, std::sqrt(var / count)};
  };
  for (std::size_t k = 0; k < d; ++k) {
    const auto [m, se] = mean_and_error([k](const TrialOutcome& o) { return static_cast<double>(o.tau[k]); });
    summary.mean_tau.push_back(m);
    summary.stderr_tau.push_back(se);
  }
  const auto [mc, sec] = mean_and_error([](const TrialOutcome& o) { return static_cast<double>(o.couple); });
  summary.mean_couple = mc;
  summary.stderr_couple = sec;
  for (const auto& o : outcomes) summary.absorption_violations += o.violations;
  return summary;
}

}  // namespace qwalk
