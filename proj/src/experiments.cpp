#include "qwalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qwalk/classical.hpp"
#include "qwalk/error.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/summation.hpp"

namespace qwalk {
namespace {

constexpr std::size_t kMaxJointVertices = 10'000'000;

std::vector<double> cycle_probabilities(int n, double t, double rate) {
  const auto amp = cycle_amplitude(CycleSpec(n), 0, t, rate);
  std::vector<double> out(amp.entries.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(amp.entries[i]);
  return out;
}

// Inverse-CDF draw; the last index absorbs rounding in the cumulative sum.
std::size_t sample_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Algorithm1Record algorithm1_run(const LatticeSpec& lattice, double T, long rounds, SamplingMode mode,
                                std::uint64_t seed, long trajectories) {
  if (!std::isfinite(T) || T <= 0.0) throw InvalidInput("algorithm1: T must be > 0");
  if (rounds < 1) throw InvalidInput("algorithm1: rounds must be >= 1");
  if (mode == SamplingMode::Sampled && trajectories < 1) throw InvalidInput("algorithm1: trajectories must be >= 1");

  const Kernel single = averaged_kernel(lattice, T);
  const Kernel power = kernel_power(single, rounds);
  Algorithm1Record rec{lattice, T, rounds, mode};
  rec.distribution.assign(power.first_column().begin(), power.first_column().end());
  rec.tv_to_uniform = distance_to_uniform(power);
  rec.d_single = pairwise_column_distance(single);
  rec.d_power = pairwise_column_distance(power);
  if (mode == SamplingMode::Exact) return rec;

  const std::size_t d = lattice.rank();
  const double rate = 1.0 / static_cast<double>(d);
  std::vector<std::size_t> endpoints(static_cast<std::size_t>(trajectories));
  parallel_for(endpoints.size(), [&](std::size_t traj) {
    RandomStream rng(seed, traj);
    std::vector<int> pos(d, 0);
    for (long r = 0; r < rounds; ++r) {
      const double t = T * rng.uniform();
      for (std::size_t k = 0; k < d; ++k) {
        const auto probs = cycle_probabilities(lattice.dim(k), t, rate);
        const auto step = static_cast<int>(sample_index(probs, rng.uniform()));
        pos[k] = (pos[k] + step) % lattice.dim(k);
      }
    }
    endpoints[traj] = lattice.index(pos);
  });
  std::vector<double> counts(lattice.vertex_count(), 0.0);
  for (std::size_t e : endpoints) counts[e] += 1.0;
  for (double& c : counts) c /= static_cast<double>(trajectories);
  const std::vector<double> uniform(counts.size(), 1.0 / static_cast<double>(counts.size()));
  rec.trajectories = trajectories;
  rec.empirical = std::move(counts);
  rec.empirical_tv_to_exact = tv_distance(rec.empirical, rec.distribution);
  rec.empirical_tv_to_uniform = tv_distance(rec.empirical, uniform);
  return rec;
}

Kernel cycle_measurement_kernel(int n, double t) {
  if (!std::isfinite(t) || t < 0.0) throw InvalidInput("evolution time must be finite and >= 0");
  const LatticeSpec cycle({n});
  return Kernel(cycle, cycle_probabilities(n, t, rate_of(TimeScale::Full)), {KernelOrigin{KernelKind::Instant, t}});
}

std::vector<double> product_distribution(const LatticeSpec& lattice, const std::vector<std::vector<double>>& factors) {
  if (factors.size() != lattice.rank()) throw InvalidInput("one factor per coordinate required");
  if (lattice.vertex_count() > kMaxJointVertices) throw SizeError("joint distribution too large");
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

CoordinateRecord coordinate_wise_run(const LatticeSpec& lattice, double epsilon, const CoordinateOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0,1)");
  if (!options.times.empty() && options.times.size() != lattice.rank()) {
    throw InvalidInput("need one evolution time per coordinate");
  }
  if (options.rounds && *options.rounds < 0) throw InvalidInput("rounds must be >= 0");

  CoordinateRecord rec{lattice, epsilon};
  std::vector<std::vector<double>> dists;
  for (std::size_t k = 0; k < lattice.rank(); ++k) {
    CoordinateFactor f;
    f.n = lattice.dim(k);
    f.t = options.times.empty() ? f.n / 3.0 : options.times[k];
    f.in_interval = f.t >= f.n / 3.0 && f.t <= f.n / 2.0;
    if (!f.in_interval) {
      rec.warnings.push_back("coordinate " + std::to_string(k) + ": t = " + format_number(f.t) +
                             " lies outside [n/3, n/2]");
    }
    const Kernel q = cycle_measurement_kernel(f.n, f.t);
    f.alpha = pairwise_column_distance(q);
    if (options.rounds) {
      f.rounds = *options.rounds;
    } else if (f.alpha > 0.0 && f.alpha < 1.0) {
      f.rounds = prop1_rounds(f.alpha);
    } else if (f.alpha == 0.0) {
      f.rounds = 1;
    } else {
      throw InvalidInput("measurement kernel does not contract (d(Q) = 1); pass rounds explicitly");
    }
    // Starting from vertex 0, the distribution after r rounds is the first column of Q^r.
    const Kernel qr = kernel_power(q, f.rounds);
    std::vector<double> dist(qr.first_column().begin(), qr.first_column().end());
    const std::vector<double> uniform(dist.size(), 1.0 / f.n);
    f.tv = tv_distance(dist, uniform);
    f.distribution = dist;
    rec.total_time += static_cast<double>(f.rounds) * f.t;
    dists.push_back(std::move(dist));
    rec.factors.push_back(std::move(f));
  }
  const auto joint = product_distribution(lattice, dists);
  const std::vector<double> uniform(joint.size(), 1.0 / static_cast<double>(joint.size()));
  rec.joint_tv = tv_distance(joint, uniform);
  rec.reached = rec.joint_tv <= epsilon;
  return rec;
}

MassProfile two_thirds_mass(int n, double t) {
  const Kernel q = cycle_measurement_kernel(n, t);
  std::vector<double> sorted(q.first_column().begin(), q.first_column().end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto needed = static_cast<std::size_t>((2 * n + 2) / 3);  // ceil(2n/3)
  MassProfile out{n, t};
  out.constant = sorted[needed - 1] * n;
  const double threshold = sorted[needed - 1];
  const auto qualifying = std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v >= threshold; });
  out.fraction = static_cast<double>(qualifying) / n;
  return out;
}

bool Theorem3Report::all_satisfied() const {
  return std::all_of(cases.begin(), cases.end(), [](const BoundReport& r) { return r.satisfied; });
}

double theorem3_time(int n1, int n2) {
  const double l = std::log(static_cast<double>(n1));
  return 1600.0 * (n1 + n2) * l * l;
}

Theorem3Report theorem3_case_check(int n1, int n2, const Theorem3Options& options) {
  if (n1 % 2 == 0 || n2 % 2 == 0) {
    throw UnsupportedParity("theorem3 check needs odd n1, n2");
  }
  if (options.strict) {
    if (!(n1 > n2 && n2 > 91 && std::gcd(n1, n2) == 1)) {
      throw PreconditionError("strict theorem3 check needs n1 > n2 > 91, odd and coprime; got (" +
                              std::to_string(n1) + "," + std::to_string(n2) + ")");
    }
  }
  Theorem3Report rep;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.T = theorem3_time(n1, n2);
  const LatticeSpec lattice({n1, n2});
  AnalyticOptions analytic;
  analytic.checkpoint_path = options.checkpoint_path;
  const Kernel pt = averaged_kernel_analytic(lattice, rep.T, analytic);
  rep.column.assign(pt.first_column().begin(), pt.first_column().end());

  const double u = 1.0 / (static_cast<double>(n1) * n2);
  auto at = [&](int l1, int l2) { return rep.column[static_cast<std::size_t>(l1) * n2 + l2]; };
  double case1 = 0.0;
  double case2 = 0.0;
  double case3 = 0.0;
  CompensatedSum total;
  for (int l1 = 0; l1 < n1; ++l1) {
    for (int l2 = 0; l2 < n2; ++l2) {
      const double gap = std::abs(at(l1, l2) - u);
      total += gap;
      if (l1 == 0 && l2 != 0) case1 = std::max(case1, gap);
      if (l1 != 0 && l2 == 0) case2 = std::max(case2, gap);
      if (l1 != 0 && l2 != 0) case3 = std::max(case3, gap);
    }
  }
  rep.aggregate_l1 = total.value();
  rep.d_pt = pairwise_column_distance(pt);

  const double nn2 = n2;
  const std::string tag = "n1=" + std::to_string(n1) + ",n2=" + std::to_string(n2);
  rep.cases.push_back(make_report(tag + ",case0", std::abs(at(0, 0) - u), 4.0 / (nn2 * nn2), BoundMethod::Analytic));
  rep.cases.push_back(make_report(tag + ",case1", n2 * case1, 3.0 / nn2, BoundMethod::Analytic));
  rep.cases.push_back(make_report(tag + ",case2", n1 * case2, 3.0 / nn2, BoundMethod::Analytic));
  rep.cases.push_back(make_report(tag + ",case3", static_cast<double>(n1) * n2 * case3, 3.0 / nn2 + 2.0 / 50.0,
                                  BoundMethod::Analytic));
  rep.cases.push_back(make_report(tag + ",aggregate", rep.aggregate_l1, 13.0 / nn2 + 2.0 / 50.0, BoundMethod::Analytic));
  rep.cases.push_back(make_report(tag + ",d(P_T)", rep.d_pt, 1.0 / (2.0 * std::numbers::e), BoundMethod::Analytic));
  return rep;
}

Fig1Record fig1_experiment(int n1, int n2, std::optional<long> t_max) {
  const LatticeSpec lattice({n1, n2});
  Fig1Record rec;
  rec.n1 = n1;
  rec.n2 = n2;
  rec.uniform_level = 1.0 / static_cast<double>(lattice.vertex_count());
  rec.quantum_mark = n1 + n2;
  rec.classical_mark = static_cast<long>(n1) * n1 + static_cast<long>(n2) * n2;
  const long last = t_max.value_or(rec.classical_mark);
  if (last < 0) throw InvalidInput("t_max must be >= 0");

  const auto curve = classical_mixing_curve(lattice, std::max(last, rec.classical_mark));
  rec.classical_tv_at_mark = curve[static_cast<std::size_t>(rec.classical_mark)].tv;

  rec.times.resize(static_cast<std::size_t>(last) + 1);
  rec.quantum_return.resize(rec.times.size());
  rec.classical_return.resize(rec.times.size());
  parallel_for(rec.times.size(), [&](std::size_t i) {
    const double T = static_cast<double>(i);
    rec.quantum_return[i] = i == 0 ? 1.0 : averaged_kernel(lattice, T).first_column()[0];
  });
  CompensatedSum running;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    rec.times[i] = static_cast<double>(i);
    running += curve[i].return_probability;
    rec.classical_return[i] = running.value() / static_cast<double>(i + 1);
  }
  return rec;
}

}  // namespace qwalk
