// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qwalk/classical.hpp"
#include "qwalk/distances.hpp"
#include "qwalk/experiments.hpp"
#include "qwalk/kernel.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/trig_sums.hpp"

using namespace qwalk;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Worst deviation of row and column sums from one.
double stochastic_error(const Kernel& k) {
  const auto full = k.dense();
  const std::size_t n = k.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += full[i * n + j];
      col += full[j * n + i];
    }
    worst = std::max({worst, std::abs(row - 1.0), std::abs(col - 1.0)});
  }
  return worst;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Verdict criterion1() {
  double norm_err = 0.0, stoch_err = 0.0;
  for (int n : {3, 5, 19, 101}) {
    for (double t : {0.0, 1.0, n / 3.0, 17.3}) {
      for (auto scale : {TimeScale::Full, TimeScale::Half}) {
        double s = 0.0;
        for (const auto& a : cycle_amplitude(CycleSpec(n), 0, t, scale).entries) s += std::norm(a);
        norm_err = std::max(norm_err, std::abs(s - 1.0));
      }
      const LatticeSpec lat({n});
      stoch_err = std::max(stoch_err, stochastic_error(instantaneous_kernel(lat, t)));
      stoch_err = std::max(stoch_err, stochastic_error(cycle_measurement_kernel(n, t)));
      if (t > 0.0) {
        const auto avg = averaged_kernel_analytic(lat, t);
        stoch_err = std::max(stoch_err, stochastic_error(avg));
        stoch_err = std::max(stoch_err, stochastic_error(averaged_kernel_quadrature(lat, t, 0.02)));
        stoch_err = std::max(stoch_err, stochastic_error(kernel_power(avg, 5)));
      }
    }
    stoch_err = std::max(stoch_err, stochastic_error(lazy_kernel(LatticeSpec({n}))));
  }
  const bool pass = norm_err <= 1e-10 && stoch_err <= 1e-9;
  return {pass, "max |norm - 1| = " + fmt(norm_err) + ", max stochastic error = " + fmt(stoch_err)};
}

Verdict criterion2() {
  const LatticeSpec lat({19, 5});
  double kernel_gap = 0.0;
  for (double T : {1.0, 24.0, 100.0}) {
    kernel_gap = std::max(kernel_gap, max_abs_diff(averaged_kernel_analytic(lat, T).first_column(),
                                                   averaged_kernel_quadrature(lat, T, 0.02).first_column()));
  }
  double amp_gap = 0.0;
  struct Case {
    std::vector<int> dims;
    std::vector<int> source;
    double t;
  };
  const Case cases[] = {{{19}, {0}, 19.0 / 3.0}, {{9}, {4}, 3.0}, {{3, 5}, {1, 2}, 2.0}, {{3, 3, 5}, {0, 1, 2}, 1.7},
                        {{5, 9}, {2, 7}, 11.0}};
  for (const auto& c : cases) {
    const LatticeSpec l(c.dims);
    const auto amp = product_amplitude(l, c.source, c.t);
    const auto u = oracle::walk_unitary(oracle::lattice_walk_matrix(c.dims), c.t);
    const auto p = static_cast<Eigen::Index>(l.index(c.source));
    for (std::size_t q = 0; q < l.vertex_count(); ++q) {
      amp_gap = std::max(amp_gap, std::abs(amp.entries[q] - u(static_cast<Eigen::Index>(q), p)));
    }
  }
  return {kernel_gap <= 1e-6 && amp_gap <= 1e-9,
          "analytic vs quadrature " + fmt(kernel_gap) + " (<= 1e-6), amplitude vs expm " + fmt(amp_gap) + " (<= 1e-9)"};
}

Verdict criterion3() {
  const auto f = fig1_experiment(19, 5);
  const double q = std::abs(f.quantum_return[24] - f.uniform_level);
  const double c = std::abs(f.classical_return[24] - f.uniform_level);
  const double tol = 0.1 * (1.0 - 1.0 / 95.0);
  const bool pass = q <= tol && c > q && f.classical_tv_at_mark <= 0.1 && f.classical_mark == 386;
  return {pass, "quantum P_24(0,0) = " + fmt(f.quantum_return[24]) + " (gap " + fmt(q) + " <= " + fmt(tol) +
                    "), classical " + fmt(f.classical_return[24]) + " (gap " + fmt(c) + "), classical tv at 386 = " +
                    fmt(f.classical_tv_at_mark)};
}

Verdict criterion4() {
  long violations = 0, rows = 0;
  double worst = 0.0;
  for (int n = 5; n <= 101; n += 2) {
    for (int l : {0, 1, n / 2}) {
      for (double T : {10.0, 1e2, 1e3, 1e4}) {
        const double lhs = lemma2_integral({n, l, T});
        const double rhs = lemma2_bound(n);
        worst = std::max(worst, lhs / rhs);
        violations += lhs > rhs;
        ++rows;
      }
    }
  }
  return {violations == 0,
          std::to_string(rows) + " rows, " + std::to_string(violations) + " violations, max lhs/rhs = " + fmt(worst)};
}

Verdict criterion5() {
  const auto pairs = sample_conjecture_pairs(10, 100, 50, 3);
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(500.0 * k);
  const int offsets[] = {0};
  const auto rows = conjecture_sweep(pairs, grid, offsets, SweepOptions{0.02, true});
  long violations = 0, halving = 0;
  double ratio = 0.0, change = 0.0;
  for (const auto& r : rows) {
    violations += !r.report.satisfied;
    ratio = std::max(ratio, r.report.lhs / r.report.rhs);
    change = std::max(change, r.halving_change.value_or(INFINITY));
    halving += !(r.halving_change && *r.halving_change <= 1e-5);
  }
  const bool pass = pairs.size() >= 50 && violations == 0 && halving == 0;
  return {pass, std::to_string(pairs.size()) + " pairs, " + std::to_string(rows.size()) + " rows, " +
                    std::to_string(violations) + " violations, max lhs/rhs = " + fmt(ratio) +
                    ", max halving change = " + fmt(change)};
}

Verdict criterion6() {
  bool pass = true;
  std::string detail;
  for (const auto& dims : std::vector<std::vector<int>>{{9, 5}, {7, 7}}) {
    const LatticeSpec lat(dims);
    for (double eps : {0.25, 0.1}) {
      const long t = theorem1_bound(lat, eps);
      const double tv = classical_mixing_curve(lat, t).back().tv;
      pass = pass && tv <= eps;
      detail += lat.to_string() + " eps " + fmt(eps) + ": tv(" + std::to_string(t) + ") = " + fmt(tv) + "; ";
    }
  }
  for (const auto& dims : std::vector<std::vector<int>>{{19, 5}, {9, 5}}) {
    const LatticeSpec lat(dims);
    const auto s = coupling_simulation(lat, 10000, 1);
    for (std::size_t i = 0; i < lat.rank(); ++i) {
      const double n = lat.dim(i);
      const double bound = static_cast<double>(lat.rank()) * n * n / 4.0;
      pass = pass && s.mean_tau[i] <= bound + 3.0 * s.stderr_tau[i];
      detail += lat.to_string() + " tau_" + std::to_string(i + 1) + " = " + fmt(s.mean_tau[i]) + " +- " +
                fmt(s.stderr_tau[i]) + " vs " + fmt(bound) + "; ";
    }
    pass = pass && s.absorption_violations == 0;
  }
  return {pass, detail};
}

Verdict criterion7() {
  const auto r = coordinate_wise_run(LatticeSpec({19, 5}), 0.1);
  bool pass = r.reached && r.joint_tv <= 0.1;
  std::string detail = "joint tv " + fmt(r.joint_tv);
  for (const auto& f : r.factors) {
    pass = pass && f.alpha < 1.0 && f.rounds == prop1_rounds(f.alpha);
    detail += ", n=" + std::to_string(f.n) + " alpha " + fmt(f.alpha) + " rounds " + std::to_string(f.rounds);
  }
  double min_c = INFINITY, min_fraction = INFINITY;
  for (int n = 5; n <= 101; n += 2) {
    const auto m = two_thirds_mass(n, n / 3.0);
    min_c = std::min(min_c, m.constant);
    min_fraction = std::min(min_fraction, m.fraction);
    pass = pass && m.constant > 0.0 && m.fraction >= 2.0 / 3.0;
  }
  detail += ", 2/3-mass min c = " + fmt(min_c) + ", min fraction = " + fmt(min_fraction);
  return {pass, detail};
}

Verdict criterion8() {
  const auto r = theorem3_case_check(95, 93);
  std::string detail = "T = " + fmt(r.T);
  for (const auto& c : r.cases) {
    detail += "; " + c.params.substr(c.params.rfind(',') + 1) + " " + fmt(c.lhs) + " <= " + fmt(c.rhs);
  }
  return {r.all_satisfied() && r.cases.size() == 6, detail};
}

Verdict criterion9() {
  const auto k = averaged_kernel_analytic(LatticeSpec({19, 5}), 24.0);
  const double d1 = pairwise_column_distance(k);
  bool pass = d1 < 1.0;
  std::string detail = "d(P_T) = " + fmt(d1);
  for (long e : {2L, 3L, 4L}) {
    const double de = pairwise_column_distance(kernel_power(k, e));
    pass = pass && de <= std::pow(d1, double(e)) + 1e-9;
    detail += ", d(P^" + std::to_string(e) + ") = " + fmt(de);
  }
  const long rounds = contraction_rounds(d1, 1e-3);
  const auto run = algorithm1_run(LatticeSpec({19, 5}), 24.0, rounds, SamplingMode::Exact);
  pass = pass && run.tv_to_uniform <= 1e-3;
  detail += ", T' = " + std::to_string(rounds) + " gives tv " + fmt(run.tv_to_uniform);
  return {pass, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict criterion10() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "qwalk_acceptance_determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cli = QWALK_CLI_PATH;
  const std::vector<std::string> jobs = {
      "fig1 --dims 19,5 --out {}/fig1.csv",
      "fig1 --dims 19,5 --out {}/fig1.svg",
      "conjecture --range 10,40 --pairs 6 --seed 3 --T-max 2000 --T-points 4 --out {}/conj.csv",
      "mix-repeated --dims 7,5 --T 6 --mode sampled --seed 11 --trajectories 20000 --out {}/alg1.json",
      "mix-classical --dims 9,5 --epsilon 0.1 --trials 500 --seed 4 --out {}/classical.json",
      "mix-coordinate --dims 19,5 --out {}/coord.json",
      "lemma2 --grid --out {}/lemma2.csv",
      "kernel --dims 19,5 --kind averaged --T 24 --out {}/kernel.json",
      "spectrum --dims 19,5 --out {}/spectrum.json",
  };
  long identical = 0, total = 0;
  std::string failures;
  for (const auto& job : jobs) {
    std::string artifact[3], manifest[3];
    for (int rep = 0; rep < 3; ++rep) {
      // Reruns reuse the output path, since the manifest records it.
      const auto sub = dir / (rep == 2 ? "workers3" : "run");
      std::string cmd = job;
      for (std::size_t at; (at = cmd.find("{}")) != std::string::npos;) cmd.replace(at, 2, sub.string());
      // The third run changes the worker count; the artifact must not depend on it.
      const std::string env = rep == 2 ? "QWALK_WORKERS=3 " : "QWALK_WORKERS=1 ";
      const int status = std::system((env + cli + " " + cmd + " 2>/dev/null").c_str());
      const auto out = cmd.substr(cmd.find("--out ") + 6);
      artifact[rep] = status == 0 ? slurp(out) : "";
      manifest[rep] = slurp(out + ".manifest.json");
    }
    ++total;
    const bool same = !artifact[0].empty() && !manifest[0].empty() && artifact[0] == artifact[1] &&
                      manifest[0] == manifest[1] && artifact[0] == artifact[2];
    if (same) {
      ++identical;
    } else {
      failures += " [" + job.substr(0, job.find(' ')) + "]";
    }
  }
  std::filesystem::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " jobs byte-identical across reruns and worker counts" + failures};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "unitarity and stochasticity", 5, criterion1},
      {2, "oracle equivalence", 30, criterion2},
      {3, "return probability comparison on Z19 x Z5", 10, criterion3},
      {4, "single-cycle integral bound grid", 60, criterion4},
      {5, "two-cycle conjecture sweep", 600, criterion5},
      {6, "lazy walk bound and coupling", 60, criterion6},
      {7, "coordinate-wise walk", 60, criterion7},
      {8, "averaged kernel case bounds at (95, 93)", 1800, criterion8},
      {9, "repeated measurement and submultiplicativity", 10, criterion9},
      {10, "CLI determinism", 120, criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      v.pass = false;
      v.detail += "; runtime " + fmt(secs) + " s over the " + fmt(c.budget_s) + " s budget";
    }
    failed += !v.pass;
    std::printf("criterion %2d %s  %s (%.1f s): %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
