// qwalk: command line front end for the walk experiments.
//
// Every subcommand writes one artifact (csv, json or svg) to --out, or to
// stdout when --out is absent, plus <out>.manifest.json echoing the resolved
// configuration. Exit status: 0 ok, 1 usage or input error, 2 bound violated.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "output.hpp"
#include "qwalk/classical.hpp"
#include "qwalk/distances.hpp"
#include "qwalk/error.hpp"
#include "qwalk/experiments.hpp"
#include "qwalk/kernel.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/trig_sums.hpp"

#ifndef QWALK_VERSION
#define QWALK_VERSION "0.0.0"
#endif

using nlohmann::ordered_json;
using namespace qwalk;
using namespace qwalk::cli;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;
constexpr int kManifestSchema = 1;

struct Common {
  std::string out;
  std::string format;
  std::string config;
  std::string tier = "fast";
  std::size_t parallel = 0;
};

struct Output {
  std::string text;
  bool violation = false;
  ordered_json summary = ordered_json::object();
};

// A subcommand: its CLI11 node, the shared options and the job itself.
struct Command {
  CLI::App* app = nullptr;
  Common common;
  std::string default_format = "csv";
  std::vector<std::string> formats;
  bool slow = false;
  std::function<bool()> needs_slow;  // optional, for jobs that are slow only for some settings
  std::function<Output(Format)> run;
};

void add_common(Command& c) {
  c.app->add_option("--out,-o", c.common.out, "output file (stdout when omitted)");
  c.app->add_option("--format,-f", c.common.format, "csv, json or svg (default from --out extension)");
  c.app->add_option("--config", c.common.config, "key=value file merged under the flags");
  c.app->add_option("--tier", c.common.tier, "fast or slow")->check(CLI::IsMember({"fast", "slow"}));
  c.app->add_option("--parallel,-j", c.common.parallel, "worker threads (default QWALK_WORKERS or core count)");
}

Format resolve_format(const Command& c) {
  std::string name = c.common.format;
  if (name.empty() && !c.common.out.empty()) {
    const auto ext = std::filesystem::path(c.common.out).extension().string();
    if (ext == ".csv" || ext == ".json" || ext == ".svg") name = ext.substr(1);
  }
  if (name.empty()) name = c.default_format;
  const Format f = parse_format(name);
  if (std::find(c.formats.begin(), c.formats.end(), name) == c.formats.end()) {
    throw InvalidInput("subcommand '" + c.app->get_name() + "' does not emit " + name);
  }
  return f;
}

ordered_json dims_json(const LatticeSpec& lattice) {
  return ordered_json(std::vector<int>(lattice.dims().begin(), lattice.dims().end()));
}

std::vector<std::string> coordinate_header(const LatticeSpec& lattice, std::vector<std::string> tail) {
  std::vector<std::string> h = {"index"};
  for (std::size_t k = 0; k < lattice.rank(); ++k) h.push_back("l" + std::to_string(k + 1));
  h.insert(h.end(), tail.begin(), tail.end());
  return h;
}

void coordinate_cells(CsvTable& t, const LatticeSpec& lattice, std::size_t i) {
  t.cell(static_cast<long>(i));
  for (int c : lattice.coords(i)) t.cell(c);
}

std::string render(const CsvTable& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

std::string render_svg(const ChartLabels& labels, const std::vector<Series>& series) {
  std::ostringstream os;
  write_svg(os, labels, series);
  return os.str();
}

// ---------------------------------------------------------------------------

Command& spectrum_command(CLI::App& root, std::vector<Command>& cmds) {
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("spectrum", "eigenphases cos(2 pi j / n) per coordinate and the spectral gap");
  auto dims = std::make_shared<std::string>("19,5");
  c.app->add_option("--dims", *dims, "cycle lengths, e.g. 19,5");
  c.formats = {"csv", "json"};
  c.run = [dims](Format f) {
    const LatticeSpec lattice(parse_dims(*dims));
    Output o;
    o.summary["spectral_gap"] = spectral_gap(lattice);
    if (f == Format::Csv) {
      CsvTable t({"coordinate", "n", "j", "lambda"});
      for (std::size_t k = 0; k < lattice.rank(); ++k) {
        const auto table = eigenphases(lattice.cycle(k));
        for (int j = 0; j < table.n; ++j) t.row().cell(static_cast<long>(k)).cell(table.n).cell(j).cell(table.lambdas[j]);
      }
      o.text = render(t);
    } else {
      ordered_json j;
      j["dims"] = dims_json(lattice);
      j["vertex_count"] = lattice.vertex_count();
      j["spectral_gap"] = spectral_gap(lattice);
      j["cycles"] = ordered_json::array();
      for (std::size_t k = 0; k < lattice.rank(); ++k) {
        const auto table = eigenphases(lattice.cycle(k));
        j["cycles"].push_back({{"n", table.n}, {"lambdas", table.lambdas}});
      }
      o.text = dump_json(j);
    }
    return o;
  };
  return c;
}

Command& kernel_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::string dims = "19,5";
    std::string kind = "averaged";
    double T = 24.0;
    double dt = 0.02;
    long power = 1;
    std::string checkpoint;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("kernel", "first column of a walk kernel");
  c.app->add_option("--dims", o->dims, "cycle lengths");
  c.app->add_option("--kind", o->kind, "instant, averaged, quadrature, lazy, uniform or identity")
      ->check(CLI::IsMember({"instant", "averaged", "quadrature", "lazy", "uniform", "identity"}));
  c.app->add_option("--T", o->T, "evolution time t (instant) or averaging horizon T");
  c.app->add_option("--dt", o->dt, "quadrature step");
  c.app->add_option("--power", o->power, "kernel exponent");
  c.app->add_option("--checkpoint", o->checkpoint, "checkpoint file for the analytic averaged kernel");
  c.formats = {"csv", "json"};
  c.run = [o](Format f) {
    const LatticeSpec lattice(parse_dims(o->dims));
    auto build = [&]() -> Kernel {
      if (o->kind == "instant") return instantaneous_kernel(lattice, o->T);
      if (o->kind == "quadrature") return averaged_kernel_quadrature(lattice, o->T, o->dt);
      if (o->kind == "lazy") return lazy_kernel(lattice);
      if (o->kind == "uniform") return uniform_kernel(lattice);
      if (o->kind == "identity") return identity_kernel(lattice);
      if (lattice.rank() <= 2 && lattice.all_odd()) {
        AnalyticOptions opts;
        if (!o->checkpoint.empty()) opts.checkpoint_path = o->checkpoint;
        return averaged_kernel_analytic(lattice, o->T, opts);
      }
      return averaged_kernel(lattice, o->T);
    };
    const Kernel k = kernel_power(build(), o->power);
    Output out;
    out.summary["d"] = pairwise_column_distance(k);
    out.summary["tv_to_uniform"] = distance_to_uniform(k);
    if (f == Format::Csv) {
      CsvTable t(coordinate_header(lattice, {"probability"}));
      for (std::size_t i = 0; i < k.size(); ++i) {
        t.row();
        coordinate_cells(t, lattice, i);
        t.cell(k.first_column()[i]);
      }
      out.text = render(t);
    } else {
      ordered_json j;
      j["dims"] = dims_json(lattice);
      j["kind"] = to_string(k.origin().kind);
      j["base"] = to_string(k.origin().base);
      j["time"] = o->T;
      j["power"] = o->power;
      j["d"] = out.summary["d"];
      j["tv_to_uniform"] = out.summary["tv_to_uniform"];
      j["column"] = std::vector<double>(k.first_column().begin(), k.first_column().end());
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& mix_classical_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::string dims = "9,5";
    double epsilon = 0.1;
    long trials = 0;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("mix-classical", "lazy walk tv curve up to the 2 d n1^2 ceil(ln(d/eps)) bound");
  c.app->add_option("--dims", o->dims, "cycle lengths");
  c.app->add_option("--epsilon", o->epsilon, "target distance in (0, 1/2)");
  c.app->add_option("--trials", o->trials, "coupling trials (0 skips the simulation)");
  c.app->add_option("--seed", o->seed, "coupling seed");
  c.formats = {"csv", "json", "svg"};
  c.run = [o](Format f) {
    const LatticeSpec lattice(parse_dims(o->dims));
    const long bound = theorem1_bound(lattice, o->epsilon);
    const auto curve = classical_mixing_curve(lattice, bound);
    Output out;
    const double tv_at_bound = curve.back().tv;
    std::optional<long> first;
    for (const auto& p : curve) {
      if (p.tv <= o->epsilon) {
        first = p.t;
        break;
      }
    }
    out.summary["theorem1_bound"] = bound;
    out.summary["tv_at_bound"] = tv_at_bound;
    out.summary["first_step_below_epsilon"] = first ? ordered_json(*first) : ordered_json(nullptr);
    out.violation = tv_at_bound > o->epsilon;
    if (o->trials > 0) {
      const auto s = coupling_simulation(lattice, o->trials, o->seed);
      ordered_json cj;
      cj["trials"] = s.trials;
      cj["mean_tau"] = s.mean_tau;
      cj["stderr_tau"] = s.stderr_tau;
      std::vector<double> limits;
      std::vector<bool> ok;
      const double d = static_cast<double>(lattice.rank());
      for (std::size_t k = 0; k < lattice.rank(); ++k) {
        const double n = lattice.dim(k);
        limits.push_back(d * n * n / 4.0);
        ok.push_back(s.mean_tau[k] <= limits.back() + 3.0 * s.stderr_tau[k]);
        out.violation = out.violation || !ok.back();
      }
      cj["bound"] = limits;
      cj["within_bound"] = ok;
      cj["mean_couple"] = s.mean_couple;
      cj["stderr_couple"] = s.stderr_couple;
      cj["absorption_violations"] = s.absorption_violations;
      out.violation = out.violation || s.absorption_violations != 0;
      out.summary["coupling"] = cj;
    }
    if (f == Format::Csv) {
      CsvTable t({"t", "tv", "return_probability"});
      for (const auto& p : curve) t.row().cell(p.t).cell(p.tv).cell(p.return_probability);
      out.text = render(t);
    } else if (f == Format::Svg) {
      Series s{"tv to uniform", {}, {}, "#1f77b4"};
      Series e{"epsilon", {0.0, double(bound)}, {o->epsilon, o->epsilon}, "#d62728"};
      for (const auto& p : curve) {
        s.x.push_back(double(p.t));
        s.y.push_back(p.tv);
      }
      out.text = render_svg({"lazy walk on " + lattice.to_string(), "t", "tv", true}, {s, e});
    } else {
      ordered_json j;
      j["dims"] = dims_json(lattice);
      j["epsilon"] = o->epsilon;
      for (auto& [key, value] : out.summary.items()) j[key] = value;
      j["satisfied"] = !out.violation;
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& mix_coordinate_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::string dims = "19,5";
    double epsilon = 0.1;
    std::vector<double> times;
    long rounds = 0;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("mix-coordinate", "coordinate-wise evolve-and-measure walk");
  c.app->add_option("--dims", o->dims, "cycle lengths");
  c.app->add_option("--epsilon", o->epsilon, "target joint distance");
  c.app->add_option("--times", o->times, "evolution time per coordinate (default n_k/3)")->delimiter(',');
  c.app->add_option("--rounds", o->rounds, "rounds per coordinate (0: from the measured contraction)");
  c.formats = {"csv", "json"};
  c.run = [o](Format f) {
    const LatticeSpec lattice(parse_dims(o->dims));
    CoordinateOptions opts;
    opts.times = o->times;
    if (o->rounds > 0) opts.rounds = o->rounds;
    const auto r = coordinate_wise_run(lattice, o->epsilon, opts);
    Output out;
    out.violation = !r.reached;
    out.summary["joint_tv"] = r.joint_tv;
    out.summary["reached"] = r.reached;
    out.summary["total_time"] = r.total_time;
    if (f == Format::Csv) {
      CsvTable t({"coordinate", "n", "t", "in_interval", "alpha", "rounds", "tv"});
      for (std::size_t k = 0; k < r.factors.size(); ++k) {
        const auto& x = r.factors[k];
        t.row().cell(static_cast<long>(k)).cell(x.n).cell(x.t).cell(x.in_interval).cell(x.alpha).cell(x.rounds).cell(x.tv);
      }
      out.text = render(t);
    } else {
      ordered_json j;
      j["dims"] = dims_json(lattice);
      j["epsilon"] = o->epsilon;
      j["factors"] = ordered_json::array();
      for (const auto& x : r.factors) {
        const auto mass = two_thirds_mass(x.n, x.t);
        j["factors"].push_back({{"n", x.n},
                                {"t", x.t},
                                {"in_interval", x.in_interval},
                                {"alpha", x.alpha},
                                {"rounds", x.rounds},
                                {"tv", x.tv},
                                {"two_thirds_constant", mass.constant},
                                {"two_thirds_fraction", mass.fraction},
                                {"distribution", x.distribution}});
      }
      j["joint_tv"] = r.joint_tv;
      j["reached"] = r.reached;
      j["total_time"] = r.total_time;
      j["warnings"] = r.warnings;
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& mix_repeated_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::string dims = "19,5";
    double T = 24.0;
    double epsilon = 1e-3;
    long rounds = 0;
    std::string mode = "exact";
    std::uint64_t seed = 7;
    long trajectories = 100000;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("mix-repeated", "repeated evolve-for-random-time-and-measure walk");
  c.app->add_option("--dims", o->dims, "cycle lengths");
  c.app->add_option("--T", o->T, "averaging horizon");
  c.app->add_option("--epsilon", o->epsilon, "target distance");
  c.app->add_option("--rounds", o->rounds, "measurement rounds (0: ceil(log_{1/d(P_T)}(1/eps)))");
  c.app->add_option("--mode", o->mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  c.app->add_option("--seed", o->seed, "sampling seed");
  c.app->add_option("--trajectories", o->trajectories, "sampled trajectories");
  c.formats = {"csv", "json"};
  c.run = [o](Format f) {
    const LatticeSpec lattice(parse_dims(o->dims));
    const bool auto_rounds = o->rounds <= 0;
    long rounds = o->rounds;
    if (auto_rounds) {
      const double d = pairwise_column_distance(averaged_kernel(lattice, o->T));
      if (!(d < 1.0)) throw InvalidInput("d(P_T) = 1, the averaged kernel does not contract; pass --rounds");
      rounds = d == 0.0 ? 1 : contraction_rounds(d, o->epsilon);
    }
    const auto mode = o->mode == "sampled" ? SamplingMode::Sampled : SamplingMode::Exact;
    const auto r = algorithm1_run(lattice, o->T, rounds, mode, o->seed, o->trajectories);
    Output out;
    const bool submultiplicative = r.d_power <= std::pow(r.d_single, double(rounds)) + 1e-9;
    const bool reached = r.tv_to_uniform <= o->epsilon;
    out.violation = !submultiplicative || (auto_rounds && !reached);
    out.summary["rounds"] = rounds;
    out.summary["d_single"] = r.d_single;
    out.summary["d_power"] = r.d_power;
    out.summary["tv_to_uniform"] = r.tv_to_uniform;
    out.summary["submultiplicative"] = submultiplicative;
    out.summary["reached"] = reached;
    if (mode == SamplingMode::Sampled) out.summary["empirical_tv_to_exact"] = r.empirical_tv_to_exact;
    if (f == Format::Csv) {
      std::vector<std::string> tail = {"exact"};
      if (mode == SamplingMode::Sampled) tail.push_back("empirical");
      CsvTable t(coordinate_header(lattice, tail));
      for (std::size_t i = 0; i < r.distribution.size(); ++i) {
        t.row();
        coordinate_cells(t, lattice, i);
        t.cell(r.distribution[i]);
        if (mode == SamplingMode::Sampled) t.cell(r.empirical[i]);
      }
      out.text = render(t);
    } else {
      ordered_json j;
      j["dims"] = dims_json(lattice);
      j["T"] = o->T;
      j["epsilon"] = o->epsilon;
      j["mode"] = o->mode;
      for (auto& [key, value] : out.summary.items()) j[key] = value;
      j["distribution"] = r.distribution;
      if (mode == SamplingMode::Sampled) {
        j["trajectories"] = r.trajectories;
        j["empirical"] = r.empirical;
        j["empirical_tv_to_uniform"] = r.empirical_tv_to_uniform;
      }
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& lemma2_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    int n = 19;
    double T = 100.0;
    int offset = 0;
    bool grid = false;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("lemma2", "|int_0^T n(t) dt| against 32 (n ln n)^2");
  c.app->add_option("--n", o->n, "odd cycle length");
  c.app->add_option("--T", o->T, "horizon");
  c.app->add_option("--offset", o->offset, "vertex offset l");
  c.app->add_flag("--grid", o->grid, "all odd n in [5,101], l in {0,1,n/2}, T in {10,...,1e4}");
  c.default_format = "json";
  c.formats = {"csv", "json"};
  c.run = [o](Format f) {
    std::vector<TrigSumParams> jobs;
    if (o->grid) {
      for (int n = 5; n <= 101; n += 2)
        for (int l : {0, 1, n / 2})
          for (double T : {10.0, 1e2, 1e3, 1e4}) jobs.push_back({n, l, T});
    } else {
      jobs.push_back({o->n, o->offset, o->T});
    }
    std::vector<BoundReport> reports(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const auto& p = jobs[i];
      reports[i] = make_report("n=" + std::to_string(p.n) + ",l=" + std::to_string(p.offset),
                               lemma2_integral(p), lemma2_bound(p.n), BoundMethod::Analytic);
    });
    Output out;
    long violations = 0;
    for (const auto& r : reports) violations += !r.satisfied;
    out.violation = violations > 0;
    out.summary["rows"] = reports.size();
    out.summary["violations"] = violations;
    auto row_json = [&](std::size_t i) {
      return ordered_json{{"n", jobs[i].n},         {"offset", jobs[i].offset},
                          {"T", jobs[i].T},         {"lhs", reports[i].lhs},
                          {"rhs", reports[i].rhs},  {"satisfied", reports[i].satisfied},
                          {"method", to_string(reports[i].method)}};
    };
    if (f == Format::Csv) {
      CsvTable t({"n", "offset", "T", "lhs", "rhs", "satisfied"});
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        t.row().cell(jobs[i].n).cell(jobs[i].offset).cell(jobs[i].T).cell(reports[i].lhs).cell(reports[i].rhs).cell(
            reports[i].satisfied);
      }
      out.text = render(t);
    } else if (!o->grid) {
      out.text = dump_json(row_json(0));
    } else {
      ordered_json j;
      j["violations"] = violations;
      j["rows"] = ordered_json::array();
      for (std::size_t i = 0; i < jobs.size(); ++i) j["rows"].push_back(row_json(i));
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& conjecture_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::vector<int> range = {10, 100};
    std::size_t pairs = 50;
    std::uint64_t seed = 3;
    double T_max = 1e4;
    int T_points = 20;
    double dt = kMaxConjectureStep;
    std::vector<int> offsets = {0};
    bool no_halving = false;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("conjecture", "|int_0^T n1 n2 dt| against 32 n1 (n2 ln n2)^2 + 32 n2 (n1 ln n1)^2");
  c.app->add_option("--range", o->range, "lo,hi bounds on the cycle lengths")->delimiter(',')->expected(2);
  c.app->add_option("--pairs", o->pairs, "pairs sampled from the range (0: every pair, slow tier)");
  c.app->add_option("--seed", o->seed, "pair sampling seed");
  c.app->add_option("--T-max", o->T_max, "largest horizon");
  c.app->add_option("--T-points", o->T_points, "horizons T_max k / points, k = 1..points");
  c.app->add_option("--dt", o->dt, "quadrature step");
  c.app->add_option("--offsets", o->offsets, "vertex offsets, applied to both cycles")->delimiter(',');
  c.app->add_flag("--no-halving", o->no_halving, "skip the dt/2 convergence check");
  c.formats = {"csv", "json", "svg"};
  c.needs_slow = [o] { return o->pairs == 0; };
  c.run = [o](Format f) {
    if (o->range.size() != 2) throw InvalidInput("--range needs lo,hi");
    if (o->T_points < 1 || !(o->T_max > 0.0)) throw InvalidInput("need --T-max > 0 and --T-points >= 1");
    const auto all = conjecture_pairs(o->range[0], o->range[1]);
    const auto pairs = o->pairs == 0 ? all : sample_conjecture_pairs(o->range[0], o->range[1], o->pairs, o->seed);
    std::vector<double> grid;
    for (int k = 1; k <= o->T_points; ++k) grid.push_back(o->T_max * k / o->T_points);
    SweepOptions opts;
    opts.dt = o->dt;
    opts.check_halving = !o->no_halving;
    const auto rows = conjecture_sweep(pairs, grid, o->offsets, opts);

    Output out;
    long violations = 0, halving_failures = 0;
    double max_ratio = 0.0, max_halving = 0.0;
    for (const auto& r : rows) {
      violations += !r.report.satisfied;
      max_ratio = std::max(max_ratio, r.report.lhs / r.report.rhs);
      if (r.halving_change) {
        max_halving = std::max(max_halving, *r.halving_change);
        halving_failures += *r.halving_change > 1e-5;
      }
    }
    out.violation = violations > 0 || halving_failures > 0;
    out.summary["pairs_in_range"] = all.size();
    out.summary["pairs_used"] = pairs.size();
    out.summary["rows"] = rows.size();
    out.summary["violations"] = violations;
    out.summary["max_lhs_over_rhs"] = max_ratio;
    if (opts.check_halving) {
      out.summary["max_halving_change"] = max_halving;
      out.summary["halving_failures"] = halving_failures;
    }
    if (f == Format::Csv) {
      CsvTable t({"n1", "n2", "T", "lhs", "rhs", "satisfied"});
      for (const auto& r : rows) t.row().cell(r.n1).cell(r.n2).cell(r.T).cell(r.report.lhs).cell(r.report.rhs).cell(r.report.satisfied);
      out.text = render(t);
    } else if (f == Format::Svg) {
      // One point per (pair, offset) at the largest horizon.
      Series lhs{"lhs at T_max", {}, {}, "#1f77b4"};
      Series rhs{"rhs", {}, {}, "#d62728"};
      double idx = 0;
      for (const auto& r : rows) {
        if (r.T != grid.back()) continue;
        lhs.x.push_back(idx);
        lhs.y.push_back(r.report.lhs);
        rhs.x.push_back(idx);
        rhs.y.push_back(r.report.rhs);
        idx += 1;
      }
      out.text = render_svg({"conjecture sweep", "pair index", "value", true}, {lhs, rhs});
    } else {
      ordered_json j;
      for (auto& [key, value] : out.summary.items()) j[key] = value;
      j["rows"] = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json row{{"n1", r.n1},          {"n2", r.n2},          {"offset", r.offset},
                         {"T", r.T},            {"lhs", r.report.lhs}, {"rhs", r.report.rhs},
                         {"satisfied", r.report.satisfied}};
        row["halving_change"] = r.halving_change ? ordered_json(*r.halving_change) : ordered_json(nullptr);
        j["rows"].push_back(row);
      }
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& theorem3_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    int n1 = 95;
    int n2 = 93;
    bool relaxed = false;
    std::string checkpoint;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("theorem3", "case bounds of the averaged kernel at T = 1600 (n1+n2) (ln n1)^2");
  c.app->add_option("--n1", o->n1, "larger odd cycle length");
  c.app->add_option("--n2", o->n2, "smaller odd cycle length");
  c.app->add_flag("--relaxed", o->relaxed, "accept any odd coprime pair and only report");
  c.app->add_option("--checkpoint", o->checkpoint, "resumable partial sums");
  c.slow = true;
  c.default_format = "json";
  c.formats = {"csv", "json"};
  c.run = [o](Format f) {
    Theorem3Options opts;
    opts.strict = !o->relaxed;
    if (!o->checkpoint.empty()) opts.checkpoint_path = o->checkpoint;
    const auto r = theorem3_case_check(o->n1, o->n2, opts);
    Output out;
    out.violation = opts.strict && !r.all_satisfied();
    out.summary["all_satisfied"] = r.all_satisfied();
    out.summary["aggregate_l1"] = r.aggregate_l1;
    out.summary["d_pt"] = r.d_pt;
    auto case_name = [](const BoundReport& b) { return b.params.substr(b.params.rfind(',') + 1); };
    if (f == Format::Csv) {
      CsvTable t({"case", "lhs", "rhs", "satisfied"});
      for (const auto& b : r.cases) t.row().cell(case_name(b)).cell(b.lhs).cell(b.rhs).cell(b.satisfied);
      out.text = render(t);
    } else {
      ordered_json j;
      j["n1"] = r.n1;
      j["n2"] = r.n2;
      j["T"] = r.T;
      j["strict"] = opts.strict;
      j["cases"] = ordered_json::array();
      for (const auto& b : r.cases) {
        j["cases"].push_back({{"case", case_name(b)}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"satisfied", b.satisfied}});
      }
      j["aggregate_l1"] = r.aggregate_l1;
      j["d_pt"] = r.d_pt;
      j["all_satisfied"] = r.all_satisfied();
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

Command& fig1_command(CLI::App& root, std::vector<Command>& cmds) {
  struct Opts {
    std::string dims = "19,5";
    long t_max = 0;
  };
  auto o = std::make_shared<Opts>();
  auto& c = cmds.emplace_back();
  c.app = root.add_subcommand("fig1", "quantum and classical time-averaged return probabilities");
  c.app->add_option("--dims", o->dims, "two cycle lengths n1,n2");
  c.app->add_option("--t-max", o->t_max, "last integer horizon (0: n1^2 + n2^2)");
  c.formats = {"csv", "json", "svg"};
  c.run = [o](Format f) {
    const auto dims = parse_dims(o->dims);
    if (dims.size() != 2) throw InvalidInput("fig1 needs exactly two cycle lengths");
    const auto r = fig1_experiment(dims[0], dims[1], o->t_max > 0 ? std::optional<long>(o->t_max) : std::nullopt);
    Output out;
    out.summary["uniform_level"] = r.uniform_level;
    out.summary["classical_tv_at_mark"] = r.classical_tv_at_mark;
    const auto mark = static_cast<std::size_t>(r.quantum_mark);
    if (mark < r.times.size()) {
      const double q = std::abs(r.quantum_return[mark] - r.uniform_level);
      const double cl = std::abs(r.classical_return[mark] - r.uniform_level);
      out.summary["quantum_gap_at_mark"] = q;
      out.summary["classical_gap_at_mark"] = cl;
      out.violation = !(q < cl) || q > 0.1 * (1.0 - r.uniform_level);
    }
    out.violation = out.violation || r.classical_tv_at_mark > 0.1;
    if (f == Format::Csv) {
      CsvTable t({"T", "quantum_return", "classical_return", "uniform_level"});
      for (std::size_t i = 0; i < r.times.size(); ++i) {
        t.row().cell(r.times[i]).cell(r.quantum_return[i]).cell(r.classical_return[i]).cell(r.uniform_level);
      }
      out.text = render(t);
    } else if (f == Format::Svg) {
      Series q{"quantum", r.times, r.quantum_return, "#1f77b4"};
      Series cl{"classical", r.times, r.classical_return, "#ff7f0e"};
      Series u{"1/(n1 n2)", {r.times.front(), r.times.back()}, {r.uniform_level, r.uniform_level}, "#2ca02c"};
      out.text = render_svg({"return probability on Z" + std::to_string(dims[0]) + " x Z" + std::to_string(dims[1]),
                             "T", "P_T(0,0)", true},
                            {q, cl, u});
    } else {
      ordered_json j;
      j["n1"] = r.n1;
      j["n2"] = r.n2;
      j["uniform_level"] = r.uniform_level;
      j["quantum_mark"] = r.quantum_mark;
      j["classical_mark"] = r.classical_mark;
      j["classical_tv_at_mark"] = r.classical_tv_at_mark;
      for (auto& [key, value] : out.summary.items()) {
        if (!j.contains(key)) j[key] = value;
      }
      j["T"] = r.times;
      j["quantum_return"] = r.quantum_return;
      j["classical_return"] = r.classical_return;
      out.text = dump_json(j);
    }
    return out;
  };
  return c;
}

// ---------------------------------------------------------------------------

// key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput(path + ":" + std::to_string(number) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key == "config") throw InvalidInput(path + ": config files cannot include other config files");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

// Inserts --key=value from any config file right after the subcommand name,
// so that flags given on the command line (parsed later) take precedence.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string path;
  std::size_t sub = 0;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (sub == 0 && args[i].rfind("-", 0) != 0) sub = i;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || sub == 0) return args;
  std::vector<std::string> merged(args.begin(), args.begin() + static_cast<long>(sub) + 1);
  for (const auto& [key, value] : read_config(path)) merged.push_back("--" + key + "=" + value);
  merged.insert(merged.end(), args.begin() + static_cast<long>(sub) + 1, args.end());
  return merged;
}

std::string option_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  const auto& results = opt->results();
  std::string joined;
  for (std::size_t i = 0; i < results.size(); ++i) joined += (i ? "," : "") + results[i];
  return joined;
}

ordered_json resolved_config(const Command& c) {
  ordered_json cfg = ordered_json::object();
  for (const CLI::Option* opt : c.app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    cfg[names.front()] = option_value(opt);
  }
  return cfg;
}

std::vector<std::string> rerun_args(const Command& c) {
  std::vector<std::string> args = {"qwalk", c.app->get_name()};
  for (const CLI::Option* opt : c.app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help" || names.front() == "config" || names.front() == "parallel") continue;
    const std::string v = option_value(opt);
    if (opt->get_type_size() == 0) {
      if (opt->count() > 0 && opt->as<bool>()) args.push_back("--" + names.front());
      continue;
    }
    if (v.empty()) continue;
    args.push_back("--" + names.front() + "=" + v);
  }
  return args;
}

int execute(Command& c) {
  if (c.common.parallel > 0) set_worker_count(c.common.parallel);
  const bool slow = c.slow || (c.needs_slow && c.needs_slow());
  if (slow && c.common.tier != "slow") {
    std::cerr << "qwalk " << c.app->get_name() << ": slow-tier job, rerun with --tier slow\n";
    return kExitUsage;
  }
  const Format format = resolve_format(c);
  const Output result = c.run(format);
  emit(c.common.out, result.text);
  if (!c.common.out.empty()) {
    ordered_json m;
    m["schema_version"] = kManifestSchema;
    m["artifact"] = "qwalk";
    m["version"] = QWALK_VERSION;
    m["command"] = c.app->get_name();
    m["config"] = resolved_config(c);
    m["config"]["format"] = to_string(format);
    m["workers"] = worker_count();
    m["rerun"] = rerun_args(c);
    m["output"] = {{"path", std::filesystem::path(c.common.out).filename().string()}, {"format", to_string(format)}};
    m["status"] = result.violation ? "violation" : "ok";
    m["summary"] = result.summary;
    emit(c.common.out + ".manifest.json", dump_json(m));
  }
  if (result.violation) {
    std::cerr << "qwalk " << c.app->get_name() << ": bound violated, see the report\n";
    return kExitViolation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App root{"Continuous-time quantum walk mixing experiments on discrete tori", "qwalk"};
  root.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  root.require_subcommand(1);
  root.set_version_flag("--version", QWALK_VERSION);

  std::vector<Command> cmds;
  cmds.reserve(16);
  spectrum_command(root, cmds);
  kernel_command(root, cmds);
  mix_classical_command(root, cmds);
  mix_coordinate_command(root, cmds);
  mix_repeated_command(root, cmds);
  lemma2_command(root, cmds);
  conjecture_command(root, cmds);
  theorem3_command(root, cmds);
  fig1_command(root, cmds);
  for (auto& c : cmds) add_common(c);

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = merge_config(args);
  } catch (const std::exception& e) {
    std::cerr << "qwalk: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    root.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    return root.exit(e);
  } catch (const CLI::ParseError& e) {
    root.exit(e);
    return kExitUsage;
  }

  for (auto& c : cmds) {
    if (!c.app->parsed()) continue;
    try {
      return execute(c);
    } catch (const InvalidInput& e) {
      std::cerr << "qwalk " << c.app->get_name() << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
      std::cerr << "qwalk " << c.app->get_name() << ": " << e.what() << "\n";
    }
    return kExitUsage;
  }
  return kExitUsage;
}
