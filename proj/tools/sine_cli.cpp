// Command-line front end: solve, bench, ablate, plot.
//
// Exit codes: 0 ok, 1 I/O failure, 2 usage error, 3 input parse error, 4 solver domain error.

#include <glob.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sine/sine.hpp"

namespace {

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kParse = 3, kDomain = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t resolve_workers(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SINE_WORKERS")) {
    if (const auto v = sine::parse_int<std::size_t>(env); v && *v > 0) return *v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Flags shared by every subcommand that runs the solver.
struct SolverFlags {
  std::string mode = "sine";
  std::size_t iters = 1000;
  std::size_t ants = 50;
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 1.0;
  double rho = 0.1;
  double q = 1.0;
  double kappa = 1.0;
  double omega = 2.0;
  double lambda = 0.5;
  double mu = 0.0;
  double tau0 = 1.0;
  std::string partition = "angle";
  std::string matching = "greedy";
  bool repartition = false;
  bool no_seed = false;
  std::size_t stagnation = 0;

  void attach(CLI::App* app, bool with_mode) {
    if (with_mode) app->add_option("--mode", mode, "sine or aco")->check(CLI::IsMember({"sine", "aco"}));
    app->add_option("--iters", iters, "iterations per solve");
    app->add_option("--ants", ants, "colony size per robot subset");
    app->add_option("--alpha", alpha, "pheromone exponent");
    app->add_option("--beta", beta, "visibility exponent");
    app->add_option("--gamma", gamma, "backbone bias exponent");
    app->add_option("--rho", rho, "evaporation rate in (0,1]");
    app->add_option("--q", q, "deposit scale Q");
    app->add_option("--kappa", kappa, "extra deposit share on backbone edges");
    app->add_option("--omega", omega, "backbone bias magnitude (>= 1)");
    app->add_option("--lambda", lambda, "weight of total vs max length in J");
    app->add_option("--mu", mu, "overlap penalty");
    app->add_option("--tau0", tau0, "initial pheromone");
    app->add_option("--partition", partition, "angle, kmeans or blocks")
        ->check(CLI::IsMember({"angle", "kmeans", "blocks"}));
    app->add_option("--matching", matching, "greedy or exact (exact for <= 12 odd vertices)")
        ->check(CLI::IsMember({"greedy", "exact"}));
    app->add_flag("--repartition", repartition, "recompute the partition every iteration");
    app->add_flag("--no-seed", no_seed, "skip the MST-matching seed tour");
    app->add_option("--stagnation", stagnation, "stop after this many iterations without improvement (0 = off)");
  }

  sine::SolverConfig config() const {
    sine::SolverConfig c;
    c.mode = mode == "aco" ? sine::Mode::ClassicAco : sine::Mode::Sine;
    c.aco.max_iter = iters;
    c.aco.n_ants = ants;
    c.aco.alpha = alpha;
    c.aco.beta = beta;
    c.aco.gamma = gamma;
    c.aco.rho = rho;
    c.aco.q_scale = q;
    c.aco.kappa = kappa;
    c.aco.tau0 = tau0;
    c.omega = omega;
    c.lambda = lambda;
    c.mu = mu;
    c.partition = partition == "kmeans"   ? sine::PartitionMethod::KMeansLike
                  : partition == "blocks" ? sine::PartitionMethod::ContiguousBlocks
                                          : sine::PartitionMethod::AngleSweep;
    c.matching = matching == "exact" ? sine::MatchingMethod::ExactSmall : sine::MatchingMethod::Greedy;
    c.repartition_each_iter = repartition;
    c.seed_with_christofides = !no_seed;
    c.stagnation_window = stagnation;
    try {
      c.validate();
    } catch (const sine::ConfigError& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::set<std::string> out;
  for (const auto& pat : patterns) {
    glob_t g{};
    if (::glob(pat.c_str(), 0, nullptr, &g) == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.insert(g.gl_pathv[i]);
    }
    ::globfree(&g);
  }
  return {out.begin(), out.end()};
}

void print_objectives(const sine::SolveReport& r) {
  std::cout << "total " << sine::format_double(r.objectives.total) << '\n'
            << "max_single " << sine::format_double(r.objectives.max_single) << '\n'
            << "J " << sine::format_double(r.objectives.j_value) << '\n'
            << "wall_time " << r.wall_time << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot path planning with a spanning-tree-biased ant colony"};
  app.require_subcommand(1);
  std::size_t workers = 0;
  app.add_option("--workers", workers, "worker threads (default: SINE_WORKERS or all cores)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance and write a JSON report");
  std::string solve_instance;
  std::size_t solve_robots = 1;
  std::uint64_t solve_seed = 1;
  std::string solve_out = "report.json";
  std::string solve_svg;
  std::vector<std::size_t> solve_depots;
  SolverFlags solve_flags;
  solve_cmd->add_option("instance", solve_instance, "TSPLIB (.tsp) or geo CSV (.csv) file")->required();
  solve_cmd->add_option("--robots,-m", solve_robots, "robot count");
  solve_cmd->add_option("--seed", solve_seed, "master seed");
  solve_cmd->add_option("--out", solve_out, "report JSON path");
  solve_cmd->add_option("--svg", solve_svg, "optional route SVG path");
  solve_cmd->add_option("--depots", solve_depots, "1-based depot node per robot")->delimiter(',');
  solve_cmd->add_option("--workers", workers, "worker threads");
  solve_flags.attach(solve_cmd, true);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "multi-seed comparison over instances and robot counts");
  std::vector<std::string> bench_globs;
  std::vector<std::size_t> bench_robots{2, 4, 8};
  std::size_t bench_repeats = 8;
  std::vector<std::string> bench_algs{"sine", "aco"};
  std::string bench_out = "bench-out";
  std::uint64_t bench_seed_base = 1;
  SolverFlags bench_flags;
  bench_cmd->add_option("--instances", bench_globs, "instance files or glob patterns")->required()->delimiter(',');
  bench_cmd->add_option("--robots", bench_robots, "robot counts, comma separated")->delimiter(',');
  bench_cmd->add_option("--repeats", bench_repeats, "seeds per cell (>= 2)");
  bench_cmd->add_option("--algorithms", bench_algs, "sine, aco")->delimiter(',');
  bench_cmd->add_option("--out-dir", bench_out, "output directory");
  bench_cmd->add_option("--seed-base", bench_seed_base, "seed of the first repeat");
  bench_cmd->add_option("--workers", workers, "worker threads");
  bench_flags.attach(bench_cmd, false);

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "sweep the backbone bias weight");
  std::string ablate_instance;
  std::vector<std::size_t> ablate_robots{2};
  std::vector<double> ablate_weights = sine::default_ablation_weights();
  std::size_t ablate_repeats = 8;
  std::uint64_t ablate_seed_base = 1;
  std::string ablate_out;
  SolverFlags ablate_flags;
  ablate_cmd->add_option("instance", ablate_instance, "instance file")->required();
  ablate_cmd->add_option("--robots", ablate_robots, "robot counts")->delimiter(',');
  ablate_cmd->add_option("--weights", ablate_weights, "bias weights (omega = 1 + weight)")->delimiter(',');
  ablate_cmd->add_option("--repeats", ablate_repeats, "seeds per row");
  ablate_cmd->add_option("--seed-base", ablate_seed_base, "seed of the first repeat");
  ablate_cmd->add_option("--out", ablate_out, "CSV path (default: stdout)");
  ablate_cmd->add_option("--workers", workers, "worker threads");
  ablate_flags.attach(ablate_cmd, false);

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "render a report's routes as SVG");
  std::string plot_report;
  std::string plot_instance;
  std::string plot_out = "routes.svg";
  plot_cmd->add_option("report", plot_report, "report JSON")->required();
  plot_cmd->add_option("instance", plot_instance, "instance file the report was solved on")->required();
  plot_cmd->add_option("--out", plot_out, "SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const std::size_t threads = resolve_workers(workers);
    if (*solve_cmd) {
      sine::SolverConfig cfg = solve_flags.config();
      cfg.master_seed = solve_seed;
      for (std::size_t dpt : solve_depots) {
        if (dpt == 0) throw UsageError("--depots takes 1-based node ids");
        cfg.depots.push_back(dpt - 1);
      }
      const auto inst = sine::load_instance(solve_instance);
      const auto report = sine::solve(inst, solve_robots, cfg, {threads});
      sine::write_text(solve_out, sine::to_json(report).dump(2) + "\n");
      if (!solve_svg.empty()) sine::emit_svg_routes(report, inst, solve_svg);
      print_objectives(report);
    } else if (*bench_cmd) {
      const auto files = expand_globs(bench_globs);
      if (files.empty()) throw UsageError("no instance files match --instances");
      sine::ExperimentPlan plan;
      plan.instances = files;
      plan.robot_counts = bench_robots;
      plan.repeats = bench_repeats;
      plan.seed_base = bench_seed_base;
      plan.workers = threads;
      plan.algorithms.clear();
      const auto base = bench_flags.config();
      for (const auto& name : bench_algs) {
        try {
          plan.algorithms.push_back(sine::preset_by_name(name, base));
        } catch (const sine::ConfigError& e) {
          throw UsageError(e.what());
        }
      }
      try {
        plan.validate();
      } catch (const sine::ConfigError& e) {
        throw UsageError(e.what());
      }
      const auto rs = sine::run_plan(plan);
      std::filesystem::create_directories(bench_out);
      const std::string dir = bench_out + "/";
      sine::emit_csv(rs, dir + "results.csv");
      sine::emit_json(rs, dir + "results.json");
      sine::write_text(dir + "summary.md", sine::summary_markdown(rs, plan.robot_counts));
      std::cout << rs.solves << " solves, " << rs.failed.size() / 2 << " failed cells; wrote " << dir
                << "{results.csv,results.json,summary.md}\n";
      for (const auto& [k, msg] : rs.failed) {
        if (k.metric == sine::MetricKind::Total) {
          std::cerr << "failed: " << k.instance << " robots=" << k.robots << " " << k.algorithm << ": " << msg << '\n';
        }
      }
    } else if (*ablate_cmd) {
      const auto base = ablate_flags.config();
      const auto inst = sine::load_instance(ablate_instance);
      const auto rows = sine::ablation_sweep(inst, ablate_robots, ablate_weights, ablate_repeats, base,
                                             ablate_seed_base, threads);
      const auto csv = sine::ablation_to_csv(rows);
      if (ablate_out.empty()) {
        std::cout << csv;
      } else {
        sine::write_text(ablate_out, csv);
        std::cout << rows.size() << " rows written to " << ablate_out << '\n';
      }
    } else if (*plot_cmd) {
      const auto report = sine::load_report(plot_report);
      const auto inst = sine::load_instance(plot_instance);
      sine::emit_svg_routes(report, inst, plot_out);
      std::cout << "wrote " << plot_out << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const sine::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const sine::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const sine::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const sine::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
