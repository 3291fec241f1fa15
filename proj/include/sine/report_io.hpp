#pragma once

// JSON form of solver configurations and reports.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sine/error.hpp"
#include "sine/solver.hpp"

namespace sine {

using json = nlohmann::ordered_json;

inline json to_json(const SolverConfig& c) {
  json j;
  j["mode"] = std::string(to_string(c.mode));
  j["alpha"] = c.aco.alpha;
  j["beta"] = c.aco.beta;
  j["gamma"] = c.aco.gamma;
  j["rho"] = c.aco.rho;
  j["q"] = c.aco.q_scale;
  j["kappa"] = c.aco.kappa;
  j["tau0"] = c.aco.tau0;
  j["ants"] = c.aco.n_ants;
  j["iterations"] = c.aco.max_iter;
  j["omega"] = c.omega;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["partition"] = std::string(to_string(c.partition));
  j["repartition_each_iter"] = c.repartition_each_iter;
  j["seed_with_christofides"] = c.seed_with_christofides;
  j["matching"] = c.matching == MatchingMethod::Greedy ? "greedy" : "exact_small";
  j["seed_method"] = c.seed_method == SeedMethod::Christofides ? "christofides" : "dfs_preorder";
  j["per_subset_backbone"] = c.per_subset_backbone;
  j["stagnation_window"] = c.stagnation_window;
  j["master_seed"] = c.master_seed;
  j["depots"] = c.depots;
  return j;
}

inline json to_json(const Objectives& o) {
  json j;
  j["per_robot"] = o.per_robot;
  j["total"] = o.total;
  j["max_single"] = o.max_single;
  j["lambda"] = o.lambda;
  j["J"] = o.j_value;
  j["overlap_total"] = o.overlap_total;
  j["mu"] = o.mu;
  j["J_prime"] = o.j_prime;
  return j;
}

/// Timing is the only nondeterministic field; leave it out to compare runs byte for byte.
inline json to_json(const SolveReport& r, bool include_timing = true) {
  json j;
  j["instance"] = r.instance_name;
  j["seed"] = r.seed;
  j["iterations_run"] = r.iterations_run;
  if (include_timing) j["wall_time"] = r.wall_time;
  json tours = json::array();
  for (const auto& t : r.tours) tours.push_back({{"order", t.order}, {"length", t.length}});
  j["tours"] = std::move(tours);
  j["objectives"] = to_json(r.objectives);
  j["convergence"] = r.convergence;
  j["config"] = to_json(r.config);
  return j;
}

inline SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "sine" && mode != "aco") throw ParseError("report JSON: unknown mode '" + mode + "'");
  c.mode = mode == "sine" ? Mode::Sine : Mode::ClassicAco;
  c.aco.alpha = j.at("alpha").get<double>();
  c.aco.beta = j.at("beta").get<double>();
  c.aco.gamma = j.at("gamma").get<double>();
  c.aco.rho = j.at("rho").get<double>();
  c.aco.q_scale = j.at("q").get<double>();
  c.aco.kappa = j.at("kappa").get<double>();
  c.aco.tau0 = j.at("tau0").get<double>();
  c.aco.n_ants = j.at("ants").get<std::size_t>();
  c.aco.max_iter = j.at("iterations").get<std::size_t>();
  c.omega = j.at("omega").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.mu = j.at("mu").get<double>();
  const auto part = j.at("partition").get<std::string>();
  bool known = false;
  for (auto m : {PartitionMethod::AngleSweep, PartitionMethod::KMeansLike, PartitionMethod::ContiguousBlocks}) {
    if (to_string(m) == part) {
      c.partition = m;
      known = true;
    }
  }
  if (!known) throw ParseError("report JSON: unknown partition '" + part + "'");
  c.repartition_each_iter = j.at("repartition_each_iter").get<bool>();
  c.seed_with_christofides = j.at("seed_with_christofides").get<bool>();
  c.matching = j.at("matching").get<std::string>() == "greedy" ? MatchingMethod::Greedy : MatchingMethod::ExactSmall;
  c.seed_method =
      j.at("seed_method").get<std::string>() == "christofides" ? SeedMethod::Christofides : SeedMethod::DfsPreorder;
  c.per_subset_backbone = j.at("per_subset_backbone").get<bool>();
  c.stagnation_window = j.at("stagnation_window").get<std::size_t>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.depots = j.at("depots").get<std::vector<NodeIndex>>();
  return c;
}

/// Reads back the parts of a report needed to redraw or re-evaluate it.
inline SolveReport report_from_json(const json& j) {
  try {
    SolveReport r;
    r.instance_name = j.value("instance", "");
    r.seed = j.value("seed", std::uint64_t{0});
    r.iterations_run = j.value("iterations_run", std::size_t{0});
    r.wall_time = j.value("wall_time", 0.0);
    for (const auto& t : j.at("tours")) {
      r.tours.push_back(Tour{t.at("order").get<std::vector<NodeIndex>>(), t.at("length").get<double>()});
    }
    if (j.contains("convergence")) r.convergence = j.at("convergence").get<std::vector<double>>();
    if (j.contains("objectives")) {
      const auto& o = j.at("objectives");
      r.objectives.per_robot = o.at("per_robot").get<std::vector<double>>();
      r.objectives.total = o.at("total").get<double>();
      r.objectives.max_single = o.at("max_single").get<double>();
      r.objectives.lambda = o.at("lambda").get<double>();
      r.objectives.j_value = o.at("J").get<double>();
      r.objectives.overlap_total = o.at("overlap_total").get<std::size_t>();
      r.objectives.mu = o.at("mu").get<double>();
      r.objectives.j_prime = o.at("J_prime").get<double>();
    }
    if (j.contains("config")) r.config = config_from_json(j.at("config"));
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

inline SolveReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open report '" + path + "'");
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace sine
