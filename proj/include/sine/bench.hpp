#pragma once

// Multi-seed experiment runner, result tables and the backbone-weight ablation sweep.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "sine/error.hpp"
#include "sine/format.hpp"
#include "sine/instance.hpp"
#include "sine/report_io.hpp"
#include "sine/solver.hpp"
#include "sine/stats.hpp"
#include "sine/svg.hpp"

namespace sine {

struct AlgorithmPreset {
  std::string name;
  SolverConfig config;
};

inline AlgorithmPreset sine_preset() { return {"sine", SolverConfig{}}; }

inline AlgorithmPreset classic_aco_preset() {
  SolverConfig c;
  c.mode = Mode::ClassicAco;
  return {"aco", c};
}

/// Named presets: "sine" and "aco", each with the given base parameters.
inline AlgorithmPreset preset_by_name(const std::string& name, const SolverConfig& base = {}) {
  AlgorithmPreset p{name, base};
  if (name == "sine") {
    p.config.mode = Mode::Sine;
  } else if (name == "aco") {
    p.config.mode = Mode::ClassicAco;
  } else {
    throw ConfigError("unknown algorithm '" + name + "' (expected sine or aco)");
  }
  return p;
}

enum class MetricKind { Total, MaxSingle };

inline std::string_view to_string(MetricKind m) { return m == MetricKind::Total ? "total" : "max_single"; }

struct ExperimentPlan {
  std::vector<std::string> instances;  // file paths
  std::vector<std::size_t> robot_counts{2, 4, 8};
  std::size_t repeats = 8;
  std::vector<AlgorithmPreset> algorithms{sine_preset(), classic_aco_preset()};
  std::uint64_t seed_base = 1;
  std::size_t workers = 1;

  void validate() const {
    if (instances.empty()) throw ConfigError("plan: no instances");
    if (robot_counts.empty()) throw ConfigError("plan: no robot counts");
    if (algorithms.empty()) throw ConfigError("plan: no algorithms");
    if (repeats < 2) throw ConfigError("plan: repeats must be >= 2 for a standard deviation");
  }
};

struct CellKey {
  std::string instance;
  std::size_t robots = 0;
  std::string algorithm;
  MetricKind metric = MetricKind::Total;

  auto tie() const { return std::tie(instance, robots, algorithm, metric); }
  friend bool operator<(const CellKey& a, const CellKey& b) { return a.tie() < b.tie(); }
  friend bool operator==(const CellKey& a, const CellKey& b) { return a.tie() == b.tie(); }
};

struct RunRecord {
  std::string instance;
  std::size_t robots = 0;
  std::string algorithm;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double total = 0.0;
  double max_single = 0.0;
  double j_value = 0.0;
  std::string error;
};

struct ResultSet {
  std::map<CellKey, CellStats> cells;
  std::map<CellKey, std::string> failed;  // metric cells with at least one failed run
  std::vector<RunRecord> runs;            // ordered by (instance, robots, algorithm, run)
  std::size_t solves = 0;
};

namespace detail {

inline ResultSet aggregate(std::vector<RunRecord> runs) {
  ResultSet rs;
  rs.solves = runs.size();
  std::map<CellKey, std::vector<double>> raw;
  for (const auto& r : runs) {
    for (MetricKind m : {MetricKind::Total, MetricKind::MaxSingle}) {
      CellKey key{r.instance, r.robots, r.algorithm, m};
      if (!r.ok) {
        rs.failed.emplace(key, r.error);
        continue;
      }
      raw[key].push_back(m == MetricKind::Total ? r.total : r.max_single);
    }
  }
  for (auto& [key, vals] : raw) {
    if (rs.failed.count(key)) continue;
    rs.cells.emplace(key, cell_stats(std::move(vals)));
  }
  rs.runs = std::move(runs);
  return rs;
}

}  // namespace detail

/// Runs every (instance, robots, algorithm, repeat) solve; seeds are seed_base + repeat index.
inline ResultSet run_plan(const ExperimentPlan& plan, const WarningSink& warn = warn_stderr) {
  plan.validate();
  std::vector<Instance> instances;
  std::vector<DistanceMatrix> matrices;
  for (const auto& path : plan.instances) {
    instances.push_back(load_instance(path, warn));
    matrices.push_back(build_distance_matrix(instances.back()));
  }

  struct Task {
    std::size_t inst, robots, alg, run;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t m : plan.robot_counts)
      for (std::size_t a = 0; a < plan.algorithms.size(); ++a)
        for (std::size_t r = 0; r < plan.repeats; ++r) tasks.push_back({i, m, a, r});

  std::vector<RunRecord> records(tasks.size());
  parallel_for(tasks.size(), plan.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    RunRecord& rec = records[t];
    rec.instance = instances[task.inst].name();
    rec.robots = task.robots;
    rec.algorithm = plan.algorithms[task.alg].name;
    rec.run = task.run;
    rec.seed = plan.seed_base + task.run;
    SolverConfig cfg = plan.algorithms[task.alg].config;
    cfg.master_seed = rec.seed;
    try {
      const auto rep = solve(instances[task.inst], matrices[task.inst], task.robots, cfg);
      rec.ok = true;
      rec.total = rep.objectives.total;
      rec.max_single = rep.objectives.max_single;
      rec.j_value = rep.objectives.j_value;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  return detail::aggregate(std::move(records));
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "instance,robots,algorithm,metric,mean,std,n";

/// One row per cell, ordered by key; numbers use shortest round-trip decimals.
inline std::string results_to_csv(const std::map<CellKey, CellStats>& cells) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& [k, s] : cells) {
    out << detail::csv_field(k.instance) << ',' << k.robots << ',' << detail::csv_field(k.algorithm) << ','
        << to_string(k.metric) << ',' << format_double(s.mean) << ',' << format_double(s.std) << ','
        << s.runs.size() << '\n';
  }
  return out.str();
}

inline std::string results_to_csv(const ResultSet& rs) { return results_to_csv(rs.cells); }

/// Summary rows read back from results CSV (runs are not stored there).
struct CsvRow {
  CellKey key;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

inline std::vector<CsvRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("results CSV: bad header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 7) throw ParseError("results CSV: expected 7 fields in '" + line + "'");
    CsvRow r;
    r.key.instance = f[0];
    const auto robots = parse_int<std::size_t>(f[1]);
    r.key.algorithm = f[2];
    if (f[3] == "total") {
      r.key.metric = MetricKind::Total;
    } else if (f[3] == "max_single") {
      r.key.metric = MetricKind::MaxSingle;
    } else {
      throw ParseError("results CSV: unknown metric '" + f[3] + "'");
    }
    const auto mean = parse_double(f[4]);
    const auto sd = parse_double(f[5]);
    const auto n = parse_int<std::size_t>(f[6]);
    if (!robots || !mean || !sd || !n) throw ParseError("results CSV: malformed number in '" + line + "'");
    r.key.robots = *robots;
    r.mean = *mean;
    r.std = *sd;
    r.n = *n;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string rows_to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << detail::csv_field(r.key.instance) << ',' << r.key.robots << ',' << detail::csv_field(r.key.algorithm)
        << ',' << to_string(r.key.metric) << ',' << format_double(r.mean) << ',' << format_double(r.std) << ','
        << r.n << '\n';
  }
  return out.str();
}

inline json results_to_json(const ResultSet& rs) {
  json j;
  json cells = json::array();
  for (const auto& [k, s] : rs.cells) {
    cells.push_back({{"instance", k.instance},
                     {"robots", k.robots},
                     {"algorithm", k.algorithm},
                     {"metric", std::string(to_string(k.metric))},
                     {"mean", s.mean},
                     {"std", s.std},
                     {"runs", s.runs}});
  }
  j["cells"] = std::move(cells);
  json failed = json::array();
  for (const auto& [k, msg] : rs.failed) {
    failed.push_back({{"instance", k.instance},
                      {"robots", k.robots},
                      {"algorithm", k.algorithm},
                      {"metric", std::string(to_string(k.metric))},
                      {"error", msg}});
  }
  j["failed"] = std::move(failed);
  json runs = json::array();
  for (const auto& r : rs.runs) {
    json jr{{"instance", r.instance}, {"robots", r.robots}, {"algorithm", r.algorithm},
            {"run", r.run},           {"seed", r.seed},     {"ok", r.ok}};
    if (r.ok) {
      jr["total"] = r.total;
      jr["max_single"] = r.max_single;
      jr["J"] = r.j_value;
    } else {
      jr["error"] = r.error;
    }
    runs.push_back(std::move(jr));
  }
  j["runs"] = std::move(runs);
  return j;
}

inline void emit_csv(const ResultSet& rs, const std::string& path) { write_text(path, results_to_csv(rs)); }
inline void emit_json(const ResultSet& rs, const std::string& path) { write_text(path, results_to_json(rs).dump(2) + "\n"); }

inline void emit_svg_routes(const SolveReport& report, const Instance& inst, const std::string& path) {
  for (const auto& t : report.tours) {
    for (NodeIndex v : t.order) {
      if (v >= inst.dimension()) {
        throw DomainError("report node " + std::to_string(v) + " is outside instance '" + inst.name() + "'");
      }
    }
  }
  write_text(path, render_svg_routes(report, inst));
}

// ---------------------------------------------------------------------------
// Comparison tables

/// Per (instance, robots, metric): each algorithm against the best mean, on runs paired by seed.
struct SignificanceRow {
  std::string instance;
  std::size_t robots = 0;
  MetricKind metric = MetricKind::Total;
  std::string best;
  std::map<std::string, std::optional<WilcoxonResult>> versus_best;  // nullopt: too few pairs
};

inline std::vector<SignificanceRow> significance_table(const ResultSet& rs) {
  std::map<std::tuple<std::string, std::size_t, MetricKind>, std::map<std::string, const CellStats*>> groups;
  for (const auto& [k, s] : rs.cells) groups[{k.instance, k.robots, k.metric}][k.algorithm] = &s;
  std::vector<SignificanceRow> rows;
  for (const auto& [g, algs] : groups) {
    SignificanceRow row;
    std::tie(row.instance, row.robots, row.metric) = g;
    const CellStats* best = nullptr;
    for (const auto& [name, s] : algs) {
      if (!best || s->mean < best->mean) {
        best = s;
        row.best = name;
      }
    }
    for (const auto& [name, s] : algs) {
      if (name == row.best) continue;
      if (s->runs.size() != best->runs.size() || s->runs.size() < kWilcoxonMinPairs) {
        row.versus_best[name] = std::nullopt;
      } else {
        row.versus_best[name] = wilcoxon_signed_rank(s->runs, best->runs);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Friedman table for one metric; instances are (instance, robots) pairs, optionally one robot count.
inline std::optional<RankTable> rank_table(const ResultSet& rs, MetricKind metric,
                                           std::optional<std::size_t> robots = std::nullopt) {
  std::set<std::string> algs;
  std::map<std::pair<std::string, std::size_t>, std::map<std::string, double>> means;
  for (const auto& [k, s] : rs.cells) {
    if (k.metric != metric || (robots && k.robots != *robots)) continue;
    algs.insert(k.algorithm);
    means[{k.instance, k.robots}][k.algorithm] = s.mean;
  }
  for (const auto& [k, msg] : rs.failed) {
    if (k.metric != metric || (robots && k.robots != *robots)) continue;
    algs.insert(k.algorithm);
    means[{k.instance, k.robots}];
  }
  MetricTable t;
  t.algorithms.assign(algs.begin(), algs.end());
  for (const auto& [inst, vals] : means) {
    t.instances.push_back(inst.first + "/m" + std::to_string(inst.second));
    std::vector<std::optional<double>> row;
    for (const auto& a : t.algorithms) {
      const auto it = vals.find(a);
      row.push_back(it == vals.end() ? std::nullopt : std::optional<double>(it->second));
    }
    t.values.push_back(std::move(row));
  }
  if (t.algorithms.size() < 2 || t.instances.size() < 2) return std::nullopt;
  try {
    return friedman_mean_ranks(t);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline std::string verdict_mark(const std::optional<WilcoxonResult>& w) {
  if (!w) return "n/a";
  switch (w->verdict) {
    case Verdict::Better: return "▲";
    case Verdict::Worse: return "▼";
    case Verdict::Equal: return "◆";
  }
  return "◆";
}

/// Markdown summary: mean ± std with significance marks, then Friedman mean ranks.
inline std::string summary_markdown(const ResultSet& rs, const std::vector<std::size_t>& robot_counts) {
  std::ostringstream out;
  out << "# Benchmark summary\n\n";
  for (MetricKind metric : {MetricKind::Total, MetricKind::MaxSingle}) {
    out << "## " << (metric == MetricKind::Total ? "Total path length" : "Maximum single-robot length")
        << " (mean ± std)\n\n";
    out << "| instance | robots | algorithm | mean | std | n | vs best | p |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : significance_table(rs)) {
      if (row.metric != metric) continue;
      for (const auto& [k, s] : rs.cells) {
        if (k.metric != metric || k.instance != row.instance || k.robots != row.robots) continue;
        std::string mark = "best";
        std::string p = "";
        if (k.algorithm != row.best) {
          const auto& w = row.versus_best.at(k.algorithm);
          mark = verdict_mark(w);
          if (w) p = format_double(w->p_value);
        }
        out << "| " << k.instance << " | " << k.robots << " | " << k.algorithm << " | " << format_double(s.mean)
            << " | " << format_double(s.std) << " | " << s.runs.size() << " | " << mark << " | " << p << " |\n";
      }
    }
    out << "\n";
  }
  for (MetricKind metric : {MetricKind::Total, MetricKind::MaxSingle}) {
    out << "## Friedman mean ranks, " << to_string(metric) << " (lower is better)\n\n";
    std::vector<std::pair<std::string, std::optional<RankTable>>> blocks;
    for (std::size_t m : robot_counts) blocks.emplace_back(std::to_string(m) + " robots", rank_table(rs, metric, m));
    blocks.emplace_back("overall", rank_table(rs, metric));
    for (const auto& [label, table] : blocks) {
      if (!table) {
        out << "- " << label << ": not enough instances or algorithms to rank\n";
        continue;
      }
      out << "- " << label << ":";
      for (std::size_t a = 0; a < table->algorithms.size(); ++a) {
        out << ' ' << table->algorithms[a] << '=' << format_double(std::round(table->mean_rank[a] * 100.0) / 100.0);
      }
      if (!table->excluded.empty()) out << " (excluded " << table->excluded.size() << " with missing cells)";
      out << "\n";
    }
    out << "\n";
  }
  out << "Significance: two-sided Wilcoxon signed-rank, alpha = 0.05, each algorithm against the best mean in its "
         "row (▲ better, ▼ worse, ◆ equal; n/a when fewer than 5 paired runs).\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Ablation over the backbone bias weight

inline const std::vector<double>& default_ablation_weights() {
  static const std::vector<double> w{0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  return w;
}

/// A sweep weight w sets omega = 1 + w, so w = 0 switches the transition bias off.
inline double omega_for_weight(double w) { return 1.0 + w; }

struct AblationRow {
  double weight = 0.0;
  std::size_t robots = 0;
  CellStats total;
  CellStats max_single;
};

inline std::vector<AblationRow> ablation_sweep(const Instance& inst, const std::vector<std::size_t>& robot_counts,
                                               const std::vector<double>& weights, std::size_t repeats,
                                               const SolverConfig& base, std::uint64_t seed_base = 1,
                                               std::size_t workers = 1) {
  if (weights.empty()) throw ConfigError("ablation: no weights");
  if (robot_counts.empty()) throw ConfigError("ablation: no robot counts");
  if (repeats < 1) throw ConfigError("ablation: repeats must be >= 1");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("ablation: weights must be >= 0");
  }
  const DistanceMatrix d = build_distance_matrix(inst);
  const std::size_t cells = weights.size() * robot_counts.size();
  std::vector<SolveReport> reports(cells * repeats);
  parallel_for(reports.size(), workers, [&](std::size_t t) {
    const std::size_t cell = t / repeats;
    const std::size_t run = t % repeats;
    SolverConfig cfg = base;
    cfg.mode = Mode::Sine;
    cfg.omega = omega_for_weight(weights[cell / robot_counts.size()]);
    cfg.master_seed = seed_base + run;
    reports[t] = solve(inst, d, robot_counts[cell % robot_counts.size()], cfg);
  });
  std::vector<AblationRow> rows;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    AblationRow row;
    row.weight = weights[cell / robot_counts.size()];
    row.robots = robot_counts[cell % robot_counts.size()];
    std::vector<double> tot;
    std::vector<double> mx;
    for (std::size_t run = 0; run < repeats; ++run) {
      tot.push_back(reports[cell * repeats + run].objectives.total);
      mx.push_back(reports[cell * repeats + run].objectives.max_single);
    }
    row.total = cell_stats(std::move(tot));
    row.max_single = cell_stats(std::move(mx));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "weight,robots,total_mean,total_std,max_mean,max_std,n\n";
  for (const auto& r : rows) {
    out << format_double(r.weight) << ',' << r.robots << ',' << format_double(r.total.mean) << ','
        << format_double(r.total.std) << ',' << format_double(r.max_single.mean) << ','
        << format_double(r.max_single.std) << ',' << r.total.runs.size() << '\n';
  }
  return out.str();
}

}  // namespace sine
