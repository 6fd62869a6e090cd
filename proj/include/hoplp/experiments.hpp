#ifndef HOPLP_EXPERIMENTS_HPP
#define HOPLP_EXPERIMENTS_HPP

#include <filesystem>
#include <random>

#include "edge_selection.hpp"
#include "generators.hpp"
#include "model_io.hpp"
#include "report.hpp"

// Seeded experiment batteries. Outputs are byte-stable for a fixed config:
// per-instance CSV rows plus an aggregate JSON summary, no timestamps.

namespace hoplp {

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback)
{
  if (auto it = j.find(key); it != j.end()) return it->get<T>();
  return fallback;
}

// Certified-optimal claims are re-checked against enumeration while the
// instance is small enough; a failure here would be a solver defect.
inline void verify_certificate(const energy_model& m, const solve_result& res)
{
  if (!res.certificate || m.n > brute_force_marginal_max_vars) return;
  const double exact = brute_force_map(m).energy;
  if (std::abs(res.bound - exact) > 1e-6)
    throw std::logic_error("certificate failed re-verification against enumeration");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Hamming-ball exclusion on random trees: how often does unary consistency
// find the constrained optimum, and how does the gap grow with coupling
// strength. Edge consistency over the tree is exact throughout.

struct hamming_cell {
  int k = 0;
  double lambda = 0.0;
  int instances = 0;
  int tree_certified = 0;
  int empty_integral = 0;
  double mean_gap_empty = 0.0;  // MAP energy minus the unary-consistency bound
};

struct hamming_results {
  std::string instances_csv;
  std::vector<hamming_cell> cells;
  nlohmann::json summary;
};

struct hamming_config {
  int n = 10;
  int seeds = 100;
  std::vector<int> k_values{1, 2, 3};
  std::vector<double> lambda_values{0.25, 0.5, 1.0, 1.5, 2.0};
  solve_config solve;

  static hamming_config from_json(const nlohmann::json& j)
  {
    hamming_config c;
    c.n = detail::get_or(j, "n", c.n);
    c.seeds = detail::get_or(j, "seeds", c.seeds);
    c.k_values = detail::get_or(j, "k_values", c.k_values);
    c.lambda_values = detail::get_or(j, "lambda_values", c.lambda_values);
    c.solve.max_sweeps = detail::get_or(j, "max_sweeps", c.solve.max_sweeps);
    return c;
  }
};

inline hamming_results run_hamming_experiment(const hamming_config& cfg)
{
  hamming_results out;
  out.instances_csv =
      "k,lambda,seed,map_energy,bound_tree,certified_tree,bound_empty,decoded_empty,integral_empty,gap_empty\n";
  for (int k : cfg.k_values) {
    for (double lambda : cfg.lambda_values) {
      hamming_cell cell;
      cell.k = k;
      cell.lambda = lambda;
      for (int seed = 0; seed < cfg.seeds; ++seed) {
        const energy_model m = gen_hamming_tree(cfg.n, lambda, k, (std::uint64_t)seed);
        const double map_energy = brute_force_map(m).energy;
        const solve_result tree = solve(m, full_edge_set(m), cfg.solve);
        detail::verify_certificate(m, tree);
        const solve_result empty = solve(m, empty_edge_set(m), cfg.solve);
        detail::verify_certificate(m, empty);
        const bool integral = empty.certificate;
        cell.instances += 1;
        cell.tree_certified += tree.certificate ? 1 : 0;
        cell.empty_integral += integral ? 1 : 0;
        cell.mean_gap_empty += map_energy - empty.bound;
        out.instances_csv += std::to_string(k) + "," + format_double(lambda) + "," + std::to_string(seed) +
                             "," + format_double(map_energy) + "," + format_double(tree.bound) + "," +
                             std::to_string((int)tree.certificate) + "," + format_double(empty.bound) + "," +
                             format_double(empty.decoded_energy) + "," + std::to_string((int)integral) + "," +
                             format_double(map_energy - empty.bound) + "\n";
      }
      if (cell.instances > 0) cell.mean_gap_empty /= cell.instances;
      out.cells.push_back(cell);
    }
  }
  auto& cells = out.summary["cells"] = nlohmann::json::array();
  for (const auto& c : out.cells)
    cells.push_back({{"k", c.k},
                     {"lambda", c.lambda},
                     {"instances", c.instances},
                     {"tree_certified_pct", 100.0 * c.tree_certified / std::max(1, c.instances)},
                     {"empty_integral_pct", 100.0 * c.empty_integral / std::max(1, c.instances)},
                     {"mean_gap_empty", c.mean_gap_empty}});
  return out;
}

// ---------------------------------------------------------------------------
// Edge-selection comparison: grow S from the spanning tree one edge at a time
// under WCA, the spanning-weight heuristic, and two seeded random orders, and
// record the converged bound after every addition.

struct edgesel_run {
  std::string criterion;
  std::vector<double> bounds;  // bounds[j] = converged bound after j additions
  std::vector<int> edges;      // edge added at step j (aligned with bounds[1:])
  int additions_to_certificate = -1;  // -1 when never certified
  int addable_budget = 0;             // edges outside the initial tree
};

struct edgesel_instance {
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::vector<edgesel_run> runs;
};

struct edgesel_results {
  std::vector<edgesel_instance> instances;
  std::string curves_csv;
  nlohmann::json summary;
};

struct edgesel_config {
  int rows = 4, cols = 4;
  int instances = 20;
  std::uint64_t seed_base = 1;
  int tw_max = 6;
  std::uint64_t random_seed_a = 101, random_seed_b = 202;
  double wca_eps = default_wca_eps;
  int max_additions = 64;
  solve_config solve;

  static edgesel_config from_json(const nlohmann::json& j)
  {
    edgesel_config c;
    c.rows = detail::get_or(j, "rows", c.rows);
    c.cols = detail::get_or(j, "cols", c.cols);
    c.instances = detail::get_or(j, "instances", c.instances);
    c.seed_base = detail::get_or(j, "seed_base", c.seed_base);
    c.tw_max = detail::get_or(j, "tw_max", c.tw_max);
    c.max_additions = detail::get_or(j, "max_additions", c.max_additions);
    return c;
  }
};

namespace detail {

// Shared sequential-addition driver; `next_edge` returns the model edge to
// add (or -1 to stop) given the current set and the converged result.
template <typename NextEdge>
edgesel_run run_addition_sequence(const energy_model& m, const std::string& criterion,
                                  const edgesel_config& cfg, NextEdge&& next_edge)
{
  edgesel_run run;
  run.criterion = criterion;
  edge_set s = initial_tree(m);
  run.addable_budget = (int)(m.edges.size() - s.members.size());
  solve_result res = solve(m, s, cfg.solve);
  verify_certificate(m, res);
  run.bounds.push_back(res.bound);
  if (res.certificate) run.additions_to_certificate = 0;
  for (int j = 1; j <= cfg.max_additions && !res.certificate; ++j) {
    const int e = next_edge(s, res);
    if (e < 0) break;
    std::vector<int> grown = s.members;
    grown.push_back(e);
    edge_set s_next = build_edge_set(m, grown);
    dual_state warm = migrate_state(m, s, s_next, res.state);
    s = std::move(s_next);
    res = solve(m, s, cfg.solve, std::move(warm));
    verify_certificate(m, res);
    run.bounds.push_back(res.bound);
    run.edges.push_back(e);
    if (res.certificate && run.additions_to_certificate < 0) run.additions_to_certificate = j;
  }
  return run;
}

inline int next_admissible(const energy_model& m, const edge_set& s, const std::vector<int>& order,
                           int tw_max)
{
  for (int e : order) {
    if (s.contains(e)) continue;
    if (admissible_under_budget(m, s.members, e, tw_max)) return e;
  }
  return -1;
}

} // namespace detail

inline edgesel_results run_edgesel_experiment(const edgesel_config& cfg)
{
  edgesel_results out;
  out.curves_csv = "instance,criterion,additions,edge_added,bound,certified\n";
  for (int inst = 0; inst < cfg.instances; ++inst) {
    const auto [m, lambda] = gen_avgcut_grid_autotune(cfg.rows, cfg.cols, cfg.seed_base + (std::uint64_t)inst);
    edgesel_instance record;
    record.seed = cfg.seed_base + (std::uint64_t)inst;
    record.lambda = lambda;

    selection_config sel;
    sel.batch_size = 1;
    sel.tw_max = cfg.tw_max;
    sel.wca_eps = cfg.wca_eps;
    sel.solve = cfg.solve;
    record.runs.push_back(detail::run_addition_sequence(
        m, "wca", cfg, [&](const edge_set& s, const solve_result& res) {
          auto [grown, round] = select_and_add(m, s, res, sel);
          return round.added.empty() ? -1 : round.added.front().edge;
        }));

    std::vector<int> weight_order(m.edges.size());
    std::iota(weight_order.begin(), weight_order.end(), 0);
    std::sort(weight_order.begin(), weight_order.end(), [&](int a, int b) {
      const double wa = spanning_weight(m.edges[a]), wb = spanning_weight(m.edges[b]);
      if (wa != wb) return wa > wb;
      return std::make_pair(m.edges[a].i, m.edges[a].j) < std::make_pair(m.edges[b].i, m.edges[b].j);
    });
    record.runs.push_back(detail::run_addition_sequence(
        m, "weight", cfg, [&](const edge_set& s, const solve_result&) {
          return detail::next_admissible(m, s, weight_order, cfg.tw_max);
        }));

    for (auto [name, rseed] : {std::pair<const char*, std::uint64_t>{"random_a", cfg.random_seed_a},
                               std::pair<const char*, std::uint64_t>{"random_b", cfg.random_seed_b}}) {
      std::vector<int> order(m.edges.size());
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 rng(rseed + (std::uint64_t)inst * 7919);
      std::shuffle(order.begin(), order.end(), rng);
      record.runs.push_back(detail::run_addition_sequence(
          m, name, cfg, [&](const edge_set& s, const solve_result&) {
            return detail::next_admissible(m, s, order, cfg.tw_max);
          }));
    }

    for (const auto& run : record.runs)
      for (std::size_t j = 0; j < run.bounds.size(); ++j)
        out.curves_csv += std::to_string(inst) + "," + run.criterion + "," + std::to_string(j) + "," +
                          (j == 0 ? std::string("") : std::to_string(run.edges[j - 1])) + "," +
                          format_double(run.bounds[j]) + "," +
                          std::to_string(j + 1 == run.bounds.size() && run.additions_to_certificate >= 0 &&
                                                 (int)j >= run.additions_to_certificate
                                             ? 1
                                             : 0) +
                          "\n";
    out.instances.push_back(std::move(record));
  }

  // Mean bound after j additions (carry the last bound forward) and mean
  // additions to certificate, per criterion.
  nlohmann::json summary;
  std::size_t max_len = 1;
  for (const auto& inst : out.instances)
    for (const auto& run : inst.runs) max_len = std::max(max_len, run.bounds.size());
  for (const char* crit : {"wca", "weight", "random_a", "random_b"}) {
    std::vector<double> mean(max_len, 0.0);
    double mean_adds = 0.0;
    int count = 0;
    for (const auto& inst : out.instances)
      for (const auto& run : inst.runs) {
        if (run.criterion != crit) continue;
        ++count;
        for (std::size_t j = 0; j < max_len; ++j)
          mean[j] += run.bounds[std::min(j, run.bounds.size() - 1)];
        // runs that stop without a certificate count at the full budget
        mean_adds += run.additions_to_certificate >= 0 ? run.additions_to_certificate
                                                       : (double)run.addable_budget;
      }
    for (auto& v : mean) v /= std::max(1, count);
    summary[crit] = {{"mean_bound_after", mean}, {"mean_additions_to_certificate", mean_adds / std::max(1, count)}};
  }
  out.summary = std::move(summary);
  return out;
}

// ---------------------------------------------------------------------------
// Average-cut grid run: tighten_loop on one seeded grid, reporting the
// selection trace and the final solve.

struct avgcut_grid_config {
  int rows = 7, cols = 7;
  std::uint64_t seed = 1;
  double lambda = 0.0;  // <= 0 requests auto-tuning (needs rows*cols <= 25)
  selection_config selection;

  static avgcut_grid_config from_json(const nlohmann::json& j)
  {
    avgcut_grid_config c;
    c.rows = detail::get_or(j, "rows", c.rows);
    c.cols = detail::get_or(j, "cols", c.cols);
    c.seed = detail::get_or(j, "seed", c.seed);
    c.lambda = detail::get_or(j, "lambda", c.lambda);
    c.selection.batch_size = detail::get_or(j, "batch", c.selection.batch_size);
    c.selection.tw_max = detail::get_or(j, "tw_max", c.selection.tw_max);
    c.selection.max_rounds = detail::get_or(j, "max_rounds", c.selection.max_rounds);
    c.selection.solve.max_sweeps = detail::get_or(j, "max_sweeps", c.selection.solve.max_sweeps);
    return c;
  }
};

struct avgcut_grid_results {
  energy_model model;
  double lambda = 0.0;
  tighten_result tightened;
};

inline avgcut_grid_results run_avgcut_grid_experiment(const avgcut_grid_config& cfg)
{
  avgcut_grid_results out;
  if (cfg.lambda > 0) {
    out.model = gen_avgcut_grid(cfg.rows, cfg.cols, cfg.seed, cfg.lambda);
    out.lambda = cfg.lambda;
  } else {
    auto [m, lambda] = gen_avgcut_grid_autotune(cfg.rows, cfg.cols, cfg.seed);
    out.model = std::move(m);
    out.lambda = lambda;
  }
  out.tightened = tighten_loop(out.model, cfg.selection);
  if (out.model.n <= brute_force_marginal_max_vars)
    detail::verify_certificate(out.model, out.tightened.final);
  return out;
}

// ---------------------------------------------------------------------------

inline void run_experiment(const std::string& family, const nlohmann::json& config,
                           const std::string& outdir)
{
  std::filesystem::create_directories(outdir);
  const auto path = [&](const char* name) { return (std::filesystem::path(outdir) / name).string(); };
  if (family == "hamming") {
    const auto res = run_hamming_experiment(hamming_config::from_json(config));
    write_text_file(path("instances.csv"), res.instances_csv);
    write_text_file(path("summary.json"), res.summary.dump(2) + "\n");
  } else if (family == "edgesel-compare") {
    const auto res = run_edgesel_experiment(edgesel_config::from_json(config));
    write_text_file(path("curves.csv"), res.curves_csv);
    write_text_file(path("summary.json"), res.summary.dump(2) + "\n");
  } else if (family == "avgcut-grid") {
    const auto res = run_avgcut_grid_experiment(avgcut_grid_config::from_json(config));
    write_model_file(res.model, path("model.json"));
    write_text_file(path("trace.csv"), selection_trace_csv(res.tightened.trace));
    nlohmann::json report = solve_report_json(res.tightened.final);
    report["lambda"] = res.lambda;
    report["rounds"] = res.tightened.trace.size() - 1;
    report["edges_in_s"] = res.tightened.s.members.size();
    report["treewidth_bound"] = res.tightened.s.tw_bound;
    report["wca_fixed_point"] = res.tightened.wca_fixed_point;
    write_text_file(path("report.json"), report.dump(2) + "\n");
  } else {
    throw input_error("unknown experiment family: " + family +
                      " (expected hamming, edgesel-compare or avgcut-grid)");
  }
}

} // namespace hoplp

#endif
