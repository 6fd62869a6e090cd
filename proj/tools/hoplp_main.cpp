// Command-line front end: model generators, the LP_S solver, the exhaustive
// oracle and the WCA tightening loop. Exit codes: 0 success, 2 input error,
// 3 infeasible HOP.

#include <iostream>

#include <CLI11.hpp>

#include "hoplp/hoplp.hpp"

namespace {

using namespace hoplp;

edge_set edge_set_from_spec(const energy_model& m, const std::string& spec)
{
  if (spec == "all") return full_edge_set(m);
  if (spec == "tree") return initial_tree(m);
  if (spec == "none") return empty_edge_set(m);
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw input_error("cannot open edge list file: " + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& err) {
      throw input_error("edge list: malformed JSON: " + std::string(err.what()));
    }
    if (!doc.is_array()) throw input_error("edge list: expected a JSON array of [i, j] pairs");
    std::vector<int> members;
    for (const auto& item : doc) {
      if (!item.is_array() || item.size() != 2) throw input_error("edge list: expected [i, j] pairs");
      const int i = item[0].get<int>(), j = item[1].get<int>();
      int found = -1;
      for (std::size_t e = 0; e < m.edges.size() && found < 0; ++e)
        if (m.edges[e].i == std::min(i, j) && m.edges[e].j == std::max(i, j)) found = (int)e;
      if (found < 0)
        throw input_error("edge list: (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is not an edge of the model");
      members.push_back(found);
    }
    return build_edge_set(m, std::move(members));
  }
  throw input_error("--edges: expected all, tree, none or file:<path>");
}

void print_solve_summary(const solve_result& res)
{
  std::cout << "bound        " << format_double(res.bound) << "\n"
            << "energy       " << format_double(res.decoded_energy) << "\n"
            << "gap          " << format_double(res.gap) << "\n"
            << "certificate  " << (res.certificate ? "yes" : "no") << "\n"
            << "sweeps       " << res.sweeps << (res.converged ? "" : " (sweep limit reached)") << "\n";
}

int run(int argc, char** argv)
{
  CLI::App app{"MAP inference for binary pairwise models with one high-order potential,\n"
               "via partial-edge-consistency LP relaxations and monotone message passing."};
  app.require_subcommand(1);

  // --- solve ---------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand("solve", "Solve the LP relaxation for a given edge set");
  std::string solve_model, solve_edges = "tree", solve_out, solve_trace;
  int solve_tw_max = 6;
  solve_config solve_cfg;
  solve_cmd->add_option("model", solve_model, "model JSON file")->required();
  solve_cmd->add_option("--edges", solve_edges,
                        "consistency set: all, tree, none or file:<path> (JSON [i,j] pairs)");
  solve_cmd->add_option("--tw-max", solve_tw_max, "reject edge sets above this tree-width bound");
  solve_cmd->add_option("--max-sweeps", solve_cfg.max_sweeps, "sweep limit");
  solve_cmd->add_option("--tol", solve_cfg.tol_bound, "per-sweep bound-gain stopping tolerance");
  solve_cmd->add_option("--out", solve_out, "write a JSON report here");
  solve_cmd->add_option("--trace", solve_trace, "write the bound trace CSV here");

  // --- oracle --------------------------------------------------------------
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive MAP (n <= 25)");
  std::string oracle_model;
  oracle_cmd->add_option("model", oracle_model, "model JSON file")->required();

  // --- tighten -------------------------------------------------------------
  auto* tighten_cmd = app.add_subcommand("tighten", "Grow the edge set by WCA until certified");
  std::string tighten_model, tighten_out, tighten_trace;
  selection_config tighten_cfg;
  tighten_cmd->add_option("model", tighten_model, "model JSON file")->required();
  tighten_cmd->add_option("--k", tighten_cfg.batch_size, "edges added per round");
  tighten_cmd->add_option("--tw-max", tighten_cfg.tw_max, "tree-width budget for S");
  tighten_cmd->add_option("--rounds", tighten_cfg.max_rounds, "round limit");
  tighten_cmd->add_option("--max-sweeps", tighten_cfg.solve.max_sweeps, "sweep limit per solve");
  tighten_cmd->add_option("--out", tighten_out, "write a JSON report here");
  tighten_cmd->add_option("--trace", tighten_trace,
                          "write the selection trace CSV here (columns: round, edges_in_S, "
                          "edge_added, wca, treewidth_bound, converged_bound)");

  // --- gen -----------------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen", "Generate a model from a seeded family");
  std::string gen_family, gen_out;
  int gen_n = 4, gen_k = 1, gen_rows = 4, gen_cols = 4;
  double gen_c = 1.0, gen_eps = 0.1, gen_lambda = 0.0;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("family", gen_family,
                      "chain-exclusion | avgcut-chain | hamming-tree | avgcut-grid")
      ->required();
  gen_cmd->add_option("--n", gen_n, "variables (chain and tree families)");
  gen_cmd->add_option("--c", gen_c, "pairwise disagreement cost (chain families)");
  gen_cmd->add_option("--eps", gen_eps, "unary bias (chain-exclusion)");
  gen_cmd->add_option("--lambda", gen_lambda,
                      "coupling / balance reward; omit for avgcut-grid to auto-tune");
  gen_cmd->add_option("--k", gen_k, "exclusion radius (hamming-tree)");
  gen_cmd->add_option("--rows", gen_rows, "grid rows (avgcut-grid)");
  gen_cmd->add_option("--cols", gen_cols, "grid cols (avgcut-grid)");
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_option("--out", gen_out, "output model path")->required();

  // --- experiment ----------------------------------------------------------
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Run a seeded batch: hamming | edgesel-compare | avgcut-grid.\n"
                    "hamming writes instances.csv (k,lambda,seed,map_energy,bound_tree,certified_tree,"
                    "bound_empty,decoded_empty,integral_empty,gap_empty) and summary.json;\n"
                    "edgesel-compare writes curves.csv (instance,criterion,additions,edge_added,bound,"
                    "certified) and summary.json;\n"
                    "avgcut-grid writes model.json, trace.csv and report.json.");
  std::string exp_family, exp_config, exp_outdir;
  exp_cmd->add_option("family", exp_family, "experiment family")->required();
  exp_cmd->add_option("--config", exp_config, "JSON config file (defaults apply per family)");
  exp_cmd->add_option("--outdir", exp_outdir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (solve_cmd->parsed()) {
    const energy_model m = read_model_file(solve_model);
    const edge_set s = edge_set_from_spec(m, solve_edges);
    if (s.tw_bound > solve_tw_max)
      throw input_error("edge set has tree-width bound " + std::to_string(s.tw_bound) +
                        " above --tw-max " + std::to_string(solve_tw_max));
    const solve_result res = solve(m, s, solve_cfg);
    print_solve_summary(res);
    if (!solve_out.empty()) write_text_file(solve_out, solve_report_json(res).dump(2) + "\n");
    if (!solve_trace.empty()) write_text_file(solve_trace, bound_trace_csv(res.bound_trace));
  } else if (oracle_cmd->parsed()) {
    const energy_model m = read_model_file(oracle_model);
    const map_result res = brute_force_map(m);
    nlohmann::json j;
    j["assignment"] = res.argmin;
    j["energy"] = is_forbidden(res.energy) ? nlohmann::json("inf") : nlohmann::json(res.energy);
    std::cout << j.dump(2) << "\n";
  } else if (tighten_cmd->parsed()) {
    const energy_model m = read_model_file(tighten_model);
    const tighten_result res = tighten_loop(m, tighten_cfg);
    std::cout << "rounds       " << res.trace.size() - 1 << "\n"
              << "edges in S   " << res.s.members.size() << " of " << m.edges.size() << "\n"
              << "treewidth    " << res.s.tw_bound << "\n";
    if (res.wca_fixed_point) std::cout << "stopped      WCA fixed point, gap positive\n";
    print_solve_summary(res.final);
    if (!tighten_out.empty()) {
      nlohmann::json j = solve_report_json(res.final);
      j["rounds"] = res.trace.size() - 1;
      j["edges_in_s"] = res.s.members.size();
      j["treewidth_bound"] = res.s.tw_bound;
      j["wca_fixed_point"] = res.wca_fixed_point;
      write_text_file(tighten_out, j.dump(2) + "\n");
    }
    if (!tighten_trace.empty()) write_text_file(tighten_trace, selection_trace_csv(res.trace));
  } else if (gen_cmd->parsed()) {
    energy_model m;
    if (gen_family == "chain-exclusion") {
      m = gen_chain_exclusion(gen_n, gen_c, gen_eps);
    } else if (gen_family == "avgcut-chain") {
      m = gen_avgcut_chain(gen_n, gen_c, gen_lambda > 0 ? gen_lambda : 0.1);
    } else if (gen_family == "hamming-tree") {
      m = gen_hamming_tree(gen_n, gen_lambda > 0 ? gen_lambda : 1.0, gen_k, gen_seed);
    } else if (gen_family == "avgcut-grid") {
      if (gen_lambda > 0) {
        m = gen_avgcut_grid(gen_rows, gen_cols, gen_seed, gen_lambda);
      } else {
        auto [tuned, lambda] = gen_avgcut_grid_autotune(gen_rows, gen_cols, gen_seed);
        m = std::move(tuned);
        std::cout << "lambda " << format_double(lambda) << "\n";
      }
    } else {
      throw input_error("unknown family: " + gen_family);
    }
    write_model_file(m, gen_out);
  } else if (exp_cmd->parsed()) {
    nlohmann::json config = nlohmann::json::object();
    if (!exp_config.empty()) {
      std::ifstream in(exp_config);
      if (!in) throw input_error("cannot open config file: " + exp_config);
      try {
        in >> config;
      } catch (const nlohmann::json::parse_error& err) {
        throw input_error("config: malformed JSON: " + std::string(err.what()));
      }
    }
    run_experiment(exp_family, config, exp_outdir);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const hoplp::infeasible_error& err) {
    std::cerr << "infeasible: " << err.what() << "\n";
    return 3;
  } catch (const hoplp::input_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
