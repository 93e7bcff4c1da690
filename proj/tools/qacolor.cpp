// qacolor: graph listing, QUBO/Ising encoding, single anneals and experiment
// sweeps. Exit codes: 0 success, 1 runtime or numerical failure, 2 usage error.

#include "qac/qac.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw usage_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when empty. Output is assembled in memory first
// so a failed run leaves no partial file.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw std::runtime_error("cannot write '" + path + "'");
}

qac::Graph load_graph(const std::string& graph, const std::string& graph_file) {
  if (!graph.empty() && !graph_file.empty())
    throw usage_error("give either --graph or --graph-file, not both");
  if (!graph.empty())
    return qac::parse_graph6(graph);
  if (!graph_file.empty())
    return qac::parse_graph_text(read_file(graph_file));
  throw usage_error("a graph is required (--graph or --graph-file)");
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  const std::uint64_t s = (std::uint64_t{rd()} << 32) ^ rd();
  std::cerr << "seed: " << s << '\n';
  return s;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-annealing simulation of graph-coloring problems with static disorder"};
  app.require_subcommand(1);

  // graphs
  auto* graphs = app.add_subcommand("graphs", "List non-isomorphic graphs with edge count and chromatic number");
  int g_n = 0, g_min_chi = 0;
  bool g_all = false;
  graphs->add_option("-n", g_n, "Number of vertices")->required()->check(CLI::Range(1, 7));
  graphs->add_flag("--all", g_all, "Include disconnected graphs");
  graphs->add_option("--min-chromatic", g_min_chi, "Only graphs with chromatic number >= this")
      ->check(CLI::NonNegativeNumber);

  // encode
  auto* encode = app.add_subcommand("encode", "Emit the Ising problem JSON for a graph and color count");
  std::string e_graph, e_file, e_out;
  int e_K = 0;
  bool e_large = false;
  encode->add_option("--graph", e_graph, "graph6 string");
  encode->add_option("--graph-file", e_file, "File with a graph6 string or an edge list");
  encode->add_option("-K,--colors", e_K, "Number of colors")->required()->check(CLI::Range(1, 1 << 20));
  encode->add_option("-o,--out", e_out, "Output path (default stdout)");
  encode->add_flag("--allow-large", e_large, "Lift the 30-spin encoding limit");

  // anneal
  auto* anneal = app.add_subcommand("anneal", "Run one anneal and print the result JSON");
  std::string a_problem, a_graph, a_file, a_out, a_mode = "generic";
  int a_K = 0;
  double a_tau = 0, a_wh = 0, a_wj = 0, a_dt_max = 0.1, a_safety = 0.05;
  std::uint64_t a_seed = 0, a_real = 0;
  bool a_per_vertex = false, a_state = false;
  anneal->add_option("--problem", a_problem, "Ising problem JSON from `encode`");
  anneal->add_option("--graph", a_graph, "graph6 string");
  anneal->add_option("--graph-file", a_file, "File with a graph6 string or an edge list");
  anneal->add_option("-K,--colors", a_K, "Number of colors")->check(CLI::Range(1, 1 << 20));
  anneal->add_option("--tau", a_tau, "Anneal time")->required()->check(CLI::PositiveNumber);
  anneal->add_option("--W-h", a_wh, "Field disorder amplitude")->check(CLI::NonNegativeNumber);
  anneal->add_option("--W-J", a_wj, "Coupling disorder amplitude")->check(CLI::NonNegativeNumber);
  anneal->add_option("--mode", a_mode, "Disorder mode")->check(CLI::IsMember({"generic", "clamped"}));
  anneal->add_option("--seed", a_seed, "Master seed");
  anneal->add_option("--realization", a_real, "Realization index");
  anneal->add_flag("--per-vertex", a_per_vertex, "One field perturbation per vertex");
  anneal->add_option("--dt-max", a_dt_max, "Largest RK4 step")->check(CLI::PositiveNumber);
  anneal->add_option("--safety", a_safety, "Step bound factor on 1/||H||")->check(CLI::PositiveNumber);
  anneal->add_flag("--state", a_state, "Include the final amplitudes");
  anneal->add_option("-o,--out", a_out, "Output path (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep and write CSV");
  std::string s_kind, s_config, s_out;
  std::vector<std::string> s_set;
  std::uint64_t s_seed = 0;
  int s_threads = qac::default_thread_count();
  bool s_progress = false;
  sweep->add_option("kind", s_kind, "Sweep kind")->required()->check(CLI::IsMember(qac::sweep_kinds()));
  sweep->add_option("-c,--config", s_config, "Config file (or a previous output file)");
  sweep->add_option("--set", s_set, "Override a config key: key=value")->allow_extra_args(false);
  auto* seed_opt = sweep->add_option("--seed", s_seed, "Master seed");
  sweep->add_option("-o,--out", s_out, "Output path (default stdout)");
  sweep->add_option("-j,--threads", s_threads, "Worker threads (default $QAC_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--progress", s_progress, "Per-task counter on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (graphs->parsed()) {
      std::ostringstream out;
      for (const auto& g : qac::enumerate_non_isomorphic(g_n, !g_all)) {
        const int chi = qac::chromatic_number(g);
        if (chi >= g_min_chi)
          out << qac::to_graph6(g) << ' ' << g.n_edges() << ' ' << chi << '\n';
      }
      emit("", out.str());
    } else if (encode->parsed()) {
      const auto g = load_graph(e_graph, e_file);
      const nlohmann::json j = qac::build_ising(g, e_K, e_large);
      emit(e_out, j.dump(2) + "\n");
    } else if (anneal->parsed()) {
      qac::IsingProblem clean;
      qac::Graph g;
      if (!a_problem.empty()) {
        if (!a_graph.empty() || !a_file.empty())
          throw usage_error("give either --problem or a graph, not both");
        clean = nlohmann::json::parse(read_file(a_problem)).get<qac::IsingProblem>();
        g = clean.meta.graph;
        if (g.n_vertices() * clean.meta.K != clean.n_spins)
          throw usage_error("problem JSON lacks the graph metadata needed for the solution set");
      } else {
        if (a_K < 1)
          throw usage_error("-K is required with a graph");
        g = load_graph(a_graph, a_file);
        clean = qac::build_ising(g, a_K);
      }
      const qac::DisorderSpec spec{a_wh, a_wj, qac::parse_disorder_mode(a_mode), a_seed, a_per_vertex};
      spec.validate();
      const auto problem = qac::sample_disorder(clean, spec, a_real);
      const auto H = qac::build_hamiltonian(problem);
      qac::EvolveOptions opt;
      opt.dt_max = a_dt_max;
      opt.safety = a_safety;
      opt.keep_state = a_state;
      const auto S = qac::solution_set(g, clean.meta.K);
      const auto r = qac::evolve(H, S, a_tau, opt);
      auto j = qac::anneal_record(r, {spec, a_real, clean.meta.graph_id, clean.meta.K});
      if (r.flagged)
        std::cerr << "warning: norm drift " << r.norm_drift << " exceeds " << opt.drift_tol << '\n';
      if (a_state) {
        auto amps = nlohmann::json::array();
        for (const auto& a : r.final_state->amplitudes())
          amps.push_back({a.real(), a.imag()});
        j["state"] = std::move(amps);
      }
      emit(a_out, j.dump(2) + "\n");
    } else if (sweep->parsed()) {
      qac::RunConfig user = s_config.empty() ? qac::RunConfig{} : qac::RunConfig::parse(read_file(s_config));
      for (const auto& kv : s_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw usage_error("--set expects key=value, got '" + kv + "'");
        user.set(qac::detail::trim(std::string_view(kv).substr(0, eq)),
                 qac::detail::trim(std::string_view(kv).substr(eq + 1)));
      }
      if (seed_opt->count())
        user.set("seed", std::to_string(s_seed));
      else if (!user.has("seed"))
        user.set("seed", std::to_string(entropy_seed()));
      const auto cfg = qac::resolve_sweep_config(s_kind, user);

      qac::SweepContext ctx;
      ctx.threads = s_threads;
      if (s_progress)
        ctx.progress = [](std::size_t done, std::size_t total) {
          std::cerr << "\r" << done << "/" << total << (done == total ? "\n" : "") << std::flush;
        };
      std::ostringstream out;
      qac::run_sweep(cfg, out, ctx);
      emit(s_out, out.str());
    }
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const qac::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bad JSON input: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const qac::size_refusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
