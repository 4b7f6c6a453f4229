// critwin: command-line front end for the configuration-model tools.
//
// Exit codes: 0 success, 1 a check or sampling run failed, 2 usage error or
// malformed input.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "critwin/critwin.hpp"

namespace {

using nlohmann::json;
using namespace critwin;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SourceOptions {
  std::string degrees_file;
  std::string family;
  std::size_t n = 0;
  double q_target = 0.0;
  std::int64_t delta = 0;
  std::int64_t d_high = 10;
  std::int64_t count_high = 1;
};

void add_source_options(CLI::App* cmd, SourceOptions& s) {
  auto* deg = cmd->add_option("--degrees", s.degrees_file, "Degree file (one degree per line, or RLE)");
  auto* fam = cmd->add_option("--family", s.family, "Degree family")
                  ->check(CLI::IsMember({"mixed13", "heavy_vertex", "three_point"}));
  deg->excludes(fam);
  cmd->add_option("--n", s.n, "Number of vertices for --family");
  cmd->add_option("--q-target", s.q_target, "Target Q for mixed13 / three_point");
  cmd->add_option("--delta", s.delta, "Heavy vertex degree (default ceil(n^0.4))");
  cmd->add_option("--d-high", s.d_high, "High degree for three_point");
  cmd->add_option("--count-high", s.count_high, "Number of high-degree vertices for three_point");
}

// Bad flags, unreadable files and degree data that cannot be used at all.
bool is_usage_error(const std::exception& e) {
  return dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const PreconditionViolated*>(&e) || dynamic_cast<const ZeroDegree*>(&e) ||
         dynamic_cast<const OddSum*>(&e) || dynamic_cast<const Infeasible*>(&e) ||
         dynamic_cast<const TooLarge*>(&e);
}

std::int64_t default_delta(std::size_t n) {
  return static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(n), 0.4) - 1e-9));
}

DegreeSequence build_source(const SourceOptions& s) {
  if (s.degrees_file.empty() == s.family.empty()) {
    throw UsageError("give exactly one of --degrees or --family");
  }
  if (!s.degrees_file.empty()) return build_sequence(read_degree_file(s.degrees_file));
  if (s.n == 0) throw UsageError("--family needs --n");
  if (s.family == "mixed13") return family_mixed13(s.n, s.q_target);
  if (s.family == "heavy_vertex") return family_heavy_vertex(s.n, s.delta > 0 ? s.delta : default_delta(s.n));
  return family_three_point(s.n, s.d_high, s.count_high, s.q_target);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

json sequence_json(const DegreeSequence& seq) {
  return {{"n", seq.n()},
          {"edges", seq.edge_count()},
          {"q", to_string(seq.q())},
          {"q_value", seq.q_value()},
          {"r", to_string(seq.r())},
          {"r_value", seq.r_value()},
          {"max_degree", seq.max_degree()}};
}

json chi_json(const ChiSquareResult& c) {
  return {{"statistic", c.statistic},
          {"degrees_of_freedom", c.degrees_of_freedom},
          {"critical_0999", c.critical},
          {"samples", c.samples},
          {"pass", c.pass}};
}

// ---------------------------------------------------------------------------

int run_validate(const SourceOptions& src, double zeta) {
  const auto seq = build_source(src);
  const auto cond = check_condition_d(seq, zeta);
  json out = sequence_json(seq);
  out["condition_d"] = condition_json(cond);
  if (cond.pass_b && cond.pass_c) {
    const auto obs = check_observations(seq, zeta);
    out["observations"] = {{"edges_lower", obs.edges_lower}, {"edges_upper", obs.edges_upper},
                           {"square_sum", obs.square_sum},   {"r_lower", obs.r_lower},
                           {"r_upper", obs.r_upper}};
  }
  std::cout << out.dump(2) << '\n';
  return cond.all() ? kExitOk : kExitFailed;
}

int run_sample(const SourceOptions& src, const std::optional<std::uint64_t>& seed_opt, bool simple,
               int max_attempts, const std::string& out_path) {
  const auto seq = build_source(src);
  const auto seed = resolve_seed(seed_opt);
  Rng rng(seed);
  json out = {{"seed", seed}};
  std::optional<ConfigurationGraph> g;
  if (simple) {
    try {
      auto s = sample_simple(seq, rng, max_attempts);
      out["attempts"] = s.attempts;
      g = std::move(s.graph);
    } catch (const Exhausted& e) {
      out["error"] = e.what();
      std::cout << out.dump(2) << '\n';
      return kExitFailed;
    }
  } else {
    g = sample_configuration(seq, rng);
    out["attempts"] = 1;
  }
  const auto verdict = is_simple(*g);
  out["simple"] = verdict.is_simple;
  out["loops"] = verdict.loop_count;
  out["multi_edges"] = verdict.multi_edge_count;
  out["edges"] = g->edges().size();
  auto file = open_out(out_path);
  write_edge_list(file, *g);
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int run_explore(const SourceOptions& src, const std::optional<std::uint64_t>& seed_opt,
                const std::optional<Vertex>& start, const std::string& trace_path,
                const std::string& census_path) {
  const auto seq = build_source(src);
  const auto seed = resolve_seed(seed_opt);
  Rng rng(seed);
  ExploreOptions opts;
  opts.start = start;
  opts.record_trace = !trace_path.empty();
  const auto result = explore_all(seq, rng, opts);
  {
    auto file = open_out(census_path);
    write_census_csv(file, result.census);
  }
  if (result.trace) {
    auto file = open_out(trace_path);
    write_trace_csv(file, *result.trace);
  }
  const auto lc = largest_component(result.census);
  json out = {{"seed", seed},
              {"components", result.census.components.size()},
              {"cmax", lc.size},
              {"second_cmax", lc.second_size},
              {"complex_components", result.census.complex_count()},
              {"max_excess", result.census.max_excess()}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

struct ExperimentOptions {
  std::string preset = "inside";
  std::string family = "mixed13";
  std::string degrees_file;
  double coefficient = 1.0;
  double q_target = 0.0;
  std::int64_t delta = 0;
  double delta_exponent = 0.4;
  std::int64_t d_high = 10;
  std::int64_t count_high = 1;
  std::vector<std::string> n_list;
  int replicates = 100;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int workers = 1;
  double zeta = 0.05;
  bool simple = false;
  bool no_traces = false;
  bool timing = false;
  int max_attempts = kDefaultMaxAttempts;
};

std::vector<std::size_t> parse_n_list(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& item : items) {
    double v = 0;
    std::size_t used = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad --n-list entry '" + item + "'");
    }
    if (used != item.size() || !(v >= 1) || v != std::floor(v) || v > 4e9) {
      throw UsageError("bad --n-list entry '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int run_experiment_cmd(const ExperimentOptions& o) {
  ExperimentSpec spec;
  if (o.family == "mixed13") spec.family = Family::mixed13;
  else if (o.family == "heavy_vertex") spec.family = Family::heavy_vertex;
  else if (o.family == "three_point") spec.family = Family::three_point;
  else spec.family = Family::file;

  if (o.preset == "inside") spec.params.regime = Regime::inside;
  else if (o.preset == "below") spec.params.regime = Regime::below;
  else if (o.preset == "above") spec.params.regime = Regime::above;
  else spec.params.regime = Regime::fixed;
  spec.params.coefficient = o.coefficient;
  spec.params.q_target = o.q_target;
  spec.params.delta = o.delta;
  spec.params.delta_exponent = o.delta_exponent;
  spec.params.d_high = o.d_high;
  spec.params.count_high = o.count_high;
  if (spec.family == Family::file) {
    if (o.degrees_file.empty()) throw UsageError("--family file needs --degrees");
    spec.params.degrees = read_degree_file(o.degrees_file);
    spec.params.source = o.degrees_file;
  }
  spec.n_values = parse_n_list(o.n_list);
  spec.replicates = o.replicates;
  spec.master_seed = resolve_seed(o.seed);
  spec.zeta = o.zeta;
  spec.record_traces = !o.no_traces;
  spec.mode = o.simple ? SampleMode::simple : SampleMode::multigraph;
  spec.max_attempts = o.max_attempts;
  spec.workers = o.workers;
  spec.timing = o.timing;

  const auto result = run_experiment(spec);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  std::filesystem::create_directories(o.out_dir);
  const auto csv_path = (std::filesystem::path(o.out_dir) / "replicates.csv").string();
  const auto json_path = (std::filesystem::path(o.out_dir) / "summary.json").string();
  {
    auto file = open_out(csv_path);
    write_replicates_csv(file, result);
  }
  {
    auto file = open_out(json_path);
    file << summary_json(result).dump(2) << '\n';
  }
  json out = {{"seed", spec.master_seed}, {"csv", csv_path}, {"summary", json_path}};
  if (result.median_slope) out["median_cmax_slope"] = result.median_slope->slope;
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int run_oracle(const SourceOptions& src, const std::string& check, std::int64_t samples,
               const std::optional<std::uint64_t>& seed_opt, const std::optional<Vertex>& start) {
  const auto seq = build_source(src);
  json out = sequence_json(seq);
  out["check"] = check;
  bool pass = false;
  if (check == "uniformity") {
    const auto seed = resolve_seed(seed_opt);
    Rng rng(seed);
    const auto rep = uniformity_check(seq, samples, rng);
    out["seed"] = seed;
    out["categories"] = rep.categories;
    out["sampler"] = chi_json(rep.sampler);
    out["exploration"] = chi_json(rep.exploration);
    pass = rep.pass();
  } else if (check == "pairjoin") {
    const auto rep = pair_join_check(seq);
    const auto expected = partial_matching_count(seq.copy_count());
    out["matchings"] = rep.matchings;
    out["pair_sets"] = rep.pair_sets;
    out["expected_pair_sets"] = expected;
    out["exact_matches_enumeration"] = rep.exact_matches_enumeration;
    out["exact_within_bound"] = rep.exact_within_bound;
    if (rep.single_pair_probability) out["single_pair_probability"] = to_string(*rep.single_pair_probability);
    pass = rep.pass() && rep.pair_sets == expected;
  } else {
    auto state = start_exploration(seq, start);
    const auto first = exact_step_expectation(state);
    out["start"] = state.start_vertex();
    out["y"] = state.y();
    out["d_total"] = state.d_total();
    out["mean"] = to_string(first.mean);
    out["second_moment"] = to_string(first.second_moment);
    out["closed_mean"] = to_string(first.closed_mean);
    out["closed_second_moment"] = to_string(first.closed_second_moment);
    // Walk one full exploration and check every state on the way.
    const auto seed = resolve_seed(seed_opt);
    Rng rng(seed);
    std::int64_t checked = 0;
    try {
      while (!state.halted()) {
        exact_step_expectation(state);
        ++checked;
        state.step(rng);
      }
      pass = true;
    } catch (const ViolatedIdentity& e) {
      out["error"] = e.what();
    }
    out["seed"] = seed;
    out["states_checked"] = checked;
  }
  out["pass"] = pass;
  std::cout << out.dump(2) << '\n';
  return pass ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration-model sampling, component exploration and critical-window experiments"};
  app.require_subcommand(1);

  double zeta = 0.05;

  SourceOptions validate_src;
  auto* validate = app.add_subcommand("validate", "Check Condition D for a degree sequence (JSON)");
  add_source_options(validate, validate_src);
  validate->add_option("--zeta", zeta, "Condition D constant in (0, 0.1)");

  SourceOptions sample_src;
  std::optional<std::uint64_t> sample_seed;
  bool sample_simple_flag = false;
  int sample_attempts = kDefaultMaxAttempts;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Sample a configuration and write its edge list");
  add_source_options(sample, sample_src);
  sample->add_option("--seed", sample_seed, "Random seed (drawn and printed if absent)");
  sample->add_flag("--simple", sample_simple_flag, "Reject until the multigraph is simple");
  sample->add_option("--max-attempts", sample_attempts, "Rejection attempts for --simple");
  sample->add_option("--out", sample_out, "Edge-list output file")->required();

  SourceOptions explore_src;
  std::optional<std::uint64_t> explore_seed;
  std::optional<Vertex> explore_start;
  std::string trace_path, census_path;
  auto* explore = app.add_subcommand("explore", "Run the component exploration and write the census");
  add_source_options(explore, explore_src);
  explore->add_option("--seed", explore_seed, "Random seed (drawn and printed if absent)");
  explore->add_option("--start", explore_start, "Start vertex (default: lowest index)");
  explore->add_option("--trace", trace_path, "Per-step trace CSV output");
  explore->add_option("--census", census_path, "Component census CSV output")->required();

  ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "Run a replicated sweep over n (CSV + JSON)");
  experiment->add_option("--preset", exp.preset, "Window regime")
      ->check(CLI::IsMember({"inside", "below", "above", "fixed"}));
  experiment->add_option("--family", exp.family, "Degree family")
      ->check(CLI::IsMember({"mixed13", "heavy_vertex", "three_point", "file"}));
  experiment->add_option("--degrees", exp.degrees_file, "Degree file for --family file");
  experiment->add_option("--coefficient", exp.coefficient, "Window coefficient");
  experiment->add_option("--q-target", exp.q_target, "Target Q for --preset fixed");
  experiment->add_option("--delta", exp.delta, "Heavy vertex degree (default ceil(n^delta-exponent))");
  experiment->add_option("--delta-exponent", exp.delta_exponent, "Heavy vertex degree exponent");
  experiment->add_option("--d-high", exp.d_high, "High degree for three_point");
  experiment->add_option("--count-high", exp.count_high, "High-degree count for three_point");
  experiment->add_option("--n-list", exp.n_list, "Comma-separated increasing sizes")
      ->delimiter(',')
      ->required();
  experiment->add_option("--replicates", exp.replicates, "Replicates per size");
  experiment->add_option("--seed", exp.seed, "Master seed (drawn and printed if absent)");
  experiment->add_option("--out-dir", exp.out_dir, "Output directory")->required();
  experiment->add_option("--workers", exp.workers, "Worker threads; output does not depend on it");
  experiment->add_option("--zeta", exp.zeta, "Condition D constant in (0, 0.1)");
  experiment->add_flag("--simple", exp.simple, "Condition on simplicity by rejection");
  experiment->add_option("--max-attempts", exp.max_attempts, "Rejection attempts per replicate with --simple");
  experiment->add_flag("--no-traces", exp.no_traces, "Skip the Q_t/R_t concentration checks");
  experiment->add_flag("--timing", exp.timing, "Fill the wall_ms column (output no longer reproducible)");

  SourceOptions oracle_src;
  std::string oracle_check = "expectation";
  std::int64_t oracle_samples = 100000;
  std::optional<std::uint64_t> oracle_seed;
  std::optional<Vertex> oracle_start;
  auto* oracle = app.add_subcommand("oracle", "Exact checks on a tiny degree sequence");
  add_source_options(oracle, oracle_src);
  oracle->add_option("--check", oracle_check, "Which check to run")
      ->check(CLI::IsMember({"uniformity", "pairjoin", "expectation"}))
      ->required();
  oracle->add_option("--samples", oracle_samples, "Samples for the uniformity check");
  oracle->add_option("--seed", oracle_seed, "Random seed (drawn and printed if absent)");
  oracle->add_option("--start", oracle_start, "Start vertex for the expectation check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return run_validate(validate_src, zeta);
    if (*sample) return run_sample(sample_src, sample_seed, sample_simple_flag, sample_attempts, sample_out);
    if (*explore) return run_explore(explore_src, explore_seed, explore_start, trace_path, census_path);
    if (*experiment) return run_experiment_cmd(exp);
    if (*oracle) return run_oracle(oracle_src, oracle_check, oracle_samples, oracle_seed, oracle_start);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_usage_error(e) ? kExitUsage : kExitFailed;
  }
  return kExitUsage;
}
