#include "mpvi/cli.hpp"

#include "mpvi/local_vi.hpp"
#include "mpvi/model_text.hpp"
#include "mpvi/oracle.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace mpvi {

namespace {

std::string_view criterion_name(StoppingCriterion criterion) {
  switch (criterion) {
    case StoppingCriterion::kSpan:
      return "sc1";
    case StoppingCriterion::kSpanDifference:
      return "sc2";
    case StoppingCriterion::kDeltaChange:
      return "sc3";
  }
  return "?";
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Report solve_nvi(const ModelSource& source, const SolveSettings& settings,
                 const std::optional<Clock::time_point>& deadline, Report report) {
  const Mdp mdp = source.model();
  ViOptions options;
  options.tau = settings.tau;
  if (settings.max_iters) options.max_iters = *settings.max_iters;
  options.deadline = deadline;
  const ViResult vi = run_vi(mdp, {settings.criterion, settings.epsilon}, options);
  report.value = vi.value;
  report.lower = vi.lower;
  report.upper = vi.upper;
  report.iterations = vi.iterations;
  report.explored_states = mdp.num_states();
  report.converged = vi.converged;
  if (vi.criterion_unsound) report.flags.push_back("criterion-unsound");
  if (vi.timed_out) report.flags.push_back("timeout");
  return report;
}

Report solve_local(const ModelSource& source, const SolveSettings& settings,
                   const std::optional<Clock::time_point>& deadline, Report report) {
  const Mdp mdp = source.model();
  LocalViOptions options;
  options.tau = settings.tau;
  if (settings.max_iters) options.max_iters = *settings.max_iters;
  options.deadline = deadline;
  const LocalViResult result = local_vi(mdp, settings.epsilon, options);
  report.value = result.value;
  report.lower = result.lower;
  report.upper = result.upper;
  report.iterations = result.iterations;
  report.explored_states = result.total_states;
  report.explored_mecs = result.per_mec.size();
  report.converged = result.converged;
  if (result.timed_out) report.flags.push_back("timeout");
  return report;
}

Report solve_odv(const ModelSource& source, const SolveSettings& settings,
                 const std::optional<Clock::time_point>& deadline, Report report) {
  const auto lazy = source.lazy_model();
  OnDemandOptions options;
  options.epsilon = settings.epsilon;
  options.k = settings.k;
  options.heuristic = settings.heuristic;
  options.seed = settings.seed;
  options.tau = settings.tau;
  if (settings.max_iters) options.max_episodes = *settings.max_iters;
  options.deadline = deadline;
  const OnDemandResult result = on_demand_vi(*lazy, options);
  report.value = result.value;
  report.lower = result.lower;
  report.upper = result.upper;
  report.iterations = result.vi_steps;
  report.episodes = result.episodes;
  report.explored_states = result.explored_states;
  report.explored_mecs = result.explored_mecs;
  report.converged = result.converged;
  if (result.timed_out) report.flags.push_back("timeout");
  return report;
}

Report solve_oracle(const ModelSource& source, const SolveSettings& settings, Report report) {
  const ExactMdp mdp = source.exact_model();
  const Rational gain = exact_gain(mdp, settings.oracle_limit);
  report.value = report.lower = report.upper = to_double(gain);
  report.epsilon = 0.0;
  report.exact = to_string(gain);
  report.explored_states = mdp.num_states();
  report.explored_mecs = compute_mecs(mdp).size();
  report.converged = true;
  return report;
}

struct CommonFlags {
  std::string algorithm = "local-vi";
  std::string criterion = "sc1";
  double epsilon = 1e-6;
  std::string heuristic = "md";
  unsigned k = 6;
  double tau = 0.95;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_iters;
  std::optional<double> timeout_ms;
  bool plain = false;
};

void add_tuning_flags(CLI::App& app, CommonFlags& flags) {
  app.add_option("--eps", flags.epsilon, "Precision")->default_val(1e-6)->check(CLI::PositiveNumber);
  app.add_option("--criterion", flags.criterion, "Stopping criterion of nvi")
      ->default_val("sc1")
      ->check(CLI::IsMember({"sc1", "sc2", "sc3"}));
  app.add_option("--k", flags.k, "Repetitions of a state that trigger end-component collapsing")
      ->default_val(6)
      ->check(CLI::Range(2u, 1'000'000u));
  app.add_option("--tau", flags.tau, "Aperiodicity mixing parameter")
      ->default_val(0.95)
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", flags.seed, "Random seed")->default_val(0);
  app.add_option("--max-iters", flags.max_iters, "Iteration (or episode) budget");
  app.add_option("--timeout-ms", flags.timeout_ms, "Wall-clock budget per run")->check(CLI::PositiveNumber);
  auto* json = app.add_flag("--json", "JSON output (default)");
  app.add_flag("--plain", flags.plain, "Plain text output")->excludes(json);
}

SolveSettings settings_from(const CommonFlags& flags) {
  SolveSettings settings;
  settings.algorithm = *parse_algorithm(flags.algorithm);
  settings.criterion = flags.criterion == "sc1"   ? StoppingCriterion::kSpan
                       : flags.criterion == "sc2" ? StoppingCriterion::kSpanDifference
                                                  : StoppingCriterion::kDeltaChange;
  settings.epsilon = flags.epsilon;
  settings.heuristic = *parse_heuristic(flags.heuristic);
  settings.k = flags.k;
  settings.tau = flags.tau;
  settings.seed = flags.seed;
  settings.max_iters = flags.max_iters;
  settings.timeout_ms = flags.timeout_ms;
  return settings;
}

bool valid_tau(double tau) { return tau > 0 && tau < 1; }

}  // namespace

ModelSource ModelSource::from_file(const std::string& path) {
  ModelSource source;
  source.name = path;
  source.text = read_text_file(path);
  return source;
}

ModelSource ModelSource::from_generator(const std::string& spec) {
  ModelSource source;
  source.generator = parse_generator_spec(spec);
  source.name = source.generator->to_string();
  return source;
}

Mdp ModelSource::model() const {
  if (generator) return generate(*generator);
  auto outcome = parse_model(text);
  if (!outcome.ok()) throw ModelFileError("cannot parse " + name, std::move(outcome.errors));
  return std::move(*outcome.model);
}

ExactMdp ModelSource::exact_model() const {
  if (generator) return generate_exact(*generator);
  auto outcome = parse_exact_model(text);
  if (!outcome.ok()) throw ModelFileError("cannot parse " + name, std::move(outcome.errors));
  return std::move(*outcome.model);
}

std::unique_ptr<LazyModel> ModelSource::lazy_model() const {
  if (generator) return generate_lazy(*generator);
  return std::make_unique<MdpLazyModel>(model());
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNaiveVi:
      return "nvi";
    case Algorithm::kLocalVi:
      return "local-vi";
    case Algorithm::kOnDemandVi:
      return "odv";
    case Algorithm::kOracle:
      return "oracle";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "nvi") return Algorithm::kNaiveVi;
  if (text == "local-vi") return Algorithm::kLocalVi;
  if (text == "odv") return Algorithm::kOnDemandVi;
  if (text == "oracle") return Algorithm::kOracle;
  return std::nullopt;
}

Report solve(const ModelSource& source, const SolveSettings& settings) {
  Report report;
  report.algorithm = std::string(to_string(settings.algorithm));
  if (settings.algorithm == Algorithm::kNaiveVi) {
    report.algorithm += "/" + std::string(criterion_name(settings.criterion));
  } else if (settings.algorithm == Algorithm::kOnDemandVi) {
    report.algorithm += "/" + std::string(to_string(settings.heuristic));
  }
  report.model = source.name;
  report.epsilon = settings.epsilon;

  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (settings.timeout_ms) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double, std::milli>(*settings.timeout_ms));
  }
  switch (settings.algorithm) {
    case Algorithm::kNaiveVi:
      report = solve_nvi(source, settings, deadline, std::move(report));
      break;
    case Algorithm::kLocalVi:
      report = solve_local(source, settings, deadline, std::move(report));
      break;
    case Algorithm::kOnDemandVi:
      report = solve_odv(source, settings, deadline, std::move(report));
      break;
    case Algorithm::kOracle:
      report = solve_oracle(source, settings, std::move(report));
      break;
  }
  report.wall_ms = elapsed_ms(start);
  return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal mean payoff of Markov decision processes"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string model_path;
  std::string generate_spec;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one model");
  solve_cmd->add_option("--alg", solve_flags.algorithm, "Algorithm")
      ->default_val("local-vi")
      ->check(CLI::IsMember({"nvi", "local-vi", "odv", "oracle"}));
  solve_cmd->add_option("--heuristic", solve_flags.heuristic, "Successor heuristic of odv")
      ->default_val("md")
      ->check(CLI::IsMember({"pr", "rr", "md"}));
  add_tuning_flags(*solve_cmd, solve_flags);
  auto* generate_opt = solve_cmd->add_option("--generate", generate_spec, "Generated model, e.g. grid:4,4");
  solve_cmd->add_option("model", model_path, "Model file")->excludes(generate_opt);

  CommonFlags bench_flags;
  std::vector<std::string> bench_algs;
  std::vector<std::string> bench_heuristics;
  std::vector<std::string> bench_files;
  std::vector<std::string> bench_generated;
  auto* bench_cmd = app.add_subcommand("bench", "Run a matrix of algorithms and models");
  bench_cmd->add_option("--alg", bench_algs, "Algorithms (comma separated)")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->check(CLI::IsMember({"nvi", "local-vi", "odv", "oracle"}));
  bench_cmd->add_option("--heuristic", bench_heuristics, "Heuristics for odv rows (comma separated)")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->check(CLI::IsMember({"pr", "rr", "md"}));
  bench_cmd->add_option("--generate", bench_generated, "Generated model (repeatable)")->allow_extra_args(false);
  bench_cmd->add_option("models", bench_files, "Model files");
  add_tuning_flags(*bench_cmd, bench_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  }

  try {
    if (solve_cmd->parsed()) {
      if (!valid_tau(solve_flags.tau)) {
        err << "error: --tau must lie strictly between 0 and 1\n";
        return kExitBadFlags;
      }
      if (model_path.empty() && generate_spec.empty()) {
        err << "error: a model file or --generate is required\n";
        return kExitBadFlags;
      }
      ModelSource source;
      try {
        source = generate_spec.empty() ? ModelSource::from_file(model_path) : ModelSource::from_generator(generate_spec);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadFlags;
      }
      const Report report = solve(source, settings_from(solve_flags));
      out << (solve_flags.plain ? report.to_plain() : report.to_json().dump(2) + "\n");
      return kExitOk;
    }

    if (!valid_tau(bench_flags.tau)) {
      err << "error: --tau must lie strictly between 0 and 1\n";
      return kExitBadFlags;
    }
    std::vector<ModelSource> sources;
    try {
      for (const auto& path : bench_files) sources.push_back(ModelSource::from_file(path));
      for (const auto& spec : bench_generated) sources.push_back(ModelSource::from_generator(spec));
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitBadFlags;
    }
    if (bench_heuristics.empty()) bench_heuristics.push_back(bench_flags.heuristic);

    std::vector<Report> rows;
    for (const ModelSource& source : sources) {
      for (const std::string& alg : bench_algs) {
        std::vector<std::string> heuristics{bench_flags.heuristic};
        if (alg == "odv") heuristics = bench_heuristics;
        for (const std::string& heuristic : heuristics) {
          CommonFlags cell = bench_flags;
          cell.algorithm = alg;
          cell.heuristic = heuristic;
          const SolveSettings settings = settings_from(cell);
          try {
            rows.push_back(solve(source, settings));
          } catch (const SolverGuardError& e) {
            Report refused;
            refused.algorithm = std::string(to_string(settings.algorithm));
            refused.model = source.name;
            refused.epsilon = settings.epsilon;
            refused.flags.push_back("refused");
            err << source.name << " / " << alg << ": " << e.what() << '\n';
            rows.push_back(std::move(refused));
          } catch (const OracleOverflow& e) {
            Report refused;
            refused.algorithm = "oracle";
            refused.model = source.name;
            refused.flags.push_back("refused");
            err << source.name << " / " << alg << ": " << e.what() << '\n';
            rows.push_back(std::move(refused));
          }
        }
      }
    }
    if (bench_flags.plain) {
      out << format_table(rows);
    } else {
      nlohmann::ordered_json table = nlohmann::ordered_json::array();
      for (const Report& row : rows) table.push_back(row.to_json());
      out << table.dump(2) << '\n';
    }
    return kExitOk;
  } catch (const ModelFileError& e) {
    err << "error: " << e.what() << '\n';
    for (const ParseError& error : e.errors()) err << "  " << to_string(error) << '\n';
    return kExitParseError;
  } catch (const SolverGuardError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverGuard;
  } catch (const OracleOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverGuard;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  }
}

}  // namespace mpvi
