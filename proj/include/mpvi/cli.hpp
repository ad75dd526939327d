#pragma once

#include "mpvi/generators.hpp"
#include "mpvi/ondemand_vi.hpp"
#include "mpvi/report.hpp"
#include "mpvi/vi.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mpvi {

enum ExitCode : int {
  kExitOk = 0,
  kExitParseError = 1,
  kExitBadFlags = 2,
  kExitSolverGuard = 3,
};

/// A model named on the command line: a file or a generator spec.
struct ModelSource {
  std::string name;
  std::string text;                     // file contents
  std::optional<GeneratorSpec> generator;

  static ModelSource from_file(const std::string& path);
  static ModelSource from_generator(const std::string& spec);

  Mdp model() const;
  ExactMdp exact_model() const;
  std::unique_ptr<LazyModel> lazy_model() const;
};

enum class Algorithm { kNaiveVi, kLocalVi, kOnDemandVi, kOracle };

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct SolveSettings {
  Algorithm algorithm = Algorithm::kLocalVi;
  StoppingCriterion criterion = StoppingCriterion::kSpan;
  double epsilon = 1e-6;
  Heuristic heuristic = Heuristic::kMaxDifference;
  unsigned k = 6;
  double tau = 0.95;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_iters;
  std::optional<double> timeout_ms;
  double oracle_limit = 1e6;
};

/// Runs one algorithm on one model. Throws SolverGuardError or
/// OracleOverflow when the algorithm refuses the model.
Report solve(const ModelSource& source, const SolveSettings& settings);

/// Entry point of the `mpvi` tool; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpvi
