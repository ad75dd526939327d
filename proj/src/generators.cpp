#include "mpvi/generators.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace mpvi {

namespace {

constexpr std::uint64_t kMaxStates = 100'000'000;

std::uint64_t parse_count(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
    throw std::invalid_argument(std::string(what) + " must be a positive integer");
  }
  return value;
}

ExactAction make(std::string label, const Rational& reward, std::vector<BasicTransition<Rational>> successors) {
  // Merge coinciding targets and keep them sorted.
  std::sort(successors.begin(), successors.end(), [](const auto& a, const auto& b) { return a.target < b.target; });
  std::vector<BasicTransition<Rational>> merged;
  for (auto& t : successors) {
    if (t.probability == 0) continue;
    if (!merged.empty() && merged.back().target == t.target) {
      merged.back().probability += t.probability;
    } else {
      merged.push_back(std::move(t));
    }
  }
  return {std::move(label), reward, std::move(merged)};
}

std::vector<ExactAction> rare_branch(const GeneratorSpec& spec, StateId s) {
  const Rational half(1, 2);
  const std::uint64_t n = spec.first;
  if (s == 0) return {make("go", 0, {{1, Rational(1) - spec.probability}, {3, spec.probability}})};
  if (s == 1) return {make("a", 10, {{1, half}, {2, half}})};
  if (s == 2) return {make("a", 6, {{1, half}, {2, half}})};
  const std::uint64_t i = s - 3;
  const auto next = static_cast<StateId>(3 + (i + 1) % n);
  return {make("a", static_cast<unsigned long>(i % 4), {{next, half}, {3, half}})};
}

Rational mec_chain_reward(std::uint64_t mec, std::uint64_t position) {
  return static_cast<unsigned long>(1 + (mec + 2 * position) % 7);
}

std::vector<ExactAction> mec_chain(const GeneratorSpec& spec, StateId s) {
  const std::uint64_t m = spec.first;
  const std::uint64_t k = spec.second;
  const std::uint64_t block = s / (k + 1);
  const std::uint64_t offset = s % (k + 1);
  const auto first = static_cast<StateId>(block * (k + 1) + 1);
  if (offset == 0) return {make("enter", 0, {{first, 1}})};
  const std::uint64_t j = offset - 1;
  const auto self = static_cast<StateId>(s);
  const auto next = static_cast<StateId>(first + (j + 1) % k);
  std::vector<ExactAction> result;
  if (k == 1) {
    result.push_back(make("a", mec_chain_reward(block, j), {{self, 1}}));
  } else {
    result.push_back(make("a", mec_chain_reward(block, j), {{next, Rational(1, 2)}, {self, Rational(1, 2)}}));
  }
  if (j == 0 && block + 1 < m) {
    result.push_back(make("leave", 0, {{static_cast<StateId>((block + 1) * (k + 1)), 1}}));
  }
  return result;
}

Rational grid_reward(std::uint64_t x, std::uint64_t y, unsigned direction) {
  return static_cast<unsigned long>((x + 2 * y + direction) % 4);
}

std::vector<ExactAction> grid(const GeneratorSpec& spec, StateId s) {
  const std::uint64_t w = spec.first;
  const std::uint64_t h = spec.second;
  const std::uint64_t x = s % w;
  const std::uint64_t y = s / w;
  struct Move {
    const char* label;
    long dx;
    long dy;
  };
  static constexpr Move kMoves[] = {{"N", 0, -1}, {"S", 0, 1}, {"E", 1, 0}, {"W", -1, 0}};
  std::vector<ExactAction> result;
  for (unsigned d = 0; d < 4; ++d) {
    const long nx = static_cast<long>(x) + kMoves[d].dx;
    const long ny = static_cast<long>(y) + kMoves[d].dy;
    const bool inside = nx >= 0 && ny >= 0 && nx < static_cast<long>(w) && ny < static_cast<long>(h);
    const auto target = inside ? static_cast<StateId>(static_cast<std::uint64_t>(ny) * w + static_cast<std::uint64_t>(nx))
                               : static_cast<StateId>(s);
    result.push_back(make(kMoves[d].label, grid_reward(x, y, d), {{target, Rational(3, 4)}, {s, Rational(1, 4)}}));
  }
  return result;
}

class GeneratedLazyModel final : public LazyModel {
 public:
  explicit GeneratedLazyModel(GeneratorSpec spec)
      : spec_(std::move(spec)), r_max_(to_double(generated_max_reward(spec_))), size_(mpvi::num_states(spec_)) {}

  StateId initial() const override { return 0; }
  double max_reward() const override { return r_max_; }
  std::optional<std::size_t> num_states() const override { return size_; }

  std::vector<Action> actions(StateId state) const override {
    std::vector<Action> result;
    for (const auto& exact : generated_actions(spec_, state)) {
      Action action{exact.label, to_double(exact.reward), {}};
      for (const auto& t : exact.successors) action.successors.push_back({t.target, to_double(t.probability)});
      result.push_back(std::move(action));
    }
    return result;
  }

 private:
  GeneratorSpec spec_;
  double r_max_;
  std::size_t size_;
};

}  // namespace

std::string GeneratorSpec::to_string() const {
  switch (family) {
    case Family::kRareBranch:
      return "rare-branch:" + std::to_string(first) + "," + format_double(mpvi::to_double(probability));
    case Family::kMecChain:
      return "mec-chain:" + std::to_string(first) + "," + std::to_string(second);
    case Family::kGrid:
      return "grid:" + std::to_string(first) + "," + std::to_string(second);
  }
  return {};
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("generator spec must look like family:a,b");
  const std::string_view family = text.substr(0, colon);
  const std::string_view params = text.substr(colon + 1);
  const auto comma = params.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("generator spec needs two parameters");
  const std::string_view a = params.substr(0, comma);
  const std::string_view b = params.substr(comma + 1);

  GeneratorSpec spec;
  if (family == "rare-branch") {
    spec.family = GeneratorSpec::Family::kRareBranch;
    spec.first = parse_count(a, "n");
    auto p = parse_rational(b);
    if (!p || *p <= 0 || *p > 1) throw std::invalid_argument("p must lie in (0, 1]");
    spec.probability = *p;
  } else if (family == "mec-chain") {
    spec.family = GeneratorSpec::Family::kMecChain;
    spec.first = parse_count(a, "m");
    spec.second = parse_count(b, "k");
  } else if (family == "grid") {
    spec.family = GeneratorSpec::Family::kGrid;
    spec.first = parse_count(a, "w");
    spec.second = parse_count(b, "h");
  } else {
    throw std::invalid_argument("unknown generator family '" + std::string(family) + "'");
  }
  if (num_states(spec) > kMaxStates) throw std::invalid_argument("generated model too large");
  return spec;
}

std::size_t num_states(const GeneratorSpec& spec) {
  switch (spec.family) {
    case GeneratorSpec::Family::kRareBranch:
      return spec.first + 3;
    case GeneratorSpec::Family::kMecChain:
      return spec.first * (spec.second + 1);
    case GeneratorSpec::Family::kGrid:
      return spec.first * spec.second;
  }
  return 0;
}

std::vector<ExactAction> generated_actions(const GeneratorSpec& spec, StateId state) {
  if (state >= num_states(spec)) throw std::out_of_range("generated state out of range");
  switch (spec.family) {
    case GeneratorSpec::Family::kRareBranch:
      return rare_branch(spec, state);
    case GeneratorSpec::Family::kMecChain:
      return mec_chain(spec, state);
    case GeneratorSpec::Family::kGrid:
      return grid(spec, state);
  }
  return {};
}

Rational generated_max_reward(const GeneratorSpec& spec) {
  Rational best = 0;
  switch (spec.family) {
    case GeneratorSpec::Family::kRareBranch:
      return 10;
    case GeneratorSpec::Family::kMecChain:
      for (std::uint64_t i = 0; i < std::min<std::uint64_t>(spec.first, 7); ++i) {
        for (std::uint64_t j = 0; j < std::min<std::uint64_t>(spec.second, 7); ++j) {
          best = std::max(best, mec_chain_reward(i, j));
        }
      }
      return best;
    case GeneratorSpec::Family::kGrid:
      for (std::uint64_t x = 0; x < std::min<std::uint64_t>(spec.first, 4); ++x) {
        for (std::uint64_t y = 0; y < std::min<std::uint64_t>(spec.second, 2); ++y) {
          for (unsigned d = 0; d < 4; ++d) best = std::max(best, grid_reward(x, y, d));
        }
      }
      return best;
  }
  return best;
}

ExactMdp generate_exact(const GeneratorSpec& spec) {
  ExactMdp mdp;
  mdp.initial = 0;
  const std::size_t n = num_states(spec);
  mdp.actions.reserve(n);
  for (std::size_t s = 0; s < n; ++s) mdp.actions.push_back(generated_actions(spec, static_cast<StateId>(s)));
  return mdp;
}

Mdp generate(const GeneratorSpec& spec) { return to_double(generate_exact(spec)); }

std::unique_ptr<LazyModel> generate_lazy(const GeneratorSpec& spec) {
  return std::make_unique<GeneratedLazyModel>(spec);
}

}  // namespace mpvi
