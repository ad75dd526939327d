#include "mpvi/model_text.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace mpvi {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

std::optional<std::uint64_t> parse_index(std::string_view text) {
  if (text.empty() || text.size() > 10) return std::nullopt;
  std::uint64_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::optional<ExactMdp> run(bool renormalize) {
    std::size_t line_number = 0;
    std::size_t pos = 0;
    enum class Stage { kMagic, kStates, kInit, kBody } stage = Stage::kMagic;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos, end - pos);
      pos = end + 1;
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      const auto tokens = tokenize(line);
      if (tokens.empty()) {
        if (end == text_.size()) break;
        continue;
      }
      line_ = line_number;
      switch (stage) {
        case Stage::kMagic:
          if (tokens.size() != 1 || tokens[0].text != "mdp") {
            error(tokens[0], "expected header 'mdp'");
            return std::nullopt;
          }
          stage = Stage::kStates;
          break;
        case Stage::kStates:
          if (!header_value(tokens, "states:", num_states_)) return std::nullopt;
          if (num_states_ == 0) {
            error(tokens[1], "model needs at least one state");
            return std::nullopt;
          }
          states_line_ = line_number;
          model_.actions.resize(num_states_);
          labels_.resize(num_states_);
          stage = Stage::kInit;
          break;
        case Stage::kInit: {
          std::uint64_t init = 0;
          if (!header_value(tokens, "init:", init)) return std::nullopt;
          if (init >= num_states_) {
            error(tokens[1], "initial state out of range");
            return std::nullopt;
          }
          model_.initial = static_cast<StateId>(init);
          stage = Stage::kBody;
          break;
        }
        case Stage::kBody:
          transition_line(tokens, renormalize);
          break;
      }
      if (end == text_.size()) break;
    }

    if (stage != Stage::kBody) {
      errors_.push_back({std::max<std::size_t>(line_number, 1), 1, "incomplete header", ""});
      return std::nullopt;
    }
    // States whose lines were all rejected already carry an error.
    for (StateId s = 0; s < num_states_; ++s) {
      if (labels_[s].empty()) {
        errors_.push_back({states_line_, 1, "state " + std::to_string(s) + " has no actions", std::to_string(s)});
      }
    }
    if (!errors_.empty()) return std::nullopt;
    return std::move(model_);
  }

  std::vector<ParseError> take_errors() { return std::move(errors_); }

 private:
  void error(const Token& token, std::string message) {
    errors_.push_back({line_, token.column, std::move(message), std::string(token.text)});
  }

  bool header_value(const std::vector<Token>& tokens, std::string_view key, std::uint64_t& out) {
    if (tokens[0].text != key) {
      error(tokens[0], "expected '" + std::string(key) + "'");
      return false;
    }
    if (tokens.size() != 2) {
      error(tokens.back(), "expected exactly one value after '" + std::string(key) + "'");
      return false;
    }
    auto value = parse_index(tokens[1].text);
    if (!value) {
      error(tokens[1], "expected a non-negative integer");
      return false;
    }
    out = *value;
    return true;
  }

  void transition_line(const std::vector<Token>& tokens, bool renormalize) {
    if (tokens.size() < 5 || tokens[3].text != "->") {
      error(tokens[0], "expected '<state> <label> <reward> -> <succ>:<prob> ...'");
      return;
    }
    const std::size_t errors_before = errors_.size();
    auto state = parse_index(tokens[0].text);
    if (!state) {
      error(tokens[0], "expected a state index");
    } else if (*state >= num_states_) {
      error(tokens[0], "state " + std::string(tokens[0].text) + " out of range");
      state.reset();
    }

    const Token& label = tokens[1];
    if (state && !labels_[*state].insert(std::string(label.text)).second) {
      error(label, "duplicate action label '" + std::string(label.text) + "'");
    }

    auto reward = parse_rational(tokens[2].text);
    if (!reward) {
      error(tokens[2], "malformed reward");
    } else if (*reward < 0) {
      error(tokens[2], "negative reward");
    }

    ExactAction action{std::string(label.text), reward.value_or(0), {}};
    std::unordered_set<StateId> seen;
    Rational sum = 0;
    for (std::size_t i = 4; i < tokens.size(); ++i) {
      const Token& token = tokens[i];
      const auto colon = token.text.find(':');
      if (colon == std::string_view::npos) {
        error(token, "expected '<succ>:<prob>'");
        continue;
      }
      auto target = parse_index(token.text.substr(0, colon));
      auto probability = parse_rational(token.text.substr(colon + 1));
      if (!target) {
        error(token, "malformed successor state");
        continue;
      }
      if (*target >= num_states_) {
        error(token, "successor " + std::to_string(*target) + " out of range");
        continue;
      }
      if (!probability) {
        error(token, "malformed probability");
        continue;
      }
      if (*probability <= 0 || *probability > 1) {
        error(token, "probability outside (0, 1]");
        continue;
      }
      if (!seen.insert(static_cast<StateId>(*target)).second) {
        error(token, "duplicate successor " + std::to_string(*target));
        continue;
      }
      sum += *probability;
      action.successors.push_back({static_cast<StateId>(*target), *probability});
    }
    if (errors_.size() != errors_before) return;

    if (sum != 1) {
      const Rational deviation = abs(sum - 1);
      if (deviation > Rational(1, 1'000'000'000'000L)) {
        error(tokens[4], "distribution sums to " + format_double(to_double(sum)));
        return;
      }
      if (renormalize) {
        for (auto& t : action.successors) t.probability /= sum;
      }
    }
    model_.actions[*state].push_back(std::move(action));
  }

  std::string_view text_;
  std::size_t line_ = 0;
  std::size_t states_line_ = 0;
  std::uint64_t num_states_ = 0;
  ExactMdp model_;
  std::vector<std::unordered_set<std::string>> labels_;
  std::vector<ParseError> errors_;
};

template <class Scalar, class Format>
std::string serialize_impl(const BasicMdp<Scalar>& mdp, Format&& format) {
  std::ostringstream out;
  out << "mdp\nstates: " << mdp.num_states() << "\ninit: " << mdp.initial << "\n";
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (const auto& action : mdp.actions[s]) {
      out << s << ' ' << action.label << ' ' << format(action.reward) << " ->";
      for (const auto& t : action.successors) out << ' ' << t.target << ':' << format(t.probability);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string to_string(const ParseError& error) {
  std::string text = std::to_string(error.line) + ":" + std::to_string(error.column) + ": " + error.message;
  if (!error.token.empty()) text += " (at '" + error.token + "')";
  return text;
}

ParseOutcome<Mdp> parse_model(std::string_view text) {
  Parser parser(text);
  auto exact = parser.run(false);
  ParseOutcome<Mdp> outcome;
  outcome.errors = parser.take_errors();
  if (exact) outcome.model = to_double(*exact);
  return outcome;
}

ParseOutcome<ExactMdp> parse_exact_model(std::string_view text) {
  Parser parser(text);
  ParseOutcome<ExactMdp> outcome;
  outcome.model = parser.run(true);
  outcome.errors = parser.take_errors();
  return outcome;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError("cannot open " + path.string(), {});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExactMdp load_exact_model(const std::filesystem::path& path) {
  auto outcome = parse_exact_model(read_text_file(path));
  if (!outcome.ok()) throw ModelFileError("cannot parse " + path.string(), std::move(outcome.errors));
  return std::move(*outcome.model);
}

std::string serialize_model(const Mdp& mdp) {
  return serialize_impl(mdp, [](double value) { return format_double(value); });
}

std::string serialize_model(const ExactMdp& mdp) {
  return serialize_impl(mdp, [](const Rational& value) { return to_string(value); });
}

}  // namespace mpvi
