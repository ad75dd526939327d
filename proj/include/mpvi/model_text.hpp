#pragma once

#include "mpvi/mdp.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mpvi {

/// A diagnostic with a 1-based position in the input.
struct ParseError {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;
  std::string token;
};

std::string to_string(const ParseError& error);

template <class Model>
struct ParseOutcome {
  std::optional<Model> model;
  std::vector<ParseError> errors;

  bool ok() const { return model.has_value(); }
};

/// Parses the line format
///
///   mdp
///   states: <count>
///   init: <state>
///   <state> <label> <reward> -> <succ>:<prob> [<succ>:<prob> ...]
///
/// `#` starts a comment, blank lines are ignored, LF and CRLF both work.
/// Rewards and probabilities are decimals or fractions `p/q`. All errors
/// found are reported, not only the first.
ParseOutcome<Mdp> parse_model(std::string_view text);

/// Exact variant. A distribution whose sum lies within the tolerance of one
/// but not exactly one is rescaled to sum to one.
ParseOutcome<ExactMdp> parse_exact_model(std::string_view text);

/// Thrown by the file helpers; carries the parser's diagnostics.
class ModelFileError : public std::runtime_error {
 public:
  ModelFileError(const std::string& what, std::vector<ParseError> errors)
      : std::runtime_error(what), errors_(std::move(errors)) {}
  const std::vector<ParseError>& errors() const { return errors_; }

 private:
  std::vector<ParseError> errors_;
};

std::string read_text_file(const std::filesystem::path& path);
ExactMdp load_exact_model(const std::filesystem::path& path);

/// Doubles are written in their shortest round-trip form, so parse_model
/// restores every value bit for bit.
std::string serialize_model(const Mdp& mdp);
std::string serialize_model(const ExactMdp& mdp);

}  // namespace mpvi
