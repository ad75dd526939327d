#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mpvi {

/// Outcome of one solver run. Every field is always emitted; inapplicable
/// ones become null.
struct Report {
  std::string algorithm;
  std::string model;
  std::optional<double> value;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> epsilon;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> episodes;
  std::optional<std::size_t> explored_states;
  std::optional<std::size_t> explored_mecs;
  double wall_ms = 0.0;
  std::vector<std::string> flags;
  std::optional<std::string> exact;  // exact rational value, oracle only
  bool converged = false;

  nlohmann::ordered_json to_json() const;
  /// `key: value` lines in the JSON key order.
  std::string to_plain() const;
};

/// Fixed-width table, one row per report, for the bench command.
std::string format_table(const std::vector<Report>& reports);

}  // namespace mpvi
