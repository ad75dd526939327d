#include "mpvi/report.hpp"

#include "mpvi/rational.hpp"

#include <iomanip>
#include <sstream>

namespace mpvi {

namespace {

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

std::string plain_value(const nlohmann::ordered_json& value) {
  if (value.is_null()) return "-";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_float()) return format_double(value.get<double>());
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ",";
      joined += item.get<std::string>();
    }
    return joined.empty() ? "-" : joined;
  }
  return value.dump();
}

}  // namespace

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json json;
  json["algorithm"] = algorithm;
  json["model"] = model;
  json["value"] = optional_json(value);
  json["lower"] = optional_json(lower);
  json["upper"] = optional_json(upper);
  json["epsilon"] = optional_json(epsilon);
  json["iterations"] = optional_json(iterations);
  json["episodes"] = optional_json(episodes);
  json["explored_states"] = optional_json(explored_states);
  json["explored_mecs"] = optional_json(explored_mecs);
  json["wall_ms"] = wall_ms;
  json["flags"] = flags;
  json["exact"] = optional_json(exact);
  json["converged"] = converged;
  return json;
}

std::string Report::to_plain() const {
  std::ostringstream out;
  const auto json = to_json();
  for (const auto& [key, value] : json.items()) out << key << ": " << plain_value(value) << '\n';
  return out.str();
}

std::string format_table(const std::vector<Report>& reports) {
  static const char* const kColumns[] = {"algorithm", "model", "value", "lower", "upper", "iterations", "episodes",
                                         "explored_states", "explored_mecs", "wall_ms", "flags"};
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const char* column : kColumns) width.push_back(std::string(column).size());
  for (const Report& report : reports) {
    const auto json = report.to_json();
    std::vector<std::string> row;
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      std::string cell = plain_value(json[kColumns[c]]);
      width[c] = std::max(width[c], cell.size());
      row.push_back(std::move(cell));
    }
    cells.push_back(std::move(row));
  }
  std::ostringstream out;
  auto emit = [&](auto&& at) {
    for (std::size_t c = 0; c < std::size(kColumns); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << at(c);
      out << (c + 1 < std::size(kColumns) ? "  " : "\n");
    }
  };
  emit([&](std::size_t c) { return std::string(kColumns[c]); });
  for (const auto& row : cells) emit([&](std::size_t c) { return row[c]; });
  return out.str();
}

}  // namespace mpvi
