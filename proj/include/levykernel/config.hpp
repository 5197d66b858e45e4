#pragma once

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "levykernel/levy_measure.hpp"

namespace levykernel {

/// Malformed measure document; the message names the offending field.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Build a measure from its JSON description. Relative CSV paths of custom
/// profiles resolve against `base_dir`.
LevyMeasure measure_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
LevyMeasure load_measure(const std::filesystem::path& path);
nlohmann::json measure_to_json(const LevyMeasure& nu);

/// Two-column (s, q) table; blank lines, '#' comments and one header row are skipped.
CustomProfile read_profile_csv(const std::filesystem::path& path);

/// "truncated", "tempered", "high_intensity" or "cauchy" with their reference parameters.
LevyMeasure builtin_measure(const std::string& name);

}  // namespace levykernel
