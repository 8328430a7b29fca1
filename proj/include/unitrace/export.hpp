#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "unitrace/errors.hpp"
#include "unitrace/measure.hpp"

namespace unitrace {

/// Decimal string with 17 significant digits; round-trips every double.
std::string format_real(double x);
/// Parses a decimal string; throws ConfigError.
double parse_real_string(const std::string& s);

/// Accepts a decimal string or a JSON number.
template <class Json>
double parse_real(const Json& j) {
    if (j.is_number()) return j.template get<double>();
    if (j.is_string()) return parse_real_string(j.template get<std::string>());
    throw ConfigError("expected a real number, got " + j.dump());
}

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::ordered_json measure_to_json(const AtomicMeasure& mu, std::span<const ExpSumTerm> terms,
                                       const nlohmann::ordered_json& metadata);

/// JSON document: atoms [[k0, re w, im w]], terms [[freq, re c, im c, [n_1..n_N], m]], metadata.
void export_measure(const AtomicMeasure& mu, std::span<const ExpSumTerm> terms, const std::filesystem::path& path,
                    const nlohmann::ordered_json& metadata = nlohmann::ordered_json::object());

struct MeasureDocument {
    AtomicMeasure measure;
    std::vector<ExpSumTerm> terms;
    nlohmann::ordered_json metadata;
};

MeasureDocument import_measure(const std::filesystem::path& path);

}  // namespace unitrace
