#pragma once

#include <string>

#include <json.hpp>

#include "core/bench.hpp"

namespace destim {

/// Serializable view of a report. Wall-clock fields are deliberately left
/// out so reruns with the same seed produce byte-identical documents.
nlohmann::ordered_json report_to_json(const ExperimentReport& report);

/// Table-1 style fixed-width table (rows CRLB + estimators, columns
/// families), rendered purely from the JSON document.
std::string render_table(const nlohmann::json& report_json);

std::string report_text(const ExperimentReport& report);

}  // namespace destim
