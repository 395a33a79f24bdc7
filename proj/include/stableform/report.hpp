#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stableform/criteria.hpp"

namespace stableform {

inline constexpr const char* kEngineVersion = "stableform 0.1.0";
inline constexpr int kReportSchema = 1;

// JSON serialization with doubles pinned to 17 significant digits so that
// identical runs produce byte-identical files.
std::string dump_pinned(const nlohmann::json& j, int indent = 2);
void write_json_file(const std::string& path, const nlohmann::json& j);

std::string config_hash(const nlohmann::json& canonical_config);

// curve CSV: header "r,value,log_value"
void write_curve_csv(const std::string& path, const RateCurve& curve);
RateCurve read_curve_csv(const std::string& path);

// generic CSV with pinned formatting
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

nlohmann::json curve_to_json(const RateCurve& curve);

}  // namespace stableform
