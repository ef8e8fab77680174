#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "phasecap/critical.hpp"
#include "phasecap/fiber.hpp"
#include "phasecap/fullcap.hpp"
#include "phasecap/reduced.hpp"

namespace phasecap {

// Numbers are written in shortest round-trip form; infinities as `inf`
// (a string in JSON).

std::string format_weight_csv(const WeightTable& table);
WeightTable parse_weight_csv(const std::string& text, double p);

std::string format_profile_csv(const Profile& profile);
Profile parse_profile_csv(const std::string& text);

nlohmann::json to_json(const ReducedReport& report);
nlohmann::json to_json(const CapacityReport& report, const Grid& grid);
nlohmann::json to_json(const RegimeReport& report);

/// Number or the strings "inf" / "-inf" / "nan".
nlohmann::json json_number(double x);
double json_to_double(const nlohmann::json& j);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace phasecap
