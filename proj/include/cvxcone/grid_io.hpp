#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cvxcone/grid.hpp"

namespace cvxcone {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

// CSV: header line "value", then one value per line in row-major node order.
std::string to_csv(const GridFunction& u);
GridFunction from_csv(std::string_view text, const Grid& grid);

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

// JSON: {"grid": {"dim", "n", "bounds": [lo, hi]}, "values": [...]}.
nlohmann::json to_json(const GridFunction& u);
GridFunction grid_function_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace cvxcone
