#include "cvxcone/grid_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "cvxcone/errors.hpp"

namespace cvxcone {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("failed to format double");
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string to_csv(const GridFunction& u) {
    std::string out = "value\n";
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
        out += format_double(u.values[k]);
        out += '\n';
    }
    return out;
}

GridFunction from_csv(std::string_view text, const Grid& grid) {
    std::vector<double> values;
    std::size_t pos = 0;
    bool header_seen = false;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.find("value") != std::string_view::npos) continue;
        }
        try {
            values.push_back(parse_double(line));
        } catch (const ParseError& e) {
            throw ParseError("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!std::isfinite(values.back())) {
            throw ParseError("CSV line " + std::to_string(line_no) + ": non-finite value");
        }
    }
    if (static_cast<int>(values.size()) != grid.size()) {
        throw ParseError("CSV has " + std::to_string(values.size()) + " values, grid expects " +
                         std::to_string(grid.size()));
    }
    return GridFunction(grid, Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
}

nlohmann::json grid_to_json(const Grid& grid) {
    return {{"dim", grid.dim()}, {"n", grid.n()}, {"bounds", {grid.bounds().lo, grid.bounds().hi}}};
}

Grid grid_from_json(const nlohmann::json& j) {
    try {
        int dim = j.value("dim", 2);
        int n = j.at("n").get<int>();
        Interval b{0.0, 1.0};
        if (j.contains("bounds")) {
            b.lo = j.at("bounds").at(0).get<double>();
            b.hi = j.at("bounds").at(1).get<double>();
        }
        return Grid(dim, n, b);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad grid description: ") + e.what());
    }
}

nlohmann::json to_json(const GridFunction& u) {
    nlohmann::json values = nlohmann::json::array();
    for (Eigen::Index k = 0; k < u.values.size(); ++k) values.push_back(u.values[k]);
    return {{"grid", grid_to_json(u.grid)}, {"values", values}};
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
    Grid grid = grid_from_json(j.at("grid"));
    const auto& arr = j.at("values");
    if (!arr.is_array() || static_cast<int>(arr.size()) != grid.size()) {
        throw ParseError("values array does not match the grid size");
    }
    Vector v(grid.size());
    for (int k = 0; k < grid.size(); ++k) v[k] = arr[static_cast<std::size_t>(k)].get<double>();
    return GridFunction(grid, std::move(v));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace cvxcone
