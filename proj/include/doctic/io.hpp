#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctic/arrangement.hpp"

namespace doctic {

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Arrangement file: `label = ...`, `lambda = ...`, then either
// `equation = <product expression>` or 8 lines of 4 integers.
inline Arrangement load_arrangement_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open arrangement file " + path.string());
    std::string label, equation;
    Rat lambda;
    bool have_lambda = false;
    bool axis_swap = false;
    std::optional<int> b2;
    std::vector<Vec4> matrix_rows;
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        std::string key = eq == std::string::npos ? "" : detail::trim(line.substr(0, eq));
        if (key == "label") {
            label = detail::trim(line.substr(eq + 1));
        } else if (key == "lambda") {
            lambda = rat_from_string(detail::trim(line.substr(eq + 1)));
            have_lambda = true;
        } else if (key == "axis_swap") {
            axis_swap = std::stoi(detail::trim(line.substr(eq + 1))) != 0;
        } else if (key == "b2_resolution") {
            b2 = std::stoi(detail::trim(line.substr(eq + 1)));
        } else if (key == "equation") {
            equation = detail::trim(line.substr(eq + 1));
        } else {
            // matrix row: 4 integers
            std::istringstream row(line);
            Vec4 v;
            std::string tok;
            for (int i = 0; i < 4; ++i) {
                if (!(row >> tok)) throw ParseError("bad matrix row in " + path.string() + ": " + line);
                v[i] = rat_from_string(tok);
            }
            matrix_rows.push_back(v);
        }
    }
    if (!have_lambda) throw ParseError(path.string() + ": missing lambda");
    Arrangement arr;
    if (!equation.empty())
        arr = parse_arrangement(equation, lambda, label);
    else
        arr = arrangement_from_matrix(matrix_rows, lambda, label);
    arr.axis_swap = axis_swap;
    arr.b2_resolution = b2;
    return arr;
}

inline std::vector<Arrangement> load_arrangement_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Arrangement> out;
    for (const auto& f : files) out.push_back(load_arrangement_file(f));
    // numeric label order
    std::sort(out.begin(), out.end(), [](const Arrangement& a, const Arrangement& b) {
        return std::stol(a.label) < std::stol(b.label);
    });
    return out;
}

}  // namespace doctic
