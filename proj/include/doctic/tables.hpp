#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctic/real.hpp"

namespace doctic {

// Loaders for the reference tables shipped under data/golden. Every verify
// run compares pipeline output against these files; they are never retyped
// inline in code.

struct GoldenCensusRow {
    std::string label;
    int b3_hat = 0, b3_smoothing = 0, p4_generic = 0;
};

struct GoldenPeriodsRow {
    std::string label;
    std::vector<Real> reals, imags;
};

struct GoldenInvariantsRow {
    std::string label;
    Real tau_over_i{}, j{}, g2{}, g3{};
};

struct GoldenProportionalityRow {
    std::string label, form;
    Rat rho_re, rho_im;
    Real real_period{}, imag_period{};
};

struct GoldenLValueRow {
    std::string form;
    Real L1{}, L2{};
    bool misprint_corrected = false;
};

namespace detail {

inline std::ifstream open_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open table " + path.string());
    return in;
}

inline bool next_row(std::ifstream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r\n");
        if (b != std::string::npos && line[b] != '#') return true;
    }
    return false;
}

}  // namespace detail

inline std::vector<GoldenCensusRow> load_golden_census(const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::vector<GoldenCensusRow> rows;
    std::string line;
    while (detail::next_row(in, line)) {
        std::istringstream ls(line);
        GoldenCensusRow r;
        if (!(ls >> r.label >> r.b3_hat >> r.b3_smoothing >> r.p4_generic))
            throw std::runtime_error("bad census row: " + line);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<GoldenPeriodsRow> load_golden_periods(const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::vector<GoldenPeriodsRow> rows;
    std::string line;
    while (detail::next_row(in, line)) {
        auto bar1 = line.find('|');
        auto bar2 = line.find('|', bar1 + 1);
        if (bar1 == std::string::npos || bar2 == std::string::npos)
            throw std::runtime_error("bad periods row: " + line);
        GoldenPeriodsRow r;
        std::istringstream head(line.substr(0, bar1));
        head >> r.label;
        std::string tok;
        std::istringstream res(line.substr(bar1 + 1, bar2 - bar1 - 1));
        while (res >> tok) r.reals.push_back(Real(tok.c_str()));
        std::istringstream ims(line.substr(bar2 + 1));
        while (ims >> tok) r.imags.push_back(Real(tok.c_str()));
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<GoldenInvariantsRow> load_golden_invariants(const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::vector<GoldenInvariantsRow> rows;
    std::string line;
    while (detail::next_row(in, line)) {
        std::istringstream ls(line);
        GoldenInvariantsRow r;
        std::string t, j, g2, g3;
        if (!(ls >> r.label >> t >> j >> g2 >> g3))
            throw std::runtime_error("bad invariants row: " + line);
        r.tau_over_i = Real(t.c_str());
        r.j = Real(j.c_str());
        r.g2 = Real(g2.c_str());
        r.g3 = Real(g3.c_str());
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<GoldenProportionalityRow> load_golden_proportionality(
    const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::vector<GoldenProportionalityRow> rows;
    std::string line;
    while (detail::next_row(in, line)) {
        std::istringstream ls(line);
        GoldenProportionalityRow r;
        std::string re, im, pre, pim;
        if (!(ls >> r.label >> r.form >> re >> im >> pre >> pim))
            throw std::runtime_error("bad proportionality row: " + line);
        r.rho_re = rat_from_string(re);
        r.rho_im = rat_from_string(im);
        r.real_period = Real(pre.c_str());
        r.imag_period = Real(pim.c_str());
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<GoldenLValueRow> load_golden_lvalues(const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::vector<GoldenLValueRow> rows;
    std::string line;
    while (detail::next_row(in, line)) {
        std::istringstream ls(line);
        GoldenLValueRow r;
        std::string l1, l2, flag;
        if (!(ls >> r.form >> l1 >> l2 >> flag))
            throw std::runtime_error("bad L-value row: " + line);
        r.L1 = Real(l1.c_str());
        r.L2 = Real(l2.c_str());
        r.misprint_corrected = flag == "corrected-misprint";
        rows.push_back(r);
    }
    return rows;
}

inline std::map<std::string, std::vector<Int>> load_golden_qexp(
    const std::filesystem::path& path) {
    auto in = detail::open_table(path);
    std::map<std::string, std::vector<Int>> out;
    std::string line;
    while (detail::next_row(in, line)) {
        auto bar = line.find('|');
        if (bar == std::string::npos) throw std::runtime_error("bad qexp row: " + line);
        std::istringstream name(line.substr(0, bar)), coeffs(line.substr(bar + 1));
        std::string n, c;
        name >> n;
        std::vector<Int> v;
        while (coeffs >> c) v.push_back(Int(c));
        out[n] = v;
    }
    return out;
}

struct GoldenTables {
    std::vector<GoldenCensusRow> census;
    std::vector<GoldenPeriodsRow> periods;
    std::vector<GoldenInvariantsRow> invariants;
    std::vector<GoldenProportionalityRow> proportionality;
    std::vector<GoldenLValueRow> lvalues;
    std::map<std::string, std::vector<Int>> qexp;
};

inline GoldenTables load_golden_tables(const std::filesystem::path& dir) {
    GoldenTables g;
    g.census = load_golden_census(dir / "census.txt");
    g.periods = load_golden_periods(dir / "periods.txt");
    g.invariants = load_golden_invariants(dir / "invariants.txt");
    g.proportionality = load_golden_proportionality(dir / "proportionality.txt");
    g.lvalues = load_golden_lvalues(dir / "lvalues.txt");
    g.qexp = load_golden_qexp(dir / "qexp.txt");
    return g;
}

}  // namespace doctic
