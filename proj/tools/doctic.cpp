#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "doctic/concord.hpp"
#include "doctic/lattice.hpp"
#include "doctic/modular.hpp"
#include "doctic/pipeline.hpp"
#include "doctic/tables.hpp"

using namespace doctic;
using nlohmann::json;

namespace {

struct Options {
    std::string arrangement = "all";
    double tol = 1e-10;
    long budget = 1l << 20;
    long max_den = 64;
    std::string form_dir = "data/forms";
    std::string data_dir = "data";
    std::string cache;
    std::string format = "text";

    bool json_lines() const { return format == "json-lines"; }
};

void emit(const Options& opt, const json& record, const std::string& text) {
    if (opt.json_lines())
        std::cout << record.dump() << "\n";
    else
        std::cout << text << "\n";
}

std::vector<Arrangement> selected_arrangements(const Options& opt) {
    auto all = load_arrangement_dir(opt.data_dir + "/arrangements");
    if (opt.arrangement == "all") return all;
    std::vector<Arrangement> out;
    for (auto& a : all)
        if (a.label == opt.arrangement) out.push_back(std::move(a));
    if (out.empty()) throw std::runtime_error("unknown arrangement label " + opt.arrangement);
    return out;
}

std::string form_file(const Options& opt, const std::string& name) {
    std::string file = name;
    auto slash = file.find('/');
    if (slash != std::string::npos) file[slash] = '_';
    return opt.form_dir + "/" + file + ".txt";
}

std::string vec4_str(const Vec4& v) {
    std::string s = "[";
    for (int i = 0; i < 4; ++i) s += (i ? "," : "") + to_string(v[i]);
    return s + "]";
}

PipelineSettings pipeline_settings(const Options& opt) {
    PipelineSettings s;
    s.tol = Real(opt.tol);
    s.budget = opt.budget;
    s.cache_path = opt.cache;
    return s;
}

// periods from the reference period table, the input to lattice/concord
std::vector<PeriodValue> golden_row_periods(const GoldenPeriodsRow& row) {
    std::vector<PeriodValue> out;
    auto add = [&](const Real& v, Axis ax) {
        PeriodValue p;
        p.value = v;
        p.axis = ax;
        p.est_rel_err = 1e-11;
        p.cell_ref = row.label;
        out.push_back(p);
    };
    for (const Real& v : row.reals) add(v, Axis::REAL);
    for (const Real& v : row.imags) add(v, Axis::IMAGINARY);
    return out;
}

int cmd_census(const Options& opt) {
    auto tables = load_golden_tables(opt.data_dir + "/golden");
    for (const auto& arr : selected_arrangements(opt)) {
        auto cen = incidence_census(arr);
        json rec{{"command", "census"},
                 {"arrangement", arr.label},
                 {"double_lines", cen.double_lines},
                 {"triple_lines", cen.triple_lines},
                 {"points_mult4", cen.points_mult4},
                 {"points_mult5", cen.points_mult5},
                 {"p4_generic", cen.p4_generic},
                 {"admissible", cen.admissible}};
        std::string extra;
        for (const auto& row : tables.census)
            if (row.label == arr.label) {
                rec["b3_hat"] = row.b3_hat;
                rec["b3_smoothing"] = betti_relations(row.b3_hat);
                extra = "  b3_hat=" + std::to_string(row.b3_hat) +
                        " b3_smoothing=" + std::to_string(betti_relations(row.b3_hat));
            }
        emit(opt, rec,
             "arrangement " + arr.label + ": double_lines=" + std::to_string(cen.double_lines) +
                 " triple_lines=" + std::to_string(cen.triple_lines) +
                 " points_mult4=" + std::to_string(cen.points_mult4) +
                 " points_mult5=" + std::to_string(cen.points_mult5) +
                 " p4_generic=" + std::to_string(cen.p4_generic) +
                 (cen.admissible ? " admissible" : " NOT-admissible") + extra);
    }
    return 0;
}

int cmd_cells(const Options& opt) {
    for (const auto& arr : selected_arrangements(opt)) {
        auto cen = incidence_census(arr);
        for (const Vec4& plane : chart_candidates(arr, cen)) {
            Chart chart = Chart::dehomogenize_at(plane, detail::plane_tag(plane));
            AffineArrangement aff;
            std::vector<std::pair<size_t, Cell3D>> cells;
            try {
                aff = apply_chart(arr, chart);
                auto lines = project_lines(aff);
                auto faces = bounded_faces(lines);
                for (size_t fi = 0; fi < faces.size(); ++fi)
                    for (auto& c : stack_cells(aff, faces[fi], lines)) cells.emplace_back(fi, c);
            } catch (const std::exception&) {
                continue;
            }
            std::string mat;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    mat += to_string(chart.matrix(r, c)) + (r == 3 && c == 3 ? "" : " ");
            for (const auto& [fi, c] : cells) {
                std::string verts, signs;
                for (const Vec2& v : c.region.vertices)
                    verts += "(" + to_string(v[0]) + "," + to_string(v[1]) + ")";
                for (int i = 0; i < 8; ++i) signs += c.sign_vector[i] > 0 ? '+' : (c.sign_vector[i] < 0 ? '-' : '0');
                json rec{{"command", "cells"},
                         {"arrangement", arr.label},
                         {"chart", chart.name},
                         {"chart_matrix", mat},
                         {"face", fi},
                         {"cell", c.id},
                         {"region", verts},
                         {"lower_sheet", c.lower_sheet},
                         {"upper_sheet", c.upper_sheet},
                         {"sign_vector", signs},
                         {"f_sign", c.f_sign},
                         {"closed", c.closed}};
                emit(opt, rec,
                     "arrangement " + arr.label + " chart " + chart.name + " matrix " + mat +
                         " face " + std::to_string(fi) + " cell " + c.id + " region " + verts +
                         " sheets " + std::to_string(c.lower_sheet) + "/" +
                         std::to_string(c.upper_sheet) + " signs " + signs + " f_sign " +
                         std::to_string(c.f_sign) + (c.closed ? " closed" : " open"));
            }
        }
    }
    return 0;
}

int cmd_periods(const Options& opt) {
    int rc = 0;
    for (const auto& arr : selected_arrangements(opt)) {
        auto cen = incidence_census(arr);
        try {
            auto res = arrangement_periods(arr, cen, pipeline_settings(opt));
            for (const auto& rec : res.records) {
                json j{{"command", "periods"},
                       {"arrangement", arr.label},
                       {"cell", rec.period.cell_ref},
                       {"chart", rec.chart_id},
                       {"value", to_string(rec.period.value, 13)},
                       {"axis", axis_name(rec.period.axis)},
                       {"est_rel_err", to_string(rec.period.est_rel_err, 3)},
                       {"evaluations", rec.period.evaluations},
                       {"from_cache", rec.from_cache},
                       {"failed", rec.failed}};
                emit(opt, j,
                     "cell " + rec.period.cell_ref + " " + axis_name(rec.period.axis) + " " +
                         to_string(rec.period.value, 13) + " est " +
                         to_string(rec.period.est_rel_err, 3) +
                         (rec.from_cache ? " (cache)" : "") + (rec.failed ? " FAILED" : ""));
                if (rec.failed) rc = 1;
            }
            for (const auto& p : res.unambiguous) {
                json j{{"command", "periods"},
                       {"arrangement", arr.label},
                       {"period", to_string(p.value, 13)},
                       {"axis", axis_name(p.axis)},
                       {"source", p.cell_ref}};
                emit(opt, j,
                     "period " + arr.label + " " + axis_name(p.axis) + " " +
                         to_string(p.value, 13) + " from " + p.cell_ref);
            }
        } catch (const std::exception& e) {
            emit(opt, json{{"command", "periods"}, {"arrangement", arr.label}, {"error", e.what()}},
                 std::string("ERROR: ") + e.what());
            rc = 1;
        }
    }
    return rc;
}

int cmd_lattice(const Options& opt) {
    auto tables = load_golden_tables(opt.data_dir + "/golden");
    int rc = 0;
    for (const auto& arr : selected_arrangements(opt)) {
        const GoldenPeriodsRow* row = nullptr;
        for (const auto& r : tables.periods)
            if (r.label == arr.label) row = &r;
        if (!row) continue;
        try {
            auto lat = lattice_generators(golden_row_periods(*row), opt.max_den);
            auto inv = elliptic_invariants(lat);
            json j{{"command", "lattice"},
                   {"arrangement", arr.label},
                   {"omega_re", to_string(lat.omega_re, 12)},
                   {"omega_im", to_string(lat.omega_im, 12)},
                   {"tau_over_i", to_string(inv.tau_over_i, 12)},
                   {"g2", to_string(inv.g2, 12)},
                   {"g3", to_string(inv.g3, 12)},
                   {"j", to_string(inv.j, 12)}};
            emit(opt, j,
                 "arrangement " + arr.label + ": omega_re=" + to_string(lat.omega_re, 12) +
                     " omega_im=" + to_string(lat.omega_im, 12) +
                     " tau/i=" + to_string(inv.tau_over_i, 12) + " g2=" + to_string(inv.g2, 12) +
                     " g3=" + to_string(inv.g3, 12) + " j=" + to_string(inv.j, 12));
        } catch (const std::exception& e) {
            emit(opt, json{{"command", "lattice"}, {"arrangement", arr.label}, {"error", e.what()}},
                 std::string("ERROR: ") + e.what());
            rc = 1;
        }
    }
    return rc;
}

int cmd_lvalues(const Options& opt) {
    auto tables = load_golden_tables(opt.data_dir + "/golden");
    int rc = 0;
    for (const auto& [name, qexp] : tables.qexp) {
        try {
            auto form = load_form(form_file(opt, name));
            auto a = extend_coefficients(form, long(qexp.size()));
            for (size_t n = 1; n <= qexp.size(); ++n)
                if (a[n] != qexp[n - 1])
                    throw std::runtime_error("q-expansion checksum failed for " + name + " at a_" +
                                             std::to_string(n));
            auto v = l_values(form);
            json j{{"command", "lvalues"},
                   {"form", name},
                   {"level", form.level},
                   {"L1", to_string(v.L1, 29)},
                   {"L2", to_string(v.L2, 29)},
                   {"L3", to_string(v.L3, 29)}};
            emit(opt, j,
                 "form " + name + " (level " + std::to_string(form.level) +
                     "): L1=" + to_string(v.L1, 29) + " L2=" + to_string(v.L2, 29) +
                     " L3=" + to_string(v.L3, 29));
        } catch (const std::exception& e) {
            emit(opt, json{{"command", "lvalues"}, {"form", name}, {"error", e.what()}},
                 std::string("ERROR: ") + e.what());
            rc = 1;
        }
    }
    return rc;
}

struct VerifyState {
    const Options& opt;
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        if (!ok) ++failures;
        json j{{"command", "verify"}, {"check", name}, {"status", ok ? "pass" : "FAIL"}};
        if (!detail.empty()) j["detail"] = detail;
        emit(opt, j,
             std::string(ok ? "pass  " : "FAIL  ") + name + (detail.empty() ? "" : "  " + detail));
    }
};

int cmd_verify(const Options& opt) {
    auto tables = load_golden_tables(opt.data_dir + "/golden");
    auto arrs = load_arrangement_dir(opt.data_dir + "/arrangements");
    VerifyState st{opt};

    // census against the reference table
    for (const auto& row : tables.census) {
        const Arrangement* arr = nullptr;
        for (const auto& a : arrs)
            if (a.label == row.label) arr = &a;
        if (!arr) {
            st.check("census/" + row.label, false, "arrangement file missing");
            continue;
        }
        auto cen = incidence_census(*arr);
        st.check("census/" + row.label, cen.p4_generic == row.p4_generic && cen.admissible,
                 "p4_generic=" + std::to_string(cen.p4_generic) + " expected " +
                     std::to_string(row.p4_generic));
        st.check("betti/" + row.label, betti_relations(row.b3_hat) == row.b3_smoothing);
    }

    // q-expansion checksums and L-values
    std::map<std::string, LValues> lvalues;
    for (const auto& [name, qexp] : tables.qexp) {
        try {
            auto form = load_form(form_file(opt, name));
            auto a = extend_coefficients(form, long(qexp.size()));
            bool ok = true;
            for (size_t n = 1; n <= qexp.size(); ++n) ok = ok && a[n] == qexp[n - 1];
            st.check("qexp/" + name, ok);
            lvalues[name] = l_values(form);
        } catch (const std::exception& e) {
            st.check("qexp/" + name, false, e.what());
        }
    }
    for (const auto& row : tables.lvalues) {
        auto it = lvalues.find(row.form);
        if (it == lvalues.end()) {
            st.check("lvalue/" + row.form, false, "form not loaded");
            continue;
        }
        bool ok1 = abs(it->second.L1 - row.L1) < 1e-25 * row.L1;
        bool ok2 = abs(it->second.L2 - row.L2) < 1e-25 * row.L2;
        st.check("lvalue/" + row.form, ok1 && ok2,
                 row.misprint_corrected ? "checked against the corrected value" : "");
    }

    // lattice invariants from the reference period table
    for (const auto& row : tables.periods) {
        const GoldenInvariantsRow* iref = nullptr;
        for (const auto& r : tables.invariants)
            if (r.label == row.label) iref = &r;
        try {
            auto lat = lattice_generators(golden_row_periods(row), opt.max_den);
            auto inv = elliptic_invariants(lat);
            bool ok = iref && abs(inv.tau_over_i - iref->tau_over_i) < 5e-9 * iref->tau_over_i &&
                      abs(inv.j - iref->j) < 5e-9 * abs(iref->j) &&
                      abs(inv.g2 - iref->g2) < 5e-9 * abs(iref->g2) &&
                      (iref->g3 == 0 ? abs(inv.g3) < 1e-9
                                     : abs(inv.g3 - iref->g3) < 5e-9 * abs(iref->g3));
            st.check("invariants/" + row.label, ok);
        } catch (const std::exception& e) {
            st.check("invariants/" + row.label, false, e.what());
        }
    }

    // proportionality table
    for (const auto& row : tables.proportionality) {
        auto it = lvalues.find(row.form);
        const GoldenPeriodsRow* prow = nullptr;
        for (const auto& r : tables.periods)
            if (r.label == row.label) prow = &r;
        if (it == lvalues.end() || !prow) {
            st.check("proportionality/" + row.label, false, "missing inputs");
            continue;
        }
        try {
            auto lat = lattice_generators(golden_row_periods(*prow), opt.max_den);
            auto rep = match_periods(lat, it->second, opt.max_den, Real(1e-6), row.label, row.form);
            bool ok = rep.ok() && *rep.rho_re == row.rho_re && *rep.rho_im == row.rho_im &&
                      rep.residual_re < 1e-8 && rep.residual_im < 1e-8;
            st.check("proportionality/" + row.label, ok,
                     rep.ok() ? "rho_re=" + to_string(to_real(*rep.rho_re), 4) +
                                    " rho_im=" + to_string(to_real(*rep.rho_im), 4)
                              : "unrecognized ratio");
        } catch (const std::exception& e) {
            st.check("proportionality/" + row.label, false, e.what());
        }
    }

    // period integration for an explicitly selected arrangement
    if (opt.arrangement != "all") {
        const GoldenPeriodsRow* prow = nullptr;
        for (const auto& r : tables.periods)
            if (r.label == opt.arrangement) prow = &r;
        const Arrangement* arr = nullptr;
        for (const auto& a : arrs)
            if (a.label == opt.arrangement) arr = &a;
        if (!arr || !prow) {
            st.check("periods/" + opt.arrangement, false, "unknown arrangement");
        } else {
            try {
                auto cen = incidence_census(*arr);
                auto res = arrangement_periods(*arr, cen, pipeline_settings(opt));
                // every reference value must be a small rational multiple of
                // a computed unambiguous period on the same axis
                auto generated = [&](const Real& target, Axis ax) {
                    for (const auto& p : res.unambiguous) {
                        if (p.axis != ax) continue;
                        for (int num = 1; num <= 6; ++num)
                            for (int den = 1; den <= 6; ++den)
                                if (abs(target - p.value * num / den) < 100 * Real(opt.tol) * target)
                                    return true;
                    }
                    return false;
                };
                bool ok = true;
                for (const Real& v : prow->reals) ok = ok && generated(v, Axis::REAL);
                for (const Real& v : prow->imags) ok = ok && generated(v, Axis::IMAGINARY);
                st.check("periods/" + opt.arrangement, ok,
                         std::to_string(res.unambiguous.size()) + " unambiguous periods");
            } catch (const std::exception& e) {
                st.check("periods/" + opt.arrangement, false, e.what());
            }
        }
    }

    emit(opt, json{{"command", "verify"}, {"failures", st.failures}},
         st.failures ? "verify: " + std::to_string(st.failures) + " check(s) FAILED"
                     : "verify: all checks passed");
    return st.failures ? 1 : 0;
}

int cmd_report(const Options& opt) {
    auto tables = load_golden_tables(opt.data_dir + "/golden");
    auto arrs = load_arrangement_dir(opt.data_dir + "/arrangements");
    std::printf("%-4s %-5s %-9s %-15s %-15s %-15s %-7s %-7s\n", "No", "p4", "form", "omega_re",
                "omega_im", "tau/i", "rho_re", "rho_im");
    int rc = 0;
    for (const auto& arr : arrs) {
        auto cen = incidence_census(arr);
        const GoldenPeriodsRow* prow = nullptr;
        for (const auto& r : tables.periods)
            if (r.label == arr.label) prow = &r;
        const GoldenProportionalityRow* crow = nullptr;
        for (const auto& r : tables.proportionality)
            if (r.label == arr.label) crow = &r;
        if (!prow || !crow) continue;
        try {
            auto lat = lattice_generators(golden_row_periods(*prow), opt.max_den);
            auto inv = elliptic_invariants(lat);
            auto form = load_form(form_file(opt, crow->form));
            auto rep = match_periods(lat, l_values(form), opt.max_den, Real(1e-6), arr.label,
                                     crow->form);
            if (opt.json_lines()) {
                json j{{"command", "report"},
                       {"arrangement", arr.label},
                       {"p4_generic", cen.p4_generic},
                       {"form", crow->form},
                       {"omega_re", to_string(lat.omega_re, 12)},
                       {"omega_im", to_string(lat.omega_im, 12)},
                       {"tau_over_i", to_string(inv.tau_over_i, 12)},
                       {"g2", to_string(inv.g2, 12)},
                       {"g3", to_string(inv.g3, 12)},
                       {"j", to_string(inv.j, 12)},
                       {"rho_re", rep.rho_re ? to_string(to_real(*rep.rho_re), 6) : "NONE"},
                       {"rho_im", rep.rho_im ? to_string(to_real(*rep.rho_im), 6) : "NONE"}};
                std::cout << j.dump() << "\n";
            } else {
                std::printf("%-4s %-5d %-9s %-15s %-15s %-15s %-7s %-7s\n", arr.label.c_str(),
                            cen.p4_generic, crow->form.c_str(),
                            to_string(lat.omega_re, 12).c_str(),
                            to_string(lat.omega_im, 12).c_str(),
                            to_string(inv.tau_over_i, 12).c_str(),
                            rep.rho_re ? to_string(to_real(*rep.rho_re), 4).c_str() : "NONE",
                            rep.rho_im ? to_string(to_real(*rep.rho_im), 4).c_str() : "NONE");
            }
            if (!rep.ok()) rc = 1;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "report: arrangement %s failed: %s\n", arr.label.c_str(),
                         e.what());
            rc = 1;
        }
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"period computations for double octic Calabi-Yau threefolds"};
    app.require_subcommand(1);
    app.fallthrough();  // allow the shared flags after the subcommand name
    Options opt;
    app.add_option("--arrangement", opt.arrangement, "arrangement label or 'all'");
    app.add_option("--tol", opt.tol, "relative quadrature tolerance");
    app.add_option("--budget", opt.budget, "integrand evaluation budget per cell");
    app.add_option("--max-den", opt.max_den, "largest denominator for rational recognition");
    app.add_option("--form-dir", opt.form_dir, "directory with modular form coefficient files");
    app.add_option("--data-dir", opt.data_dir, "data directory (arrangements, golden tables)");
    app.add_option("--cache", opt.cache, "period cache file");
    app.add_option("--format", opt.format, "output format: text or json-lines")
        ->check(CLI::IsMember({"text", "json-lines"}));

    auto* census = app.add_subcommand("census", "incidence census per arrangement");
    auto* cells = app.add_subcommand("cells", "polyhedral cell dump per chart");
    auto* periods = app.add_subcommand("periods", "integrate admissible cell periods");
    auto* lattice = app.add_subcommand("lattice", "period lattice generators and invariants");
    auto* lvalues = app.add_subcommand("lvalues", "critical L-values of the assigned forms");
    auto* verify = app.add_subcommand("verify", "compare all stages against the reference tables");
    auto* report = app.add_subcommand("report", "combined summary table");

    CLI11_PARSE(app, argc, argv);
    try {
        if (census->parsed()) return cmd_census(opt);
        if (cells->parsed()) return cmd_cells(opt);
        if (periods->parsed()) return cmd_periods(opt);
        if (lattice->parsed()) return cmd_lattice(opt);
        if (lvalues->parsed()) return cmd_lvalues(opt);
        if (verify->parsed()) return cmd_verify(opt);
        if (report->parsed()) return cmd_report(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
