// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failures. Run from the repository root so the data/ paths resolve.

#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "doctic/concord.hpp"
#include "doctic/io.hpp"
#include "doctic/lattice.hpp"
#include "doctic/modular.hpp"
#include "doctic/pipeline.hpp"
#include "doctic/tables.hpp"

using namespace doctic;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
};

std::string form_path(const std::string& name) {
    std::string file = name;
    file[file.find('/')] = '_';
    return "data/forms/" + file + ".txt";
}

Arrangement arr_by_label(const std::string& label) {
    return load_arrangement_file("data/arrangements/arr" + label + ".txt");
}

std::vector<PeriodValue> golden_row_periods(const GoldenTables& g, const std::string& label) {
    std::vector<PeriodValue> out;
    for (const auto& row : g.periods) {
        if (row.label != label) continue;
        auto add = [&](const Real& v, Axis ax) {
            PeriodValue p;
            p.value = v;
            p.axis = ax;
            p.est_rel_err = 1e-11;
            p.cell_ref = label;
            out.push_back(p);
        };
        for (const Real& v : row.reals) add(v, Axis::REAL);
        for (const Real& v : row.imags) add(v, Axis::IMAGINARY);
    }
    return out;
}

bool generated_by(const std::vector<PeriodValue>& periods, const Real& target, Axis ax,
                  const Real& rel_tol) {
    for (const auto& p : periods) {
        if (p.axis != ax) continue;
        for (int num = 1; num <= 6; ++num)
            for (int den = 1; den <= 6; ++den)
                if (abs(target - p.value * num / den) < rel_tol * target) return true;
    }
    return false;
}

int run(const std::string& name, const std::function<void(Check&)>& body) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << name << ": " << (c.ok ? "PASS" : "FAIL") << " [" << ms << " ms]";
    if (!c.ok) std::cout << " -- " << c.detail.str();
    std::cout << std::endl;
    return c.ok ? 0 : 1;
}

}  // namespace

int main() {
    GoldenTables g = load_golden_tables("data/golden");
    int failures = 0;

    // shared between criteria 3 and 4
    std::vector<ArrangementPeriods> computed;

    failures += run("criterion 1 (incidence census)", [&](Check& c) {
        c.require(g.census.size() == 11, "expected 11 census rows");
        for (const auto& row : g.census) {
            auto t0 = std::chrono::steady_clock::now();
            auto arr = arr_by_label(row.label);
            auto cen = incidence_census(arr);
            auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            c.require(cen.admissible, "arrangement " + row.label + " not admissible");
            c.require(cen.p4_generic == row.p4_generic,
                      "arrangement " + row.label + " p4 count " + std::to_string(cen.p4_generic) +
                          " != " + std::to_string(row.p4_generic));
            c.require(betti_relations(row.b3_hat) == 2 * row.b3_hat - 2,
                      "betti relation mismatch for " + row.label);
            c.require(ms < 1000, "census for " + row.label + " took " + std::to_string(ms) + " ms");
        }
    });

    failures += run("criterion 2 (worked-example cell decomposition)", [&](Check& c) {
        auto arr = arr_by_label("1");
        auto chart = Chart::dehomogenize_at(Vec4{1, 0, 0, 1}, "t->t-x");
        auto aff = apply_chart(arr, chart);
        c.require(aff.det_factor == 1, "chart determinant factor != 1");
        std::multiset<Vec4> got;
        for (int i = 0; i < 8; ++i)
            if (aff.forms[i].kind != AffineForm::Kind::Infinity) got.insert(aff.forms[i].coeffs);
        std::multiset<Vec4> want = {Vec4{1, 0, 0, 0}, Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0},
                                    Vec4{-1, 0, 0, 1}, Vec4{1, 1, 0, 0}, Vec4{0, 1, 1, 0},
                                    Vec4{-1, 0, 1, 1}};
        c.require(got == want, "affine factors differ from x,y,z,1-x,x+y,y+z,-x+z+1");
        auto lines = project_lines(aff);
        c.require(lines.size() == 5, "expected 5 projected lines, got " +
                                         std::to_string(lines.size()));
        auto faces = bounded_faces(lines);
        c.require(faces.size() == 2, "expected 2 bounded faces");
        int closed = 0, open = 0;
        for (const auto& face : faces)
            for (auto& cell : stack_cells(aff, face, lines)) (cell.closed ? closed : open)++;
        c.require(closed == 3, "expected 3 closed cells, got " + std::to_string(closed));
        c.require(open == 1, "expected 1 non-closed cell flagged, got " + std::to_string(open));
    });

    failures += run("criterion 3 (periods by direct integration)", [&](Check& c) {
        struct Job {
            std::string label;
            Real tol;
            Real bound;
        };
        for (const Job& job : {Job{"1", Real(1e-9), Real(1e-7)},
                               Job{"245", Real(1e-8), Real(1e-6)}}) {
            auto arr = arr_by_label(job.label);
            auto cen = incidence_census(arr);
            PipelineSettings s;
            s.tol = job.tol;
            s.budget = 1l << 26;
            auto res = arrangement_periods(arr, cen, s);
            computed.push_back(res);
            for (const auto& row : g.periods) {
                if (row.label != job.label) continue;
                for (const Real& v : row.reals)
                    c.require(generated_by(res.unambiguous, v, Axis::REAL, job.bound),
                              "arrangement " + job.label + " real value not generated");
                for (const Real& v : row.imags)
                    c.require(generated_by(res.unambiguous, v, Axis::IMAGINARY, job.bound),
                              "arrangement " + job.label + " imaginary value not generated");
            }
        }
    });

    failures += run("criterion 4 (rational period ratios)", [&](Check& c) {
        c.require(!computed.empty(), "no computed periods available (criterion 3 crashed?)");
        for (const auto& res : computed) {
            for (size_t i = 0; i < res.unambiguous.size(); ++i)
                for (size_t j = i + 1; j < res.unambiguous.size(); ++j) {
                    const auto& a = res.unambiguous[i];
                    const auto& b = res.unambiguous[j];
                    if (a.axis != b.axis) continue;
                    auto r = recognize_rational(a.value, b.value, 64, Real(1e-5));
                    c.require(r.has_value(), "arrangement " + res.label + " ratio " + a.cell_ref +
                                                 " / " + b.cell_ref + " not rational");
                }
        }
    });

    failures += run("criterion 5 (lattice invariants, 9 digits)", [&](Check& c) {
        c.require(g.invariants.size() == 11, "expected 11 invariant rows");
        for (const auto& row : g.invariants) {
            auto lat = lattice_generators(golden_row_periods(g, row.label));
            auto inv = elliptic_invariants(lat);
            auto digits = [&](const Real& got, const Real& want, const char* what) {
                // absolute floor for table entries printed as exact zeros
                c.require(abs(got - want) < Real(5e-9) * abs(want) + Real(1e-9),
                          "arrangement " + row.label + " " + what + " beyond 9 digits");
            };
            digits(inv.tau_over_i, row.tau_over_i, "tau/i");
            digits(inv.j, row.j, "j");
            digits(inv.g2, row.g2, "g2");
            digits(inv.g3, row.g3, "g3");
        }
    });

    failures += run("criterion 6 (L-values, 25 digits)", [&](Check& c) {
        c.require(g.lvalues.size() == 5, "expected 5 L-value rows");
        for (const auto& row : g.lvalues) {
            auto form = load_form(form_path(row.form));
            auto lv = l_values(form);
            c.require(abs(lv.L1 - row.L1) < Real(1e-24) * row.L1,
                      "L(" + row.form + ",1) beyond 25 digits");
            c.require(abs(lv.L2 - row.L2) < Real(1e-24) * row.L2,
                      "L(" + row.form + ",2) beyond 25 digits");
            // functional equation at the center and its corollary
            c.require(abs(lv.lambda1 - lv.lambda3) < Real(1e-28),
                      "Lambda(" + row.form + ",1) != Lambda(" + row.form + ",3)");
            c.require(abs(Real(form.level) * lv.L3 - 2 * pi_real() * pi_real() * lv.L1) <
                          Real(1e-20),
                      "N*L(" + row.form + ",3) != 2 pi^2 L(" + row.form + ",1)");
        }
    });

    failures += run("criterion 7 (period/L-value commensurability)", [&](Check& c) {
        c.require(g.proportionality.size() == 11, "expected 11 proportionality rows");
        for (const auto& row : g.proportionality) {
            auto lat = lattice_generators(golden_row_periods(g, row.label));
            auto lv = l_values(load_form(form_path(row.form)));
            auto rep = match_periods(lat, lv, 64, Real(1e-6), row.label, row.form);
            c.require(rep.ok(), "arrangement " + row.label + " has no rational match");
            if (!rep.ok()) continue;
            c.require(*rep.rho_re == row.rho_re, "arrangement " + row.label + " rho_re differs");
            c.require(*rep.rho_im == row.rho_im, "arrangement " + row.label + " rho_im differs");
            c.require(rep.residual_re < 1e-8 && rep.residual_im < 1e-8,
                      "arrangement " + row.label + " residual above 1e-8");
        }
    });

    failures += run("criterion 8 (property checks)", [&](Check& c) {
        // quadrature scaling law and axis swap under lambda -> -4 lambda
        AffineArrangement aff;
        aff.lambda = 1;
        aff.det_factor = 1;
        aff.chart = Chart::identity();
        std::array<Vec4, 8> coeffs = {Vec4{1, 0, 0, 0}, Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0},
                                      Vec4{0, 0, 1, -1}, Vec4{0, 0, 0, 1}, Vec4{0, 0, 0, 1},
                                      Vec4{0, 0, 0, 1}, Vec4{0, 0, 0, 1}};
        for (int i = 0; i < 8; ++i) {
            aff.forms[i].coeffs = coeffs[i];
            aff.forms[i].source = i;
            const Vec4& cf = coeffs[i];
            if (cf[0] == 0 && cf[1] == 0 && cf[2] == 0) {
                aff.forms[i].kind = AffineForm::Kind::Infinity;
                aff.excluded.push_back(i);
            } else if (cf[2] == 0) {
                aff.forms[i].kind = AffineForm::Kind::Vertical;
                aff.vertical.push_back(i);
            } else {
                aff.forms[i].kind = AffineForm::Kind::Graph;
                aff.graph.push_back(i);
            }
        }
        Cell3D cell;
        cell.region.vertices = {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}};
        cell.region.bounded = true;
        cell.region.interior = Vec2{Rat(1, 2), Rat(1, 2)};
        cell.lower_sheet = 2;
        cell.upper_sheet = 3;
        cell.sign_vector = {1, 1, 1, -1, 1, 1, 1, 1};
        cell.f_sign = -1;
        cell.closed = true;
        cell.id = "s2-3";
        auto sc = scaling_check(cell, aff, 4, Real(1e-10));
        c.require(sc.ok, "scaling check did not converge");
        c.require(sc.axis_swapped, "lambda -> -4 lambda did not swap the axis");
        c.require(abs(sc.scaled.value - sc.base.value / 2) < Real(1e-9) * sc.base.value,
                  "scaling law |P(-4 lambda)| = |P(lambda)|/2 violated");

        // closed form for the fully singular cube
        auto pv = cell_period(cell, aff, Real(1e-12), 1l << 24);
        c.require(abs(pv.value - 8 * pi_real()) < Real(1e-11), "cube oracle missed 8 pi");
        c.require(pv.axis == Axis::IMAGINARY, "cube oracle axis wrong");

        // Hecke recursion and multiplicativity for every form file
        for (const auto& row : g.lvalues) {
            auto form = load_form(form_path(row.form));  // Deligne bound checked on load
            auto a = extend_coefficients(form, 600);
            for (long m = 2; m <= 24; ++m)
                for (long n = 2; n <= 24; ++n) {
                    if (m * n > 600 || std::gcd(m, n) != 1) continue;
                    c.require(a[m * n] == a[m] * a[n], "multiplicativity fails for " + row.form);
                }
            for (long p : {2L, 3L, 5L, 7L}) {
                if (form.level % p == 0 || p * p * p > 600) continue;
                Int lhs = a[p * p * p];
                Int rhs = a[p] * a[p * p] - Int(p) * p * p * a[p];
                c.require(lhs == rhs, "Hecke recursion fails for " + row.form);
            }
        }

        // modular invariance j(tau) = j(-1/tau) on a non-symmetric lattice
        PeriodLattice l1, l2;
        l1.omega_re = 1;
        l1.omega_im = Real("1.73");
        l2.omega_re = Real("1.73");
        l2.omega_im = 1;
        Real j1 = elliptic_invariants(l1).j, j2 = elliptic_invariants(l2).j;
        c.require(abs(j1 - j2) < Real(1e-15) * abs(j1), "j not invariant under tau -> -1/tau");

        // cycle incidence sums vanish exactly (rational arithmetic)
        auto arr3 = arr_by_label("3");
        auto cen3 = incidence_census(arr3);
        auto chart = Chart::identity();
        auto aff3 = apply_chart(arr3, chart);
        auto lines = project_lines(aff3);
        std::vector<Cell3D> closed;
        for (const auto& face : bounded_faces(lines))
            for (auto& cc : stack_cells(aff3, face, lines))
                if (cc.closed) closed.push_back(cc);
        auto p4 = p4_images(arr3, cen3, chart);
        auto cycles = polyhedral_cycles(aff3, closed, p4);
        c.require(!cycles.empty(), "no cycles on arrangement 3");
        for (const auto& cy : cycles)
            for (const auto& img : p4) {
                if (img.at_infinity) continue;
                Int sum = 0;
                for (const auto& [ci, n] : cy.terms)
                    if (cell_closure_contains(aff3, closed[ci], img.affine)) sum += n;
                c.require(sum == 0, "nonzero incidence sum in a cycle");
            }
    });

    std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                                : "ACCEPTANCE: " + std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures;
}
