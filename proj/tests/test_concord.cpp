#include <catch2/catch_amalgamated.hpp>

#include "doctic/concord.hpp"
#include "doctic/tables.hpp"

using namespace doctic;

namespace {

std::string form_path(const std::string& name) {
    std::string file = name;
    file[file.find('/')] = '_';
    return "data/forms/" + file + ".txt";
}

PeriodLattice lattice_for_row(const GoldenTables& g, const std::string& label) {
    for (const auto& row : g.periods) {
        if (row.label != label) continue;
        std::vector<PeriodValue> periods;
        auto add = [&](const Real& v, Axis ax) {
            PeriodValue p;
            p.value = v;
            p.axis = ax;
            p.est_rel_err = 1e-11;  // the table prints 12 significant digits
            p.cell_ref = label;
            periods.push_back(p);
        };
        for (const Real& v : row.reals) add(v, Axis::REAL);
        for (const Real& v : row.imags) add(v, Axis::IMAGINARY);
        return lattice_generators(periods);
    }
    FAIL("no period row for arrangement " + label);
    return {};
}

}  // namespace

TEST_CASE("match_periods: the full published proportionality table") {
    auto g = load_golden_tables("data/golden");
    REQUIRE(g.proportionality.size() == 11);
    for (const auto& row : g.proportionality) {
        auto lat = lattice_for_row(g, row.label);
        auto form = load_form(form_path(row.form));
        auto lv = l_values(form);
        auto rep = match_periods(lat, lv, 64, Real(1e-6), row.label, row.form);
        INFO("arrangement " << row.label << " form " << row.form);
        REQUIRE(rep.ok());
        CHECK(*rep.rho_re == row.rho_re);
        CHECK(*rep.rho_im == row.rho_im);
        CHECK(rep.residual_re < 1e-8);
        CHECK(rep.residual_im < 1e-8);
        // the table's own printed equalities
        Real pi = pi_real();
        CHECK(abs(row.real_period - to_real(row.rho_re) * pi * pi * lv.L1) <
              1e-8 * row.real_period);
        CHECK(abs(row.imag_period - to_real(row.rho_im) * pi * lv.L2) < 1e-8 * row.imag_period);
        // generators coincide with the table's period columns
        CHECK(abs(lat.omega_re - row.real_period) < 1e-8 * row.real_period);
        CHECK(abs(lat.omega_im - row.imag_period) < 1e-8 * row.imag_period);
    }
}

TEST_CASE("match_periods: row 93 matches on the smallest imaginary generator") {
    auto g = load_golden_tables("data/golden");
    auto lat = lattice_for_row(g, "93");
    CHECK(abs(lat.omega_im - Real("17.3423746625")) < 1e-8);
    auto lv = l_values(load_form(form_path("8/1")));
    auto rep = match_periods(lat, lv);
    REQUIRE(rep.ok());
    CHECK(*rep.rho_im == 8);
}

TEST_CASE("match_periods: wrong form assignment yields NONE") {
    auto g = load_golden_tables("data/golden");
    auto lat = lattice_for_row(g, "1");
    auto lv = l_values(load_form(form_path("32/1")));
    auto rep = match_periods(lat, lv, 64, Real(1e-6), "1", "32/1");
    CHECK(!rep.ok());
    CHECK((rep.residual_re == 1 || rep.residual_im == 1));
}
