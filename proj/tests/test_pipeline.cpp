#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "doctic/pipeline.hpp"
#include "doctic/tables.hpp"

using namespace doctic;

namespace {

Arrangement arr_by_label(const std::string& label) {
    return load_arrangement_file("data/arrangements/arr" + label + ".txt");
}

bool generates(const std::vector<PeriodValue>& periods, const Real& target, Axis ax,
               const Real& tol) {
    for (const auto& p : periods) {
        if (p.axis != ax) continue;
        for (int num = 1; num <= 6; ++num)
            for (int den = 1; den <= 6; ++den)
                if (abs(target - p.value * num / den) < tol * target) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("chart_candidates: deterministic, deduplicated, includes the hand-picked chart") {
    auto arr = arr_by_label("1");
    auto cen = incidence_census(arr);
    auto cands = chart_candidates(arr, cen);
    CHECK(cands == chart_candidates(arr, cen));
    std::set<Vec4> uniq(cands.begin(), cands.end());
    CHECK(uniq.size() == cands.size());
    // all 8 arrangement planes are candidates; t+x (the worked example's
    // choice) is one of the planes through the single p4 point
    CHECK(cands.size() == 8);
    bool has_tx = false;
    for (const auto& h : cands) has_tx = has_tx || h == projective_canonical(Vec4{1, 0, 0, 1});
    CHECK(has_tx);

    auto arr245 = arr_by_label("245");
    auto cands245 = chart_candidates(arr245, incidence_census(arr245));
    CHECK(cands245.size() > 8);  // p4-triple spans extend the plane list
}

TEST_CASE("arrangement_periods: arrangement 1 generates the published row") {
    auto arr = arr_by_label("1");
    auto cen = incidence_census(arr);
    PipelineSettings s;
    s.tol = Real(1e-7);
    s.budget = 1l << 25;
    auto res = arrangement_periods(arr, cen, s);
    REQUIRE(!res.unambiguous.empty());
    int nreal = 0, nimag = 0;
    for (const auto& p : res.unambiguous) (p.axis == Axis::REAL ? nreal : nimag)++;
    CHECK(nreal == 2);
    CHECK(nimag == 1);
    CHECK(generates(res.unambiguous, Real("55.9805041334"), Axis::REAL, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("111.961008267"), Axis::REAL, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("69.3694986501"), Axis::IMAGINARY, Real(1e-6)));
}

TEST_CASE("arrangement_periods: arrangement 245 needs multi-cell cycles") {
    auto arr = arr_by_label("245");
    auto cen = incidence_census(arr);
    PipelineSettings s;
    s.tol = Real(1e-7);
    s.budget = 1l << 25;
    auto res = arrangement_periods(arr, cen, s);
    // no chart yields singleton cycles here; the unambiguous periods come
    // from cycles with a single cell on one axis
    for (const auto& c : res.charts) CHECK(c.singleton_cycles == 0);
    CHECK(generates(res.unambiguous, Real("21.8734037270"), Axis::REAL, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("87.4936149079"), Axis::REAL, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("131.240422362"), Axis::REAL, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("28.8234453872"), Axis::IMAGINARY, Real(1e-6)));
    CHECK(generates(res.unambiguous, Real("115.293781548"), Axis::IMAGINARY, Real(1e-6)));
}

TEST_CASE("arrangement_periods: period cache hits reproduce values bit-identically") {
    auto arr = arr_by_label("1");
    auto cen = incidence_census(arr);
    std::string cache = "/tmp/doctic_cache_test.txt";
    std::filesystem::remove(cache);
    PipelineSettings s;
    s.tol = Real(1e-6);
    s.budget = 1l << 24;
    s.cache_path = cache;
    auto first = arrangement_periods(arr, cen, s);
    auto second = arrangement_periods(arr, cen, s);
    REQUIRE(first.records.size() == second.records.size());
    size_t cached = 0;
    for (size_t i = 0; i < first.records.size(); ++i) {
        CHECK(!first.records[i].from_cache);
        if (first.records[i].failed) {
            // budget-exhausted estimates are never cached
            CHECK(!second.records[i].from_cache);
            continue;
        }
        ++cached;
        CHECK(second.records[i].from_cache);
        CHECK(first.records[i].period.value == second.records[i].period.value);
        CHECK(first.records[i].period.axis == second.records[i].period.axis);
    }
    CHECK(cached >= 2);
    // a different tolerance is a different cache key
    PipelineSettings s2 = s;
    s2.tol = Real(2e-6);
    auto third = arrangement_periods(arr, cen, s2);
    for (const auto& rec : third.records) CHECK(!rec.from_cache);
    std::filesystem::remove(cache);
}

TEST_CASE("arrangement_periods: explicit failure when no chart resolves both axes") {
    // arrangement 238 admits no cycle with a single-cell axis in the whole
    // candidate family; the search must fail loudly, not silently
    auto arr = arr_by_label("238");
    auto cen = incidence_census(arr);
    PipelineSettings s;
    s.tol = Real(1e-4);
    s.budget = 1l << 18;
    CHECK_THROWS_WITH(arrangement_periods(arr, cen, s),
                      Catch::Matchers::ContainsSubstring("238"));
}
