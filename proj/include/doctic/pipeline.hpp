#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctic/chamber.hpp"
#include "doctic/io.hpp"
#include "doctic/quadrature.hpp"

namespace doctic {

struct PipelineSettings {
    Real tol = Real(1e-10);
    long budget = 1l << 20;
    std::string cache_path;  // empty disables the period cache
};

// Chart search candidates: planes sent to infinity, in search order.
// Strategy (a): charts killing generic fourfold points, i.e. arrangement
// planes through each p4 point, then rational planes spanned by triples of
// p4 points; strategy (b): every arrangement plane. Deduplicated, first
// occurrence wins.
inline std::vector<Vec4> chart_candidates(const Arrangement& arr, const Census& cen) {
    auto pts = p4_generic_points(arr, cen);
    std::vector<Vec4> out;
    std::set<Vec4> seen;
    auto push = [&](const Vec4& h) {
        Vec4 c = projective_canonical(h);
        if (seen.insert(c).second) out.push_back(c);
    };
    for (const auto& p : pts)
        for (const auto& f : arr.forms)
            if (f.eval(p.coords) == 0) push(f.coeffs);
    for (size_t a = 0; a < pts.size(); ++a)
        for (size_t b = a + 1; b < pts.size(); ++b)
            for (size_t c = b + 1; c < pts.size(); ++c) {
                QMat m(3, 4);
                for (int j = 0; j < 4; ++j) {
                    m(0, j) = pts[a].coords[j];
                    m(1, j) = pts[b].coords[j];
                    m(2, j) = pts[c].coords[j];
                }
                auto ns = nullspace(m);
                if (ns.size() != 1) continue;  // collinear triple
                push(Vec4{ns[0][0], ns[0][1], ns[0][2], ns[0][3]});
            }
    for (const auto& f : arr.forms) push(f.coeffs);
    return out;
}

struct CellPeriodRecord {
    std::string chart_id;
    Vec4 infinity_plane{};
    size_t face_index = 0;
    Cell3D cell;
    PeriodValue period;  // magnitude includes the chart determinant factor
    bool from_cache = false;
    bool failed = false;  // budget exhausted; period holds the best estimate
};

struct ChartSummary {
    std::string chart_id;
    Vec4 infinity_plane{};
    size_t closed_cells = 0, open_cells = 0, affine_p4 = 0, cycles = 0, singleton_cycles = 0;
    std::vector<PolyhedralCycle> cycle_list;
};

struct ArrangementPeriods {
    std::string label;
    std::vector<CellPeriodRecord> records;
    std::vector<ChartSummary> charts;
    // Certain period magnitudes, no orientation guessing involved: a cycle
    // whose cells on one axis reduce to a single term has that axis
    // component equal to |n_C| * |P_C| regardless of the unknown relative
    // orientations. Singleton cycles are the one-cell case.
    std::vector<PeriodValue> unambiguous;
};

namespace detail {

inline std::string plane_tag(const Vec4& h) {
    std::string s = "inf[";
    for (int i = 0; i < 4; ++i) s += (i ? "," : "") + to_string(h[i]);
    return s + "]";
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string cell_signature(const Arrangement& arr, const Vec4& plane, const Cell3D& cell,
                                  const Real& tol, long budget) {
    std::ostringstream os;
    os << arr.label << ";l=" << arr.effective_lambda() << ";";
    for (const auto& f : arr.forms)
        for (int i = 0; i < 4; ++i) os << f.coeffs[i] << ",";
    os << ";" << plane_tag(plane) << ";" << cell.lower_sheet << "/" << cell.upper_sheet << ";";
    for (const Vec2& v : cell.region.vertices) os << v[0] << ":" << v[1] << ";";
    os << "tol=" << to_string(tol, 20) << ";budget=" << budget;
    return os.str();
}

struct PeriodCache {
    std::filesystem::path path;
    std::map<uint64_t, PeriodValue> entries;
    long hits = 0, misses = 0;

    void load() {
        if (path.empty()) return;
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            uint64_t key;
            std::string value, axis, est;
            long evals;
            if (!(ls >> key >> value >> axis >> est >> evals)) continue;
            PeriodValue pv;
            pv.value = Real(value.c_str());
            pv.axis = axis == "real" ? Axis::REAL : Axis::IMAGINARY;
            pv.est_rel_err = Real(est.c_str());
            pv.evaluations = evals;
            entries[key] = pv;
        }
    }

    void append(uint64_t key, const PeriodValue& pv) {
        entries[key] = pv;
        if (path.empty()) return;
        std::ofstream out(path, std::ios::app);
        out << key << " " << to_string(pv.value, 36) << " " << axis_name(pv.axis) << " "
            << to_string(pv.est_rel_err, 20) << " " << pv.evaluations << "\n";
    }
};

}  // namespace detail

// Chart search and integration for one arrangement: walk chart_candidates,
// integrate every admissible cell (a cell used by some polyhedral cycle),
// and stop once both axes are represented. Throws when the whole candidate
// list yields no real/imaginary pair.
inline ArrangementPeriods arrangement_periods(const Arrangement& arr, const Census& cen,
                                              const PipelineSettings& settings = {}) {
    detail::PeriodCache cache{settings.cache_path};
    cache.load();
    ArrangementPeriods result;
    result.label = arr.label;
    bool have_real = false, have_imag = false;

    for (const Vec4& plane : chart_candidates(arr, cen)) {
        Chart chart = Chart::dehomogenize_at(plane, detail::plane_tag(plane));
        ChartSummary summary;
        summary.chart_id = chart.name;
        summary.infinity_plane = plane;
        AffineArrangement aff;
        std::vector<Cell3D> closed;
        std::vector<size_t> face_of;  // face index per closed cell
        try {
            aff = apply_chart(arr, chart);
            auto lines = project_lines(aff);
            auto faces = bounded_faces(lines);
            for (size_t fi = 0; fi < faces.size(); ++fi)
                for (auto& c : stack_cells(aff, faces[fi], lines)) {
                    if (c.closed) {
                        closed.push_back(c);
                        face_of.push_back(fi);
                    } else {
                        ++summary.open_cells;
                    }
                }
        } catch (const std::exception&) {
            continue;  // degenerate chart for this arrangement
        }
        summary.closed_cells = closed.size();
        auto p4 = p4_images(arr, cen, chart);
        for (const auto& p : p4)
            if (!p.at_infinity) ++summary.affine_p4;
        auto cycles = polyhedral_cycles(aff, closed, p4);
        summary.cycles = cycles.size();
        std::set<size_t> admissible;
        for (const auto& cy : cycles) {
            if (cy.terms.size() == 1) ++summary.singleton_cycles;
            for (const auto& [idx, n] : cy.terms) admissible.insert(idx);
        }
        summary.cycle_list = cycles;
        result.charts.push_back(summary);
        if (admissible.empty()) continue;

        Real det = to_real(aff.det_factor);
        std::map<size_t, size_t> record_of;  // closed-cell index -> result.records position
        for (size_t idx : admissible) {
            const Cell3D& cell = closed[idx];
            CellPeriodRecord rec;
            rec.chart_id = chart.name;
            rec.infinity_plane = plane;
            rec.face_index = face_of[idx];
            rec.cell = cell;
            std::string sig =
                detail::cell_signature(arr, plane, cell, settings.tol, settings.budget);
            uint64_t key = detail::fnv1a(sig);
            auto hit = cache.entries.find(key);
            if (hit != cache.entries.end()) {
                rec.period = hit->second;
                rec.from_cache = true;
                ++cache.hits;
            } else {
                try {
                    rec.period = cell_period(cell, aff, settings.tol, settings.budget);
                    rec.period.value *= det;
                    cache.append(key, rec.period);
                } catch (const QuadratureFailure& f) {
                    rec.period = f.best;
                    rec.period.value *= det;
                    rec.failed = true;
                }
                ++cache.misses;
            }
            rec.period.cell_ref = arr.label + "/" + chart.name + "/f" +
                                  std::to_string(rec.face_index) + "/" + cell.id;
            record_of[idx] = result.records.size();
            result.records.push_back(rec);
        }
        for (const auto& cy : cycles) {
            for (Axis ax : {Axis::REAL, Axis::IMAGINARY}) {
                size_t on_axis = 0, rec_pos = 0;
                Int coeff = 0;
                bool usable = true;
                for (const auto& [idx, n] : cy.terms) {
                    size_t pos = record_of.at(idx);
                    const auto& rec = result.records[pos];
                    if (rec.period.axis != ax) continue;
                    ++on_axis;
                    rec_pos = pos;
                    coeff = n < 0 ? Int(-n) : Int(n);
                    if (rec.failed) usable = false;
                }
                if (on_axis != 1 || !usable) continue;
                PeriodValue pv = result.records[rec_pos].period;
                pv.value *= to_real(Rat(coeff));
                result.unambiguous.push_back(pv);
                (ax == Axis::REAL ? have_real : have_imag) = true;
            }
        }
        if (have_real && have_imag) return result;
    }
    throw std::runtime_error(
        "no admissible cycles with unambiguous periods on both axes found for arrangement " +
        arr.label + " after exhausting the chart candidates");
}

}  // namespace doctic
