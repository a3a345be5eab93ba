#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctic/arrangement.hpp"
#include "doctic/intlinalg.hpp"
#include "doctic/rational.hpp"

namespace doctic {

using Vec2 = std::array<Rat, 2>;
using Vec3 = std::array<Rat, 3>;

// Projective change of coordinates x_old = matrix * x_new, then
// dehomogenization at affine_coordinate = 1.
struct Chart {
    QMat matrix;  // 4x4, invertible
    int affine_coordinate = 3;
    std::string name;

    static Chart identity(const std::string& name = "id") {
        return Chart{QMat::identity(4), 3, name};
    }

    // New last coordinate equals the given form; remaining coordinates are the
    // unit coordinates other than `drop`.
    static Chart dehomogenize_at(const Vec4& form, const std::string& name) {
        int drop = -1;
        for (int i = 0; i < 4; ++i)
            if (form[i] != 0) drop = i;
        if (drop < 0) throw std::invalid_argument("zero form");
        QMat b(4, 4);
        int r = 0;
        for (int i = 0; i < 4; ++i) {
            if (i == drop) continue;
            b(r++, i) = 1;
        }
        for (int j = 0; j < 4; ++j) b(3, j) = form[j];
        return Chart{inverse4(b), 3, name};
    }
};

struct AffineForm {
    enum class Kind { Vertical, Graph, Infinity };
    Vec4 coeffs{};  // c0*x + c1*y + c2*z + c3, exact transform (never rescaled)
    Kind kind = Kind::Vertical;
    int source = -1;  // index of the plane in the arrangement
};

struct AffineArrangement {
    std::array<AffineForm, 8> forms;
    Rat lambda;
    Rat det_factor;  // |det(chart.matrix)|, multiplies every period
    Chart chart;
    std::vector<int> vertical, graph, excluded;  // partition of 0..7

    // graph sheet value z = f_i(x,y)
    Rat sheet(int i, const Rat& x, const Rat& y) const {
        const Vec4& c = forms[i].coeffs;
        return -(c[0] * x + c[1] * y + c[3]) / c[2];
    }
    Rat value(int i, const Rat& x, const Rat& y, const Rat& z) const {
        const Vec4& c = forms[i].coeffs;
        return c[0] * x + c[1] * y + c[2] * z + c[3];
    }
};

inline AffineArrangement apply_chart(const Arrangement& arr, const Chart& chart) {
    Rat d = det4(chart.matrix);
    if (d == 0) throw std::invalid_argument("chart matrix not invertible");
    // coordinate order after dehomogenization: the non-affine coordinates in
    // increasing index order become (x,y,z)
    std::array<int, 3> xyz{};
    int r = 0;
    for (int i = 0; i < 4; ++i)
        if (i != chart.affine_coordinate) xyz[r++] = i;

    AffineArrangement aff;
    aff.lambda = arr.effective_lambda();
    aff.det_factor = d < 0 ? Rat(-d) : d;
    aff.chart = chart;
    for (int k = 0; k < 8; ++k) {
        Vec4 row{};
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) row[j] += arr.forms[k].coeffs[i] * chart.matrix(i, j);
        Vec4 c{row[xyz[0]], row[xyz[1]], row[xyz[2]], row[chart.affine_coordinate]};
        AffineForm f;
        f.coeffs = c;
        f.source = k;
        if (c[0] == 0 && c[1] == 0 && c[2] == 0) {
            f.kind = AffineForm::Kind::Infinity;
            aff.excluded.push_back(k);
        } else if (c[2] == 0) {
            f.kind = AffineForm::Kind::Vertical;
            aff.vertical.push_back(k);
        } else {
            f.kind = AffineForm::Kind::Graph;
            aff.graph.push_back(k);
        }
        aff.forms[k] = f;
    }
    return aff;
}

struct P4Image {
    Vec3 affine{};  // valid when !at_infinity
    bool at_infinity = false;
    Vec4 source_coords{};
};

inline std::vector<P4Image> p4_images(const Arrangement& arr, const Census& cen, const Chart& chart) {
    QMat inv = inverse4(chart.matrix);
    std::array<int, 3> xyz{};
    int r = 0;
    for (int i = 0; i < 4; ++i)
        if (i != chart.affine_coordinate) xyz[r++] = i;
    std::vector<P4Image> out;
    for (const auto& p : p4_generic_points(arr, cen)) {
        Vec4 q{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) q[i] += inv(i, j) * p.coords[j];
        P4Image img;
        img.source_coords = p.coords;
        const Rat& w = q[chart.affine_coordinate];
        if (w == 0) {
            img.at_infinity = true;
        } else {
            img.affine = Vec3{q[xyz[0]] / w, q[xyz[1]] / w, q[xyz[2]] / w};
        }
        out.push_back(img);
    }
    return out;
}

// --- 2D line arrangement ----------------------------------------------------

struct LineSource {
    int a = -1, b = -1;  // (i,-1): trace of vertical plane i; (i,j): f_i = f_j
    bool operator<(const LineSource& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
};

struct Line2 {
    Vec3 c{};  // canonical c0*x + c1*y + c2 = 0
    std::vector<LineSource> sources;

    Rat eval(const Vec2& p) const { return c[0] * p[0] + c[1] * p[1] + c[2]; }
};

namespace detail {

inline Vec3 canonical3(Vec3 v) {
    Vec4 w{v[0], v[1], v[2], 0};
    w = projective_canonical(w);
    return Vec3{w[0], w[1], w[2]};
}

}  // namespace detail

inline std::vector<Line2> project_lines(const AffineArrangement& aff) {
    std::map<Vec3, std::vector<LineSource>> acc;
    for (int i : aff.vertical) {
        const Vec4& c = aff.forms[i].coeffs;
        acc[detail::canonical3(Vec3{c[0], c[1], c[3]})].push_back(LineSource{i, -1});
    }
    for (std::size_t a = 0; a < aff.graph.size(); ++a)
        for (std::size_t b = a + 1; b < aff.graph.size(); ++b) {
            int i = aff.graph[a], j = aff.graph[b];
            const Vec4& ci = aff.forms[i].coeffs;
            const Vec4& cj = aff.forms[j].coeffs;
            // f_i = f_j  <=>  u_i * c2_j - u_j * c2_i = 0 with u = (c0,c1,c3)
            Vec3 line{ci[0] * cj[2] - cj[0] * ci[2], ci[1] * cj[2] - cj[1] * ci[2],
                      ci[3] * cj[2] - cj[3] * ci[2]};
            if (line[0] == 0 && line[1] == 0) continue;  // parallel sheets
            acc[detail::canonical3(line)].push_back(LineSource{std::min(i, j), std::max(i, j)});
        }
    std::vector<Line2> out;
    for (auto& [c, src] : acc) out.push_back(Line2{c, std::move(src)});
    return out;
}

struct Region2D {
    std::vector<int> sign_vector;     // over the line list, all +-1
    std::vector<Vec2> vertices;       // counterclockwise cycle
    bool bounded = false;
    Vec2 interior{};                  // vertex centroid (interior by convexity)
};

namespace detail {

// strict angular order of nonzero 2D vectors (counterclockwise from +x axis)
inline bool angle_less(const Vec2& a, const Vec2& b) {
    auto half = [](const Vec2& v) { return (v[1] > 0 || (v[1] == 0 && v[0] > 0)) ? 0 : 1; };
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return a[0] * b[1] - a[1] * b[0] > 0;
}

inline Rat cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline Rat polygon_area2(const std::vector<Vec2>& v) {
    Rat s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        s += p[0] * q[1] - q[0] * p[1];
    }
    return s;  // twice the signed area
}

}  // namespace detail

inline std::vector<Region2D> bounded_faces(const std::vector<Line2>& lines) {
    const std::size_t n = lines.size();
    // vertex set: pairwise intersections
    std::set<Vec2> vertex_set;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Rat det = lines[i].c[0] * lines[j].c[1] - lines[j].c[0] * lines[i].c[1];
            if (det == 0) continue;
            Rat x = (-lines[i].c[2] * lines[j].c[1] + lines[j].c[2] * lines[i].c[1]) / det;
            Rat y = (-lines[i].c[0] * lines[j].c[2] + lines[j].c[0] * lines[i].c[2]) / det;
            vertex_set.insert(Vec2{x, y});
        }
    std::vector<Vec2> vertices(vertex_set.begin(), vertex_set.end());

    // sample points: small steps from each vertex between consecutive line directions
    std::map<std::vector<int>, Vec2> cells;
    for (const Vec2& v : vertices) {
        std::vector<Vec2> dirs;
        for (const auto& l : lines)
            if (l.eval(v) == 0) {
                dirs.push_back(Vec2{-l.c[1], l.c[0]});
                dirs.push_back(Vec2{l.c[1], -l.c[0]});
            }
        std::sort(dirs.begin(), dirs.end(), detail::angle_less);
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            const Vec2& d1 = dirs[k];
            const Vec2& d2 = dirs[(k + 1) % dirs.size()];
            Vec2 mid{d1[0] + d2[0], d1[1] + d2[1]};
            if (mid[0] == 0 && mid[1] == 0) continue;  // opposite directions (2 lines only)
            Rat eps = 1;
            bool ok = true;
            for (const auto& l : lines) {
                Rat lv = l.eval(v);
                Rat step = l.c[0] * mid[0] + l.c[1] * mid[1];
                if (lv == 0) {
                    if (step == 0) { ok = false; break; }  // mid parallel to incident line
                    continue;
                }
                if (step == 0) continue;
                Rat bound = abs(lv / step) / 2;
                if (bound < eps) eps = bound;
            }
            if (!ok) continue;
            Vec2 p{v[0] + eps * mid[0], v[1] + eps * mid[1]};
            std::vector<int> sv(n);
            bool strict = true;
            for (std::size_t li = 0; li < n; ++li) {
                sv[li] = sgn(lines[li].eval(p));
                if (sv[li] == 0) { strict = false; break; }
            }
            if (strict) cells.emplace(std::move(sv), p);
        }
    }

    std::vector<Region2D> out;
    for (const auto& [sv, sample] : cells) {
        // bounded iff the recession cone is trivial: every candidate direction
        // (parallel to some line) violates a constraint
        bool bounded = true;
        for (std::size_t li = 0; li < n && bounded; ++li) {
            for (int s : {1, -1}) {
                Vec2 d{s * -lines[li].c[1], s * lines[li].c[0]};
                bool feasible = true;
                for (std::size_t lj = 0; lj < n; ++lj) {
                    Rat step = lines[lj].c[0] * d[0] + lines[lj].c[1] * d[1];
                    if (sv[lj] * step < 0) { feasible = false; break; }
                }
                if (feasible) { bounded = false; break; }
            }
        }
        if (!bounded) continue;

        std::vector<Vec2> cycle;
        for (const Vec2& v : vertices) {
            bool inside = true;
            for (std::size_t li = 0; li < n; ++li)
                if (sv[li] * lines[li].eval(v) < 0) { inside = false; break; }
            if (inside) cycle.push_back(v);
        }
        if (cycle.size() < 3) continue;
        Vec2 centroid{0, 0};
        for (const Vec2& v : cycle) { centroid[0] += v[0]; centroid[1] += v[1]; }
        centroid[0] /= int(cycle.size());
        centroid[1] /= int(cycle.size());
        std::sort(cycle.begin(), cycle.end(), [&](const Vec2& a, const Vec2& b) {
            return detail::angle_less(Vec2{a[0] - centroid[0], a[1] - centroid[1]},
                                      Vec2{b[0] - centroid[0], b[1] - centroid[1]});
        });
        if (detail::polygon_area2(cycle) <= 0) continue;
        Region2D reg;
        reg.sign_vector = sv;
        reg.vertices = std::move(cycle);
        reg.bounded = true;
        reg.interior = centroid;
        out.push_back(std::move(reg));
    }
    // cells map is keyed by sign vector, so `out` is already lexicographic
    return out;
}

// --- 3D cells ---------------------------------------------------------------

struct Cell3D {
    Region2D region;
    int lower_sheet = -1, upper_sheet = -1;  // plane indices into the arrangement
    std::array<int, 8> sign_vector{};        // signs of the 8 affine forms
    int f_sign = 0;                          // sign of lambda * product of forms
    bool closed = false;
    std::string id;
};

namespace detail {

inline int product_sign_at(const AffineArrangement& aff, const Rat& x, const Rat& y, const Rat& z) {
    int s = sgn(aff.lambda);
    for (int i = 0; i < 8; ++i) {
        int si = sgn(aff.value(i, x, y, z));
        if (si == 0) return 0;
        s *= si;
    }
    return s;
}

inline const Line2* supporting_line(const std::vector<Line2>& lines, const Vec2& a, const Vec2& b) {
    for (const auto& l : lines)
        if (l.eval(a) == 0 && l.eval(b) == 0) return &l;
    return nullptr;
}

}  // namespace detail

inline std::vector<Cell3D> stack_cells(const AffineArrangement& aff, const Region2D& region,
                                       const std::vector<Line2>& lines) {
    if (!region.bounded) throw std::invalid_argument("stack_cells needs a bounded region");
    const Rat& cx = region.interior[0];
    const Rat& cy = region.interior[1];

    std::vector<int> order = aff.graph;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return aff.sheet(i, cx, cy) < aff.sheet(j, cx, cy); });
    for (std::size_t k = 0; k + 1 < order.size(); ++k)
        if (aff.sheet(order[k], cx, cy) == aff.sheet(order[k + 1], cx, cy))
            throw std::logic_error("sheets collide over region interior");

    std::vector<Cell3D> out;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        Cell3D cell;
        cell.region = region;
        cell.lower_sheet = order[k];
        cell.upper_sheet = order[k + 1];
        Rat zlo = aff.sheet(cell.lower_sheet, cx, cy);
        Rat zup = aff.sheet(cell.upper_sheet, cx, cy);
        Rat zmid = (zlo + zup) / 2;
        int prod = sgn(aff.lambda);
        for (int i = 0; i < 8; ++i) {
            cell.sign_vector[i] = sgn(aff.value(i, cx, cy, zmid));
            if (cell.sign_vector[i] == 0) throw std::logic_error("form vanishes at cell sample");
            prod *= cell.sign_vector[i];
        }
        cell.f_sign = prod;
        // recheck f_sign at further interior points
        for (const Vec2& v : {region.vertices[0], region.vertices[1]}) {
            Rat px = (2 * cx + v[0]) / 3, py = (2 * cy + v[1]) / 3;
            Rat pzlo = aff.sheet(cell.lower_sheet, px, py);
            Rat pzup = aff.sheet(cell.upper_sheet, px, py);
            int s = detail::product_sign_at(aff, px, py, (3 * pzlo + pzup) / 4);
            if (s != cell.f_sign) throw std::logic_error("inconsistent f_sign inside cell");
        }

        cell.closed = true;
        const auto& vs = region.vertices;
        for (std::size_t e = 0; e < vs.size(); ++e) {
            const Vec2& a = vs[e];
            const Vec2& b = vs[(e + 1) % vs.size()];
            const Line2* l = detail::supporting_line(lines, a, b);
            if (!l) throw std::logic_error("region edge not on an arrangement line");
            bool edge_ok = false;
            for (const auto& s : l->sources) {
                if (s.b < 0) edge_ok = true;  // vertical plane facet
                if (s.a == std::min(cell.lower_sheet, cell.upper_sheet) &&
                    s.b == std::max(cell.lower_sheet, cell.upper_sheet))
                    edge_ok = true;  // sheets meet over this edge
            }
            if (!edge_ok) cell.closed = false;
        }
        cell.id = "s" + std::to_string(cell.lower_sheet) + "-" + std::to_string(cell.upper_sheet);
        out.push_back(std::move(cell));
    }
    return out;
}

// exact volume between the sheets over the region
inline Rat cell_volume(const AffineArrangement& aff, const Cell3D& cell) {
    // integral over the polygon of the affine gap f_up - f_lo equals
    // area * gap(area centroid)
    const auto& v = cell.region.vertices;
    Rat a2 = detail::polygon_area2(v);
    Rat cx = 0, cy = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        Rat w = p[0] * q[1] - q[0] * p[1];
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    cx /= 3 * a2;
    cy /= 3 * a2;
    Rat gap = aff.sheet(cell.upper_sheet, cx, cy) - aff.sheet(cell.lower_sheet, cx, cy);
    return a2 / 2 * gap;
}

// --- polyhedral cycles ------------------------------------------------------

struct PolyhedralCycle {
    std::map<std::size_t, Int> terms;  // cell index -> coefficient
    bool incidence_ok = true;
};

inline bool cell_closure_contains(const AffineArrangement& aff, const Cell3D& cell, const Vec3& p) {
    const auto& vs = cell.region.vertices;
    for (std::size_t e = 0; e < vs.size(); ++e)
        if (detail::cross(vs[e], vs[(e + 1) % vs.size()], Vec2{p[0], p[1]}) < 0) return false;
    Rat zlo = aff.sheet(cell.lower_sheet, p[0], p[1]);
    Rat zup = aff.sheet(cell.upper_sheet, p[0], p[1]);
    return zlo <= p[2] && p[2] <= zup;
}

inline std::vector<PolyhedralCycle> polyhedral_cycles(const AffineArrangement& aff,
                                                      const std::vector<Cell3D>& cells,
                                                      const std::vector<P4Image>& p4) {
    std::vector<Vec3> pts;
    for (const auto& img : p4)
        if (!img.at_infinity) pts.push_back(img.affine);

    std::vector<std::vector<Int>> m(pts.size(), std::vector<Int>(cells.size(), 0));
    std::vector<bool> incident(cells.size(), false);
    for (std::size_t r = 0; r < pts.size(); ++r)
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cell_closure_contains(aff, cells[c], pts[r])) {
                m[r][c] = 1;
                incident[c] = true;
            }

    std::vector<PolyhedralCycle> out;
    std::vector<std::size_t> constrained;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!incident[c]) {
            PolyhedralCycle cy;
            cy.terms[c] = 1;
            out.push_back(std::move(cy));
        } else {
            constrained.push_back(c);
        }
    }
    if (!constrained.empty() && !pts.empty()) {
        std::vector<std::vector<Int>> sub(pts.size(), std::vector<Int>(constrained.size()));
        for (std::size_t r = 0; r < pts.size(); ++r)
            for (std::size_t c = 0; c < constrained.size(); ++c) sub[r][c] = m[r][constrained[c]];
        for (const auto& v : integer_kernel(sub)) {
            PolyhedralCycle cy;
            for (std::size_t c = 0; c < constrained.size(); ++c)
                if (v[c] != 0) cy.terms[constrained[c]] = v[c];
            out.push_back(std::move(cy));
        }
    }
    return out;
}

}  // namespace doctic
