#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctic/rational.hpp"

namespace doctic {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One plane a*x + b*y + c*z + d*t = 0, stored in canonical projective scaling.
struct LinearForm {
    Vec4 coeffs{};

    static LinearForm from_coeffs(const Vec4& c) { return LinearForm{projective_canonical(c)}; }

    Rat eval(const Vec4& p) const { return dot(coeffs, p); }

    bool operator==(const LinearForm& o) const { return coeffs == o.coeffs; }
    bool operator<(const LinearForm& o) const { return coeffs < o.coeffs; }
};

struct Arrangement {
    std::string label;
    std::array<LinearForm, 8> forms;
    Rat lambda;
    bool axis_swap = false;  // see axis_swap in the data files
    std::optional<int> b2_resolution;  // ingested metadata, not computed

    // Sign-corrected lambda for period computation. axis_swap flips the
    // sign, exchanging the real and imaginary period axes while leaving
    // every magnitude unchanged.
    Rat effective_lambda() const { return axis_swap ? -lambda : lambda; }

    void validate() const {
        if (lambda == 0) throw std::invalid_argument("lambda must be nonzero");
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                if (forms[i] == forms[j]) throw ParseError("repeated plane (factors " + std::to_string(i) + "," + std::to_string(j) + ")");
    }
};

struct IncidencePoint {
    Vec4 coords;  // canonicalized homogeneous
    int multiplicity = 0;
    bool on_triple_line = false;
    std::vector<int> planes;  // indices of forms vanishing here
};

struct IncidenceLine {
    std::array<Vec4, 2> span;  // two canonical points
    int multiplicity = 0;
    std::vector<int> planes;
};

struct Census {
    int double_lines = 0;
    int triple_lines = 0;
    int points_mult4 = 0;
    int points_mult5 = 0;
    int p4_generic = 0;
    bool admissible = false;
    std::vector<IncidencePoint> points;  // multiplicity >= 3
    std::vector<IncidenceLine> lines;    // multiplicity >= 2
};

struct BettiData {
    int b2_tilde = 0;
    int b3_tilde = 2;
    int b3_hat = 0;
    int b3_smoothing = 0;
    int p4_generic = 0;
};

// --- parser -----------------------------------------------------------------

namespace detail {

inline int var_index(char c) {
    switch (c) {
        case 'x': return 0;
        case 'y': return 1;
        case 'z': return 2;
        case 't': return 3;
        default: return -1;
    }
}

// One linear expression in x,y,z,t with integer coefficients.
inline Vec4 parse_linear(const std::string& s) {
    Vec4 c{};
    std::size_t i = 0;
    auto skip = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
    bool any = false;
    skip();
    while (i < s.size()) {
        Int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            if (s[i] == '-') sign = -1;
            ++i;
            skip();
        } else if (any) {
            throw ParseError("expected '+' or '-' in \"" + s + "\"");
        }
        Int mag = 1;
        bool have_digits = false;
        std::string digits;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            digits += s[i++];
            have_digits = true;
        }
        if (have_digits) mag = Int(digits);
        skip();
        if (i < s.size() && var_index(s[i]) >= 0) {
            c[var_index(s[i])] += Rat(sign * mag);
            ++i;
        } else if (have_digits) {
            throw ParseError("constant term not allowed in homogeneous factor \"" + s + "\"");
        } else {
            throw ParseError("expected variable in \"" + s + "\"");
        }
        skip();
        any = true;
    }
    if (!any) throw ParseError("empty factor");
    return c;
}

}  // namespace detail

// Product-of-linear-forms grammar: leading monomial letters count one factor
// each, parenthesized groups are linear expressions.
inline Arrangement parse_arrangement(const std::string& text, const Rat& lambda, const std::string& label = "") {
    std::vector<Vec4> raw;
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*') {
            ++i;
        } else if (detail::var_index(ch) >= 0) {
            Vec4 c{};
            c[detail::var_index(ch)] = 1;
            raw.push_back(c);
            ++i;
        } else if (ch == '(') {
            std::size_t close = text.find(')', i);
            if (close == std::string::npos) throw ParseError("unbalanced '('");
            raw.push_back(detail::parse_linear(text.substr(i + 1, close - i - 1)));
            i = close + 1;
        } else {
            throw ParseError(std::string("unexpected character '") + ch + "'");
        }
    }
    if (raw.size() != 8)
        throw ParseError("expected 8 linear factors, got " + std::to_string(raw.size()));
    Arrangement arr;
    arr.label = label;
    arr.lambda = lambda;
    for (int k = 0; k < 8; ++k) arr.forms[k] = LinearForm::from_coeffs(raw[k]);
    arr.validate();
    return arr;
}

inline Arrangement arrangement_from_matrix(const std::vector<Vec4>& rows, const Rat& lambda, const std::string& label = "") {
    if (rows.size() != 8) throw ParseError("matrix form needs exactly 8 rows");
    Arrangement arr;
    arr.label = label;
    arr.lambda = lambda;
    for (int k = 0; k < 8; ++k) arr.forms[k] = LinearForm::from_coeffs(rows[k]);
    arr.validate();
    return arr;
}

// --- census -----------------------------------------------------------------

namespace detail {

// Canonical key for the projective line spanned by two points: rref of the
// 2x4 span matrix with canonical scaling per row.
inline std::array<Vec4, 2> line_key(const Vec4& p, const Vec4& q) {
    QMat m(2, 4);
    for (int j = 0; j < 4; ++j) {
        m(0, j) = p[j];
        m(1, j) = q[j];
    }
    if (rref(m) != 2) throw std::logic_error("degenerate line span");
    Vec4 a, b;
    for (int j = 0; j < 4; ++j) {
        a[j] = m(0, j);
        b[j] = m(1, j);
    }
    return {projective_canonical(a), projective_canonical(b)};
}

}  // namespace detail

inline std::vector<IncidencePoint> p4_generic_points(const Arrangement& arr, const Census& cen);

inline Census incidence_census(const Arrangement& arr) {
    Census cen;
    // points: 1-dimensional nullspaces of rank-3 triples
    std::map<Vec4, std::vector<int>> points;  // coords -> planes through it
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            for (int k = j + 1; k < 8; ++k) {
                QMat m(3, 4);
                for (int c = 0; c < 4; ++c) {
                    m(0, c) = arr.forms[i].coeffs[c];
                    m(1, c) = arr.forms[j].coeffs[c];
                    m(2, c) = arr.forms[k].coeffs[c];
                }
                auto ns = nullspace(m);
                if (ns.size() != 1) continue;
                Vec4 p{ns[0][0], ns[0][1], ns[0][2], ns[0][3]};
                p = projective_canonical(p);
                if (points.count(p)) continue;
                std::vector<int> on;
                for (int f = 0; f < 8; ++f)
                    if (arr.forms[f].eval(p) == 0) on.push_back(f);
                points.emplace(p, std::move(on));
            }
    // lines: intersections of independent pairs
    std::map<std::array<Vec4, 2>, std::vector<int>> lines;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) {
            QMat m(2, 4);
            for (int c = 0; c < 4; ++c) {
                m(0, c) = arr.forms[i].coeffs[c];
                m(1, c) = arr.forms[j].coeffs[c];
            }
            auto ns = nullspace(m);
            if (ns.size() != 2) continue;  // same projective plane cannot happen (validated)
            Vec4 p{ns[0][0], ns[0][1], ns[0][2], ns[0][3]};
            Vec4 q{ns[1][0], ns[1][1], ns[1][2], ns[1][3]};
            auto key = detail::line_key(p, q);
            if (lines.count(key)) continue;
            std::vector<int> on;
            for (int f = 0; f < 8; ++f)
                if (dot(arr.forms[f].coeffs, key[0]) == 0 && dot(arr.forms[f].coeffs, key[1]) == 0) on.push_back(f);
            lines.emplace(key, std::move(on));
        }

    int max_line_mult = 0;
    for (const auto& [key, on] : lines) {
        int m = static_cast<int>(on.size());
        max_line_mult = std::max(max_line_mult, m);
        if (m == 2) ++cen.double_lines;
        if (m == 3) ++cen.triple_lines;
        if (m >= 2) cen.lines.push_back(IncidenceLine{key, m, on});
    }

    auto on_some_triple_line = [&](const Vec4& p, const std::vector<int>& planes) {
        // a line through p carried by >= 3 of the forms
        for (const auto& [key, on] : lines) {
            if (on.size() < 3) continue;
            // p on the line iff p in span(key): all forms of the line vanish at p
            // use: line = intersection of its planes; p on line iff every plane of `on` contains p
            bool onit = true;
            for (int f : on)
                if (std::find(planes.begin(), planes.end(), f) == planes.end()) {
                    onit = false;
                    break;
                }
            if (onit) return true;
        }
        return false;
    };

    int max_point_mult = 0;
    for (const auto& [p, on] : points) {
        int m = static_cast<int>(on.size());
        max_point_mult = std::max(max_point_mult, m);
        if (m < 3) continue;
        IncidencePoint ip{p, m, on_some_triple_line(p, on), on};
        if (m == 4) ++cen.points_mult4;
        if (m == 5) ++cen.points_mult5;
        cen.points.push_back(std::move(ip));
    }
    cen.admissible = max_point_mult <= 5 && max_line_mult <= 3;
    cen.p4_generic = static_cast<int>(p4_generic_points(arr, cen).size());
    return cen;
}

inline std::vector<IncidencePoint> p4_generic_points(const Arrangement& arr, const Census& cen) {
    std::vector<IncidencePoint> out;
    for (const auto& p : cen.points) {
        if (p.multiplicity != 4 || p.on_triple_line) continue;
        bool generic = true;
        for (const auto& l : cen.lines) {
            if (l.multiplicity < 3) continue;
            int through = 0;
            for (int f : l.planes)
                if (std::find(p.planes.begin(), p.planes.end(), f) != p.planes.end()) ++through;
            if (through >= 2) {
                generic = false;
                break;
            }
        }
        (void)arr;
        if (generic) out.push_back(p);
    }
    return out;
}

// b3 of the smoothing from b3 of the partial resolution.
inline int betti_relations(int b3_hat, int b3_tilde = 2) {
    if (b3_tilde < 0 || b3_hat < b3_tilde)
        throw std::invalid_argument("betti_relations needs b3_hat >= b3_tilde >= 0");
    return 2 * b3_hat - b3_tilde;
}

}  // namespace doctic
