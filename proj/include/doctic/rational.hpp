#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace doctic {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using Vec4 = std::array<Rat, 4>;

inline int sgn(const Rat& x) { return x == 0 ? 0 : (x > 0 ? 1 : -1); }
inline int sgn(const Int& x) { return x == 0 ? 0 : (x > 0 ? 1 : -1); }

inline Rat dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Canonical projective scaling: clear denominators, divide by content,
// make the first nonzero entry positive. Equality of planes/points becomes
// plain field comparison.
inline Vec4 projective_canonical(Vec4 v) {
    Int l = 1;
    for (const auto& c : v) l = lcm(l, denominator(c));
    std::array<Int, 4> w;
    for (int i = 0; i < 4; ++i) w[i] = numerator(v[i]) * (l / denominator(v[i]));
    Int g = 0;
    for (const auto& c : w) g = gcd(g, c);
    if (g == 0) throw std::invalid_argument("zero vector has no projective class");
    for (const auto& c : w)
        if (c != 0) {
            if (c < 0) g = -g;
            break;
        }
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = Rat(w[i] / g);
    return out;
}

// Dense rational matrix, row-major. Small sizes only.
struct QMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Rat> a;

    QMat() = default;
    QMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    Rat& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static QMat identity(std::size_t n) {
        QMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
};

inline QMat operator*(const QMat& x, const QMat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("QMat shape mismatch");
    QMat r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const Rat& v = x(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
        }
    return r;
}

// In-place reduced row echelon form; returns the rank.
inline std::size_t rref(QMat& m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t p = r;
        while (p < m.rows && m(p, c) == 0) ++p;
        if (p == m.rows) continue;
        for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(p, j), m(r, j));
        Rat inv = m(r, c);
        for (std::size_t j = c; j < m.cols; ++j) m(r, j) /= inv;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rat f = m(i, c);
            for (std::size_t j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

inline std::size_t rank(QMat m) { return rref(m); }

// Basis of the right nullspace {x : m x = 0}.
inline std::vector<std::vector<Rat>> nullspace(QMat m) {
    rref(m);
    std::vector<long> pivot_of_col(m.cols, -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c)
        if (m(r, c) != 0) pivot_of_col[c] = static_cast<long>(r++);
    std::vector<std::vector<Rat>> basis;
    for (std::size_t c = 0; c < m.cols; ++c) {
        if (pivot_of_col[c] >= 0) continue;
        std::vector<Rat> v(m.cols);
        v[c] = 1;
        for (std::size_t c2 = 0; c2 < c; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = -m(static_cast<std::size_t>(pivot_of_col[c2]), c);
        basis.push_back(std::move(v));
    }
    return basis;
}

inline Rat det4(const QMat& m) {
    if (m.rows != 4 || m.cols != 4) throw std::invalid_argument("det4 needs 4x4");
    QMat w = m;
    Rat d = 1;
    for (std::size_t c = 0; c < 4; ++c) {
        std::size_t p = c;
        while (p < 4 && w(p, c) == 0) ++p;
        if (p == 4) return 0;
        if (p != c) {
            for (std::size_t j = 0; j < 4; ++j) std::swap(w(p, j), w(c, j));
            d = -d;
        }
        d *= w(c, c);
        Rat inv = w(c, c);
        for (std::size_t i = c + 1; i < 4; ++i) {
            if (w(i, c) == 0) continue;
            Rat f = w(i, c) / inv;
            for (std::size_t j = c; j < 4; ++j) w(i, j) -= f * w(c, j);
        }
    }
    return d;
}

inline QMat inverse4(const QMat& m) {
    if (m.rows != 4 || m.cols != 4) throw std::invalid_argument("inverse4 needs 4x4");
    QMat w(4, 8);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) w(i, j) = m(i, j);
        w(i, 4 + i) = 1;
    }
    if (rref(w) != 4) throw std::invalid_argument("matrix not invertible");
    QMat inv(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) inv(i, j) = w(i, 4 + j);
    return inv;
}

inline std::string to_string(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

}  // namespace doctic
