#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctic/quadrature.hpp"

namespace doctic {

// Rectangular period lattice: every real-axis period is an integer multiple
// of omega_re, every imaginary-axis magnitude an integer multiple of
// omega_im.
struct PeriodLattice {
    Real omega_re{};
    Real omega_im{};
    // one entry per input period, in input order: multiplier as a rational
    // multiple of the generator of its axis (integral by construction)
    std::vector<std::pair<PeriodValue, Rat>> multipliers;
};

struct EllipticInvariants {
    Real tau_over_i{};  // tau = i * omega_im / omega_re
    Real g2{}, g3{}, j{};
};

// Continued-fraction recognition of x/y as p/q with q <= max_den.
// Returns the convergent iff it reproduces the ratio within tol.
inline std::optional<Rat> recognize_rational(const Real& x, const Real& y, long max_den = 64,
                                             const Real& tol = Real(1e-6)) {
    if (y == 0) throw std::invalid_argument("recognize_rational: zero reference value");
    Real ratio = x / y;
    // convergents p_k/q_k of the continued fraction of ratio
    Real v = ratio;
    Int p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // (p_{-1}, q_{-1}), (p_{-2}, q_{-2})
    for (int it = 0; it < 64; ++it) {
        Real fl = floor(v);
        if (fl > 1e18 || fl < -1e18) break;
        Int a(static_cast<long long>(fl));
        Int p = a * p0 + p1, q = a * q0 + q1;
        if (q > max_den) break;
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        Real rem = v - fl;
        if (rem < 1e-30) break;
        v = 1 / rem;
    }
    if (q0 == 0) return std::nullopt;
    Rat cand(p0, q0);
    if (abs(ratio - to_real(cand)) < tol) return cand;
    return std::nullopt;
}

namespace detail {

struct AxisGroup {
    std::vector<size_t> indices;  // into the input period list
    std::vector<Rat> ratios;      // period_i / first period of the axis
};

}  // namespace detail

// Per axis: write all magnitudes as rational multiples of the first and
// take the rational gcd as the generator, so every period is an integer
// multiple of it. tol <= 0 selects the default 1e6 * combined est_rel_err
// per pair (floored at 1e-12).
inline PeriodLattice lattice_generators(const std::vector<PeriodValue>& periods, long max_den = 64,
                                        const Real& tol = Real(0)) {
    detail::AxisGroup groups[2];
    for (size_t i = 0; i < periods.size(); ++i) {
        if (!(periods[i].value > 0))
            throw std::invalid_argument("lattice_generators: nonpositive period magnitude");
        groups[periods[i].axis == Axis::REAL ? 0 : 1].indices.push_back(i);
    }
    if (groups[0].indices.empty() || groups[1].indices.empty())
        throw std::invalid_argument(
            "lattice_generators: need at least one real and one imaginary period");

    PeriodLattice lat;
    lat.multipliers.resize(periods.size());
    for (auto& g : groups) {
        const PeriodValue& ref = periods[g.indices.front()];
        Int lcm_q = 1;
        for (size_t idx : g.indices) {
            const PeriodValue& p = periods[idx];
            Real pair_tol = tol;
            if (!(pair_tol > 0)) {
                pair_tol = Real(1e6) * (p.est_rel_err + ref.est_rel_err);
                if (pair_tol < 1e-12) pair_tol = 1e-12;
            }
            auto r = recognize_rational(p.value, ref.value, max_den, pair_tol);
            if (!r)
                throw std::runtime_error("lattice_generators: ratio of periods '" + p.cell_ref +
                                         "' / '" + ref.cell_ref +
                                         "' not recognized as rational "
                                         "(insufficient quadrature precision?)");
            g.ratios.push_back(*r);
            lcm_q = lcm(lcm_q, denominator(*r));
        }
        // rational gcd: first/L * gcd(p_i * L / q_i) with L = lcm of the q_i
        Int gcd_p = 0;
        for (const Rat& r : g.ratios) gcd_p = gcd(gcd_p, numerator(r) * (lcm_q / denominator(r)));
        Rat gen_mult(gcd_p, lcm_q);  // generator = gen_mult * ref.value
        Real generator = ref.value * to_real(gen_mult);
        (&g == &groups[0] ? lat.omega_re : lat.omega_im) = generator;
        for (size_t k = 0; k < g.indices.size(); ++k)
            lat.multipliers[g.indices[k]] = {periods[g.indices[k]], g.ratios[k] / gen_mult};
    }
    return lat;
}

// Truncated q-series for the normalized Eisenstein series of weight 4 and 6
// at tau = i * tau_over_i, q = e^{-2 pi tau_over_i}. Terms are added until
// the tail bound sigma_k(n) <= n^{k+1} pushes the remainder below 1e-28.
inline std::pair<Real, Real> eisenstein(const Real& tau_over_i, int max_terms = 4000) {
    if (!(tau_over_i > 0)) throw std::invalid_argument("eisenstein: tau not in upper half-plane");
    Real q = exp(-2 * pi_real() * tau_over_i);
    Real e4 = 1, e6 = 1, qn = 1;
    for (int n = 1; n <= max_terms; ++n) {
        qn *= q;
        Real s3 = 0, s5 = 0;
        for (int d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            int e = n / d;
            s3 += Real(d) * d * d;
            s5 += Real(d) * d * d * d * d;
            if (e != d) {
                s3 += Real(e) * e * e;
                s5 += Real(e) * e * e * e * e;
            }
        }
        e4 += 240 * s3 * qn;
        e6 -= 504 * s5 * qn;
        Real tail_factor = pow(Real(n + 1), 6) * qn * q / (1 - q);
        if (504 * tail_factor < 1e-28) break;
    }
    return {e4, e6};
}

// Invariants of the NORMALIZED lattice Z + tau*Z with tau = i*om_im/om_re.
inline EllipticInvariants elliptic_invariants(const PeriodLattice& lat) {
    if (!(lat.omega_re > 0 && lat.omega_im > 0))
        throw std::invalid_argument("elliptic_invariants: generators must be positive");
    EllipticInvariants inv;
    inv.tau_over_i = lat.omega_im / lat.omega_re;
    auto [e4, e6] = eisenstein(inv.tau_over_i);
    Real pi2 = pi_real() * pi_real();
    inv.g2 = 4 * pi2 * pi2 / 3 * e4;
    inv.g3 = 8 * pi2 * pi2 * pi2 / 27 * e6;
    Real disc = e4 * e4 * e4 - e6 * e6;
    if (disc == 0) throw std::runtime_error("elliptic_invariants: vanishing discriminant");
    inv.j = 1728 * e4 * e4 * e4 / disc;
    return inv;
}

}  // namespace doctic
