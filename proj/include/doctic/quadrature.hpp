#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctic/chamber.hpp"
#include "doctic/real.hpp"

namespace doctic {

enum class Axis { REAL, IMAGINARY };

inline const char* axis_name(Axis a) { return a == Axis::REAL ? "real" : "imaginary"; }

struct QuadratureSettings {
    Real tol = 1e-10;
    long budget = 1l << 20;
    int max_level = 8;
};

struct PeriodValue {
    Real value{};  // positive magnitude
    Axis axis = Axis::REAL;
    Real est_rel_err{};
    std::string cell_ref;
    QuadratureSettings settings;
    long evaluations = 0;
};

// Thrown when the node budget or refinement ceiling is hit before the
// requested tolerance; carries the best estimate achieved so far.
struct QuadratureFailure : std::runtime_error {
    PeriodValue best;
    QuadratureFailure(const std::string& msg, PeriodValue b)
        : std::runtime_error(msg), best(std::move(b)) {}
};

namespace detail {

// Double-exponential (tanh-sinh) abscissas on (0,1). For t = k*h,
// beta = 1/(1+exp(-pi*sinh t)) and weight = pi*cosh(t)*beta*(1-beta).
// Both beta and 1-beta are stored so that distances to either endpoint
// stay fully accurate arbitrarily close to the boundary.
struct TSNode {
    Real beta, omb, weight;
};

inline constexpr int ts_max_level = 10;

// level 0 holds all k >= 1 at h = 1; level m >= 1 holds only the odd
// multiples of h = 2^-m, so successive levels reuse all previous nodes
inline const std::vector<std::vector<TSNode>>& ts_tables() {
    static const std::vector<std::vector<TSNode>> tables = [] {
        const Real pi = pi_real();
        const Real tmax = 7;
        std::vector<std::vector<TSNode>> t(ts_max_level + 1);
        for (int m = 0; m <= ts_max_level; ++m) {
            Real h = ldexp(Real(1), -m);
            for (long k = 1; k * h <= tmax; k += (m == 0 ? 1 : 2)) {
                Real tk = k * h;
                Real a = pi * sinh(tk);
                TSNode n;
                n.beta = 1 / (1 + exp(-a));
                n.omb = 1 / (1 + exp(a));
                n.weight = pi * cosh(tk) * n.beta * n.omb;
                t[m].push_back(n);
            }
        }
        return t;
    }();
    return tables;
}

struct QuadCtx {
    long budget = 0;
    bool exhausted = false;
};

struct Estimate {
    Real value{};
    Real abs_err{};
    bool converged = false;
};

// Adaptive tanh-sinh on (0,1): refine the step until two levels agree to
// rel_tol. The integrand receives (beta, 1-beta). Node order is fixed, so
// results are bit-for-bit deterministic.
template <class F>
Estimate integrate01(F&& f, const Real& rel_tol, QuadCtx& ctx, int max_level = 8) {
    const auto& tables = ts_tables();
    if (max_level > ts_max_level) max_level = ts_max_level;
    static const Real trunc_floor = 1e-34;
    static const Real half = Real(1) / 2;
    Real trunc = rel_tol / 256;
    if (trunc < trunc_floor) trunc = trunc_floor;

    auto eval = [&](const Real& b, const Real& o) {
        if (ctx.budget-- <= 0) ctx.exhausted = true;
        return f(b, o);
    };

    // level 0: h = 1
    Real prev = (pi_real() / 4) * eval(half, half);
    int quiet = 0;
    for (const auto& n : tables[0]) {
        if (ctx.exhausted) break;
        Real term = n.weight * (eval(n.beta, n.omb) + eval(n.omb, n.beta));
        prev += term;
        if (abs(term) <= trunc * abs(prev)) {
            if (++quiet >= 2) break;
        } else {
            quiet = 0;
        }
    }

    Estimate best;
    best.value = prev;
    best.abs_err = abs(prev);
    for (int m = 1; m <= max_level && !ctx.exhausted; ++m) {
        Real h = ldexp(Real(1), -m);
        Real odd = 0;
        quiet = 0;
        for (const auto& n : tables[m]) {
            if (ctx.exhausted) break;
            Real term = n.weight * (eval(n.beta, n.omb) + eval(n.omb, n.beta));
            odd += term;
            if (h * abs(term) <= trunc * abs(prev)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
        }
        Real cur = prev / 2 + h * odd;
        best.value = cur;
        best.abs_err = abs(cur - prev);
        if (m >= 2 && best.abs_err <= rel_tol * abs(cur)) {
            best.converged = true;
            return best;
        }
        prev = cur;
    }
    return best;
}

}  // namespace detail

// One x-slab of a cell, mapped trilinearly from the unit cube in
// (bx,by,bz): x interpolates the slab interval, y the two edge chains,
// z the two sheets. Every affine form value is then multilinear in the
// cube coordinates, hence equals the positive multilinear combination of
// its 8 corner values. Corner magnitudes are exact rationals converted
// once, so no cancellation can occur anywhere, including at singular
// faces where corners are exactly zero.
struct SlabCell {
    Real v[8][2][2][2]{};  // |form value| at corner (ix,iy,iz)
    Real gy[2]{};          // upper-lower chain gap at x0, x1
    Real gz[2][2]{};       // upper-lower sheet gap at the 4 (x,y) corners
    Real width{};          // x1 - x0
    Real lam{};            // |lambda|
};

// Integral of width*gy*gz / sqrt(lam * prod |forms|) over the unit cube.
inline detail::Estimate integrate_slab_cell(const SlabCell& sc, const Real& tol,
                                            detail::QuadCtx& ctx, int max_level = 8) {
    const Real tol_mid = tol / 4, tol_in = tol / 8;

    auto outer = [&](const Real& bx, const Real& ox) -> Real {
        Real gy = ox * sc.gy[0] + bx * sc.gy[1];
        if (gy == 0) return Real(0);
        Real a[8][2][2];
        for (int i = 0; i < 8; ++i)
            for (int iy = 0; iy < 2; ++iy)
                for (int iz = 0; iz < 2; ++iz)
                    a[i][iy][iz] = ox * sc.v[i][0][iy][iz] + bx * sc.v[i][1][iy][iz];
        Real gzx[2] = {ox * sc.gz[0][0] + bx * sc.gz[1][0],
                       ox * sc.gz[0][1] + bx * sc.gz[1][1]};

        auto middle = [&](const Real& by, const Real& oy) -> Real {
            Real gz = oy * gzx[0] + by * gzx[1];
            if (gz == 0) return Real(0);
            Real b[8][2];
            for (int i = 0; i < 8; ++i)
                for (int iz = 0; iz < 2; ++iz) b[i][iz] = oy * a[i][0][iz] + by * a[i][1][iz];

            auto inner = [&](const Real& bz, const Real& oz) -> Real {
                Real p = sc.lam;
                for (int i = 0; i < 8; ++i) p *= oz * b[i][0] + bz * b[i][1];
                if (p <= 0) return Real(0);  // underflowed tail node, negligible
                return 1 / sqrt(p);
            };
            // Inner convergence flags are not propagated: at outer nodes
            // double-exponentially close to a singular face the inner
            // integrand varies too slowly to pass the two-level agreement
            // test, yet contributes a vanishing share of the total. The
            // outer-level agreement and the node budget remain the gates.
            auto r = detail::integrate01(inner, tol_in, ctx, max_level);
            return gz * r.value;
        };
        auto r = detail::integrate01(middle, tol_mid, ctx, max_level);
        return gy * r.value;
    };

    auto r = detail::integrate01(outer, tol / 2, ctx, max_level);
    r.value *= sc.width;
    r.abs_err *= sc.width;
    r.converged = r.converged && !ctx.exhausted;
    return r;
}

namespace detail {

// lower/upper chain of a convex region over the slab (x0,x1): y = a + b*x
struct Chains {
    Rat alo, blo, aup, bup;
};

inline Chains slab_chains(const std::vector<Vec2>& vs, const Rat& x0, const Rat& x1) {
    Rat xm = (x0 + x1) / 2;
    std::vector<std::pair<Rat, Rat>> spanning;  // (a, b)
    for (std::size_t e = 0; e < vs.size(); ++e) {
        const Vec2& p = vs[e];
        const Vec2& q = vs[(e + 1) % vs.size()];
        if (p[0] == q[0]) continue;
        if (std::min(p[0], q[0]) <= x0 && x1 <= std::max(p[0], q[0])) {
            Rat b = (q[1] - p[1]) / (q[0] - p[0]);
            spanning.emplace_back(p[1] - b * p[0], b);
        }
    }
    if (spanning.size() != 2) throw std::logic_error("slab chain extraction failed");
    Rat y0 = spanning[0].first + spanning[0].second * xm;
    Rat y1 = spanning[1].first + spanning[1].second * xm;
    if (y0 > y1) std::swap(spanning[0], spanning[1]);
    return Chains{spanning[0].first, spanning[0].second, spanning[1].first, spanning[1].second};
}

}  // namespace detail

// 2 * integral over the cell of |lambda * prod forms|^{-1/2}, in chart
// coordinates (the chart determinant factor is applied by the caller).
inline PeriodValue cell_period(const Cell3D& cell, const AffineArrangement& aff, const Real& tol,
                               long budget = 1l << 20, int max_level = 8) {
    if (!cell.closed) throw std::invalid_argument("cell_period requires a closed cell");
    if (cell.f_sign == 0) throw std::invalid_argument("cell_period: indeterminate f_sign");

    std::vector<Rat> xs;
    for (const Vec2& v : cell.region.vertices) xs.push_back(v[0]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    detail::QuadCtx ctx{budget};
    Real total = 0, err = 0;
    bool ok = true;
    for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
        const Rat& x0 = xs[s];
        const Rat& x1 = xs[s + 1];
        auto ch = detail::slab_chains(cell.region.vertices, x0, x1);

        SlabCell sc;
        sc.width = to_real(x1 - x0);
        sc.lam = abs(to_real(aff.lambda));
        for (int ix = 0; ix < 2; ++ix) {
            Rat x = ix ? x1 : x0;
            Rat ylo = ch.alo + ch.blo * x, yup = ch.aup + ch.bup * x;
            if (yup < ylo) throw std::logic_error("crossed chains in slab");
            sc.gy[ix] = to_real(yup - ylo);
            for (int iy = 0; iy < 2; ++iy) {
                Rat y = iy ? yup : ylo;
                Rat zlo = aff.sheet(cell.lower_sheet, x, y);
                Rat zup = aff.sheet(cell.upper_sheet, x, y);
                if (zup < zlo) throw std::logic_error("crossed sheets in slab");
                sc.gz[ix][iy] = to_real(zup - zlo);
                for (int iz = 0; iz < 2; ++iz) {
                    Rat z = iz ? zup : zlo;
                    for (int i = 0; i < 8; ++i) {
                        Rat val = aff.value(i, x, y, z);
                        int sg = sgn(val);
                        if (sg != 0 && sg != cell.sign_vector[i])
                            throw std::logic_error("inconsistent form sign at cell corner");
                        sc.v[i][ix][iy][iz] = to_real(abs(val));
                    }
                }
            }
        }
        auto est = integrate_slab_cell(sc, tol, ctx, max_level);
        total += est.value;
        err += est.abs_err;
        ok = ok && est.converged;
    }

    PeriodValue pv;
    pv.value = 2 * total;
    pv.axis = cell.f_sign > 0 ? Axis::REAL : Axis::IMAGINARY;
    pv.est_rel_err = (total > 0 ? err / total : Real(1)) + tol / 4 + tol / 8;
    pv.cell_ref = cell.id;
    pv.settings = QuadratureSettings{tol, budget, max_level};
    pv.evaluations = budget - ctx.budget;
    if (!ok || ctx.exhausted)
        throw QuadratureFailure("cell_period: tolerance not reached within budget on cell " + cell.id, pv);
    return pv;
}

// --- power-substitution cross-check ------------------------------------------

namespace detail {

// affine function of (u1,u2,u3): c[0]u1 + c[1]u2 + c[2]u3 + c[3]
using AffU = std::array<Rat, 4>;

inline Rat affu_min(const AffU& c) {
    Rat m = c[3];
    for (int i = 0; i < 3; ++i)
        if (c[i] < 0) m += c[i];
    return m;
}
inline Rat affu_max(const AffU& c) {
    Rat m = c[3];
    for (int i = 0; i < 3; ++i)
        if (c[i] > 0) m += c[i];
    return m;
}

struct BoxProblem {
    std::vector<AffU> forms;  // composed with the cube parametrization
    Rat absdet;
};

// Integrate one sub-box after moving all vanishing faces to u_j = 0; splits
// an axis in half when both of its faces carry a vanishing factor.
inline Estimate power_box_integral(BoxProblem box, int k, const Rat& lambda, const Real& tol,
                                   QuadCtx& ctx, int depth = 0) {
    if (depth > 4) throw std::logic_error("box split recursion too deep");
    // classify every factor that can vanish on the closed cube
    std::array<int, 3> mult{0, 0, 0};
    std::array<bool, 3> lower_face{false, false, false}, upper_face{false, false, false};
    for (const auto& f : box.forms) {
        if (affu_min(f) > 0 || affu_max(f) < 0) continue;  // sign-definite
        int axis = -1, nz = 0;
        for (int j = 0; j < 3; ++j)
            if (f[j] != 0) {
                axis = j;
                ++nz;
            }
        if (nz != 1)
            throw std::invalid_argument(
                "cell not box-reducible: a factor vanishes off the coordinate faces");
        if (f[3] == 0) {
            lower_face[axis] = true;
            ++mult[axis];
        } else if (f[3] == -f[axis]) {
            upper_face[axis] = true;
            ++mult[axis];
        } else {
            throw std::invalid_argument(
                "cell not box-reducible: a factor vanishes inside the box");
        }
    }

    for (int j = 0; j < 3; ++j) {
        if (lower_face[j] && upper_face[j]) {
            // split the axis at 1/2 and integrate the halves separately
            Estimate total;
            total.converged = true;
            for (int half = 0; half < 2; ++half) {
                BoxProblem sub = box;
                sub.absdet = box.absdet / 2;
                for (auto& f : sub.forms) {
                    f[3] += f[j] * Rat(half, 2);
                    f[j] /= 2;
                }
                auto e = power_box_integral(std::move(sub), k, lambda, tol, ctx, depth + 1);
                total.value += e.value;
                total.abs_err += e.abs_err;
                total.converged = total.converged && e.converged;
            }
            return total;
        }
        if (upper_face[j] && !lower_face[j]) {
            // flip u_j -> 1 - u_j so every vanishing face sits at u_j = 0
            for (auto& f : box.forms) {
                f[3] += f[j];
                f[j] = -f[j];
            }
            upper_face[j] = false;
            lower_face[j] = true;
        }
    }

    // u_j = s_j^k; a factor c*u_j contributes |c|^{-1/2} * s_j^{-k/2} and the
    // Jacobian contributes k^3 (s1 s2 s3)^{k-1}
    std::array<Rat, 3> expo;
    for (int j = 0; j < 3; ++j) {
        expo[j] = Rat(k - 1) - Rat(k * mult[j], 2);
        if (expo[j] < 0)
            throw std::invalid_argument("integrand unbounded after substitution: k too small");
    }

    Rat prefac = abs(lambda);
    std::vector<AffU> regular;
    for (const auto& f : box.forms) {
        if (affu_min(f) > 0 || affu_max(f) < 0) {
            regular.push_back(f);
        } else {
            for (int j = 0; j < 3; ++j)
                if (f[j] != 0) prefac *= abs(f[j]);
        }
    }
    std::vector<std::array<Real, 4>> reg;
    for (const auto& f : regular)
        reg.push_back({to_real(f[0]), to_real(f[1]), to_real(f[2]), to_real(f[3])});
    const Real kr = k;
    const Real pref = sqrt(to_real(prefac));
    const Real jac = kr * kr * kr;
    const std::array<Real, 3> er{to_real(expo[0]), to_real(expo[1]), to_real(expo[2])};

    auto integrand = [&](const Real& s1, const Real& s2, const Real& s3) -> Real {
        Real u1 = pow(s1, kr), u2 = pow(s2, kr), u3 = pow(s3, kr);
        Real p = 1;
        for (const auto& c : reg) p *= abs(c[0] * u1 + c[1] * u2 + c[2] * u3 + c[3]);
        Real num = jac;
        if (er[0] != 0) num *= pow(s1, er[0]);
        if (er[1] != 0) num *= pow(s2, er[1]);
        if (er[2] != 0) num *= pow(s3, er[2]);
        return num / (pref * sqrt(p));
    };

    // runtime boundedness sampling toward faces and corners
    {
        Real center = integrand(Real(1) / 2, Real(1) / 2, Real(1) / 2);
        for (double d : {1e-2, 1e-4, 1e-6}) {
            Real delta = d;
            Real probes[4] = {integrand(delta, Real(1) / 2, Real(1) / 2),
                              integrand(Real(1) / 2, delta, Real(1) / 2),
                              integrand(Real(1) / 2, Real(1) / 2, delta),
                              integrand(delta, delta, delta)};
            for (const Real& p : probes)
                if (p > 1e6 * (center + 1))
                    throw std::invalid_argument("integrand unbounded after substitution");
        }
    }

    const Real tol_mid = tol / 4, tol_in = tol / 8;
    auto outer = [&](const Real& b1, const Real&) -> Real {
        auto middle = [&](const Real& b2, const Real&) -> Real {
            auto inner = [&](const Real& b3, const Real&) -> Real { return integrand(b1, b2, b3); };
            return integrate01(inner, tol_in, ctx).value;
        };
        return integrate01(middle, tol_mid, ctx).value;
    };
    auto r = integrate01(outer, tol / 2, ctx);
    Real scale = to_real(box.absdet);
    r.value *= scale;
    r.abs_err *= scale;
    r.converged = r.converged && !ctx.exhausted;
    return r;
}

}  // namespace detail

// Independent cross-check of cell_period via the substitution
// (x,y,z) -> (x^k, y^k, z^k) after an affine identification of the cell
// with the unit cube; requires a parallelepiped cell whose product only
// vanishes on cube faces.
inline PeriodValue power_substitution_period(const Cell3D& cell, const AffineArrangement& aff,
                                             int k, const Real& tol, long budget = 1l << 20) {
    if (k < 1) throw std::invalid_argument("power substitution requires k >= 1");
    if (cell.f_sign == 0) throw std::invalid_argument("indeterminate f_sign");
    const auto& vs = cell.region.vertices;
    if (vs.size() != 4 || vs[0][0] + vs[2][0] != vs[1][0] + vs[3][0] ||
        vs[0][1] + vs[2][1] != vs[1][1] + vs[3][1])
        throw std::invalid_argument("cell not box-reducible: region is not a parallelogram");
    auto gap_at = [&](const Vec2& p) {
        return aff.sheet(cell.upper_sheet, p[0], p[1]) - aff.sheet(cell.lower_sheet, p[0], p[1]);
    };
    Rat gap = gap_at(vs[0]);
    if (gap_at(vs[1]) != gap || gap_at(vs[3]) != gap)
        throw std::invalid_argument("cell not box-reducible: sheets are not parallel");

    // cube parametrization: (x,y) = v0 + u1(v1-v0) + u2(v3-v0), z between sheets
    detail::AffU X{vs[1][0] - vs[0][0], vs[3][0] - vs[0][0], 0, vs[0][0]};
    detail::AffU Y{vs[1][1] - vs[0][1], vs[3][1] - vs[0][1], 0, vs[0][1]};
    const Vec4& cl = aff.forms[cell.lower_sheet].coeffs;
    detail::AffU Z;
    for (int t = 0; t < 4; ++t) Z[t] = -(cl[0] * X[t] + cl[1] * Y[t] + (t == 3 ? cl[3] : 0)) / cl[2];
    Z[2] += gap;

    detail::BoxProblem box;
    box.absdet = abs((X[0] * Y[1] - X[1] * Y[0]) * gap);
    if (box.absdet == 0) throw std::invalid_argument("degenerate cell");
    for (int i = 0; i < 8; ++i) {
        const Vec4& c = aff.forms[i].coeffs;
        detail::AffU f;
        for (int t = 0; t < 4; ++t)
            f[t] = c[0] * X[t] + c[1] * Y[t] + c[2] * Z[t] + (t == 3 ? c[3] : 0);
        box.forms.push_back(f);
    }

    detail::QuadCtx ctx{budget};
    auto est = detail::power_box_integral(std::move(box), k, aff.lambda, tol, ctx);

    PeriodValue pv;
    pv.value = 2 * est.value;
    pv.axis = cell.f_sign > 0 ? Axis::REAL : Axis::IMAGINARY;
    pv.est_rel_err = (est.value > 0 ? est.abs_err / est.value : Real(1)) + tol / 4 + tol / 8;
    pv.cell_ref = cell.id + ":power" + std::to_string(k);
    pv.settings = QuadratureSettings{tol, budget, 8};
    pv.evaluations = budget - ctx.budget;
    if (!est.converged || ctx.exhausted)
        throw QuadratureFailure("power_substitution_period: tolerance not reached", pv);
    return pv;
}

// --- scaling verification ----------------------------------------------------

struct ScalingRecord {
    Rat mu;
    PeriodValue base, scaled, flipped;
    Real scale_residual{};  // |scaled*sqrt(mu)/base - 1|
    bool axis_swapped = false;
    bool magnitude_match = false;
    bool ok = false;
};

// period(mu*lambda*F) = mu^{-1/2} * period(lambda*F); negating lambda swaps
// the real and imaginary axes with equal magnitude.
inline ScalingRecord scaling_check(const Cell3D& cell, const AffineArrangement& aff,
                                   const Rat& mu, const Real& tol, long budget = 1l << 20) {
    if (mu <= 0) throw std::invalid_argument("scaling_check requires mu > 0");
    ScalingRecord rec;
    rec.mu = mu;
    rec.base = cell_period(cell, aff, tol, budget);

    AffineArrangement scaled_aff = aff;
    scaled_aff.lambda *= mu;
    rec.scaled = cell_period(cell, scaled_aff, tol, budget);
    rec.scale_residual = abs(rec.scaled.value * sqrt(to_real(mu)) / rec.base.value - 1);

    AffineArrangement flipped_aff = aff;
    flipped_aff.lambda = -flipped_aff.lambda;
    Cell3D flipped_cell = cell;
    flipped_cell.f_sign = -flipped_cell.f_sign;
    rec.flipped = cell_period(flipped_cell, flipped_aff, tol, budget);
    rec.axis_swapped = rec.flipped.axis != rec.base.axis;
    rec.magnitude_match = rec.flipped.value == rec.base.value;

    rec.ok = rec.scale_residual <= 2 * tol && rec.axis_swapped && rec.magnitude_match;
    return rec;
}

}  // namespace doctic
