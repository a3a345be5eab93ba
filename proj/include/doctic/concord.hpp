#pragma once

#include <optional>
#include <string>

#include "doctic/lattice.hpp"
#include "doctic/modular.hpp"

namespace doctic {

// One row of the period / L-value comparison: omega_re = rho_re * pi^2 * L(f,1),
// omega_im = rho_im * pi * L(f,2).
struct CommensurabilityReport {
    std::string arrangement;
    std::string form;
    std::optional<Rat> rho_re, rho_im;
    Real residual_re{}, residual_im{};  // relative mismatch of the matched equality

    bool ok() const { return rho_re && rho_im; }
};

inline CommensurabilityReport match_periods(const PeriodLattice& lat, const LValues& lv,
                                            long max_den = 64, const Real& tol = Real(1e-6),
                                            const std::string& arrangement = "",
                                            const std::string& form = "") {
    CommensurabilityReport rep;
    rep.arrangement = arrangement;
    rep.form = form;
    Real pi = pi_real();
    Real ref_re = pi * pi * lv.L1, ref_im = pi * lv.L2;
    rep.rho_re = recognize_rational(lat.omega_re, ref_re, max_den, tol);
    rep.rho_im = recognize_rational(lat.omega_im, ref_im, max_den, tol);
    rep.residual_re =
        rep.rho_re ? abs(lat.omega_re - to_real(*rep.rho_re) * ref_re) / lat.omega_re : Real(1);
    rep.residual_im =
        rep.rho_im ? abs(lat.omega_im - to_real(*rep.rho_im) * ref_im) / lat.omega_im : Real(1);
    return rep;
}

}  // namespace doctic
