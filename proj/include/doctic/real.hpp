#pragma once

#include <sstream>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include "doctic/rational.hpp"

namespace doctic {

// Working real type: ~33 significant decimal digits, well above the
// 25-digit floor all numeric stages assume.
using Real = boost::multiprecision::float128;

inline Real pi_real() {
    static const Real p = boost::math::constants::pi<Real>();
    return p;
}

inline Real to_real(const Rat& r) {
    return Real(numerator(r)) / Real(denominator(r));
}

inline std::string to_string(const Real& x, int digits = 12) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

}  // namespace doctic
