#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctic/real.hpp"

namespace doctic {

// Weight-4 Hecke eigenform given by its prime coefficients a_p.
struct ModularForm {
    std::string name;  // e.g. "8/1"
    long level = 0;
    int weight = 4;
    int atkin_lehner = +1;
    std::map<long, Int> ap;

    long max_prime() const { return ap.empty() ? 0 : ap.rbegin()->first; }
};

struct LValues {
    Real L1{}, L2{}, L3{};
    Real lambda1{}, lambda2{}, lambda3{};  // completed values Lambda(f, s)
};

namespace detail {

inline bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace detail

// File format: comment lines, then `name level weight sign`, then `p a_p`
// per line for all primes p up to some bound.
inline ModularForm load_form(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open form file " + path.string());
    ModularForm f;
    bool have_header = false;
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r\n");
        if (b == std::string::npos || line[b] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string sign;
            if (!(ls >> f.name >> f.level >> f.weight >> sign))
                throw std::runtime_error(path.string() + ": bad header line");
            f.atkin_lehner = sign == "+1" || sign == "1" ? +1 : -1;
            have_header = true;
            continue;
        }
        long p;
        std::string coeff;
        if (!(ls >> p >> coeff)) throw std::runtime_error(path.string() + ": bad coefficient line");
        if (!detail::is_prime(p)) throw std::runtime_error(path.string() + ": composite index");
        f.ap[p] = Int(coeff);
    }
    if (!have_header) throw std::runtime_error(path.string() + ": missing header");
    if (f.weight != 4) throw std::runtime_error(path.string() + ": weight must be 4");
    if (f.level <= 0) throw std::runtime_error(path.string() + ": bad level");
    // every prime up to the bound present, Deligne bound for good primes
    for (long p = 2; p <= f.max_prime(); ++p) {
        if (!detail::is_prime(p)) continue;
        auto it = f.ap.find(p);
        if (it == f.ap.end())
            throw std::runtime_error(path.string() + ": missing prime " + std::to_string(p));
        if (f.level % p != 0) {
            Int bound2 = 4 * Int(p) * Int(p) * Int(p);  // (2 p^{3/2})^2
            if (it->second * it->second > bound2)
                throw std::runtime_error(path.string() + ": Deligne bound violated at p=" +
                                         std::to_string(p));
        }
    }
    return f;
}

// Multiplicative extension a_1..a_n_max from the prime data:
// a_{p^{r+1}} = a_p a_{p^r} - p^3 a_{p^{r-1}} for p not dividing N,
// a_{p^r} = (a_p)^r for p | N, and a_{mn} = a_m a_n for coprime m, n.
inline std::vector<Int> extend_coefficients(const ModularForm& f, long n_max) {
    std::vector<Int> a(n_max + 1, 0);
    a[1] = 1;
    for (long p = 2; p <= n_max; ++p) {
        if (!detail::is_prime(p)) continue;
        auto it = f.ap.find(p);
        if (it == f.ap.end())
            throw std::runtime_error("extend_coefficients: missing a_p for p = " +
                                     std::to_string(p));
        const Int& ap = it->second;
        // prime powers
        std::vector<Int> pw = {Int(1), ap};
        for (long q = p * p; q <= n_max; q *= p) {
            Int next;
            if (f.level % p == 0)
                next = pw.back() * ap;
            else
                next = ap * pw[pw.size() - 1] - Int(p) * Int(p) * Int(p) * pw[pw.size() - 2];
            pw.push_back(next);
            if (q > n_max / p) break;
        }
        for (size_t r = 1; r < pw.size(); ++r) {
            long q = 1;
            for (size_t i = 0; i < r; ++i) q *= p;
            if (q > n_max) break;
            a[q] = pw[r];
        }
    }
    // multiplicativity: fill composites with >= 2 distinct prime factors
    for (long n = 2; n <= n_max; ++n) {
        long p = 2;
        while (n % p) ++p;
        long q = 1;
        long m = n;
        while (m % p == 0) {
            m /= p;
            q *= p;
        }
        if (m > 1) a[n] = a[q] * a[m];
    }
    return a;
}

namespace detail {

// upper incomplete gamma at integer s in {1,2,3}
inline Real upper_gamma(int s, const Real& x) {
    Real e = exp(-x);
    switch (s) {
        case 1: return e;
        case 2: return (1 + x) * e;
        case 3: return (2 + 2 * x + x * x) * e;
        default: throw std::invalid_argument("upper_gamma: s must be 1, 2, or 3");
    }
}

}  // namespace detail

// Completed L-value via the incomplete-gamma expansion
//   Lambda(f,s) = sum_n a_n [ (sqrt(N)/2 pi n)^s Gamma(s, x_n)
//                           + w (sqrt(N)/2 pi n)^{4-s} Gamma(4-s, x_n) ],
// x_n = 2 pi n / sqrt(N), truncated once the tail bound
// sum_{n>M} 3 n^{5/2} e^{-x_n} drops below 10^-precision.
inline Real lambda_value(const ModularForm& f, int s, int precision = 25) {
    if (s < 1 || s > 3) throw std::invalid_argument("lambda_value: s must be 1, 2, or 3");
    Real sqN = sqrt(Real(f.level));
    Real c = 2 * pi_real() / sqN;
    Real threshold = pow(Real(10), -precision - 2);
    long M = 1;
    while (M < 100000) {
        // geometric-series bound on the remaining tail
        Real t = 3 * pow(Real(M + 1), Real(2.5)) * exp(-c * (M + 1)) / (1 - exp(-c));
        if (t < threshold) break;
        ++M;
    }
    if (M > 100 * f.max_prime())
        throw std::runtime_error("lambda_value: coefficient table too short for precision");
    auto a = extend_coefficients(f, M);
    Real total = 0;
    for (long n = M; n >= 1; --n) {  // ascending magnitudes: stable summation
        if (a[n] == 0) continue;
        Real x = c * n;
        Real base = 1 / (c * n);  // sqrt(N) / (2 pi n)
        Real term = pow(base, s) * detail::upper_gamma(s, x) +
                    f.atkin_lehner * pow(base, 4 - s) * detail::upper_gamma(4 - s, x);
        total += Real(a[n]) * term;
    }
    return total;
}

inline Real l_value(const ModularForm& f, int s, int precision = 25) {
    Real sqN_2pi = sqrt(Real(f.level)) / (2 * pi_real());
    Real gamma_s = s == 3 ? 2 : 1;  // Gamma(1) = Gamma(2) = 1, Gamma(3) = 2
    return lambda_value(f, s, precision) / (pow(sqN_2pi, s) * gamma_s);
}

inline LValues l_values(const ModularForm& f, int precision = 25) {
    LValues v;
    v.lambda1 = lambda_value(f, 1, precision);
    v.lambda2 = lambda_value(f, 2, precision);
    v.lambda3 = lambda_value(f, 3, precision);
    Real sqN_2pi = sqrt(Real(f.level)) / (2 * pi_real());
    v.L1 = v.lambda1 / sqN_2pi;
    v.L2 = v.lambda2 / (sqN_2pi * sqN_2pi);
    v.L3 = v.lambda3 / (2 * sqN_2pi * sqN_2pi * sqN_2pi);
    return v;
}

}  // namespace doctic
