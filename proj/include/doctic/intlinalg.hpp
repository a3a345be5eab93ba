#pragma once

#include <cstdlib>
#include <vector>

#include "doctic/rational.hpp"

namespace doctic {

// Basis of the integer kernel {v in Z^c : M v = 0} via unimodular column
// reduction (column-style Hermite elimination). The returned vectors form a
// Z-basis of the full kernel lattice, not just a Q-basis.
inline std::vector<std::vector<Int>> integer_kernel(std::vector<std::vector<Int>> m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m[0].size() : 0;
    std::vector<std::vector<Int>> u(cols, std::vector<Int>(cols));
    for (std::size_t i = 0; i < cols; ++i) u[i][i] = 1;

    auto col_op_sub = [&](std::size_t dst, std::size_t src, const Int& q) {
        if (q == 0) return;
        for (std::size_t r = 0; r < rows; ++r) m[r][dst] -= q * m[r][src];
        for (std::size_t r = 0; r < cols; ++r) u[r][dst] -= q * u[r][src];
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t r = 0; r < rows; ++r) std::swap(m[r][a], m[r][b]);
        for (std::size_t r = 0; r < cols; ++r) std::swap(u[r][a], u[r][b]);
    };

    std::size_t lead = 0;
    for (std::size_t r = 0; r < rows && lead < cols; ++r) {
        // eliminate row r across columns lead..cols-1 down to one pivot
        while (true) {
            std::size_t nz = 0, best = lead;
            Int bestabs = 0;
            for (std::size_t c = lead; c < cols; ++c) {
                if (m[r][c] == 0) continue;
                Int a = abs(m[r][c]);
                if (nz == 0 || a < bestabs) {
                    best = c;
                    bestabs = a;
                }
                ++nz;
            }
            if (nz == 0) break;
            col_swap(lead, best);
            if (nz == 1) {
                ++lead;
                break;
            }
            for (std::size_t c = lead + 1; c < cols; ++c) {
                if (m[r][c] == 0) continue;
                Int q = m[r][c] / m[r][lead];
                col_op_sub(c, lead, q);
            }
        }
    }

    std::vector<std::vector<Int>> kernel;
    for (std::size_t c = 0; c < cols; ++c) {
        bool zero = true;
        for (std::size_t r = 0; r < rows; ++r)
            if (m[r][c] != 0) {
                zero = false;
                break;
            }
        if (!zero) continue;
        std::vector<Int> v(cols);
        for (std::size_t r = 0; r < cols; ++r) v[r] = u[r][c];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

}  // namespace doctic
