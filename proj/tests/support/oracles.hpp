#pragma once

// Independent reference solvers used only by tests.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridstudies/lightning/egm.hpp"

namespace oracle {

/// Gauss-Jordan elimination with partial pivoting on a row-major copy.
template <typename T>
std::vector<T> gauss_solve(std::vector<std::vector<T>> a, std::vector<T> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) == 0.0) throw std::runtime_error("oracle: singular");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const T f = a[r][col] / a[col][col];
            if (f == T{}) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
    return b;
}

// Leader descending at lateral y, advanced by the smallest clearance to any
// striking surface until it touches one. Returns -1 for ground, else
// 0/1 shield wire, 2/3/4 phase A/B/C.
inline int struck(const gridstudies::lightning::LineGeometry& g, double ip, double y) {
    const double rc = 7.1 * std::pow(ip, 0.75), rg = 6.4 * std::pow(ip, 0.75);
    std::vector<std::pair<double, double>> c;
    for (const auto& s : g.shield_wires) c.emplace_back(s.y, s.h);
    for (const auto& p : g.phases) c.emplace_back(p.y, p.h);
    double z = rg + rc + 100.0;
    for (int it = 0; it < 200000; ++it) {
        int best = -1;
        double clear = z - rg;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double d = std::hypot(y - c[i].first, z - c[i].second) - rc;
            if (d < clear) {
                clear = d;
                best = static_cast<int>(i);
            }
        }
        if (clear < 1e-9) return best;
        z -= clear;
    }
    throw std::runtime_error("oracle: leader did not converge");
}

inline bool tower_band(const gridstudies::lightning::LineGeometry& g, double ip, double x) {
    const double span = g.span_length_m;
    const double nearest = std::abs(x - span * std::round(x / span));
    const double frac = ip > 64.0 ? 0.25 : (ip >= 25.0 ? 0.125 : 0.0625);
    return nearest <= frac * span;
}

}  // namespace oracle
