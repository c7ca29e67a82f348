#pragma once

// Brute-force cross-checks that share no code path with the envelope formulas:
// intersections of nearby lines, finite differences, dense sign scans of g and h.
// Used by the tests and by the CLI's --verify mode only.

#include "affevo/affine.hpp"
#include "affevo/evolutoid.hpp"
#include "affevo/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace affevo::oracle {

/// The line through `base` with direction `dir`.
struct LineSample {
    Vec2 base = Vec2::Zero();
    Vec2 dir = Vec2::UnitX();
    double s = 0.0;
    double alpha = 0.0;
};

inline LineSample line_sample(const AffineJet& j, double alpha) {
    return {j.gamma, (1.0 - alpha) * j.gamma_s + alpha * j.gamma_ss, j.s, alpha};
}

/// Exact 2×2 solve for the common point of two lines.
inline Vec2 intersect_consecutive_lines(const LineSample& l1, const LineSample& l2) {
    const double cross = bracket(l1.dir, l2.dir);
    if (std::abs(cross) < 1e-14) throw NumericalError("lines are parallel");
    const double a = bracket(l2.base - l1.base, l2.dir) / cross;
    return l1.base + a * l1.dir;
}

/// Fourth-order centred differences of periodic samples, derivative order 1..3.
inline std::vector<double> fd_derivative(std::span<const double> f, int order, double step) {
    if (order < 1 || order > 3) throw InputError("finite-difference order must be 1, 2 or 3");
    const std::size_t n = f.size();
    const std::size_t stencil = order == 3 ? 7 : 5;
    if (n < stencil) throw InputError("array shorter than the finite-difference stencil");
    auto at = [&](std::size_t i, long off) {
        return f[(i + n + static_cast<std::size_t>(off + static_cast<long>(n))) % n];
    };
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (order) {
            case 1:
                out[i] = (-at(i, 2) + 8.0 * at(i, 1) - 8.0 * at(i, -1) + at(i, -2)) / (12.0 * step);
                break;
            case 2:
                out[i] = (-at(i, 2) + 16.0 * at(i, 1) - 30.0 * at(i, 0) + 16.0 * at(i, -1) - at(i, -2)) /
                         (12.0 * step * step);
                break;
            default:
                out[i] = (-at(i, 3) + 8.0 * at(i, 2) - 13.0 * at(i, 1) + 13.0 * at(i, -1) - 8.0 * at(i, -2) +
                          at(i, -3)) /
                         (8.0 * step * step * step);
        }
    }
    return out;
}

inline std::vector<Vec2> fd_derivative(std::span<const Vec2> f, int order, double step) {
    std::vector<double> xs(f.size()), ys(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        xs[i] = f[i].x();
        ys[i] = f[i].y();
    }
    const auto dx = fd_derivative(xs, order, step);
    const auto dy = fd_derivative(ys, order, step);
    std::vector<Vec2> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = Vec2(dx[i], dy[i]);
    return out;
}

struct ScanComponent {
    double birth_alpha = 0.0;  // upper α row of the lowest cell touched
    double top_alpha = 0.0;    // upper α row of the highest cell touched
    double s = 0.0;            // arclength at the lowest cell
    std::size_t cells = 0;
};

/// Sign-change map of g over an (s, α) grid with rows α_k = (k + 1) / n_alpha.
/// Cell (i, k) spans s-nodes i, i+1 and rows k, k+1; it is set when g changes sign over its four corners,
/// so every connected piece of {g = 0} maps to one 8-connected set of cells.
struct DenseScan {
    std::size_t n_s = 0;
    std::size_t n_alpha = 0;
    std::vector<double> alphas;
    std::vector<std::uint8_t> flags;  // (n_alpha − 1) rows of n_s cells
    std::vector<ScanComponent> components;  // sorted by birth α

    bool flag(std::size_t i, std::size_t k) const { return flags[k * n_s + i] != 0; }
};

namespace detail {

inline std::size_t checked_stride(const AffineJetTable& jets, std::size_t n_s) {
    if (n_s < 16 || jets.size() % n_s != 0)
        throw InputError("scan resolution must divide the jet table size");
    return jets.size() / n_s;
}

// 8-connected components of set cells, periodic in i.
inline std::vector<std::vector<std::size_t>> components(const std::vector<std::uint8_t>& flags, std::size_t n_s,
                                                        std::size_t n_rows) {
    std::vector<int> label(flags.size(), -1);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < flags.size(); ++start) {
        if (!flags[start] || label[start] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<std::size_t> stack{start};
        label[start] = id;
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            out.back().push_back(c);
            const long ci = static_cast<long>(c % n_s), ck = static_cast<long>(c / n_s);
            for (long dk = -1; dk <= 1; ++dk)
                for (long di = -1; di <= 1; ++di) {
                    const long k = ck + dk;
                    if (k < 0 || k >= static_cast<long>(n_rows)) continue;
                    const long i = (ci + di + static_cast<long>(n_s)) % static_cast<long>(n_s);
                    const std::size_t nb = static_cast<std::size_t>(k) * n_s + static_cast<std::size_t>(i);
                    if (flags[nb] && label[nb] < 0) {
                        label[nb] = id;
                        stack.push_back(nb);
                    }
                }
        }
    }
    return out;
}

// True when the four corner values of a cell straddle zero.
inline bool straddles(const std::vector<double>& f, std::size_t n_s, std::size_t i, std::size_t k) {
    const std::size_t i1 = (i + 1) % n_s;
    const double v[4] = {f[k * n_s + i], f[k * n_s + i1], f[(k + 1) * n_s + i], f[(k + 1) * n_s + i1]};
    const auto [lo, hi] = std::minmax_element(std::begin(v), std::end(v));
    return *lo < 0.0 && *hi > 0.0;
}

}  // namespace detail

/// Brute-force sign map of g with a connected-component summary (birth α per component).
inline DenseScan dense_scan_g(const AffineJetTable& jets, std::size_t n_s, std::size_t n_alpha) {
    const std::size_t stride = detail::checked_stride(jets, n_s);
    if (n_alpha < 2) throw InputError("need at least two alpha rows");
    DenseScan scan;
    scan.n_s = n_s;
    scan.n_alpha = n_alpha;
    std::vector<double> g(n_alpha * n_s);
    for (std::size_t k = 0; k < n_alpha; ++k) {
        const double alpha = static_cast<double>(k + 1) / static_cast<double>(n_alpha);
        scan.alphas.push_back(alpha);
        for (std::size_t i = 0; i < n_s; ++i) g[k * n_s + i] = singularity_function(jets.at(i * stride), alpha);
    }
    const std::size_t rows = n_alpha - 1;
    scan.flags.assign(rows * n_s, 0);
    for (std::size_t k = 0; k < rows; ++k)
        for (std::size_t i = 0; i < n_s; ++i)
            if (detail::straddles(g, n_s, i, k)) scan.flags[k * n_s + i] = 1;
    for (const auto& comp : detail::components(scan.flags, n_s, rows)) {
        ScanComponent c;
        c.cells = comp.size();
        std::size_t lo = rows, hi = 0, at = 0;
        for (std::size_t cell : comp) {
            const std::size_t k = cell / n_s;
            if (k < lo) {
                lo = k;
                at = cell % n_s;
            }
            hi = std::max(hi, k);
        }
        c.birth_alpha = scan.alphas[lo + 1];
        c.top_alpha = scan.alphas[hi + 1];
        c.s = jets.s()[at * stride];
        scan.components.push_back(c);
    }
    std::sort(scan.components.begin(), scan.components.end(),
              [](const auto& a, const auto& b) { return a.birth_alpha < b.birth_alpha; });
    return scan;
}

/// Cluster centre of grid cells where both g and h change sign (brute-force g = h = 0).
struct FoldCluster {
    double s = 0.0;
    double alpha = 0.0;
    std::size_t cells = 0;
};

/// Cells spanning (s_i, s_{i+1}) × (α_k, α_{k+1}) with α_k = k / n_alpha over (0, 1).
inline std::vector<FoldCluster> dense_scan_fold(const AffineJetTable& jets, std::size_t n_s, std::size_t n_alpha) {
    const std::size_t stride = detail::checked_stride(jets, n_s);
    if (n_alpha < 2) throw InputError("need at least two alpha rows");
    auto alpha_of = [&](std::size_t k) { return static_cast<double>(k) / static_cast<double>(n_alpha); };
    std::vector<double> g((n_alpha + 1) * n_s), h((n_alpha + 1) * n_s);
    for (std::size_t k = 0; k <= n_alpha; ++k)
        for (std::size_t i = 0; i < n_s; ++i) {
            const AffineJet j = jets.at(i * stride);
            g[k * n_s + i] = singularity_function(j, alpha_of(k));
            h[k * n_s + i] = cusp_function(j, alpha_of(k));
        }
    std::vector<std::uint8_t> flags(n_alpha * n_s, 0);
    for (std::size_t k = 0; k < n_alpha; ++k)
        for (std::size_t i = 0; i < n_s; ++i)
            if (detail::straddles(g, n_s, i, k) && detail::straddles(h, n_s, i, k)) flags[k * n_s + i] = 1;

    std::vector<FoldCluster> out;
    const double L = jets.length();
    for (const auto& comp : detail::components(flags, n_s, n_alpha)) {
        FoldCluster c;
        c.cells = comp.size();
        // circular mean in s
        double cx = 0.0, cy = 0.0, a = 0.0;
        for (std::size_t cell : comp) {
            const double s = jets.s()[(cell % n_s) * stride] + 0.5 * L / static_cast<double>(n_s);
            cx += std::cos(kTwoPi * s / L);
            cy += std::sin(kTwoPi * s / L);
            a += alpha_of(cell / n_s) + 0.5 / static_cast<double>(n_alpha);
        }
        double s = std::atan2(cy, cx) / kTwoPi * L;
        if (s < 0.0) s += L;
        c.s = s;
        c.alpha = a / static_cast<double>(comp.size());
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.alpha < y.alpha; });
    return out;
}

}  // namespace affevo::oracle
