#pragma once

// The discriminant D_F ⊂ (x, y, α)-space of F(X, α, s) = [X − γ(s), (1−α)γ_s + αγ_ss]:
// structured surface mesh, cuspidal edges, swallowtail points and versality certificates.

#include "affevo/affine.hpp"
#include "affevo/evolutoid.hpp"
#include "affevo/parallel.hpp"
#include "affevo/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace affevo {

/// F and its first three s-derivatives at fixed (X, α).
struct FamilyDerivatives {
    double F = 0.0;
    double F_s = 0.0;
    double F_ss = 0.0;
    double F_sss = 0.0;
};

namespace detail {

// Derivatives of v = (1−α)γ_s + αγ_ss expressed with γ_sss = −μγ_s.
struct DirectionJet {
    Vec2 v, v1, v2, v3;
};

inline DirectionJet direction_jet(const AffineJet& j, double alpha) {
    const double a = alpha, b = 1.0 - alpha;
    const Vec2& e1 = j.gamma_s;
    const Vec2& e2 = j.gamma_ss;
    DirectionJet d;
    d.v = b * e1 + a * e2;
    d.v1 = b * e2 - a * j.mu * e1;
    d.v2 = -(b * j.mu + a * j.mu_s) * e1 - a * j.mu * e2;
    d.v3 = -(b * j.mu_s + a * j.mu_ss - a * j.mu * j.mu) * e1 - (b * j.mu + 2.0 * a * j.mu_s) * e2;
    return d;
}

}  // namespace detail

/// Closed-form F, F_s, F_ss, F_sss; no numerical differentiation.
inline FamilyDerivatives family_value(const AffineJet& j, const Vec2& X, double alpha) {
    const auto d = detail::direction_jet(j, alpha);
    const Vec2 P = X - j.gamma;
    const Vec2& e1 = j.gamma_s;
    const Vec2& e2 = j.gamma_ss;
    const Vec2 e3 = -j.mu * e1;
    FamilyDerivatives f;
    f.F = bracket(P, d.v);
    f.F_s = bracket(P, d.v1) - bracket(e1, d.v);
    f.F_ss = bracket(P, d.v2) - 2.0 * bracket(e1, d.v1) - bracket(e2, d.v);
    f.F_sss = bracket(P, d.v3) - 3.0 * bracket(e1, d.v2) - 3.0 * bracket(e2, d.v1) - bracket(e3, d.v);
    return f;
}

inline FamilyDerivatives family_value(const AffineJetTable& jets, std::size_t i, const Vec2& X, double alpha) {
    return family_value(jets.at(i), X, alpha);
}

struct VersalityDiagnostics {
    double detJ1 = 0.0;
    std::optional<double> detJbar;  // undefined at α = 0
    Vec3 cusp_tangent = Vec3::Zero();
};

/// Rows (F_x, F_y, F_α), (F_xs, F_ys, F_αs), (F_xss, F_yss, F_αss) at the envelope point X(s, α).
inline Eigen::Matrix3d versality_matrix(const AffineJet& j, double alpha, const Tolerances& tol = {}) {
    const Vec2 X = evolutoid_point(j, alpha, tol).X;
    const auto d = detail::direction_jet(j, alpha);
    const Vec2 P = X - j.gamma;
    const Vec2& e1 = j.gamma_s;
    const Vec2& e2 = j.gamma_ss;
    // u = ∂v/∂α and its s-derivatives
    const Vec2 u = e2 - e1;
    const Vec2 u1 = -j.mu * e1 - e2;
    const Vec2 u2 = (j.mu - j.mu_s) * e1 - j.mu * e2;
    Eigen::Matrix3d m;
    m << d.v.y(), -d.v.x(), bracket(P, u),
        d.v1.y(), -d.v1.x(), bracket(P, u1) - bracket(e1, u),
        d.v2.y(), -d.v2.x(), bracket(P, u2) - 2.0 * bracket(e1, u1) - bracket(e2, u);
    return m;
}

/// det J1, det J̄ and the tangent −D·(row₀ × row₁) to the line of cusps, from assembled partials.
inline VersalityDiagnostics versality_diagnostics(const AffineJet& j, double alpha, const Tolerances& tol = {}) {
    require_alpha(alpha);
    const Eigen::Matrix3d m = versality_matrix(j, alpha, tol);
    VersalityDiagnostics out;
    out.detJ1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (alpha > 0.0) out.detJbar = m.determinant();
    const Vec3 r0 = m.row(0).transpose();
    const Vec3 r1 = m.row(1).transpose();
    out.cusp_tangent = -denominator(j.mu, alpha) * r0.cross(r1);
    return out;
}

inline VersalityDiagnostics versality_diagnostics(const AffineJetTable& jets, std::size_t i, double alpha) {
    return versality_diagnostics(jets.at(i), alpha, jets.tolerances());
}

/// (2α(α−1)x_ss + x_s(α²μ − (1−α)²), same for y, −((1−α)² + α²μ)²).
inline Vec3 cusp_tangent_closed_form(const AffineJet& j, double alpha) {
    const double b = 1.0 - alpha;
    const double c = alpha * alpha * j.mu - b * b;
    const Vec2 xy = 2.0 * alpha * (alpha - 1.0) * j.gamma_ss + c * j.gamma_s;
    const double D = denominator(j.mu, alpha);
    return {xy.x(), xy.y(), -D * D};
}

struct EdgeVertex {
    double t = 0.0;
    double s = 0.0;
    double alpha = 0.0;
    Vec3 position = Vec3::Zero();  // (x, y, α)
    double g = 0.0;
    double h = 0.0;
};

struct CuspidalEdge {
    std::vector<EdgeVertex> vertices;
    bool closed = false;
};

struct DiscriminantMesh {
    std::size_t n_s = 0;
    std::size_t n_alpha = 0;
    std::vector<double> alphas;
    std::vector<Vec3> vertices;  // index j * n_s + i  ↔  (node i, level α_j)
    std::vector<std::array<std::size_t, 3>> triangles;
    std::vector<CuspidalEdge> cuspidal_edges;
    std::vector<SingularityRecord> swallowtails;

    const Vec3& vertex(std::size_t i, std::size_t j) const { return vertices[j * n_s + i]; }
};

inline std::vector<double> alpha_levels(double alpha_min, double alpha_max, std::size_t n_alpha) {
    if (!(alpha_min >= 0.0) || !(alpha_max <= 1.0) || !(alpha_min < alpha_max))
        throw InputError("alpha range must satisfy 0 <= alpha_min < alpha_max <= 1");
    if (n_alpha < 2) throw InputError("need at least two alpha levels");
    std::vector<double> out(n_alpha);
    for (std::size_t j = 0; j < n_alpha; ++j)
        out[j] = alpha_min + (alpha_max - alpha_min) * static_cast<double>(j) / static_cast<double>(n_alpha - 1);
    out.back() = alpha_max;
    return out;
}

namespace detail {

inline double periodic_distance(double a, double b, double period) {
    double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

inline EdgeVertex edge_vertex(const AffineJetTable& jets, double t, double alpha) {
    const AffineJet j = jets.evaluate(t);
    const Vec2 X = evolutoid_point(j, alpha, jets.tolerances()).X;
    return {t, std::fmod(j.s, jets.length()), alpha, Vec3(X.x(), X.y(), alpha), singularity_function(j, alpha),
            cusp_function(j, alpha)};
}

struct Branch {
    std::vector<EdgeVertex> vertices;
    std::size_t first_level = 0;
    std::size_t last_level = 0;
    // partner branch sharing the birth (front) or death (back) event
    std::optional<std::size_t> front_link;
    std::optional<std::size_t> back_link;
};

// Greedy nearest pairing of items by periodic arclength.
inline std::vector<std::pair<std::size_t, std::size_t>> pair_nearest(const std::vector<std::size_t>& items,
                                                                     const std::vector<double>& positions,
                                                                     double period) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    for (std::size_t a = 0; a < items.size(); ++a)
        for (std::size_t b = a + 1; b < items.size(); ++b)
            cand.emplace_back(periodic_distance(positions[a], positions[b], period), a, b);
    std::sort(cand.begin(), cand.end());
    std::vector<bool> used(items.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [d, a, b] : cand) {
        if (used[a] || used[b]) continue;
        used[a] = used[b] = true;
        out.emplace_back(items[a], items[b]);
    }
    return out;
}

}  // namespace detail

/// Continues the roots of g across α levels (nearest-root matching within half the mean root spacing).
/// Branches born together (or dying together) are joined, so each swallowtail lies between two
/// consecutive edge vertices across which h changes sign.
inline std::vector<CuspidalEdge> trace_cuspidal_edges(const AffineJetTable& jets, const std::vector<double>& alphas) {
    using detail::Branch;
    const double L = jets.length();
    std::vector<Branch> branches;
    std::vector<std::size_t> active;

    for (std::size_t level = 0; level < alphas.size(); ++level) {
        const double alpha = alphas[level];
        std::vector<EdgeVertex> roots;
        for (double t : singular_parameters(jets, alpha)) roots.push_back(detail::edge_vertex(jets, t, alpha));

        const std::size_t count = std::max(active.size(), roots.size());
        const double threshold = count > 0 ? 0.5 * L / static_cast<double>(count) : 0.0;
        std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t r = 0; r < roots.size(); ++r) {
                const double d = detail::periodic_distance(branches[active[a]].vertices.back().s, roots[r].s, L);
                if (d <= threshold) cand.emplace_back(d, a, r);
            }
        std::sort(cand.begin(), cand.end());
        std::vector<bool> a_used(active.size(), false), r_used(roots.size(), false);
        for (const auto& [d, a, r] : cand) {
            if (a_used[a] || r_used[r]) continue;
            a_used[a] = r_used[r] = true;
            auto& b = branches[active[a]];
            b.vertices.push_back(roots[r]);
            b.last_level = level;
        }

        std::vector<std::size_t> dying, born, next_active;
        std::vector<double> dying_s, born_s;
        for (std::size_t a = 0; a < active.size(); ++a) {
            if (a_used[a]) next_active.push_back(active[a]);
            else {
                dying.push_back(active[a]);
                dying_s.push_back(branches[active[a]].vertices.back().s);
            }
        }
        for (std::size_t r = 0; r < roots.size(); ++r) {
            if (r_used[r]) continue;
            Branch b;
            b.vertices.push_back(roots[r]);
            b.first_level = b.last_level = level;
            branches.push_back(std::move(b));
            next_active.push_back(branches.size() - 1);
            born.push_back(branches.size() - 1);
            born_s.push_back(roots[r].s);
        }
        if (level > 0) {
            for (auto [p, q] : detail::pair_nearest(born, born_s, L)) {
                branches[p].front_link = q;
                branches[q].front_link = p;
            }
        }
        for (auto [p, q] : detail::pair_nearest(dying, dying_s, L)) {
            branches[p].back_link = q;
            branches[q].back_link = p;
        }
        active = std::move(next_active);
    }

    // Walk linked branches into polylines.
    std::vector<CuspidalEdge> edges;
    std::vector<bool> visited(branches.size(), false);
    auto walk = [&](std::size_t first, bool forward_first) {
        CuspidalEdge e;
        std::size_t cur = first;
        bool forward = forward_first;
        while (!visited[cur]) {
            visited[cur] = true;
            const auto& vs = branches[cur].vertices;
            if (forward) e.vertices.insert(e.vertices.end(), vs.begin(), vs.end());
            else e.vertices.insert(e.vertices.end(), vs.rbegin(), vs.rend());
            const auto& exit = forward ? branches[cur].back_link : branches[cur].front_link;
            if (!exit) break;
            const std::size_t next = *exit;
            // enter the partner through the end that carries the same event
            forward = forward ? false : true;
            if (visited[next]) {
                e.closed = true;
                break;
            }
            cur = next;
        }
        return e;
    };
    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (visited[b]) continue;
        if (!branches[b].front_link) edges.push_back(walk(b, true));
        else if (!branches[b].back_link) edges.push_back(walk(b, false));
    }
    for (std::size_t b = 0; b < branches.size(); ++b)
        if (!visited[b]) edges.push_back(walk(b, true));
    return edges;
}

namespace detail {

struct SwallowtailHit {
    SingularityRecord record;
    std::size_t edge = 0;
    std::size_t segment = 0;  // lies between vertices segment and segment + 1
};

inline std::vector<SwallowtailHit> find_swallowtails(const AffineJetTable& jets, const std::vector<CuspidalEdge>& edges) {
    std::vector<SwallowtailHit> hits;
    const double threshold = jets.tolerances().classification * jets.mu_scale();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& vs = edges[e].vertices;
        const std::size_t segments = edges[e].closed ? vs.size() : (vs.empty() ? 0 : vs.size() - 1);
        // a birth or death lies within one alpha level of the joined pair
        double level_step = 0.0;
        for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
            const double d = std::abs(vs[k + 1].alpha - vs[k].alpha);
            if (d > 1e-12 && (level_step == 0.0 || d < level_step)) level_step = d;
        }
        if (level_step == 0.0) level_step = 1e-3;
        for (std::size_t k = 0; k < segments; ++k) {
            const auto& p = vs[k];
            const auto& q = vs[(k + 1) % vs.size()];
            if ((p.h > 0.0) == (q.h > 0.0)) continue;
            double dt = std::remainder(q.t - p.t, kTwoPi);
            const double t0 = wrap_parameter(p.t + 0.5 * dt);
            const double a0 = 0.5 * (p.alpha + q.alpha);
            const FoldPoint fold = refine_fold(jets, t0, a0);
            SwallowtailHit hit;
            hit.edge = e;
            hit.segment = k;
            const double a_lo = std::min(p.alpha, q.alpha), a_hi = std::max(p.alpha, q.alpha);
            const double slack = std::max(a_hi - a_lo, 1.5 * level_step);
            if (fold.converged && fold.alpha >= a_lo - slack && fold.alpha <= a_hi + slack) {
                hit.record = make_singularity_record(jets, fold.t, fold.alpha);
                const AffineJet j = jets.evaluate(fold.t);
                const auto diag = versality_diagnostics(j, fold.alpha, jets.tolerances());
                const bool certified = std::abs(hit.record.g) <= jets.tolerances().root &&
                                       std::abs(hit.record.h) <= threshold &&
                                       std::abs(hit.record.q) > threshold && diag.detJbar &&
                                       std::abs(*diag.detJbar) > threshold;
                if (!certified) hit.record.kind = SingularityKind::Degenerate;
            } else {
                hit.record = make_singularity_record(jets, t0, a0);
                hit.record.resolved = false;
            }
            hits.push_back(hit);
        }
    }
    return hits;
}

}  // namespace detail

/// A3 points on traced edges: h-sign changes refined by Newton on (g, h) = (0, 0).
/// Unconverged refinements are returned with resolved = false.
inline std::vector<SingularityRecord> swallowtail_points(const AffineJetTable& jets, const std::vector<CuspidalEdge>& edges) {
    std::vector<SingularityRecord> out;
    for (auto& hit : detail::find_swallowtails(jets, edges)) out.push_back(hit.record);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
    return out;
}

inline std::vector<SingularityRecord> swallowtail_points(const AffineJetTable& jets, const std::vector<double>& alphas) {
    return swallowtail_points(jets, trace_cuspidal_edges(jets, alphas));
}

/// Structured (n_s × n_α) surface with cuspidal edges and swallowtail vertices.
inline DiscriminantMesh build_discriminant_mesh(const AffineJetTable& jets, double alpha_min, double alpha_max,
                                                std::size_t n_alpha) {
    DiscriminantMesh mesh;
    mesh.alphas = alpha_levels(alpha_min, alpha_max, n_alpha);
    mesh.n_s = jets.size();
    mesh.n_alpha = n_alpha;
    mesh.vertices.resize(mesh.n_s * n_alpha);
    parallel_for(mesh.vertices.size(), [&](std::size_t idx) {
        const std::size_t i = idx % mesh.n_s;
        const std::size_t j = idx / mesh.n_s;
        const Vec2 X = evolutoid_point(jets, i, mesh.alphas[j]).X;
        mesh.vertices[idx] = Vec3(X.x(), X.y(), mesh.alphas[j]);
    });
    for (std::size_t j = 0; j + 1 < n_alpha; ++j)
        for (std::size_t i = 0; i < mesh.n_s; ++i) {
            const std::size_t i1 = (i + 1) % mesh.n_s;
            const std::size_t a = j * mesh.n_s + i, b = j * mesh.n_s + i1;
            const std::size_t c = (j + 1) * mesh.n_s + i1, d = (j + 1) * mesh.n_s + i;
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }

    mesh.cuspidal_edges = trace_cuspidal_edges(jets, mesh.alphas);
    auto hits = detail::find_swallowtails(jets, mesh.cuspidal_edges);
    // insert back to front so segment indices stay valid
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.edge != b.edge ? a.edge < b.edge : a.segment > b.segment;
    });
    for (const auto& hit : hits) {
        mesh.swallowtails.push_back(hit.record);
        if (!hit.record.resolved) continue;
        EdgeVertex v = detail::edge_vertex(jets, hit.record.t, hit.record.alpha);
        auto& vs = mesh.cuspidal_edges[hit.edge].vertices;
        vs.insert(vs.begin() + static_cast<std::ptrdiff_t>(hit.segment + 1), v);
    }
    std::sort(mesh.swallowtails.begin(), mesh.swallowtails.end(),
              [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
    return mesh;
}

/// min |third component of the cusp-line tangent| = min D² along the edge; nullopt for an empty edge.
inline std::optional<double> cusp_line_verticality_check(const AffineJetTable& jets, const CuspidalEdge& edge) {
    if (edge.vertices.empty()) return std::nullopt;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : edge.vertices) {
        const auto diag = versality_diagnostics(jets.evaluate(v.t), v.alpha, jets.tolerances());
        lo = std::min(lo, std::abs(diag.cusp_tangent.z()));
    }
    return lo;
}

}  // namespace affevo
