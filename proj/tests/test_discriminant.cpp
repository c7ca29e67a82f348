#include "affevo/affevo.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace affevo;

namespace {

// Fold points of σ (phase 1.9) from a symbolic evaluation in 30-digit arithmetic.
constexpr double kSigmaFoldAlpha[3] = {0.416410532687814, 0.670105344105292, 0.807616241146913};
constexpr double kSigmaFoldS[3] = {4.71362273120185, 1.07839969610284, 7.96768553306192};
constexpr double kSigmaFoldQ[3] = {-1.19664456564, -0.119917869932, -0.211723619975};

const AffineJetTable& sigma() {
    static const AffineJetTable jets = fixtures::sigma_jets();
    return jets;
}

const AffineJetTable& ellipse23() {
    static const AffineJetTable jets = fixtures::ellipse_jets(2, 3);
    return jets;
}

const DiscriminantMesh& sigma_mesh() {
    static const DiscriminantMesh mesh = build_discriminant_mesh(sigma(), 0.0, 1.0, 101);
    return mesh;
}

// x = (2 + 0.05 cos 3t) cos t, y = 3 sin t
TrigPolynomial perturbed_ellipse() { return {{{1, 2.0, 0.0}, {2, 0.025, 0.0}, {4, 0.025, 0.0}}, {{1, 0.0, 3.0}}}; }

double family_F(const AffineJetTable& jets, double s, const Vec2& X, double alpha) {
    return family_value(jets.evaluate(jets.parameter_at(s)), X, alpha).F;
}

}  // namespace

TEST(FamilyValue, VanishesOnTheLine) {
    const AffineJet j = sigma().at(100);
    const auto d = (1 - 0.4) * j.gamma_s + 0.4 * j.gamma_ss;
    EXPECT_NEAR(family_value(j, j.gamma + 2.5 * d, 0.4).F, 0.0, 1e-14);
}

TEST(FamilyValue, EnvelopeIdentities) {
    // on the envelope: F_ss = g / D and F_sss = α² h / D
    for (double alpha : {0.3, 0.6, 0.9, 1.0})
        for (std::size_t i = 0; i < sigma().size(); i += 37) {
            const AffineJet j = sigma().at(i);
            const auto p = evolutoid_point(j, alpha);
            const auto f = family_value(j, p.X, alpha);
            EXPECT_NEAR(f.F, 0.0, 1e-12);
            EXPECT_NEAR(f.F_s, 0.0, 1e-12);
            EXPECT_NEAR(f.F_ss, singularity_function(j, alpha) / p.D, 1e-10 * sigma().mu_scale());
            EXPECT_NEAR(f.F_sss, alpha * alpha * cusp_function(j, alpha) / p.D, 1e-10 * sigma().mu_scale());
        }
}

TEST(FamilyValue, MatchesFiniteDifferencesInS) {
    const double h = 1e-3;
    const Vec2 X(0.3, -0.2);
    for (double alpha : {0.2, 0.7})
        for (double s : {0.5, 3.0, 9.0}) {
            const auto f = family_value(sigma().evaluate(sigma().parameter_at(s)), X, alpha);
            std::vector<double> v;
            for (int k = -3; k <= 3; ++k) v.push_back(family_F(sigma(), s + k * h, X, alpha));
            const double d1 = (-v[5] + 8 * v[4] - 8 * v[2] + v[1]) / (12 * h);
            const double d2 = (-v[5] + 16 * v[4] - 30 * v[3] + 16 * v[2] - v[1]) / (12 * h * h);
            const double d3 = (-v[6] + 8 * v[5] - 13 * v[4] + 13 * v[2] - 8 * v[1] + v[0]) / (8 * h * h * h);
            EXPECT_NEAR(f.F_s, d1, 1e-8);
            EXPECT_NEAR(f.F_ss, d2, 1e-6);
            EXPECT_NEAR(f.F_sss, d3, 1e-3);
        }
}

TEST(Versality, MatrixMatchesFiniteDifferences) {
    // columns x, y are exact partials; the α column is checked against a central difference in α
    const double da = 1e-6;
    for (double alpha : {0.3, 0.8})
        for (std::size_t i : {5u, 400u, 900u}) {
            const AffineJet j = sigma().at(i);
            const Vec2 X = evolutoid_point(j, alpha).X;
            const auto m = versality_matrix(j, alpha);
            const auto fp = family_value(j, X, alpha + da), fm = family_value(j, X, alpha - da);
            EXPECT_NEAR(m(0, 2), (fp.F - fm.F) / (2 * da), 1e-7);
            EXPECT_NEAR(m(1, 2), (fp.F_s - fm.F_s) / (2 * da), 1e-6);
            EXPECT_NEAR(m(2, 2), (fp.F_ss - fm.F_ss) / (2 * da), 1e-5 * sigma().mu_scale());
            const double dx = 1e-6;
            const auto gx = family_value(j, X + Vec2(dx, 0), alpha), gy = family_value(j, X + Vec2(0, dx), alpha);
            const auto f0 = family_value(j, X, alpha);
            EXPECT_NEAR(m(1, 0), (gx.F_s - f0.F_s) / dx, 1e-7);
            EXPECT_NEAR(m(2, 1), (gy.F_ss - f0.F_ss) / dx, 1e-7);
        }
}

TEST(Versality, DetJ1ClosedForm) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> node(0, sigma().size() - 1);
    std::uniform_real_distribution<double> a(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t i = node(rng);
        const double alpha = a(rng);
        const double D = denominator(sigma().mu()[i], alpha);
        EXPECT_NEAR(versality_diagnostics(sigma(), i, alpha).detJ1, D, 1e-8 * std::abs(D));
    }
    EXPECT_NEAR(versality_diagnostics(ellipse23(), 0, 0.75).detJ1, 0.2328550, 1e-7);
    for (std::size_t i = 0; i < sigma().size(); i += 50)
        EXPECT_NEAR(versality_diagnostics(sigma(), i, 1.0).detJ1, sigma().mu()[i], 1e-10);
}

TEST(Versality, DetJbarClosedFormAtSingularPoints) {
    std::size_t checked = 0;
    for (double alpha : {0.45, 0.6, 0.75, 0.9, 1.0})
        for (const auto& r : singular_points(sigma(), alpha)) {
            const AffineJet j = sigma().evaluate(r.t);
            const auto diag = versality_diagnostics(j, alpha);
            ASSERT_TRUE(diag.detJbar.has_value());
            const double closed = alpha * alpha * j.mu + 3 * (1 - alpha) * (1 - alpha);
            EXPECT_NEAR(alpha * *diag.detJbar, closed, 1e-6 * std::abs(closed));
            ++checked;
        }
    EXPECT_GE(checked, 10u);
    EXPECT_FALSE(versality_diagnostics(sigma(), 0, 0.0).detJbar.has_value());
}

TEST(Versality, CuspTangentMatchesClosedForm) {
    for (double alpha : {0.2, 0.5, 0.95, 1.0})
        for (std::size_t i = 0; i < sigma().size(); i += 41) {
            const AffineJet j = sigma().at(i);
            const Vec3 a = versality_diagnostics(j, alpha).cusp_tangent;
            const Vec3 b = cusp_tangent_closed_form(j, alpha);
            EXPECT_LE((a - b).norm(), 1e-10 * std::max(1.0, b.norm()));
            const double D = denominator(j.mu, alpha);
            EXPECT_NEAR(a.z(), -D * D, 1e-12 * D * D);
            EXPECT_LT(a.z(), 0.0);
        }
}

TEST(AlphaLevels, RejectsDegenerateRanges) {
    EXPECT_THROW(alpha_levels(0.0, 0.0, 10), InputError);
    EXPECT_THROW(alpha_levels(0.5, 0.2, 10), InputError);
    EXPECT_THROW(alpha_levels(-0.1, 0.5, 10), InputError);
    EXPECT_THROW(alpha_levels(0.0, 1.5, 10), InputError);
    EXPECT_THROW(alpha_levels(0.0, 1.0, 1), InputError);
    EXPECT_THROW(build_discriminant_mesh(ellipse23(), 0.0, 0.0, 11), InputError);
    const auto l = alpha_levels(0.0, 1.0, 11);
    EXPECT_EQ(l.front(), 0.0);
    EXPECT_EQ(l.back(), 1.0);
    for (std::size_t k = 1; k < l.size(); ++k) EXPECT_GT(l[k], l[k - 1]);
}

TEST(Mesh, EllipseHasNoEdgesAndCollapsingTop) {
    const auto mesh = build_discriminant_mesh(ellipse23(), 0.0, 1.0, 21);
    EXPECT_TRUE(mesh.cuspidal_edges.empty());
    EXPECT_TRUE(mesh.swallowtails.empty());
    EXPECT_EQ(mesh.triangles.size(), 2 * mesh.n_s * (mesh.n_alpha - 1));
    for (std::size_t i = 0; i < mesh.n_s; ++i) {
        EXPECT_LE(mesh.vertex(i, mesh.n_alpha - 1).head<2>().norm(), 1e-8);
        EXPECT_LE((mesh.vertex(i, 0).head<2>() - ellipse23().curve().d(0, i)).norm(), 1e-12);
    }
}

TEST(Mesh, VerticesLieOnEvolutoids) {
    const auto& mesh = sigma_mesh();
    for (std::size_t j = 0; j < mesh.n_alpha; j += 7)
        for (std::size_t i = 0; i < mesh.n_s; i += 13) {
            const Vec2 X = evolutoid_point(sigma(), i, mesh.alphas[j]).X;
            EXPECT_EQ(mesh.vertex(i, j).x(), X.x());
            EXPECT_EQ(mesh.vertex(i, j).y(), X.y());
            EXPECT_EQ(mesh.vertex(i, j).z(), mesh.alphas[j]);
        }
    for (const auto& t : mesh.triangles)
        for (std::size_t v : t) ASSERT_LT(v, mesh.vertices.size());
}

TEST(Mesh, SigmaEdgesReachTheSixVertices) {
    const auto& mesh = sigma_mesh();
    ASSERT_FALSE(mesh.cuspidal_edges.empty());
    std::size_t top = 0;
    for (const auto& e : mesh.cuspidal_edges) {
        for (const auto& v : e.vertices) {
            EXPECT_LE(std::abs(v.g), sigma().tolerances().root);
            if (v.alpha == 1.0) ++top;
        }
        const auto vert = cusp_line_verticality_check(sigma(), e);
        ASSERT_TRUE(vert.has_value());
        EXPECT_GT(*vert, 1e-6);
    }
    EXPECT_EQ(top, 6u);
}

TEST(Mesh, SwallowtailsAreCertifiedAndMatchFoldSolutions) {
    const auto& mesh = sigma_mesh();
    ASSERT_EQ(mesh.swallowtails.size(), 3u);
    const double thr = sigma().tolerances().classification * sigma().mu_scale();
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& r = mesh.swallowtails[k];
        EXPECT_TRUE(r.resolved);
        EXPECT_EQ(r.kind, SingularityKind::A3);
        EXPECT_LE(std::abs(r.g), sigma().tolerances().root);
        EXPECT_LE(std::abs(r.h), thr);
        EXPECT_GT(std::abs(r.q), thr);
        EXPECT_NEAR(r.alpha, kSigmaFoldAlpha[k], 1e-9);
        EXPECT_NEAR(r.s, kSigmaFoldS[k], 1e-8);
        EXPECT_NEAR(r.q, kSigmaFoldQ[k], 1e-6);
    }
}

TEST(Mesh, CuspCountChangesByTwoAcrossSwallowtails) {
    for (const auto& r : sigma_mesh().swallowtails) {
        const auto below = singular_points(sigma(), r.alpha - 1e-3).size();
        const auto above = singular_points(sigma(), r.alpha + 1e-3).size();
        EXPECT_EQ(std::abs(static_cast<long>(above) - static_cast<long>(below)), 2) << "alpha=" << r.alpha;
    }
}

TEST(Mesh, IndependentOfThreadCount) {
    const char* previous = std::getenv("AFFEVO_THREADS");
    const std::string saved = previous ? previous : "";
    setenv("AFFEVO_THREADS", "1", 1);
    const auto serial = build_discriminant_mesh(sigma(), 0.2, 1.0, 17);
    setenv("AFFEVO_THREADS", "4", 1);
    const auto threaded = build_discriminant_mesh(sigma(), 0.2, 1.0, 17);
    if (previous) setenv("AFFEVO_THREADS", saved.c_str(), 1);
    else unsetenv("AFFEVO_THREADS");
    ASSERT_EQ(serial.vertices.size(), threaded.vertices.size());
    for (std::size_t k = 0; k < serial.vertices.size(); ++k) EXPECT_EQ(serial.vertices[k], threaded.vertices[k]);
    EXPECT_EQ(serial.cuspidal_edges.size(), threaded.cuspidal_edges.size());
}

TEST(Swallowtails, ConicHasNone) {
    EXPECT_TRUE(swallowtail_points(ellipse23(), alpha_levels(0.0, 1.0, 51)).empty());
}

TEST(Swallowtails, PerturbedEllipseAgreesWithDenseScan) {
    const AffineJetTable jets(sample_curve(perturbed_ellipse(), 2048));
    const auto tails = swallowtail_points(jets, alpha_levels(0.0, 1.0, 201));
    const auto scan = oracle::dense_scan_fold(jets, 2048, 512);
    ASSERT_EQ(tails.size(), scan.size());
    ASSERT_FALSE(tails.empty());
    const double cell_s = jets.length() / 2048.0, cell_a = 1.0 / 512.0;
    for (const auto& r : tails) {
        EXPECT_EQ(r.kind, SingularityKind::A3);
        bool matched = false;
        for (const auto& c : scan)
            if (detail::periodic_distance(c.s, r.s, jets.length()) <= 2 * cell_s && std::abs(c.alpha - r.alpha) <= cell_a)
                matched = true;
        EXPECT_TRUE(matched) << "s=" << r.s << " alpha=" << r.alpha;
    }
}

TEST(Verticality, EmptyEdgeHasNoValue) {
    EXPECT_FALSE(cusp_line_verticality_check(sigma(), CuspidalEdge{}).has_value());
}

TEST(Verticality, TopOfEdgesIsMinusMuSquared) {
    for (const auto& e : sigma_mesh().cuspidal_edges)
        for (const auto& v : e.vertices) {
            if (v.alpha != 1.0) continue;
            const AffineJet j = sigma().evaluate(v.t);
            EXPECT_NEAR(versality_diagnostics(j, 1.0).cusp_tangent.z(), -j.mu * j.mu, 1e-12 * j.mu * j.mu);
        }
}
