// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include "affevo/affevo.hpp"
#include "affevo/oracle.hpp"
#include "test_support.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace affevo;

namespace {

struct Tol {
    static constexpr double normalization = 1e-8;
    static constexpr double structure_equation = 1e-6;
    static constexpr double normalization_seconds = 1.0;
    static constexpr double conic_relative_spread = 1e-9;
    static constexpr double conic_mean = 1e-8;
    static constexpr double monge_relative = 1e-6;
    static constexpr double alpha_zero = 1e-12;
    static constexpr double alpha_one_collapse = 1e-8;
    static constexpr double alpha_born_conic = 1e-6;
    static constexpr double swallowtail_offset = 1e-3;
    static constexpr double envelope_error = 1e-3;
    static constexpr double envelope_ds = 1e-4;
    static constexpr double envelope_ratio_lo = 1.8;
    static constexpr double envelope_ratio_hi = 2.2;
    static constexpr double detJ1_relative = 1e-8;
    static constexpr double detJbar_relative = 1e-6;
    static constexpr double verticality = 1e-6;
    static constexpr double equivariance = 1e-8;
};

constexpr std::size_t kSamples = 1024;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const AffineJetTable& sigma() {
    static const AffineJetTable jets = fixtures::sigma_jets(kSamples);
    return jets;
}

Outcome normalization_suite() {
    std::mt19937_64 rng(101);
    std::vector<CurveSpec> curves{Ellipse{2, 3}, two_harmonic_curve(fixtures::kSigmaPhase)};
    for (int i = 0; i < 10; ++i) curves.push_back(fixtures::random_convex_curve(rng));
    double norm = 0.0, ode = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& spec : curves) {
        const AffineJetTable jets(sample_curve(spec, kSamples));
        const auto frame = chain_rule_frame(jets.curve(), jets.tolerances());
        for (std::size_t i = 0; i < jets.size(); ++i) {
            norm = std::max(norm, std::abs(bracket(frame.gamma_s[i], frame.gamma_ss[i]) - 1.0));
            ode = std::max(ode, (frame.gamma_sss[i] + jets.mu()[i] * frame.gamma_s[i]).norm());
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {norm <= Tol::normalization && ode <= Tol::structure_equation && seconds < Tol::normalization_seconds,
            "12 curves, max |[g_s,g_ss]-1| = " + fmt("%.3g", norm) + ", max |g_sss+mu g_s| = " + fmt("%.3g", ode) +
                ", " + fmt("%.3f", seconds) + " s"};
}

Outcome conic_constancy() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> axis(0.5, 4.0);
    double spread = 0.0, mean_err = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double a = axis(rng), b = axis(rng);
        const auto jets = fixtures::ellipse_jets(a, b, kSamples);
        const auto& mu = jets.mu();
        const double mean = std::accumulate(mu.begin(), mu.end(), 0.0) / static_cast<double>(mu.size());
        double var = 0.0;
        for (double m : mu) var += (m - mean) * (m - mean);
        const double sd = std::sqrt(var / static_cast<double>(mu.size()));
        spread = std::max(spread, sd / mean);
        mean_err = std::max(mean_err, std::abs(mean - std::pow(a * b, -2.0 / 3.0)));
    }
    return {spread <= Tol::conic_relative_spread && mean_err <= Tol::conic_mean,
            "5 ellipses, max sd/mean = " + fmt("%.3g", spread) + ", max |mean - (ab)^(-2/3)| = " + fmt("%.3g", mean_err)};
}

// (sin t, a2 sin²t/2 + a3 sin³t/6 + a4 sin⁴t/24) is the Monge jet graph near t = 0 with x = sin t.
TrigPolynomial monge_trig_curve(const MongeJet& m) {
    TrigPolynomial p;
    p.x = {{1, 0.0, 1.0}};
    const double c2 = m.a2 / 2.0, c3 = m.a3 / 6.0, c4 = m.a4 / 24.0;
    p.y = {{0, c2 / 2.0 + 3.0 * c4 / 8.0, 0.0},
           {1, 0.0, 3.0 * c3 / 4.0},
           {2, -c2 / 2.0 - c4 / 2.0, 0.0},
           {3, 0.0, -c3 / 4.0},
           {4, c4 / 8.0, 0.0}};
    return p;
}

Outcome monge_formula() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> mag(0.5, 3.0), u(-3.0, 3.0), coin(-1.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const MongeJet m{(coin(rng) < 0.0 ? -1.0 : 1.0) * mag(rng), u(rng), u(rng)};
        const double expected = monge_affine_curvature(m);
        const auto c = sample_curve(monge_trig_curve(m), 256);
        const double got = affine_curvature_at(c.d(1, 0), c.d(2, 0), c.d(3, 0), c.d(4, 0));
        worst = std::max(worst, std::abs(got - expected) / std::abs(expected));
    }
    return {worst <= Tol::monge_relative, "100 draws, max relative error = " + fmt("%.3g", worst)};
}

Outcome limit_cases() {
    double zero = 0.0;
    std::mt19937_64 rng(404);
    std::vector<AffineJetTable> tables;
    tables.push_back(fixtures::ellipse_jets(2, 3, kSamples));
    tables.push_back(sigma());
    tables.emplace_back(sample_curve(fixtures::random_convex_curve(rng), kSamples));
    for (const auto& jets : tables) {
        const auto e = evolutoid_curve(jets, 0.0);
        for (std::size_t i = 0; i < e.size(); ++i) zero = std::max(zero, (e[i].X - jets.curve().d(0, i)).norm());
    }
    double one = 0.0;
    for (const auto& p : evolutoid_curve(tables.front(), 1.0)) one = std::max(one, p.X.norm());
    return {zero <= Tol::alpha_zero && one <= Tol::alpha_one_collapse,
            "alpha=0 max |X-gamma| = " + fmt("%.3g", zero) + ", ellipse(2,3) alpha=1 max |X| = " + fmt("%.3g", one)};
}

Outcome ellipse_regularity() {
    const auto jets = fixtures::ellipse_jets(2, 3, kSamples);
    std::size_t found = 0;
    for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99}) found += singular_points(jets, alpha).size();
    const double born = alpha_born(jets).alpha;
    return {found == 0 && std::abs(born - 1.0) <= Tol::alpha_born_conic,
            "singular points over 10 levels = " + std::to_string(found) + ", alpha_born = " + fmt("%.17g", born)};
}

Outcome two_harmonic_singularities() {
    const std::size_t at_one = singular_points(sigma(), 1.0).size();
    const std::size_t at_nine = singular_points(sigma(), 0.9).size();
    const auto mesh = build_discriminant_mesh(sigma(), 0.3, 1.0, 141);
    std::size_t confirmed = 0, jumps_ok = 0;
    std::string jumps;
    for (const auto& r : mesh.swallowtails) {
        if (!r.resolved || r.kind != SingularityKind::A3) continue;
        ++confirmed;
        const auto below = singular_points(sigma(), r.alpha - Tol::swallowtail_offset).size();
        const auto above = singular_points(sigma(), std::min(1.0, r.alpha + Tol::swallowtail_offset)).size();
        const long diff = static_cast<long>(above) - static_cast<long>(below);
        if (std::abs(diff) == 2) ++jumps_ok;
        jumps += " " + std::to_string(below) + "->" + std::to_string(above);
    }
    const bool pass = at_one == 6 && at_nine > 0 && at_nine % 2 == 0 && !mesh.cuspidal_edges.empty() &&
                      confirmed >= 1 && jumps_ok == confirmed;
    return {pass, "alpha=1: " + std::to_string(at_one) + ", alpha=0.9: " + std::to_string(at_nine) + ", edges " +
                      std::to_string(mesh.cuspidal_edges.size()) + ", A3 " + std::to_string(confirmed) +
                      ", counts across A3:" + jumps};
}

double envelope_error(const AffineJetTable& jets, double alpha, double ds) {
    double worst = 0.0;
    for (std::size_t i = 0; i < jets.size(); ++i) {
        const auto j0 = jets.at(i);
        const auto j1 = jets.evaluate(jets.parameter_at(jets.s()[i] + ds));
        const Vec2 p = oracle::intersect_consecutive_lines(oracle::line_sample(j0, alpha), oracle::line_sample(j1, alpha));
        worst = std::max(worst, (p - evolutoid_point(j0, alpha).X).norm());
    }
    return worst;
}

Outcome oracle_equivalence() {
    const auto jets = fixtures::ellipse_jets(2, 3, kSamples);
    bool pass = true;
    std::string detail;
    for (double alpha : {0.25, 0.5, 0.75}) {
        const double e1 = envelope_error(jets, alpha, Tol::envelope_ds);
        const double e2 = envelope_error(jets, alpha, 0.5 * Tol::envelope_ds);
        const double ratio = e1 / e2;
        pass = pass && e1 <= Tol::envelope_error && ratio >= Tol::envelope_ratio_lo && ratio <= Tol::envelope_ratio_hi;
        detail += fmt(" alpha=%.2f:", alpha) + fmt(" err %.3g", e1) + fmt(" ratio %.3f", ratio);
    }
    return {pass, "line intersection vs envelope," + detail};
}

Outcome versality() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> node(0, sigma().size() - 1);
    std::uniform_real_distribution<double> a(0.0, 1.0);
    double j1 = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const auto jet = sigma().at(node(rng));
        const double alpha = a(rng);
        const double D = denominator(jet.mu, alpha);
        j1 = std::max(j1, std::abs(versality_diagnostics(jet, alpha).detJ1 - D) / std::abs(D));
    }
    const auto mesh = build_discriminant_mesh(sigma(), 0.3, 1.0, 141);
    double jbar = 0.0;
    std::size_t folds = 0;
    for (const auto& r : mesh.swallowtails) {
        if (!r.resolved) continue;
        ++folds;
        const auto jet = sigma().evaluate(r.t);
        const double closed = r.alpha * r.alpha * jet.mu + 3.0 * (1.0 - r.alpha) * (1.0 - r.alpha);
        const auto diag = versality_diagnostics(jet, r.alpha);
        jbar = std::max(jbar, std::abs(r.alpha * *diag.detJbar - closed) / std::abs(closed));
    }
    double vertical = std::numeric_limits<double>::infinity();
    for (const auto& e : mesh.cuspidal_edges)
        if (const auto v = cusp_line_verticality_check(sigma(), e)) vertical = std::min(vertical, *v);
    const bool pass = j1 <= Tol::detJ1_relative && folds > 0 && jbar <= Tol::detJbar_relative &&
                      !mesh.cuspidal_edges.empty() && vertical > Tol::verticality;
    return {pass, "detJ1 rel err " + fmt("%.3g", j1) + " (10^4 pairs), alpha*detJbar rel err " + fmt("%.3g", jbar) +
                      " (" + std::to_string(folds) + " fold points), min |D^2| on edges " + fmt("%.3g", vertical)};
}

Outcome equivariance() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double mu_err = 0.0, x_err = 0.0, x_abs = 0.0;
    for (int k = 0; k < 20; ++k) {
        const TrigPolynomial base = fixtures::random_convex_curve(rng);
        const Mat2 m = fixtures::random_unimodular(rng);
        const Vec2 b(u(rng), u(rng));
        const AffineJetTable j0(sample_curve(base, kSamples));
        const AffineJetTable j1(sample_curve(affine_image(base, m, b), kSamples));
        for (std::size_t i = 0; i < j0.size(); ++i) mu_err = std::max(mu_err, std::abs(j1.mu()[i] - j0.mu()[i]));
        for (double alpha : {0.25, 0.5, 0.9}) {
            const auto e0 = evolutoid_curve(j0, alpha);
            const auto e1 = evolutoid_curve(j1, alpha);
            for (std::size_t i = 0; i < e0.size(); ++i) {
                const Vec2 expected = m * e0[i].X + b;
                const double err = (e1[i].X - expected).norm();
                x_abs = std::max(x_abs, err);
                x_err = std::max(x_err, err / std::max(1.0, expected.norm()));
            }
        }
    }
    // near D = 0 the evolutoid point runs off to infinity, so the bound scales with |X|
    return {mu_err <= Tol::equivariance && x_err <= Tol::equivariance,
            "20 maps, max |mu' - mu| = " + fmt("%.3g", mu_err) + ", max |X' - (MX+b)| / max(1, |X'|) = " +
                fmt("%.3g", x_err) + " (absolute " + fmt("%.3g", x_abs) + ")"};
}

struct CliRun {
    int code = -1;
    std::string out;
    std::vector<std::string> files;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CliRun run_cli(const std::string& args, const std::vector<std::string>& artifacts) {
    CliRun r;
    FILE* pipe = popen((std::string(AFFEVO_CLI) + " " + args + " 2>&1").c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    for (const auto& f : artifacts) {
        r.files.push_back(read_file(f));
        std::filesystem::remove(f);
    }
    return r;
}

Outcome determinism() {
    const std::string p = (std::filesystem::temp_directory_path() / "affevo_acceptance").string();
    const std::string sigma_arg = "--curve twoharmonic:1.9 --samples 512";
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"curvature " + sigma_arg + " --verify --out " + p + ".csv", {p + ".csv"}},
        {"evolutoid " + sigma_arg + " --alpha 0.9 --verify --out " + p, {p + ".svg", p + ".json"}},
        {"sweep " + sigma_arg + " --alpha-range 0.3:1:0.1 --out " + p, {p + ".svg", p + ".json"}},
        {"singularities " + sigma_arg + " --alpha 1 --verify", {}},
        {"alpha-born " + sigma_arg + " --verify", {}},
        {"discriminant " + sigma_arg + " --alpha-range 0.3:1:0.01 --verify --out " + p, {p + ".obj", p + ".json"}},
    };
    bool pass = true;
    std::string detail;
    for (const auto& [args, files] : commands) {
        const auto a = run_cli(args, files);
        const auto b = run_cli(args, files);
        const bool same = a.code == 0 && b.code == 0 && a.out == b.out && a.files == b.files;
        pass = pass && same;
        detail += " " + args.substr(0, args.find(' ')) + (same ? "=same" : "=DIFFERENT");
    }
    return {pass, "two runs each:" + detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"normalization suite", normalization_suite},
        {"conic constancy", conic_constancy},
        {"Monge formula", monge_formula},
        {"alpha = 0 and alpha = 1 limits", limit_cases},
        {"ellipse evolutoids are regular", ellipse_regularity},
        {"two-harmonic curve cusps, edges and swallowtails", two_harmonic_singularities},
        {"line-intersection oracle", oracle_equivalence},
        {"versality certificates", versality},
        {"unimodular equivariance", equivariance},
        {"CLI determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
