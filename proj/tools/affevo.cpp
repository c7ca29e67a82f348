// affevo: affine evolutoids of closed plane curves from the command line.
//
//   affevo curvature     --curve ellipse:2,3 [--out jets.csv]
//   affevo evolutoid     --curve twoharmonic:1.9 --alpha 0.9 [--out sigma_090]
//   affevo sweep         --curve ellipse:2,3 --alpha-range 0.1:0.9:0.1 [--out ellipse_sweep]
//   affevo singularities --curve twoharmonic:1.9 --alpha 1
//   affevo alpha-born    --curve twoharmonic:1.9
//   affevo discriminant  --curve twoharmonic:1.9 --alpha-range 0:1:0.01 [--out sigma_disc]
//
// Exit codes: 0 success, 2 usage, 3 inflexion, 4 numerical failure.

#include "affevo/affevo.hpp"
#include "affevo/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using affevo::io::json;

constexpr int kExitUsage = 2;
constexpr int kExitInflexion = 3;
constexpr int kExitNumerical = 4;

struct RunConfig {
    std::string curve;
    std::size_t samples = 1024;
    std::optional<double> alpha;
    std::string alpha_range;
    std::string out;
    bool verify = false;
    affevo::Tolerances tol;
    double alpha_tol = 1e-10;
};

struct AlphaRange {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 0;

    double at(std::size_t k) const {
        return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
};

AlphaRange parse_alpha_range(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw affevo::InputError("alpha range must be lo:hi:step");
    double lo = 0.0, hi = 0.0, step = 0.0;
    try {
        lo = std::stod(text.substr(0, c1));
        hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw affevo::InputError("alpha range must be lo:hi:step");
    }
    if (!(hi > lo)) throw affevo::InputError("empty alpha range");
    if (!(step > 0.0)) throw affevo::InputError("alpha step must be positive");
    if (lo < 0.0 || hi > 1.0) throw affevo::InputError("alpha range must lie within [0, 1]");
    const double steps = (hi - lo) / step;
    const auto count = static_cast<std::size_t>(std::floor(steps + 1e-9)) + 1;
    if (count < 2) throw affevo::InputError("alpha range holds fewer than two levels");
    // the last level is hi itself when step divides the range, else the last full step
    const double top = lo + step * static_cast<double>(count - 1);
    return {lo, std::min(top, hi), count};
}

affevo::AffineJetTable load_jets(const RunConfig& cfg) {
    const affevo::CurveSpec spec = affevo::io::parse_curve_argument(cfg.curve);
    return affevo::AffineJetTable(affevo::sample_curve(spec, cfg.samples, cfg.tol), cfg.tol);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw affevo::InputError("cannot write '" + path + "'");
    out << text;
}

void emit_json(const json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (!path.empty()) write_text(path, text);
    std::cout << text;
}

double require_alpha_flag(const RunConfig& cfg) {
    if (!cfg.alpha) throw affevo::InputError("--alpha is required");
    affevo::require_alpha(*cfg.alpha);
    return *cfg.alpha;
}

std::vector<affevo::Vec2> curve_points(const affevo::AffineJetTable& jets) {
    std::vector<affevo::Vec2> pts;
    for (std::size_t i = 0; i < jets.size(); ++i) pts.push_back(jets.curve().d(0, i));
    return pts;
}

std::vector<affevo::Vec2> evolutoid_points(const affevo::AffineJetTable& jets, double alpha) {
    std::vector<affevo::Vec2> pts;
    for (const auto& e : affevo::evolutoid_curve(jets, alpha)) pts.push_back(e.X);
    return pts;
}

// Oracle cross-checks for --verify. They report observed discrepancies and never alter results.

json verify_jets(const affevo::AffineJetTable& jets) {
    const std::size_t n = jets.size();
    double norm = 0.0, ode = 0.0;
    const auto frame = affevo::chain_rule_frame(jets.curve(), jets.tolerances());
    for (std::size_t i = 0; i < n; ++i) {
        norm = std::max(norm, std::abs(affevo::bracket(frame.gamma_s[i], frame.gamma_ss[i]) - 1.0));
        ode = std::max(ode, (frame.gamma_sss[i] + jets.mu()[i] * frame.gamma_s[i]).norm());
    }
    const double h = jets.spacing();
    const auto fd = affevo::oracle::fd_derivative(jets.mu(), 1, h);
    double fd_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        fd_err = std::max(fd_err, std::abs(fd[i] / jets.s_t(jets.t(i)) - jets.mu_s()[i]));
    return {{"normalization_error", norm},
            {"structure_equation_residual", ode},
            {"fd_mu_s_error", fd_err}};
}

json verify_evolutoid(const affevo::AffineJetTable& jets, double alpha,
                      const std::vector<affevo::SingularityRecord>& records) {
    double envelope = 0.0;
    std::size_t skipped = 0;
    const double ds = 1e-4;
    for (std::size_t i = 0; i < jets.size(); i += 8) {
        const double s = jets.s()[i];
        const auto j0 = jets.at(i);
        const auto j1 = jets.evaluate(jets.parameter_at(s + ds));
        try {
            const affevo::Vec2 p = affevo::oracle::intersect_consecutive_lines(affevo::oracle::line_sample(j0, alpha),
                                                                               affevo::oracle::line_sample(j1, alpha));
            const affevo::Vec2 X = affevo::evolutoid_point(j0, alpha, jets.tolerances()).X;
            envelope = std::max(envelope, (p - X).norm() / std::max(1.0, X.norm()));
        } catch (const affevo::NumericalError&) {
            ++skipped;
        }
    }
    json cusps = json::array();
    for (const auto& r : records) {
        if (r.kind != affevo::SingularityKind::A2) continue;
        const auto c = affevo::cusp_third_derivative_check(jets, r.s, alpha);
        cusps.push_back({{"s", r.s}, {"numeric", c.numeric}, {"analytic", c.analytic}});
    }
    const std::size_t m = std::min<std::size_t>(jets.size(), 4096);
    const std::size_t stride = jets.size() / m;
    std::size_t scan_roots = 0;
    if (alpha > 0.0) {
        std::vector<double> g(m);
        for (std::size_t i = 0; i < m; ++i) g[i] = affevo::singularity_function(jets.at(i * stride), alpha);
        for (std::size_t i = 0; i < m; ++i)
            if ((g[i] > 0.0) != (g[(i + 1) % m] > 0.0)) ++scan_roots;
    }
    return {{"line_intersection_ds", ds},
            {"line_intersection_max_error", envelope},
            {"parallel_lines_skipped", skipped},
            {"dense_scan_sign_changes", scan_roots},
            {"cusp_third_derivative", cusps}};
}

int cmd_curvature(const RunConfig& cfg) {
    const auto jets = load_jets(cfg);
    std::ostringstream csv;
    affevo::io::write_jets_csv(csv, jets);
    if (cfg.out.empty() && !cfg.verify) {
        std::cout << csv.str();
        return 0;
    }
    if (!cfg.out.empty()) write_text(cfg.out, csv.str());
    const auto [lo, hi] = std::minmax_element(jets.mu().begin(), jets.mu().end());
    json report = {{"samples", jets.size()},
                   {"affine_length", jets.length()},
                   {"min_kappa", *std::min_element(jets.kappa().begin(), jets.kappa().end())},
                   {"mu_min", *lo},
                   {"mu_max", *hi},
                   {"orientation_reversed", jets.reversed()}};
    if (!cfg.out.empty()) report["csv"] = cfg.out;
    if (cfg.verify) report["verification"] = verify_jets(jets);
    emit_json(report, "");
    return 0;
}

int cmd_evolutoid(const RunConfig& cfg) {
    const double alpha = require_alpha_flag(cfg);
    const auto jets = load_jets(cfg);
    const auto records = affevo::singular_points(jets, alpha);
    json report = affevo::io::singularity_report(alpha, records);
    if (cfg.verify) report["verification"] = verify_evolutoid(jets, alpha, records);
    if (!cfg.out.empty()) {
        std::vector<affevo::Vec2> markers;
        for (const auto& r : records) markers.push_back(r.X);
        std::ofstream svg(cfg.out + ".svg", std::ios::binary);
        if (!svg) throw affevo::InputError("cannot write '" + cfg.out + ".svg'");
        affevo::io::write_svg(svg, {{curve_points(jets), true, "black", 2.0}, {evolutoid_points(jets, alpha), true, "blue", 1.0}},
                              markers);
        report["svg"] = cfg.out + ".svg";
    }
    emit_json(report, cfg.out.empty() ? "" : cfg.out + ".json");
    return 0;
}

int cmd_singularities(const RunConfig& cfg) {
    const double alpha = require_alpha_flag(cfg);
    const auto jets = load_jets(cfg);
    const auto records = affevo::singular_points(jets, alpha);
    json report = affevo::io::singularity_report(alpha, records);
    if (cfg.verify) report["verification"] = verify_evolutoid(jets, alpha, records);
    emit_json(report, cfg.out);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    if (cfg.alpha_range.empty()) throw affevo::InputError("--alpha-range is required");
    const AlphaRange range = parse_alpha_range(cfg.alpha_range);
    const auto jets = load_jets(cfg);
    json levels = json::array();
    std::vector<affevo::io::SvgPolyline> lines{{curve_points(jets), true, "black", 2.0}};
    std::vector<affevo::Vec2> markers;
    for (std::size_t k = 0; k < range.count; ++k) {
        const double alpha = range.at(k);
        const auto records = affevo::singular_points(jets, alpha);
        json level = affevo::io::singularity_report(alpha, records);
        level["count"] = records.size();
        if (cfg.verify) level["verification"] = verify_evolutoid(jets, alpha, records);
        levels.push_back(level);
        lines.push_back({evolutoid_points(jets, alpha), true, "blue", 1.0});
        for (const auto& r : records) markers.push_back(r.X);
    }
    json report = {{"levels", levels}};
    if (!cfg.out.empty()) {
        std::ofstream svg(cfg.out + ".svg", std::ios::binary);
        if (!svg) throw affevo::InputError("cannot write '" + cfg.out + ".svg'");
        affevo::io::write_svg(svg, lines, markers);
        report["svg"] = cfg.out + ".svg";
    }
    emit_json(report, cfg.out.empty() ? "" : cfg.out + ".json");
    return 0;
}

int cmd_alpha_born(const RunConfig& cfg) {
    const auto jets = load_jets(cfg);
    const auto born = affevo::alpha_born(jets, cfg.alpha_tol);
    json report = {{"alpha_star", born.alpha}, {"s_star", born.s}, {"t_star", born.t}, {"polished", born.polished}};
    if (cfg.verify) {
        const std::size_t n_s = std::min<std::size_t>(jets.size(), 1024);
        const auto scan = affevo::oracle::dense_scan_g(jets, n_s, 512);
        json v = {{"grid", {n_s, 512}}};
        if (scan.components.empty()) {
            v["first_component_alpha"] = nullptr;
        } else {
            const double first = scan.components.front().birth_alpha;
            v["first_component_alpha"] = first;
            v["bracket"] = {first - 1.0 / 512.0, first};
            v["consistent"] = born.alpha > first - 1.0 / 512.0 - cfg.alpha_tol && born.alpha <= first + cfg.alpha_tol;
        }
        report["verification"] = v;
    }
    emit_json(report, cfg.out);
    return 0;
}

int cmd_discriminant(const RunConfig& cfg) {
    if (cfg.alpha_range.empty()) throw affevo::InputError("--alpha-range is required");
    const AlphaRange range = parse_alpha_range(cfg.alpha_range);
    const auto jets = load_jets(cfg);
    const auto mesh = affevo::build_discriminant_mesh(jets, range.lo, range.hi, range.count);
    json report = affevo::io::discriminant_report(jets, mesh);
    if (cfg.verify) {
        json checks = json::array();
        for (const auto& r : mesh.swallowtails) {
            if (!r.resolved || r.kind != affevo::SingularityKind::A3) continue;
            const double d = 1e-3;
            const auto below = affevo::singular_points(jets, std::max(r.alpha - d, 0.0)).size();
            const auto above = affevo::singular_points(jets, std::min(r.alpha + d, 1.0)).size();
            const auto diag = affevo::versality_diagnostics(jets.evaluate(r.t), r.alpha, jets.tolerances());
            checks.push_back({{"alpha", r.alpha},
                              {"count_below", below},
                              {"count_above", above},
                              {"alpha_detJbar", diag.detJbar ? json(r.alpha * *diag.detJbar) : json(nullptr)},
                              {"closed_form", r.alpha * r.alpha * jets.evaluate(r.t).mu + 3.0 * (1 - r.alpha) * (1 - r.alpha)}});
        }
        json folds = json::array();
        if (jets.size() % 256 == 0) {
            for (const auto& c : affevo::oracle::dense_scan_fold(jets, std::min<std::size_t>(jets.size(), 1024), 256))
                folds.push_back({{"s", c.s}, {"alpha", c.alpha}, {"cells", c.cells}});
        }
        report["verification"] = {{"swallowtails", checks}, {"dense_fold_scan", folds}};
    }
    if (!cfg.out.empty()) {
        std::ofstream obj(cfg.out + ".obj", std::ios::binary);
        if (!obj) throw affevo::InputError("cannot write '" + cfg.out + ".obj'");
        affevo::io::write_obj(obj, mesh);
        report["obj"] = cfg.out + ".obj";
    }
    emit_json(report, cfg.out.empty() ? "" : cfg.out + ".json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine evolutoids of closed plane curves"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--curve", cfg.curve,
                        "ellipse:a,b | circle:r | twoharmonic:phase | inline JSON | @spec.json")
            ->required();
        sub->add_option("--samples", cfg.samples, "grid size (power of two)")->capture_default_str();
        sub->add_option("--out", cfg.out, "output path (prefix for multi-file commands)");
        sub->add_flag("--verify", cfg.verify, "append oracle cross-checks to the JSON report");
        sub->add_option("--tol-root", cfg.tol.root, "root tolerance on |g|")->check(CLI::PositiveNumber);
        sub->add_option("--tol-class", cfg.tol.classification, "relative classification threshold")
            ->check(CLI::PositiveNumber);
        sub->add_option("--tol-inflexion", cfg.tol.inflexion, "minimum admissible |kappa|")
            ->check(CLI::PositiveNumber);
    };
    auto add_alpha = [&](CLI::App* sub) {
        sub->add_option_function<double>("--alpha", [&](double a) { cfg.alpha = a; }, "family parameter in [0, 1]");
    };
    auto add_range = [&](CLI::App* sub) { sub->add_option("--alpha-range", cfg.alpha_range, "lo:hi:step"); };

    auto* curvature = app.add_subcommand("curvature", "affine arclength, curvature and its derivatives (CSV)");
    auto* evolutoid = app.add_subcommand("evolutoid", "evolutoid at one alpha (SVG + singularity report)");
    auto* sweep = app.add_subcommand("sweep", "evolutoids over an alpha range");
    auto* singularities = app.add_subcommand("singularities", "singular points at one alpha (JSON)");
    auto* born = app.add_subcommand("alpha-born", "first alpha at which the evolutoid is singular");
    auto* discriminant = app.add_subcommand("discriminant", "discriminant surface (OBJ + JSON)");
    for (auto* sub : {curvature, evolutoid, sweep, singularities, born, discriminant}) add_common(sub);
    add_alpha(evolutoid);
    add_alpha(singularities);
    add_range(sweep);
    add_range(discriminant);
    born->add_option("--alpha-tol", cfg.alpha_tol, "bisection tolerance in alpha")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*curvature) return cmd_curvature(cfg);
        if (*evolutoid) return cmd_evolutoid(cfg);
        if (*sweep) return cmd_sweep(cfg);
        if (*singularities) return cmd_singularities(cfg);
        if (*born) return cmd_alpha_born(cfg);
        if (*discriminant) return cmd_discriminant(cfg);
    } catch (const affevo::InflexionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInflexion;
    } catch (const affevo::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const affevo::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
