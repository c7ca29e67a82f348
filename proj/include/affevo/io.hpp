#pragma once

// Curve spec parsing and artifact writers (CSV, JSON reports, SVG, OBJ).

#include "affevo/affine.hpp"
#include "affevo/curve.hpp"
#include "affevo/discriminant.hpp"
#include "affevo/evolutoid.hpp"
#include "affevo/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace affevo::io {

using json = nlohmann::ordered_json;

/// 17 significant digits, '.' decimal separator.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline CurveSpec curve_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "ellipse") return Ellipse{j.at("a").get<double>(), j.at("b").get<double>()};
        if (type == "trigpoly") {
            auto terms = [](const json& arr) {
                std::vector<Harmonic> out;
                for (const auto& t : arr) {
                    if (!t.is_array() || t.size() != 3) throw InputError("trigpoly terms are [k, cos, sin] triples");
                    out.push_back({t[0].get<int>(), t[1].get<double>(), t[2].get<double>()});
                }
                return out;
            };
            return TrigPolynomial{terms(j.at("x")), terms(j.at("y"))};
        }
        if (type == "samples") {
            SampledClosed s;
            for (const auto& p : j.at("points")) {
                if (!p.is_array() || p.size() != 2) throw InputError("sample points are [x, y] pairs");
                s.points.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            return s;
        }
        throw InputError("unknown curve type '" + type + "'");
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed curve spec: ") + e.what());
    }
}

inline json curve_to_json(const CurveSpec& spec) {
    struct Visitor {
        json operator()(const Ellipse& e) const { return {{"type", "ellipse"}, {"a", e.a}, {"b", e.b}}; }
        json operator()(const TrigPolynomial& p) const {
            auto terms = [](const std::vector<Harmonic>& hs) {
                json arr = json::array();
                for (const auto& h : hs) arr.push_back({h.k, h.c, h.s});
                return arr;
            };
            return {{"type", "trigpoly"}, {"x", terms(p.x)}, {"y", terms(p.y)}};
        }
        json operator()(const SampledClosed& s) const {
            json pts = json::array();
            for (const auto& p : s.points) pts.push_back({p.x(), p.y()});
            return {{"type", "samples"}, {"points", pts}};
        }
    };
    return std::visit(Visitor{}, spec);
}

namespace detail {

inline std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw InputError("not a number: '" + item + "'");
        }
        if (used != item.size()) throw InputError("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// Accepts `ellipse:a,b`, `circle:r`, `twoharmonic:phase`, inline JSON, or `@path/to/spec.json`.
inline CurveSpec parse_curve_argument(const std::string& arg) {
    if (arg.empty()) throw InputError("empty curve spec");
    if (arg.front() == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw InputError("cannot read curve file '" + arg.substr(1) + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed curve file: ") + e.what());
        }
        return curve_from_json(j);
    }
    if (arg.front() == '{') {
        json j;
        try {
            j = json::parse(arg);
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed curve JSON: ") + e.what());
        }
        return curve_from_json(j);
    }
    const auto colon = arg.find(':');
    const std::string name = arg.substr(0, colon);
    const auto values = colon == std::string::npos ? std::vector<double>{} : detail::parse_numbers(arg.substr(colon + 1));
    if (name == "ellipse" && values.size() == 2) return Ellipse{values[0], values[1]};
    if (name == "circle" && values.size() == 1) return Ellipse{values[0], values[0]};
    if (name == "twoharmonic" && values.size() == 1) return two_harmonic_curve(values[0]);
    throw InputError("unrecognised curve spec '" + arg + "'");
}

/// One row per node: t,s,x,y,kappa,mu,mu_s,mu_ss,mu_sss.
inline void write_jets_csv(std::ostream& out, const AffineJetTable& jets) {
    out << "t,s,x,y,kappa,mu,mu_s,mu_ss,mu_sss\n";
    for (std::size_t i = 0; i < jets.size(); ++i) {
        const Vec2& p = jets.curve().d(0, i);
        const double row[] = {jets.t(i), jets.s()[i], p.x(), p.y(), jets.kappa()[i],
                              jets.mu()[i], jets.mu_s()[i], jets.mu_ss()[i], jets.mu_sss()[i]};
        for (std::size_t c = 0; c < std::size(row); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

inline json singularity_to_json(const SingularityRecord& r, bool with_alpha = false) {
    json j = {{"s", r.s},
              {"x", r.X.x()},
              {"y", r.X.y()},
              {"kind", std::string(to_string(r.kind))},
              {"g", r.g},
              {"h", r.h},
              {"q", r.q}};
    if (with_alpha) {
        j["alpha"] = r.alpha;
        j["resolved"] = r.resolved;
    }
    return j;
}

/// {"alpha": …, "singularities": [{"s","x","y","kind","g","h","q"}, …]}
inline json singularity_report(double alpha, const std::vector<SingularityRecord>& records) {
    json list = json::array();
    for (const auto& r : records) list.push_back(singularity_to_json(r));
    return {{"alpha", alpha}, {"singularities", list}};
}

inline json discriminant_report(const AffineJetTable& jets, const DiscriminantMesh& mesh) {
    json edges = json::array();
    for (const auto& e : mesh.cuspidal_edges) {
        double lo = 1.0, hi = 0.0;
        for (const auto& v : e.vertices) {
            lo = std::min(lo, v.alpha);
            hi = std::max(hi, v.alpha);
        }
        const auto vert = cusp_line_verticality_check(jets, e);
        edges.push_back({{"vertices", e.vertices.size()},
                         {"closed", e.closed},
                         {"alpha_min", lo},
                         {"alpha_max", hi},
                         {"min_verticality", vert ? json(*vert) : json(nullptr)}});
    }
    json tails = json::array();
    for (const auto& r : mesh.swallowtails) tails.push_back(singularity_to_json(r, true));
    return {{"alpha_range", {mesh.alphas.front(), mesh.alphas.back()}},
            {"n_alpha", mesh.n_alpha},
            {"n_s", mesh.n_s},
            {"triangles", mesh.triangles.size()},
            {"cuspidal_edges", edges},
            {"swallowtails", tails}};
}

/// Wavefront OBJ: "v x y alpha", "f a b c", cuspidal edges as "l i1 i2 …" (1-based).
inline void write_obj(std::ostream& out, const DiscriminantMesh& mesh) {
    out << "# discriminant surface: n_s " << mesh.n_s << " n_alpha " << mesh.n_alpha << '\n';
    auto vertex = [&](const Vec3& p) {
        out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
    };
    for (const auto& p : mesh.vertices) vertex(p);
    std::size_t next = mesh.vertices.size() + 1;
    std::vector<std::vector<std::size_t>> lines;
    for (const auto& e : mesh.cuspidal_edges) {
        std::vector<std::size_t> idx;
        for (const auto& v : e.vertices) {
            vertex(v.position);
            idx.push_back(next++);
        }
        if (e.closed && !idx.empty()) idx.push_back(idx.front());
        lines.push_back(std::move(idx));
    }
    for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    for (const auto& l : lines) {
        if (l.size() < 2) continue;
        out << 'l';
        for (std::size_t i : l) out << ' ' << i;
        out << '\n';
    }
}

struct SvgPolyline {
    std::vector<Vec2> points;
    bool closed = true;
    std::string stroke = "black";
    double width = 1.0;  // in units of 0.1% of the view size
};

/// Minimal SVG: polylines plus circular markers, viewBox fitted to the data with a 5% margin.
inline void write_svg(std::ostream& out, const std::vector<SvgPolyline>& lines, const std::vector<Vec2>& markers) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    auto grow = [&](const Vec2& p) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    };
    for (const auto& l : lines)
        for (const auto& p : l.points) grow(p);
    for (const auto& p : markers) grow(p);
    if (!(x0 <= x1)) x0 = y0 = -1.0, x1 = y1 = 1.0;
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    const double margin = 0.05 * span;
    const double vx = x0 - margin, vy = 0.0 - (y1 + margin);
    const double vw = (x1 - x0) + 2 * margin, vh = (y1 - y0) + 2 * margin;
    const double unit = 1e-3 * std::max(vw, vh);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << format_double(800.0 * vh / vw)
        << "\" viewBox=\"" << format_double(vx) << ' ' << format_double(vy) << ' ' << format_double(vw) << ' '
        << format_double(vh) << "\">\n";
    for (const auto& l : lines) {
        if (l.points.empty()) continue;
        out << "<path fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << format_double(l.width * unit)
            << "\" d=\"";
        for (std::size_t i = 0; i < l.points.size(); ++i)
            out << (i ? " L" : "M") << format_double(l.points[i].x()) << ' ' << format_double(0.0 - l.points[i].y());
        if (l.closed) out << " Z";
        out << "\"/>\n";
    }
    for (const auto& p : markers)
        out << "<circle cx=\"" << format_double(p.x()) << "\" cy=\"" << format_double(0.0 - p.y()) << "\" r=\""
            << format_double(6.0 * unit) << "\" fill=\"red\"/>\n";
    out << "</svg>\n";
}

}  // namespace affevo::io
