#include "smilegeo/emit.hpp"

#include "smilegeo/errors.hpp"
#include "smilegeo/georep.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

namespace smilegeo {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchema = "smilegeo/1";

std::string printf_g(const char* fmt, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json num_array(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(num(x));
    return out;
}

json market_json(const MarketState& ms) {
    return {{"spot", ms.spot}, {"dom_rate", ms.dom_rate}, {"for_rate", ms.for_rate}, {"tenor", ms.tenor}};
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// Column-major CSV with a header.
std::string columns_csv(const std::vector<std::string>& header,
                        const std::vector<const std::vector<double>*>& cols) {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + csv_field(header[j]);
    out += '\n';
    const std::size_t n = cols.empty() ? 0 : cols.front()->size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (j) out += ',';
            out += format_number((*cols[j])[i]);
        }
        out += '\n';
    }
    return out;
}

// Minimal deterministic SVG line plot.
struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> lines;
    std::vector<Point2> dots;
    bool equal_aspect = false;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string coord(double v) { return printf_g("%.2f", v); }

std::string render_svg(const Plot& plot) {
    constexpr double W = 720, H = 540, ml = 80, mr = 150, mt = 40, mb = 60;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, x); x1 = std::max(x1, x);
        y0 = std::min(y0, y); y1 = std::max(y1, y);
    };
    for (const auto& s : plot.lines)
        for (std::size_t i = 0; i < s.x.size(); ++i) grow(s.x[i], s.y[i]);
    for (const auto& p : plot.dots) grow(p.x, p.y);
    if (!std::isfinite(x0)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
    if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
    const double pw = W - ml - mr, ph = H - mt - mb;
    double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
    if (plot.equal_aspect) {
        sx = sy = std::min(sx, sy);
        const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
        x0 = cx - 0.5 * pw / sx; x1 = cx + 0.5 * pw / sx;
        y0 = cy - 0.5 * ph / sy; y1 = cy + 0.5 * ph / sy;
    }
    auto px = [&](double x) { return ml + (x - x0) * sx; };
    auto py = [&](double y) { return mt + ph - (y - y0) * sy; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"720\" height=\"540\" "
           "viewBox=\"0 0 720 540\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"540\" fill=\"white\"/>\n";
    out += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           xml_escape(plot.title) + "</text>\n";
    out += "<rect x=\"" + coord(ml) + "\" y=\"" + coord(mt) + "\" width=\"" + coord(pw) + "\" height=\"" +
           coord(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        out += "<text x=\"" + coord(px(xv)) + "\" y=\"" + coord(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               printf_g("%.4g", xv) + "</text>\n";
        out += "<text x=\"" + coord(ml - 6) + "\" y=\"" + coord(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + printf_g("%.4g", yv) +
               "</text>\n";
    }
    out += "<text x=\"" + coord(ml + pw / 2) + "\" y=\"" + coord(H - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xml_escape(plot.xlabel) +
           "</text>\n";
    out += "<text x=\"18\" y=\"" + coord(mt + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 18 " + coord(mt + ph / 2) + ")\">" +
           xml_escape(plot.ylabel) + "</text>\n";

    for (std::size_t k = 0; k < plot.lines.size(); ++k) {
        const Series& s = plot.lines[k];
        const char* color = kPalette[k % std::size(kPalette)];
        // NaN breaks a series into separate polylines.
        std::string pts;
        auto flush = [&] {
            if (!pts.empty()) {
                out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                       "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
            }
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += coord(px(s.x[i])) + "," + coord(py(s.y[i]));
        }
        flush();
        const double ly = mt + 16 + 18 * static_cast<double>(k);
        out += "<line x1=\"" + coord(W - mr + 10) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(W - mr + 30) +
               "\" y2=\"" + coord(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + coord(W - mr + 36) + "\" y=\"" + coord(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + xml_escape(s.name) + "</text>\n";
    }
    for (const Point2& p : plot.dots) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
        out += "<circle cx=\"" + coord(px(p.x)) + "\" cy=\"" + coord(py(p.y)) +
               "\" r=\"4\" fill=\"black\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::vector<double> label_axis() {
    std::vector<double> x;
    for (std::size_t j = 0; j < kLabelCount; ++j) x.push_back(static_cast<double>(j));
    return x;
}

}  // namespace

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    if (text == "svg") return OutputFormat::Svg;
    throw Error(ErrorKind::InvalidArgument, "unknown output format '" + std::string(text) + "'");
}

std::string format_number(double x) {
    if (!std::isfinite(x)) return {};
    if (x == 0.0) x = 0.0;  // drops the sign of -0
    return printf_g("%.10g", x);
}

SmileSamples sample_smile(const SmileCurve& smile, std::span<const double> strikes) {
    SmileSamples out;
    out.market = smile.market();
    for (double k : strikes) {
        const double v = smile.vol(k);
        out.strikes.push_back(k);
        out.vols.push_back(v);
        out.n_minus_d1.push_back(bsm::norm_cdf(-bsm::d1_d2(out.market, k, v).d1));
    }
    return out;
}

std::string render(const DiscrepancyTable& t, OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        std::string out = "Expiry";
        for (DeltaLabel l : kAllLabels) out += std::string(",") + label_name(l);
        out += ",L2\n";
        for (std::size_t i = 0; i < t.expiries.size(); ++i) {
            out += csv_field(t.expiries[i]);
            for (const auto& c : t.cells[i]) out += "," + (c ? format_number(*c) : std::string());
            out += "," + (t.row_l2[i] ? format_number(*t.row_l2[i]) : std::string()) + "\n";
        }
        out += "L2";
        for (double c : t.col_l2) out += "," + format_number(c);
        out += "," + format_number(t.grand_l2) + "\n";
        return out;
    }
    if (fmt == OutputFormat::Json) {
        json labels = json::array();
        for (DeltaLabel l : kAllLabels) labels.push_back(label_name(l));
        json rows = json::array();
        for (std::size_t i = 0; i < t.expiries.size(); ++i) {
            json cells = json::array();
            for (const auto& c : t.cells[i]) cells.push_back(c ? num(*c) : json(nullptr));
            rows.push_back({{"expiry", t.expiries[i]},
                            {"cells", cells},
                            {"l2", t.row_l2[i] ? num(*t.row_l2[i]) : json(nullptr)},
                            {"error", t.errors[i].empty() ? json(nullptr) : json(t.errors[i])}});
        }
        json col = json::array();
        for (double c : t.col_l2) col.push_back(num(c));
        const json doc = {{"schema", kSchema},       {"artifact", "discrepancy_table"},
                          {"method", method_name(t.method)}, {"labels", labels},
                          {"rows", rows},            {"col_l2", col},
                          {"grand_l2", num(t.grand_l2)}};
        return doc.dump(2) + "\n";
    }
    Plot plot{std::string("Discrepancies, ") + method_name(t.method), "delta label (10P ... 10C)",
              "model vol - market vol", {}, {}, false};
    for (std::size_t i = 0; i < t.expiries.size(); ++i) {
        Series s{t.expiries[i], label_axis(), {}};
        for (const auto& c : t.cells[i]) s.y.push_back(c ? *c : std::numeric_limits<double>::quiet_NaN());
        plot.lines.push_back(std::move(s));
    }
    return render_svg(plot);
}

std::string render(const SmileSamples& s, OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        return columns_csv({"strike", "vol", "n_minus_d1"}, {&s.strikes, &s.vols, &s.n_minus_d1});
    }
    if (fmt == OutputFormat::Json) {
        const json doc = {{"schema", kSchema},
                          {"artifact", "smile"},
                          {"market", market_json(s.market)},
                          {"strikes", num_array(s.strikes)},
                          {"vols", num_array(s.vols)},
                          {"n_minus_d1", num_array(s.n_minus_d1)}};
        return doc.dump(2) + "\n";
    }
    return render_svg({"Implied volatility smile", "strike K", "sigma(K)", {{"smile", s.strikes, s.vols}}, {}, false});
}

std::string render(const DensityCurve& d, OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) return columns_csv({"strike", "density"}, {&d.strikes, &d.values});
    if (fmt == OutputFormat::Json) {
        const json doc = {{"schema", kSchema},
                          {"artifact", "density"},
                          {"strikes", num_array(d.strikes)},
                          {"values", num_array(d.values)},
                          {"mass", num(d.mass())},
                          {"negative_count", d.negative_count()}};
        return doc.dump(2) + "\n";
    }
    return render_svg({"Risk-neutral density", "strike K", "p(K)", {{"density", d.strikes, d.values}}, {}, false});
}

std::string render(const RepresentationFigure& f, OutputFormat fmt) {
    const RepresentationCurve& c = f.curve;
    std::vector<double> xs, ys;
    for (const Point2& p : c.points) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    if (fmt == OutputFormat::Csv) {
        return columns_csv({"strike", "angle", "radius", "x", "y"}, {&c.strikes, &c.angles, &c.radii, &xs, &ys});
    }
    if (fmt == OutputFormat::Json) {
        json doc = {{"schema", kSchema},
                    {"artifact", "representation"},
                    {"market", market_json(c.context.market)},
                    {"atm_rn", c.context.atm_rn},
                    {"radius_scale", c.context.radius},
                    {"strikes", num_array(c.strikes)},
                    {"angles", num_array(c.angles)},
                    {"radii", num_array(c.radii)},
                    {"x", num_array(xs)},
                    {"y", num_array(ys)}};
        if (f.circle) {
            doc["circle"] = {{"cx", f.circle->center.x}, {"cy", f.circle->center.y}, {"radius", f.circle->radius}};
        }
        if (f.conic) doc["conic"] = f.conic->coef;
        json anchors = json::array();
        for (const Point2& p : f.anchors) anchors.push_back({p.x, p.y});
        doc["anchors"] = anchors;
        return doc.dump(2) + "\n";
    }
    Plot plot{"Polar representation, R = " + printf_g("%.4g", c.context.radius), "x", "y", {}, f.anchors, true};
    plot.lines.push_back({"smile", xs, ys});
    if (f.circle) {
        Series s{"circle", {}, {}};
        for (int i = 0; i <= 360; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 360.0;
            s.x.push_back(f.circle->center.x + f.circle->radius * std::cos(t));
            s.y.push_back(f.circle->center.y + f.circle->radius * std::sin(t));
        }
        plot.lines.push_back(std::move(s));
    }
    if (f.conic && f.conic->contains_origin()) {
        Series s{"ellipse", {}, {}};
        for (int i = 0; i <= 360; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 360.0;
            const double r = ray_intersection(*f.conic, t).rho;
            s.x.push_back(r * std::cos(t));
            s.y.push_back(r * std::sin(t));
        }
        plot.lines.push_back(std::move(s));
    }
    {
        Series s{"R circle", {}, {}};
        for (int i = 0; i <= 360; ++i) {
            const double t = 2.0 * std::numbers::pi * i / 360.0;
            s.x.push_back(c.context.radius * std::cos(t));
            s.y.push_back(c.context.radius * std::sin(t));
        }
        plot.lines.push_back(std::move(s));
    }
    return render_svg(plot);
}

std::string render(const CurvatureProfile& p, OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        return columns_csv({"strike", "angle", "n_minus_d1", "kappa_e", "kappa_s"},
                           {&p.strikes, &p.angle, &p.n_minus_d1, &p.kappa_e, &p.kappa_s});
    }
    if (fmt == OutputFormat::Json) {
        const json doc = {{"schema", kSchema},
                          {"artifact", "curvature"},
                          {"center", {p.center.x, p.center.y}},
                          {"strikes", num_array(p.strikes)},
                          {"angle", num_array(p.angle)},
                          {"n_minus_d1", num_array(p.n_minus_d1)},
                          {"kappa_e", num_array(p.kappa_e)},
                          {"kappa_s", num_array(p.kappa_s)}};
        return doc.dump(2) + "\n";
    }
    return render_svg({"Curvature along the representation", "N(-d1)", "curvature",
                       {{"kappa_e", p.n_minus_d1, p.kappa_e}, {"kappa_s", p.n_minus_d1, p.kappa_s}},
                       {},
                       false});
}

std::string render(const DistributionStudy& st, OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        std::string out = "model,kl_nats,pseudo,clamped_fraction,margin,error\n";
        for (const ModelResult& m : st.models) {
            out += csv_field(m.name) + ",";
            if (m.ok) {
                out += format_number(m.divergence.kl_nats) + "," + (m.divergence.pseudo ? "true" : "false") + "," +
                       format_number(m.divergence.clamped_fraction) + "," + format_number(m.margin) + ",";
            } else {
                out += ",,,,";
            }
            out += csv_field(m.error) + "\n";
        }
        return out;
    }
    if (fmt == OutputFormat::Json) {
        json models = json::array();
        for (const ModelResult& m : st.models) {
            json j = {{"name", m.name}, {"ok", m.ok}};
            if (m.ok) {
                j["kl_nats"] = num(m.divergence.kl_nats);
                j["pseudo"] = m.divergence.pseudo;
                j["clamped_count"] = m.divergence.clamped_count;
                j["clamped_fraction"] = num(m.divergence.clamped_fraction);
                j["margin"] = num(m.margin);
            } else {
                j["error"] = m.error;
            }
            models.push_back(j);
        }
        const json doc = {{"schema", kSchema},
                          {"artifact", "comparison"},
                          {"distribution", dist::name(st.spec)},
                          {"market", market_json(st.market)},
                          {"window", {st.window.lo, st.window.hi}},
                          {"lognormal", {{"mu", num(st.lognormal.mu)}, {"s", num(st.lognormal.s)}}},
                          {"models", models}};
        return doc.dump(2) + "\n";
    }
    Plot plot{"Densities, " + dist::name(st.spec), "strike K", "p(K)", {}, {}, false};
    plot.lines.push_back({"reference", st.reference.strikes, st.reference.values});
    for (const ModelResult& m : st.models) {
        if (m.ok) plot.lines.push_back({m.name, m.density.strikes, m.density.values});
    }
    return render_svg(plot);
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    if (!f) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

}  // namespace smilegeo
