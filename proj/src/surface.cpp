#include "smilegeo/surface.hpp"

#include "smilegeo/errors.hpp"
#include "smilegeo/shape_fit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace smilegeo {

namespace {

struct LabelInfo {
    const char* name;
    const char* column;
    double delta;  // 0 for ATM
    bool put;
};

constexpr std::array<LabelInfo, kLabelCount> kInfo = {{
    {"10P", "d10p", 0.10, true},
    {"15P", "d15p", 0.15, true},
    {"25P", "d25p", 0.25, true},
    {"35P", "d35p", 0.35, true},
    {"ATM", "atm", 0.0, false},
    {"35C", "d35c", 0.35, false},
    {"25C", "d25c", 0.25, false},
    {"15C", "d15c", 0.15, false},
    {"10C", "d10c", 0.10, false},
}};

constexpr std::array<DeltaLabel, 3> kThreeAnchors = {DeltaLabel::P25, DeltaLabel::ATM, DeltaLabel::C25};
constexpr std::array<DeltaLabel, 5> kFiveAnchors = {DeltaLabel::P10, DeltaLabel::P25, DeltaLabel::ATM,
                                                     DeltaLabel::C25, DeltaLabel::C10};

// RFC-4180 fields of one record; quotes may wrap fields.
std::vector<std::string> split_record(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double parse_number(const std::string& text, std::size_t line_no, std::size_t col, const char* field) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                               std::to_string(col) + " (" + field + "): '" + text +
                                               "' is not a number");
    }
    return value;
}

void field_error(std::size_t line_no, std::size_t col, const char* field, const std::string& why) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                           std::to_string(col) + " (" + field + "): " + why);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* label_name(DeltaLabel label) { return kInfo[label_index(label)].name; }
const char* label_column(DeltaLabel label) { return kInfo[label_index(label)].column; }
std::size_t label_index(DeltaLabel label) { return static_cast<std::size_t>(label); }

double SurfaceQuoteRow::require(DeltaLabel label) const {
    const auto v = vol(label);
    if (!v) {
        throw Error(ErrorKind::MissingAnchor,
                    "expiry " + expiry + " has no " + label_name(label) + " quote");
    }
    return *v;
}

std::vector<SurfaceQuoteRow> parse_surface(std::string_view csv) {
    std::vector<SurfaceQuoteRow> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == csv.size()) break;
            continue;
        }
        std::vector<std::string> fields = split_record(line, line_no);
        for (auto& f : fields) f = trim(std::move(f));
        if (!header_seen) {
            if (line_no == 1 && !fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
                fields[0].erase(0, 3);
            }
            std::string joined;
            for (std::size_t i = 0; i < fields.size(); ++i) joined += (i ? "," : "") + fields[i];
            if (joined != kSurfaceHeader) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) +
                                                       ", column 1: expected header '" +
                                                       std::string(kSurfaceHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 14) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ", column " +
                                                   std::to_string(std::min<std::size_t>(fields.size(), 14) + 1) +
                                                   ": expected 14 fields, found " +
                                                   std::to_string(fields.size()));
        }
        SurfaceQuoteRow row;
        row.expiry = fields[0];
        if (row.expiry.empty()) field_error(line_no, 1, "expiry", "empty expiry label");
        row.tenor_years = parse_number(fields[1], line_no, 2, "tenor_years");
        if (!(row.tenor_years > 0.0)) field_error(line_no, 2, "tenor_years", "tenor must be positive");
        row.spot = parse_number(fields[2], line_no, 3, "spot");
        if (!(row.spot > 0.0)) field_error(line_no, 3, "spot", "spot must be positive");
        row.dom_rate = parse_number(fields[3], line_no, 4, "dom_rate");
        row.for_rate = parse_number(fields[4], line_no, 5, "for_rate");
        for (std::size_t i = 0; i < kLabelCount; ++i) {
            const std::string& f = fields[5 + i];
            if (f.empty()) continue;
            const double v = parse_number(f, line_no, 6 + i, kInfo[i].column);
            if (!(v > 0.0)) field_error(line_no, 6 + i, kInfo[i].column, "vol must be positive");
            row.vols[i] = v;
        }
        for (DeltaLabel a : kThreeAnchors) {
            if (!row.vol(a)) {
                throw Error(ErrorKind::MissingAnchor, "line " + std::to_string(line_no) + ": expiry " +
                                                          row.expiry + " has no " + label_name(a) +
                                                          " quote");
            }
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw Error(ErrorKind::ParseError, "line 1, column 1: missing header");
    }
    return rows;
}

std::vector<SurfaceQuoteRow> read_surface(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_surface(ss.str());
}

std::string format_surface(const std::vector<SurfaceQuoteRow>& rows) {
    std::string out(kSurfaceHeader);
    out += '\n';
    for (const SurfaceQuoteRow& r : rows) {
        out += r.expiry + ',' + fmt17(r.tenor_years) + ',' + fmt17(r.spot) + ',' + fmt17(r.dom_rate) +
               ',' + fmt17(r.for_rate);
        for (const auto& v : r.vols) {
            out += ',';
            if (v) out += fmt17(*v);
        }
        out += '\n';
    }
    return out;
}

const char* method_name(CompletionMethod method) {
    switch (method) {
        case CompletionMethod::Circle: return "circle";
        case CompletionMethod::Ellipse: return "ellipse";
        case CompletionMethod::VannaVolga: return "vanna-volga";
    }
    return "unknown";
}

double label_n_target(DeltaLabel label, DeltaConvention conv, const MarketState& ms) {
    const LabelInfo& info = kInfo[label_index(label)];
    if (label == DeltaLabel::ATM) return 0.5;
    const double scaled = conv == DeltaConvention::SpotPips ? info.delta / ms.for_discount() : info.delta;
    if (!(scaled < 1.0)) {
        throw Error(ErrorKind::TargetOutsideDomain,
                    std::string("delta label ") + info.name + " exceeds e^{-qT}");
    }
    return info.put ? scaled : 1.0 - scaled;
}

double label_strike_at_vol(DeltaLabel label, DeltaConvention conv, const MarketState& ms, double vol) {
    if (label == DeltaLabel::ATM) return bsm::atm_rn_lognormal(ms, vol);
    return bsm::strike_from_forward_delta(ms, vol, label_n_target(label, conv, ms));
}

double label_strike(const SurfaceQuoteRow& row, DeltaLabel label, const CompletionOptions& opts) {
    const double vol = opts.label_rule == LabelStrikeRule::OwnVol ? row.require(label)
                                                                   : row.require(DeltaLabel::ATM);
    return label_strike_at_vol(label, opts.convention, row.market(), vol);
}

namespace {

// Smile that returns the quoted vol exactly at anchor strikes.
SmileCurve snap_to_anchors(const SmileCurve& base, const std::vector<DeltaAnchor>& anchors) {
    return SmileCurve(base.market(), base.domain(), [base, anchors](double k) {
        SmilePoint p = base.at(k);
        for (const DeltaAnchor& a : anchors) {
            if (k == a.strike) p.vol = a.vol;
        }
        return p;
    });
}

StrikeInterval completion_domain(const SurfaceQuoteRow& row, const CompletionOptions& opts) {
    const MarketState ms = row.market();
    const double atm_vol = row.require(DeltaLabel::ATM);
    StrikeInterval d = proxy_window(ms, atm_vol, 1e-6, 1.0 - 1e-6);
    for (DeltaLabel l : kAllLabels) {
        if (!row.vol(l)) continue;
        const double k = label_strike(row, l, opts);
        d.lo = std::min(d.lo, k);
        d.hi = std::max(d.hi, k);
    }
    return {d.lo * std::exp(-0.1), d.hi * std::exp(0.1)};
}

}  // namespace

CompletedExpiry complete_expiry(const SurfaceQuoteRow& row, CompletionMethod method,
                                const CompletionOptions& opts) {
    const MarketState ms = row.market();
    ms.validate();
    const double atm_vol = row.require(DeltaLabel::ATM);
    const double atm = label_strike(row, DeltaLabel::ATM, opts);
    const RepresentationContext ctx{ms, atm, resolve_radius(opts.representation, ms, atm_vol, atm)};
    const StrikeInterval domain = completion_domain(row, opts);

    std::vector<DeltaAnchor> anchors;
    auto add_anchor = [&](DeltaLabel l) {
        anchors.push_back({label_n_target(l, opts.convention, ms), label_strike(row, l, opts), row.require(l)});
    };

    if (method == CompletionMethod::Ellipse) {
        for (DeltaLabel l : kFiveAnchors) add_anchor(l);
        std::array<Point2, 5> pts{};
        for (std::size_t i = 0; i < 5; ++i) pts[i] = represent_point(ctx, anchors[i].strike, anchors[i].vol);
        const ConicShape conic = conic_through_5(pts);
        const SmileCurve base = smile_from_shape(conic, ctx, domain);
        return {method, snap_to_anchors(base, anchors), ctx, anchors, std::nullopt, conic};
    }

    for (DeltaLabel l : kThreeAnchors) add_anchor(l);
    if (method == CompletionMethod::Circle) {
        std::array<Point2, 3> pts{};
        for (std::size_t i = 0; i < 3; ++i) pts[i] = represent_point(ctx, anchors[i].strike, anchors[i].vol);
        const CircleShape circle = circumcircle(pts[0], pts[1], pts[2]);
        const SmileCurve base = smile_from_shape(circle, ctx, domain);
        return {method, snap_to_anchors(base, anchors), ctx, anchors, circle, std::nullopt};
    }

    const ThreeQuoteSmile q{ms, {anchors[0], anchors[1], anchors[2]}};
    return {method, vv_smile(q, domain, opts.vanna_volga), ctx, anchors, std::nullopt, std::nullopt};
}

DiscrepancyTable discrepancy_table(const std::vector<SurfaceQuoteRow>& rows, CompletionMethod method,
                                   const CompletionOptions& opts) {
    using Cells = std::array<std::optional<double>, kLabelCount>;
    struct RowResult {
        Cells cells{};
        std::string error;
    };
    std::vector<std::future<RowResult>> jobs;
    jobs.reserve(rows.size());
    for (const SurfaceQuoteRow& row : rows) {
        jobs.push_back(std::async(std::launch::async, [&row, method, &opts] {
            RowResult r;
            try {
                const CompletedExpiry done = complete_expiry(row, method, opts);
                for (DeltaLabel l : kAllLabels) {
                    const auto market = row.vol(l);
                    if (!market) continue;
                    const double model = done.smile.vol(label_strike(row, l, opts));
                    if (std::isfinite(model)) {
                        r.cells[label_index(l)] = model - *market;
                    } else {
                        r.error += std::string(r.error.empty() ? "" : "; ") + "no model vol at " + label_name(l);
                    }
                }
            } catch (const Error& e) {
                r.cells = {};
                r.error = e.what();
            }
            return r;
        }));
    }

    DiscrepancyTable t;
    t.method = method;
    std::array<double, kLabelCount> col_sq{};
    double grand_sq = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        RowResult r = jobs[i].get();
        t.expiries.push_back(rows[i].expiry);
        double row_sq = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            if (!r.cells[j]) continue;
            const double c2 = *r.cells[j] * *r.cells[j];
            row_sq += c2;
            col_sq[j] += c2;
            any = true;
        }
        grand_sq += row_sq;
        t.row_l2.push_back(any ? std::optional<double>(std::sqrt(row_sq)) : std::nullopt);
        t.cells.push_back(r.cells);
        t.errors.push_back(std::move(r.error));
    }
    for (std::size_t j = 0; j < kLabelCount; ++j) t.col_l2[j] = std::sqrt(col_sq[j]);
    t.grand_l2 = std::sqrt(grand_sq);
    return t;
}

namespace {

struct Expiry {
    const char* label;
    double years;
};

constexpr std::array<Expiry, 14> kExpiries = {{
    {"2W", 14.0 / 365.0}, {"3W", 21.0 / 365.0}, {"1M", 1.0 / 12.0}, {"2M", 2.0 / 12.0},
    {"3M", 0.25},         {"4M", 4.0 / 12.0},   {"6M", 0.5},        {"9M", 0.75},
    {"1Y", 1.0},          {"18M", 1.5},         {"2Y", 2.0},        {"3Y", 3.0},
    {"4Y", 4.0},          {"5Y", 5.0},
}};

// Quotes of a smile at its self-consistent label strikes.
SurfaceQuoteRow quote_smile(const SmileCurve& smile, const Expiry& e, DeltaConvention conv) {
    const MarketState& ms = smile.market();
    SurfaceQuoteRow row{e.label, e.years, ms.spot, ms.dom_rate, ms.for_rate, {}};
    for (DeltaLabel l : kAllLabels) {
        const double k = l == DeltaLabel::ATM
                             ? atm_rn_from_smile(smile)
                             : strike_for_delta(smile, label_n_target(l, conv, ms), DeltaConvention::ForwardN).strike;
        row.vols[label_index(l)] = smile.vol(k);
    }
    return row;
}

}  // namespace

std::vector<SurfaceQuoteRow> synth_gamma_surface(const SynthMarket& mkt, double vol_ref,
                                                 DeltaConvention conv) {
    std::vector<SurfaceQuoteRow> rows;
    for (const Expiry& e : kExpiries) {
        const MarketState ms{mkt.spot, mkt.dom_rate, mkt.for_rate, e.years};
        const double kappa = 1.0 / (vol_ref * vol_ref * e.years);
        const DistributionSpec spec = Gamma{kappa, ms.forward() / kappa};
        GridSpec grid;
        grid.points = 3;
        const DistributionSmile ds = smile_from_distribution(spec, ms, grid);
        rows.push_back(quote_smile(ds.smile, e, conv));
    }
    return rows;
}

std::vector<SurfaceQuoteRow> synth_circle_surface(const SynthMarket& mkt, const RepresentationConfig& cfg,
                                                  DeltaConvention conv) {
    std::vector<SurfaceQuoteRow> rows;
    for (std::size_t i = 0; i < kExpiries.size(); ++i) {
        const Expiry& e = kExpiries[i];
        const MarketState ms{mkt.spot, mkt.dom_rate, mkt.for_rate, e.years};
        const double atm_vol = 0.075 + 0.01 * std::log1p(e.years);
        const double atm = bsm::atm_rn_lognormal(ms, atm_vol);
        const RepresentationContext ctx{ms, atm, resolve_radius(cfg, ms, atm_vol, atm)};
        const double rho0 = ctx.radius + atm_vol;
        // Center shifted left (put skew) and up (wing convexity), growing with tenor.
        const double shift = 0.01 + 0.002 * static_cast<double>(i);
        const Point2 center{-shift * rho0, 0.6 * shift * rho0};
        const double radius = std::hypot(center.x, center.y + rho0);
        const CircleShape circle{center, radius};
        const StrikeInterval dom = proxy_window(ms, atm_vol, 1e-7, 1.0 - 1e-7);
        const SmileCurve smile =
            smile_from_shape(circle, ctx, {dom.lo * std::exp(-0.5), dom.hi * std::exp(0.5)});
        rows.push_back(quote_smile(smile, e, conv));
    }
    return rows;
}

}  // namespace smilegeo
