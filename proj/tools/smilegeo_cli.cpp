#include "smilegeo/emit.hpp"
#include "smilegeo/errors.hpp"
#include "smilegeo/shape_fit.hpp"
#include "smilegeo/study.hpp"
#include "smilegeo/surface.hpp"
#include "smilegeo/vanna_volga.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace smilegeo;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumeric = 3;
constexpr std::size_t kCurvaturePoints = 801;

struct Args {
    std::string radius_scale = "auto";
    std::size_t grid_points = 2001;
    std::string method;
    std::string format = "csv";
    std::string out = "-";
    std::string convention;
    std::string label_strike = "own";

    std::string dist;
    double rate = 0.0;
    double div = 0.0;
    double tenor = 1.0;
    std::string backing = "exact";

    std::string input;
    std::string expiry;

    std::string synth_kind = "gamma";
    double vol_ref = 0.10;
};

double parse_double(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) {
        throw Error(ErrorKind::ParseError, "cannot read " + what + " from '" + text + "'");
    }
    return v;
}

// "family:p1,p2"
DistributionSpec parse_dist(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorKind::ParseError, "distribution must look like family:p1,p2");
    }
    const std::string family = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::ParseError, "distribution needs two parameters");
    const double a = parse_double(rest.substr(0, comma), "first parameter");
    const double b = parse_double(rest.substr(comma + 1), "second parameter");
    DistributionSpec spec;
    if (family == "lognormal") spec = LogNormal{a, b};
    else if (family == "gamma") spec = Gamma{a, b};
    else if (family == "normal") spec = Normal{a, b};
    else if (family == "student") spec = StudentT{a, b};
    else if (family == "uniform") spec = Uniform{a, b};
    else throw Error(ErrorKind::ParseError, "unknown distribution family '" + family + "'");
    dist::validate(spec);
    return spec;
}

RepresentationConfig parse_radius(const std::string& text) {
    if (text == "auto") return RepresentationConfig::automatic();
    return RepresentationConfig::fixed(parse_double(text, "--radius-scale"));
}

DeltaConvention parse_convention(const std::string& text, DeltaConvention fallback) {
    if (text.empty()) return fallback;
    if (text == "forward") return DeltaConvention::ForwardN;
    if (text == "spot") return DeltaConvention::SpotPips;
    throw Error(ErrorKind::ParseError, "delta convention must be 'forward' or 'spot'");
}

CompletionMethod parse_method(const std::string& text) {
    if (text.empty() || text == "circle") return CompletionMethod::Circle;
    if (text == "ellipse") return CompletionMethod::Ellipse;
    if (text == "vanna-volga") return CompletionMethod::VannaVolga;
    throw Error(ErrorKind::ParseError, "method must be circle, ellipse or vanna-volga");
}

CompletionOptions completion_options(const Args& a) {
    CompletionOptions o;
    o.convention = parse_convention(a.convention, DeltaConvention::SpotPips);
    o.representation = parse_radius(a.radius_scale);
    if (a.label_strike == "own") o.label_rule = LabelStrikeRule::OwnVol;
    else if (a.label_strike == "atm") o.label_rule = LabelStrikeRule::AtmVol;
    else throw Error(ErrorKind::ParseError, "--label-strike must be 'own' or 'atm'");
    return o;
}

FitOptions fit_options(const Args& a) {
    FitOptions o;
    o.convention = parse_convention(a.convention, DeltaConvention::ForwardN);
    return o;
}

GridSpec grid_spec(const Args& a) {
    if (a.grid_points < 9) throw Error(ErrorKind::InvalidArgument, "--grid-points must be at least 9");
    GridSpec g;
    g.points = a.grid_points;
    return g;
}

MarketState dist_market(const Args& a, const DistributionSpec& spec) {
    return dist::consistent_market(spec, a.rate, a.div, a.tenor);
}

const SurfaceQuoteRow& pick_row(const std::vector<SurfaceQuoteRow>& rows, const std::string& expiry) {
    for (const auto& r : rows) {
        if (r.expiry == expiry) return r;
    }
    throw Error(ErrorKind::InvalidArgument, "expiry '" + expiry + "' not in surface");
}

// The smile a subcommand works on, with a strike grid and, when fitted,
// the representation context and overlays.
struct Source {
    std::optional<SmileCurve> smile;
    std::vector<double> grid;
    std::optional<RepresentationContext> context;
    std::optional<CircleShape> circle;
    std::optional<ConicShape> conic;
    std::vector<DeltaAnchor> anchors;
};

std::vector<double> domain_grid(const SmileCurve& s, std::size_t n) {
    return log_grid(s.domain().lo, s.domain().hi, n);
}

// Source smile from --dist (optionally replaced by a fitted model) or from
// one expiry of --input completed by --method.
Source load_source(const Args& a, bool model_default_exact) {
    Source src;
    if (!a.dist.empty()) {
        const DistributionSpec spec = parse_dist(a.dist);
        const MarketState ms = dist_market(a, spec);
        SmileBacking backing = SmileBacking::Exact;
        if (a.backing == "spline") backing = SmileBacking::Spline;
        else if (a.backing != "exact") throw Error(ErrorKind::ParseError, "--backing must be exact or spline");
        DistributionSmile ds = smile_from_distribution(spec, ms, grid_spec(a), backing);
        const SmileCurve& ref = ds.smile;
        const RepresentationConfig cfg = parse_radius(a.radius_scale);
        const std::string method = a.method.empty() && model_default_exact ? "exact" : a.method;
        src.grid = ds.grid;
        if (method == "exact") {
            src.smile = ref;
        } else if (method == "circle" || method.empty()) {
            const CircleFit f = fit_circle_to_smile(ref, cfg, fit_options(a));
            src.smile = smile_from_shape(f.circle, f.context, ref.domain());
            src.context = f.context;
            src.circle = f.circle;
            src.anchors = f.anchors;
        } else if (method == "ellipse") {
            const EllipseFit f = fit_ellipse_to_smile(ref, cfg, fit_options(a));
            src.smile = smile_from_shape(f.conic, f.context, ref.domain());
            src.context = f.context;
            src.conic = f.conic;
            src.anchors = f.anchors;
        } else if (method == "vanna-volga") {
            const RepresentationContext ctx = make_context(ref, cfg);
            constexpr double targets[] = {0.25, 0.5, 0.75};
            const auto an = resolve_anchors(ref, targets, fit_options(a), ctx.atm_rn);
            const ThreeQuoteSmile q{ms, {an[0], an[1], an[2]}};
            src.smile = vv_smile(q, ref.domain());
            src.context = ctx;
            src.anchors = an;
        } else {
            throw Error(ErrorKind::ParseError, "method must be exact, circle, ellipse or vanna-volga");
        }
        return src;
    }
    if (!a.input.empty()) {
        if (a.expiry.empty()) throw Error(ErrorKind::InvalidArgument, "--expiry is required with --input");
        const auto rows = read_surface(a.input);
        const CompletedExpiry c = complete_expiry(pick_row(rows, a.expiry), parse_method(a.method),
                                                  completion_options(a));
        src.smile = c.smile;
        src.grid = domain_grid(c.smile, a.grid_points);
        src.context = c.context;
        src.circle = c.circle;
        src.conic = c.conic;
        src.anchors = c.anchors;
        return src;
    }
    throw Error(ErrorKind::InvalidArgument, "give --dist or --input with --expiry");
}

RepresentationFigure figure_of(const Source& src, const Args& a) {
    const RepresentationContext ctx = src.context ? *src.context : make_context(*src.smile, parse_radius(a.radius_scale));
    RepresentationFigure f{represent(*src.smile, ctx, src.grid), src.circle, src.conic, {}};
    for (const DeltaAnchor& an : src.anchors) f.anchors.push_back(represent_point(ctx, an.strike, an.vol));
    return f;
}

void emit(const Args& a, const std::string& bytes) {
    if (a.out == "-") {
        std::cout << bytes;
        std::cout.flush();
        if (!std::cout) throw Error(ErrorKind::IoError, "write to stdout failed");
    } else {
        write_file(a.out, bytes);
    }
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::IoError: return kExitIo;
        case ErrorKind::ParseError:
        case ErrorKind::MissingAnchor: return kExitParse;
        default: return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric representation of implied-volatility smiles"};
    app.require_subcommand(1);
    app.fallthrough();
    Args a;

    app.add_option("--radius-scale", a.radius_scale, "Scale R of the representation, or 'auto'");
    auto* grid_opt = app.add_option("--grid-points", a.grid_points, "Strike grid size (curvature defaults to 801)")
                         ->envname("SMILEGEO_GRID_POINTS");
    app.add_option("--method", a.method, "exact | circle | ellipse | vanna-volga");
    app.add_option("--output-format", a.format, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--out", a.out, "Output path ('-' for stdout)");
    app.add_option("--delta-convention", a.convention, "forward | spot")
        ->check(CLI::IsMember({"forward", "spot"}));
    app.add_option("--label-strike", a.label_strike, "Vol used to place label strikes: own | atm")
        ->check(CLI::IsMember({"own", "atm"}));
    app.add_option("--dist", a.dist,
                   "family:p1,p2 with family lognormal(mu,s), gamma(kappa,theta), normal(mu,s), "
                   "student(mu,nu), uniform(a,b)");
    app.add_option("--rate", a.rate, "Domestic rate for --dist");
    app.add_option("--div", a.div, "Foreign rate for --dist");
    app.add_option("--tenor", a.tenor, "Tenor in years for --dist");
    app.add_option("--backing", a.backing, "exact | spline smile of --dist");
    app.add_option("--input", a.input, "Surface CSV");
    app.add_option("--expiry", a.expiry, "Expiry label within --input");

    auto* represent_cmd = app.add_subcommand("represent", "Polar representation curve of a smile");
    auto* circle_cmd = app.add_subcommand("fit-circle", "Three-anchor circle fit");
    auto* ellipse_cmd = app.add_subcommand("fit-ellipse", "Five-anchor ellipse fit");
    auto* density_cmd = app.add_subcommand("density", "Density implied by a smile");
    auto* curvature_cmd = app.add_subcommand("curvature", "Euclidean and similarity curvature");
    auto* complete_cmd = app.add_subcommand("complete-surface", "Discrepancy table of a surface");
    auto* compare_cmd = app.add_subcommand("compare", "KL of each reconstruction against a distribution");
    auto* synth_cmd = app.add_subcommand("synth-surface", "Synthetic 14-expiry surface CSV");
    synth_cmd->add_option("--kind", a.synth_kind, "gamma | circle")->check(CLI::IsMember({"gamma", "circle"}));
    synth_cmd->add_option("--vol-ref", a.vol_ref, "Reference vol of the gamma surface");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        const OutputFormat fmt = parse_output_format(a.format);
        if (represent_cmd->parsed()) {
            Source src = load_source(a, true);
            emit(a, render(figure_of(src, a), fmt));
        } else if (circle_cmd->parsed() || ellipse_cmd->parsed()) {
            Args b = a;
            b.method = circle_cmd->parsed() ? "circle" : "ellipse";
            emit(a, render(figure_of(load_source(b, false), b), fmt));
        } else if (density_cmd->parsed()) {
            const Source src = load_source(a, true);
            emit(a, render(density_from_smile(*src.smile, src.grid), fmt));
        } else if (curvature_cmd->parsed()) {
            // Third differences degrade on dense grids.
            Args b = a;
            if (grid_opt->count() == 0) b.grid_points = kCurvaturePoints;
            const Source src = load_source(b, true);
            const RepresentationFigure f = figure_of(src, b);
            std::optional<Point2> center;
            if (src.circle) center = src.circle->center;
            emit(a, render(curvature_profile(f.curve, center), fmt));
        } else if (complete_cmd->parsed()) {
            if (a.input.empty()) throw Error(ErrorKind::InvalidArgument, "--input is required");
            const auto rows = read_surface(a.input);
            const DiscrepancyTable t = discrepancy_table(rows, parse_method(a.method), completion_options(a));
            emit(a, render(t, fmt));
            bool failed = false;
            for (std::size_t i = 0; i < t.errors.size(); ++i) {
                if (!t.errors[i].empty()) {
                    std::cerr << "smilegeo: " << t.expiries[i] << ": " << t.errors[i] << "\n";
                    failed = true;
                }
            }
            return failed ? kExitNumeric : 0;
        } else if (compare_cmd->parsed()) {
            if (a.dist.empty()) throw Error(ErrorKind::InvalidArgument, "--dist is required");
            const DistributionSpec spec = parse_dist(a.dist);
            StudyOptions o;
            o.representation = parse_radius(a.radius_scale);
            o.fit = fit_options(a);
            o.grid = grid_spec(a);
            emit(a, render(study_distribution(spec, dist_market(a, spec), o), fmt));
        } else if (synth_cmd->parsed()) {
            const DeltaConvention conv = parse_convention(a.convention, DeltaConvention::SpotPips);
            const auto rows = a.synth_kind == "gamma"
                                  ? synth_gamma_surface({}, a.vol_ref, conv)
                                  : synth_circle_surface({}, parse_radius(a.radius_scale), conv);
            emit(a, format_surface(rows));
        }
    } catch (const Error& e) {
        std::cerr << "smilegeo: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "smilegeo: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
