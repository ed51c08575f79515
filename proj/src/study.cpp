#include "smilegeo/study.hpp"

#include "smilegeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace smilegeo {

const ModelResult& DistributionStudy::model(const std::string& name) const {
    for (const ModelResult& m : models) {
        if (m.name == name) return m;
    }
    throw Error(ErrorKind::InvalidArgument, "no model named " + name);
}

namespace {

ModelResult smile_model(const std::string& name, const SmileCurve& smile, const DistributionStudy& st,
                        const StudyOptions& opts) {
    ModelResult m;
    m.name = name;
    m.density = density_from_smile(smile, st.window_grid, opts.density);
    m.margin = nonnegativity_margin(smile, st.window_grid, opts.density);
    KlOptions kl;
    kl.nodes = opts.kl_nodes;
    kl.window = st.window;
    m.divergence = kl_divergence(st.reference, m.density, kl);
    m.ok = true;
    return m;
}

// The density on R+ rescaled by 1/(1 - P(0)), on a dense log grid covering
// all but 1e-7 of each tail.
DensityCurve positive_part(const DistributionSpec& spec) {
    const double m = dist::mean(spec);
    const double lo = std::max(dist::quantile(spec, 1e-7), 1e-4 * m);
    const double hi = dist::quantile(spec, 1.0 - 1e-7);
    DensityCurve out = dist::density_curve(spec, log_grid(lo, hi, 20001));
    const double keep = 1.0 - out.mass_below_zero;
    for (double& v : out.values) v /= keep;
    return out;
}

template <class F>
ModelResult guarded(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        ModelResult m;
        m.name = name;
        m.error = e.what();
        return m;
    }
}

}  // namespace

DistributionStudy study_distribution(const DistributionSpec& spec, const MarketState& ms,
                                     const StudyOptions& opts) {
    DistributionStudy st{spec, ms, {}, {}, {}, {}, {}, {}, {}, {}};
    const DistributionSmile ref = smile_from_distribution(spec, ms, opts.grid);
    const SmileCurve& smile = ref.smile;

    st.window = {strike_for_delta(smile, opts.window_lo, DeltaConvention::ForwardN).strike,
                 strike_for_delta(smile, opts.window_hi, DeltaConvention::ForwardN).strike};
    st.window_grid = log_grid(st.window.lo, st.window.hi, opts.kl_nodes);
    st.reference = dist::density_curve(spec, st.window_grid);

    st.models.push_back(guarded("circle", [&] {
        st.circle = fit_circle_to_smile(smile, opts.representation, opts.fit);
        const SmileCurve s = smile_from_shape(st.circle->circle, st.circle->context, smile.domain());
        return smile_model("circle", s, st, opts);
    }));

    st.models.push_back(guarded("ellipse", [&] {
        st.ellipse = fit_ellipse_to_smile(smile, opts.representation, opts.fit);
        const SmileCurve s = smile_from_shape(st.ellipse->conic, st.ellipse->context, smile.domain());
        return smile_model("ellipse", s, st, opts);
    }));

    st.models.push_back(guarded("vanna-volga", [&] {
        const RepresentationContext ctx = make_context(smile, opts.representation);
        constexpr double targets[] = {0.25, 0.5, 0.75};
        const std::vector<DeltaAnchor> a = resolve_anchors(smile, targets, opts.fit, ctx.atm_rn);
        st.quotes = ThreeQuoteSmile{ms, {a[0], a[1], a[2]}};
        const SmileCurve s = vv_smile(*st.quotes, smile.domain(), opts.vanna_volga);
        return smile_model("vanna-volga", s, st, opts);
    }));

    st.models.push_back(guarded("lognormal", [&] {
        st.lognormal = best_lognormal(positive_part(spec));
        ModelResult m;
        m.name = "lognormal";
        m.density = dist::density_curve(st.lognormal, st.window_grid);
        m.margin = 1.0;
        KlOptions kl;
        kl.nodes = opts.kl_nodes;
        kl.window = st.window;
        m.divergence = kl_divergence(st.reference, m.density, kl);
        m.ok = true;
        return m;
    }));
    return st;
}

}  // namespace smilegeo
