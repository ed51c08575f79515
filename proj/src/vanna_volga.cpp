#include "smilegeo/vanna_volga.hpp"

#include "smilegeo/errors.hpp"

#include <cmath>
#include <limits>

namespace smilegeo {

namespace {

struct Lagrange {
    std::array<double, 3> w;
    std::array<double, 3> dw;
    std::array<double, 3> d2w;
};

Lagrange lagrange(const ThreeQuoteSmile& q, double x) {
    Lagrange out{};
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const double xi = std::log(q.anchors[i].strike);
        const double xj = std::log(q.anchors[j].strike);
        const double xk = std::log(q.anchors[k].strike);
        const double den = (xi - xj) * (xi - xk);
        out.w[i] = (x - xj) * (x - xk) / den;
        out.dw[i] = (2.0 * x - xj - xk) / den;
        out.d2w[i] = 2.0 / den;
    }
    return out;
}

}  // namespace

void ThreeQuoteSmile::validate() const {
    market.validate();
    if (!(market.tenor > 0.0)) {
        throw Error(ErrorKind::DegenerateTenor, "vanna-volga needs a positive tenor");
    }
    for (const DeltaAnchor& a : anchors) {
        if (!(a.strike > 0.0) || !(a.vol > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "anchor strikes and vols must be positive");
        }
    }
    if (!(anchors[0].strike < anchors[1].strike && anchors[1].strike < anchors[2].strike)) {
        throw Error(ErrorKind::InvalidArgument, "anchor strikes must increase strictly");
    }
}

std::array<double, 3> vv_weights(const ThreeQuoteSmile& q, double strike) {
    q.validate();
    if (!(strike > 0.0)) throw Error(ErrorKind::InvalidArgument, "strike must be positive");
    return lagrange(q, std::log(strike)).w;
}

SmilePoint vv_point(const ThreeQuoteSmile& q, double strike, VannaVolgaVariant variant) {
    q.validate();
    if (!(strike > 0.0)) throw Error(ErrorKind::InvalidArgument, "strike must be positive");
    const double x = std::log(strike);
    const Lagrange L = lagrange(q, x);
    const auto& an = q.anchors;

    if (variant == VannaVolgaVariant::FirstOrder) {
        SmilePoint p{0.0, 0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            p.vol += L.w[i] * an[i].vol;
            p.dvol += L.dw[i] * an[i].vol;
            p.d2vol += L.d2w[i] * an[i].vol;
        }
        for (int i = 0; i < 3; ++i) {
            if (strike == an[i].strike) p.vol = an[i].vol;
        }
        return p;
    }

    const MarketState& ms = q.market;
    const double s2 = an[1].vol;
    if (an[0].vol == s2 && an[2].vol == s2) return {s2, 0.0, 0.0};

    const OptionSide side = strike >= ms.forward() ? OptionSide::Call : OptionSide::Put;
    const double sqrt_t = std::sqrt(ms.tenor);
    const auto [d1, d2] = bsm::d1_d2(ms, strike, s2);
    const double vega = bsm::vega(ms, strike, s2);
    const double u = d1 / (s2 * sqrt_t);
    const double vega_x = vega * u;
    const double vega_xx = vega * (u * u - 1.0 / (s2 * s2 * ms.tenor));

    double corr = 0.0, corr_x = 0.0, corr_xx = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (i == 1) continue;
        const double cost = bsm::price(ms, an[i].strike, an[i].vol, OptionSide::Call) -
                            bsm::price(ms, an[i].strike, s2, OptionSide::Call);
        const double scale = cost / bsm::vega(ms, an[i].strike, s2);
        corr += scale * vega * L.w[i];
        corr_x += scale * (vega_x * L.w[i] + vega * L.dw[i]);
        corr_xx += scale * (vega_xx * L.w[i] + 2.0 * vega_x * L.dw[i] + vega * L.d2w[i]);
    }

    const double dk = ms.dom_discount() * strike;
    const double b_x = side == OptionSide::Call ? -dk * bsm::norm_cdf(d2) : dk * bsm::norm_cdf(-d2);
    const double b_xx = b_x + dk * bsm::norm_pdf(d2) / (s2 * sqrt_t);
    const double value = bsm::price(ms, strike, s2, side) + corr;

    double vol = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < 3; ++i) {
        if (strike == an[i].strike) vol = an[i].vol;
    }
    if (std::isnan(vol)) {
        try {
            vol = bsm::implied_vol(ms, strike, value, side);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PriceOutOfBand && e.kind() != ErrorKind::NoConvergence) throw;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {nan, nan, nan};
        }
    }
    return implied_vol_derivatives(ms, strike, vol, side, b_x + corr_x, b_xx + corr_xx);
}

double vv_vol(const ThreeQuoteSmile& q, double strike, VannaVolgaVariant variant) {
    return vv_point(q, strike, variant).vol;
}

SmileCurve vv_smile(const ThreeQuoteSmile& q, StrikeInterval domain, VannaVolgaVariant variant) {
    q.validate();
    return SmileCurve(q.market, domain,
                      [q, variant](double k) { return vv_point(q, k, variant); });
}

}  // namespace smilegeo
