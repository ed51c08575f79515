#include "oracles.hpp"

#include "smilegeo/bsm.hpp"
#include "smilegeo/errors.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace smilegeo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Tuple {
    MarketState ms;
    double strike;
    double vol;
};

Tuple random_tuple(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> spot(0.5, 200.0), rate(-0.02, 0.08), tenor(0.02, 5.0),
        vol(0.03, 1.0), moneyness(-0.6, 0.6);
    MarketState ms{spot(rng), rate(rng), rate(rng), tenor(rng)};
    const double v = vol(rng);
    const double k = ms.forward() * std::exp(moneyness(rng) * v * std::sqrt(ms.tenor) * 3.0);
    return {ms, k, v};
}

}  // namespace

TEST_CASE("price matches log-normal payoff quadrature", "[bsm]") {
    const MarketState ms{100.0, 0.03, 0.01, 0.75};
    for (double k : {60.0, 90.0, 100.0, 115.0, 160.0}) {
        for (double vol : {0.08, 0.25, 0.6}) {
            CHECK_THAT(bsm::price(ms, k, vol, OptionSide::Call), WithinAbs(oracle::bsm_call(ms, k, vol), 1e-9));
        }
    }
}

TEST_CASE("put-call parity and the n(d1) identity", "[bsm][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Tuple t = random_tuple(rng);
        const double c = bsm::price(t.ms, t.strike, t.vol, OptionSide::Call);
        const double p = bsm::price(t.ms, t.strike, t.vol, OptionSide::Put);
        const double fwd = t.ms.spot * t.ms.for_discount() - t.strike * t.ms.dom_discount();
        const double scale = t.ms.spot * t.ms.for_discount() + t.strike * t.ms.dom_discount();
        REQUIRE(std::abs(c - p - fwd) <= 1e-12 * scale);
        const double nd1 = t.ms.spot * t.ms.for_discount() * bsm::norm_pdf(bsm::d1_d2(t.ms, t.strike, t.vol).d1);
        REQUIRE(bsm::identity_residual(t.ms, t.strike, t.vol) <= 1e-12 * std::max(nd1, 1e-300));
    }
}

TEST_CASE("implied vol inverts price", "[bsm][property]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Tuple t = random_tuple(rng);
        const OptionSide side = t.strike > t.ms.forward() ? OptionSide::Call : OptionSide::Put;
        const double px = bsm::price(t.ms, t.strike, t.vol, side);
        REQUIRE_THAT(bsm::implied_vol(t.ms, t.strike, px, side), WithinAbs(t.vol, 1e-10));
    }
}

TEST_CASE("implied vol rejects prices outside the band", "[bsm][error]") {
    const MarketState ms{100.0, 0.02, 0.0, 1.0};
    const double intrinsic = ms.spot - 90.0 * ms.dom_discount();
    try {
        bsm::implied_vol(ms, 90.0, intrinsic * 0.5, OptionSide::Call);
        FAIL("expected PriceOutOfBand");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PriceOutOfBand);
    }
    CHECK_THROWS_AS(bsm::implied_vol(ms, 90.0, ms.spot * 2.0, OptionSide::Call), Error);
}

TEST_CASE("greeks agree with finite differences", "[bsm]") {
    const MarketState ms{1.1, 0.03, 0.01, 0.5};
    const double h = 1e-5;
    for (double k : {0.95, 1.1, 1.25}) {
        for (OptionSide side : {OptionSide::Call, OptionSide::Put}) {
            MarketState up = ms, dn = ms;
            up.spot += h;
            dn.spot -= h;
            const double fd = (bsm::price(up, k, 0.12, side) - bsm::price(dn, k, 0.12, side)) / (2 * h);
            CHECK_THAT(bsm::delta(ms, k, 0.12, side), WithinAbs(fd, 1e-8));
        }
        const double fdv =
            (bsm::price(ms, k, 0.12 + h, OptionSide::Call) - bsm::price(ms, k, 0.12 - h, OptionSide::Call)) / (2 * h);
        CHECK_THAT(bsm::vega(ms, k, 0.12), WithinAbs(fdv, 1e-8));
    }
}

TEST_CASE("zero tenor is degenerate for d1", "[bsm][error]") {
    const MarketState ms{1.0, 0.0, 0.0, 0.0};
    try {
        bsm::d1_d2(ms, 1.0, 0.1);
        FAIL("expected DegenerateTenor");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateTenor);
    }
    CHECK(bsm::price(ms, 0.9, 0.1, OptionSide::Call) == Catch::Approx(0.1));
}

TEST_CASE("flat-smile straddle-neutral strike zeroes the straddle delta", "[bsm]") {
    const MarketState ms{1.3, 0.04, 0.015, 2.0};
    for (double vol : {0.05, 0.2, 0.45}) {
        const double k = bsm::atm_rn_lognormal(ms, vol);
        const double straddle = bsm::delta(ms, k, vol, OptionSide::Call) + bsm::delta(ms, k, vol, OptionSide::Put);
        CHECK_THAT(straddle, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("strike from forward delta hits the target", "[bsm]") {
    const MarketState ms{1.3, 0.04, 0.015, 0.25};
    for (double target : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double k = bsm::strike_from_forward_delta(ms, 0.15, target);
        CHECK_THAT(bsm::norm_cdf(-bsm::d1_d2(ms, k, 0.15).d1), WithinAbs(target, 1e-13));
    }
}

TEST_CASE("normal quantile inverts the cdf", "[bsm]") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999999}) {
        CHECK_THAT(bsm::norm_cdf(bsm::norm_quantile(p)), WithinRel(p, 1e-12));
    }
}
