#pragma once

#include "smilegeo/smile.hpp"

#include <array>

namespace smilegeo {

/// Three quoted anchors K1 < K2 < K3; the middle one is the ATM quote.
struct ThreeQuoteSmile {
    MarketState market;
    std::array<DeltaAnchor, 3> anchors;

    /// Throws InvalidArgument unless strikes increase strictly and vols are positive.
    void validate() const;
};

///   PriceBased  - C(K) = BS(K, s2) + sum_i x_i(K) [BS(K_i, s_i) - BS(K_i, s2)],
///                 x_i = vega(K)/vega(K_i) * w_i(K); the smile is the implied vol of C
///   FirstOrder  - sigma(K) = sum_i w_i(K) s_i
/// w_i are the log-strike Lagrange weights, which sum to one.
enum class VannaVolgaVariant { PriceBased, FirstOrder };

/// w_i(K) = prod_{j != i} ln(K/K_j) / ln(K_i/K_j).
std::array<double, 3> vv_weights(const ThreeQuoteSmile& q, double strike);

/// sigma and its ln K derivatives. The price-based variant returns NaN where
/// its price leaves the no-arbitrage band.
SmilePoint vv_point(const ThreeQuoteSmile& q, double strike,
                    VannaVolgaVariant variant = VannaVolgaVariant::PriceBased);

double vv_vol(const ThreeQuoteSmile& q, double strike,
              VannaVolgaVariant variant = VannaVolgaVariant::PriceBased);

SmileCurve vv_smile(const ThreeQuoteSmile& q, StrikeInterval domain,
                    VannaVolgaVariant variant = VannaVolgaVariant::PriceBased);

}  // namespace smilegeo
