#pragma once

#include "smilegeo/georep.hpp"
#include "smilegeo/shapes.hpp"
#include "smilegeo/smile.hpp"
#include "smilegeo/vanna_volga.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smilegeo {

/// The nine quoted delta columns in table order.
enum class DeltaLabel { P10, P15, P25, P35, ATM, C35, C25, C15, C10 };
inline constexpr std::size_t kLabelCount = 9;
inline constexpr std::array<DeltaLabel, kLabelCount> kAllLabels = {
    DeltaLabel::P10, DeltaLabel::P15, DeltaLabel::P25, DeltaLabel::P35, DeltaLabel::ATM,
    DeltaLabel::C35, DeltaLabel::C25, DeltaLabel::C15, DeltaLabel::C10};

const char* label_name(DeltaLabel label);     // "10P", ..., "ATM", ..., "10C"
const char* label_column(DeltaLabel label);   // "d10p", ..., "atm", ..., "d10c"
std::size_t label_index(DeltaLabel label);

/// Header of the surface CSV format.
inline constexpr std::string_view kSurfaceHeader =
    "expiry,tenor_years,spot,dom_rate,for_rate,d10p,d15p,d25p,d35p,atm,d35c,d25c,d15c,d10c";

struct SurfaceQuoteRow {
    std::string expiry;
    double tenor_years = 0.0;
    double spot = 0.0;
    double dom_rate = 0.0;
    double for_rate = 0.0;
    std::array<std::optional<double>, kLabelCount> vols{};

    MarketState market() const { return {spot, dom_rate, for_rate, tenor_years}; }
    std::optional<double> vol(DeltaLabel label) const { return vols[label_index(label)]; }
    /// Throws MissingAnchor naming the expiry if the label has no quote.
    double require(DeltaLabel label) const;
};

/// Parses the CSV format above. ParseError carries line and column;
/// MissingAnchor if 25P, ATM or 25C is absent from a row.
std::vector<SurfaceQuoteRow> parse_surface(std::string_view csv);
std::vector<SurfaceQuoteRow> read_surface(const std::string& path);
std::string format_surface(const std::vector<SurfaceQuoteRow>& rows);

enum class CompletionMethod { Circle, Ellipse, VannaVolga };
const char* method_name(CompletionMethod method);

/// Which vol turns a delta label into a strike.
enum class LabelStrikeRule { OwnVol, AtmVol };

struct CompletionOptions {
    DeltaConvention convention = DeltaConvention::SpotPips;
    RepresentationConfig representation = RepresentationConfig::automatic();
    LabelStrikeRule label_rule = LabelStrikeRule::OwnVol;
    VannaVolgaVariant vanna_volga = VannaVolgaVariant::PriceBased;
};

/// N(-d1) level of a label: put labels p -> p e^{qT} (SpotPips) or p
/// (ForwardN); call labels p -> 1 - p e^{qT} or 1 - p; ATM -> 0.5.
double label_n_target(DeltaLabel label, DeltaConvention conv, const MarketState& ms);

/// Strike of a label under a flat smile at `vol` (ATM: d1 = 0).
double label_strike_at_vol(DeltaLabel label, DeltaConvention conv, const MarketState& ms, double vol);

/// Strike of a quoted label using the vol chosen by the rule.
double label_strike(const SurfaceQuoteRow& row, DeltaLabel label, const CompletionOptions& opts);

struct CompletedExpiry {
    CompletionMethod method;
    SmileCurve smile;
    RepresentationContext context;
    std::vector<DeltaAnchor> anchors;
    std::optional<CircleShape> circle;
    std::optional<ConicShape> conic;
};

/// Completes one expiry from 25P/ATM/25C (circle, vanna-volga) or
/// 10P/25P/ATM/25C/10C (ellipse). The smile returns the quoted vol exactly at
/// each anchor strike.
CompletedExpiry complete_expiry(const SurfaceQuoteRow& row, CompletionMethod method,
                                const CompletionOptions& opts = {});

struct DiscrepancyTable {
    CompletionMethod method;
    std::vector<std::string> expiries;
    std::vector<std::array<std::optional<double>, kLabelCount>> cells;  // model - market
    std::vector<std::optional<double>> row_l2;
    std::array<double, kLabelCount> col_l2{};
    double grand_l2 = 0.0;
    std::vector<std::string> errors;  // per row, empty when the row completed
};

/// Rows are completed concurrently; output keeps input order.
DiscrepancyTable discrepancy_table(const std::vector<SurfaceQuoteRow>& rows, CompletionMethod method,
                                   const CompletionOptions& opts = {});

/// Synthetic surfaces on the 14 standard expiries (2W ... 5Y).
struct SynthMarket {
    double spot = 1.10;
    double dom_rate = 0.03;
    double for_rate = 0.01;
};

/// Each expiry quotes the smile of a gamma law with mean = forward and
/// shape 1/(vol_ref^2 T); quotes are read at self-consistent label strikes.
std::vector<SurfaceQuoteRow> synth_gamma_surface(const SynthMarket& mkt = {}, double vol_ref = 0.10,
                                                 DeltaConvention conv = DeltaConvention::SpotPips);

/// Each expiry quotes the smile of a circle through the ATM point whose
/// center is shifted by (dx, dy) relative to R + atm vol; R per `cfg`.
std::vector<SurfaceQuoteRow> synth_circle_surface(const SynthMarket& mkt = {},
                                                  const RepresentationConfig& cfg = RepresentationConfig::automatic(),
                                                  DeltaConvention conv = DeltaConvention::SpotPips);

}  // namespace smilegeo
