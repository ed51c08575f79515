#pragma once

#include "smilegeo/analysis.hpp"
#include "smilegeo/shapes.hpp"
#include "smilegeo/smile.hpp"
#include "smilegeo/study.hpp"
#include "smilegeo/surface.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smilegeo {

enum class OutputFormat { Csv, Json, Svg };
OutputFormat parse_output_format(std::string_view text);  // "csv" | "json" | "svg"

/// %.10g with -0 printed as 0; empty for non-finite values.
std::string format_number(double x);

/// Smile sampled on a strike grid.
struct SmileSamples {
    MarketState market;
    std::vector<double> strikes;
    std::vector<double> vols;
    std::vector<double> n_minus_d1;
};
SmileSamples sample_smile(const SmileCurve& smile, std::span<const double> strikes);

/// Representation curve with optional fitted shape and anchor dots.
struct RepresentationFigure {
    RepresentationCurve curve;
    std::optional<CircleShape> circle;
    std::optional<ConicShape> conic;
    std::vector<Point2> anchors;
};

std::string render(const DiscrepancyTable& table, OutputFormat fmt);
std::string render(const SmileSamples& smile, OutputFormat fmt);
std::string render(const DensityCurve& density, OutputFormat fmt);
std::string render(const RepresentationFigure& figure, OutputFormat fmt);
std::string render(const CurvatureProfile& profile, OutputFormat fmt);
/// KL of each reconstruction against the reference density.
std::string render(const DistributionStudy& study, OutputFormat fmt);

/// Writes bytes verbatim; IoError on failure.
void write_file(const std::string& path, std::string_view bytes);

}  // namespace smilegeo
