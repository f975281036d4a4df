#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "printmap/raster.hpp"

namespace printmap {

// Multilinear color transfer: each output channel is a 16-term polynomial in
// normalized position (x, y) and input color (R, G, B), linear in every
// variable. Term order is fixed and part of the model file format.
inline constexpr int kPrintScanTerms = 16;

extern const std::array<std::string, kPrintScanTerms> kPrintScanTermNames;

std::array<double, kPrintScanTerms> design_row(double x, double y, double r, double g, double b);

struct PrintScanModel {
  // coeffs[channel][term], channel 0 = R, 1 = G, 2 = B.
  std::array<std::array<double, kPrintScanTerms>, 3> coeffs{};

  static PrintScanModel identity();

  std::array<double, 3> evaluate(double x, double y, double r, double g, double b) const;
};

struct FitReport {
  std::array<double, 3> rmse{};
  int sample_count = 0;
  double ridge = 0.0;
  // Ratio of largest to smallest diagonal of the R factor; a large value
  // signals a poorly conditioned sample set.
  double condition = 0.0;
};

// Fits one polynomial per channel from roughly `samples` pixel positions on a
// deterministic stratified grid, so repeated fits are bit-identical without
// any RNG state. Pixels are paired by position, so src and dst must share
// dimensions. With ridge = 0 a numerically rank deficient system throws
// RankDeficient instead of returning garbage.
std::pair<PrintScanModel, FitReport> fit_printscan(const ImageRGB& src, const ImageRGB& dst,
                                                   int samples, double ridge);

// Per-channel RMSE of clamped model predictions over every pixel of the pair;
// matches what apply_printscan would produce.
std::array<double, 3> fit_residual(const PrintScanModel& model, const ImageRGB& src,
                                   const ImageRGB& dst);

// Applies the model to every pixel; output clamped to [0, 1].
ImageRGB apply_printscan(const ImageRGB& img, const PrintScanModel& model);

// JSON model file: term-name array, per-channel coefficient arrays, ridge
// and rmse metadata. Loading validates the term order.
void save_model(const std::filesystem::path& path, const PrintScanModel& model,
                const FitReport& report);
std::pair<PrintScanModel, FitReport> load_model(const std::filesystem::path& path);

// Same schema as the model file; used to inline models into manifests.
nlohmann::json model_to_json(const PrintScanModel& model, const FitReport& report);
std::pair<PrintScanModel, FitReport> model_from_json(const nlohmann::json& j);

}  // namespace printmap
