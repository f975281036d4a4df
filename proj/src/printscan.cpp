#include "printmap/printscan.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "printmap/parallel.hpp"

namespace printmap {

const std::array<std::string, kPrintScanTerms> kPrintScanTermNames = {
    "1",  "y",  "x",  "R",  "G",  "B",  "yR", "yG",
    "yB", "xR", "xG", "xB", "RG", "RB", "GB", "RGB"};

std::array<double, kPrintScanTerms> design_row(double x, double y, double r, double g, double b) {
  return {1.0,   y,     x,     r,     g,     b,     y * r, y * g,
          y * b, x * r, x * g, x * b, r * g, r * b, g * b, r * g * b};
}

PrintScanModel PrintScanModel::identity() {
  PrintScanModel m;
  m.coeffs[0][3] = 1.0;  // R <- R
  m.coeffs[1][4] = 1.0;  // G <- G
  m.coeffs[2][5] = 1.0;  // B <- B
  return m;
}

std::array<double, 3> PrintScanModel::evaluate(double x, double y, double r, double g,
                                               double b) const {
  const auto row = design_row(x, y, r, g, b);
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (int t = 0; t < kPrintScanTerms; ++t) acc += coeffs[c][t] * row[t];
    out[c] = acc;
  }
  return out;
}

namespace {

// Normalized pixel position; degenerate axes map to 0.
inline double norm_coord(int i, int extent) {
  return extent > 1 ? static_cast<double>(i) / (extent - 1) : 0.0;
}

}  // namespace

std::pair<PrintScanModel, FitReport> fit_printscan(const ImageRGB& src, const ImageRGB& dst,
                                                   int samples, double ridge) {
  if (src.width != dst.width || src.height != dst.height)
    throw DimMismatch("fit_printscan: src and dst dimensions differ");
  if (src.width < 1 || src.height < 1) throw DimMismatch("fit_printscan: empty images");
  if (samples < kPrintScanTerms)
    throw ConfigError("fit_printscan: need at least 16 samples");
  if (ridge < 0.0) throw ConfigError("fit_printscan: ridge must be nonnegative");

  const std::size_t total = src.pixel_count();

  // Stratified grid: one position at the center of each cell of a g-by-g
  // partition of the image. Deterministic, so fits never depend on RNG state.
  // Small images fall back to exhaustive sampling.
  std::vector<std::size_t> picks;
  if (static_cast<std::size_t>(samples) >= total) {
    picks.resize(total);
    for (std::size_t i = 0; i < total; ++i) picks[i] = i;
  } else {
    const int g = std::max(4, static_cast<int>(std::lround(std::sqrt(samples))));
    picks.reserve(static_cast<std::size_t>(g) * g);
    for (int j = 0; j < g; ++j) {
      const int py = std::min(src.height - 1, static_cast<int>((j + 0.5) * src.height / g));
      for (int i = 0; i < g; ++i) {
        const int px = std::min(src.width - 1, static_cast<int>((i + 0.5) * src.width / g));
        picks.push_back(static_cast<std::size_t>(py) * src.width + px);
      }
    }
  }
  const std::size_t n = picks.size();

  const int rows = static_cast<int>(n) + (ridge > 0.0 ? kPrintScanTerms : 0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, kPrintScanTerms);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(rows, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = picks[i];
    const int px = static_cast<int>(p % src.width);
    const int py = static_cast<int>(p / src.width);
    const auto row = design_row(norm_coord(px, src.width), norm_coord(py, src.height),
                                src.data[p * 3], src.data[p * 3 + 1], src.data[p * 3 + 2]);
    for (int t = 0; t < kPrintScanTerms; ++t) A(static_cast<int>(i), t) = row[t];
    for (int c = 0; c < 3; ++c) Y(static_cast<int>(i), c) = dst.data[p * 3 + c];
  }
  if (ridge > 0.0) {
    const double lam = std::sqrt(ridge);
    for (int t = 0; t < kPrintScanTerms; ++t) A(static_cast<int>(n) + t, t) = lam;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  if (ridge == 0.0) {
    // Declare rank deficiency on the scaled diagonal of R, the usual QR
    // criterion.
    if (dmin <= dmax * 1e-12 || qr.rank() < kPrintScanTerms)
      throw RankDeficient("fit_printscan: sample set does not span the 16 terms");
  }

  const Eigen::MatrixXd coeffs = qr.solve(Y);

  PrintScanModel model;
  for (int c = 0; c < 3; ++c)
    for (int t = 0; t < kPrintScanTerms; ++t) model.coeffs[c][t] = coeffs(t, c);

  FitReport report;
  report.sample_count = static_cast<int>(n);
  report.ridge = ridge;
  report.condition = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
  report.rmse = fit_residual(model, src, dst);
  return {model, report};
}

std::array<double, 3> fit_residual(const PrintScanModel& model, const ImageRGB& src,
                                   const ImageRGB& dst) {
  if (src.width != dst.width || src.height != dst.height)
    throw DimMismatch("fit_residual: src and dst dimensions differ");
  std::array<double, 3> sq{};
  for (int y = 0; y < src.height; ++y) {
    const double ny = norm_coord(y, src.height);
    for (int x = 0; x < src.width; ++x) {
      const auto pred = model.evaluate(norm_coord(x, src.width), ny, src.at(x, y, 0),
                                       src.at(x, y, 1), src.at(x, y, 2));
      for (int c = 0; c < 3; ++c) {
        const double d = std::clamp(pred[c], 0.0, 1.0) - dst.at(x, y, c);
        sq[c] += d * d;
      }
    }
  }
  const double n = static_cast<double>(src.pixel_count());
  for (int c = 0; c < 3; ++c) sq[c] = std::sqrt(sq[c] / n);
  return sq;
}

ImageRGB apply_printscan(const ImageRGB& img, const PrintScanModel& model) {
  ImageRGB out(img.width, img.height);
  parallel_for(0, img.height, default_workers(), [&](int y) {
    const double ny = norm_coord(y, img.height);
    for (int x = 0; x < img.width; ++x) {
      const auto v = model.evaluate(norm_coord(x, img.width), ny, img.at(x, y, 0), img.at(x, y, 1),
                                    img.at(x, y, 2));
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = std::clamp(v[c], 0.0, 1.0);
    }
  });
  return out;
}

nlohmann::json model_to_json(const PrintScanModel& model, const FitReport& report) {
  nlohmann::json j;
  j["order"] = kPrintScanTermNames;
  j["coeffs"]["r"] = model.coeffs[0];
  j["coeffs"]["g"] = model.coeffs[1];
  j["coeffs"]["b"] = model.coeffs[2];
  j["ridge"] = report.ridge;
  j["rmse"]["r"] = report.rmse[0];
  j["rmse"]["g"] = report.rmse[1];
  j["rmse"]["b"] = report.rmse[2];
  return j;
}

std::pair<PrintScanModel, FitReport> model_from_json(const nlohmann::json& j) {
  try {
    const auto order = j.at("order").get<std::vector<std::string>>();
    if (order.size() != kPrintScanTerms ||
        !std::equal(order.begin(), order.end(), kPrintScanTermNames.begin()))
      throw IoError("color model: unexpected term order");
    PrintScanModel model;
    const char* keys[3] = {"r", "g", "b"};
    for (int c = 0; c < 3; ++c) {
      const auto v = j.at("coeffs").at(keys[c]).get<std::vector<double>>();
      if (v.size() != kPrintScanTerms) throw IoError("color model: bad coefficient count");
      std::copy(v.begin(), v.end(), model.coeffs[c].begin());
    }
    FitReport report;
    report.ridge = j.value("ridge", 0.0);
    if (j.contains("rmse"))
      for (int c = 0; c < 3; ++c) report.rmse[c] = j.at("rmse").value(keys[c], 0.0);
    return {model, report};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("color model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const PrintScanModel& model,
                const FitReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model " + path.string());
  out << model_to_json(model, report).dump(2) << "\n";
  if (!out) throw IoError("failed writing model " + path.string());
}

std::pair<PrintScanModel, FitReport> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model " + path.string() + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const IoError& e) {
    throw IoError("model " + path.string() + ": " + e.what());
  }
}

}  // namespace printmap
