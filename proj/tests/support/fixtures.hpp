#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "printmap/config.hpp"
#include "printmap/printscan.hpp"
#include "printmap/raster.hpp"
#include "printmap/rng.hpp"

namespace testsupport {

// Smooth mid-tone page: low-frequency sinusoidal ink fields converted to RGB.
// Ink ranges keep every pixel clear of both saturation and pure white, so
// injected defects always have headroom in either direction.
printmap::ImageRGB smooth_page(int w, int h, std::uint64_t variant);

// Independent uniform RGB noise; maximal color/position diversity for fits.
printmap::ImageRGB hi_diversity(int w, int h, std::uint64_t seed);

// Random multilinear color model whose output stays inside [0.05, 0.95] over
// the whole (x, y, R, G, B) unit cube, so applying it never clamps and fits
// can recover it exactly.
printmap::PrintScanModel random_inrange_model(printmap::Rng& rng);

// Generation config with defect sizes scaled down for small test canvases.
printmap::GenConfig test_gen_config(int target_w, int target_h);

bool images_equal(const printmap::ImageRGB& a, const printmap::ImageRGB& b);
double max_abs_diff(const printmap::ImageRGB& a, const printmap::ImageRGB& b);
bool masks_equal(const printmap::LabelMask& a, const printmap::LabelMask& b);
printmap::LabelMask random_mask(int w, int h, const printmap::ClassScheme& scheme,
                                printmap::Rng& rng);

// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI binary with the given arguments, capturing exit code and both
// output streams.
CliResult run_cli(const std::vector<std::string>& args);

std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& content);
bool files_equal(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace testsupport
