#include "support/fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "printmap/imgops.hpp"

#ifndef PRINTMAP_CLI_PATH
#error "PRINTMAP_CLI_PATH must be defined by the build"
#endif

namespace testsupport {

using namespace printmap;

namespace fs = std::filesystem;

ImageRGB smooth_page(int w, int h, std::uint64_t variant) {
  Rng rng(variant * 1000003ull + 17ull);
  double fx[4], fy[4], ph[4];
  for (int i = 0; i < 4; ++i) {
    fx[i] = rng.uniform(0.5, 2.0);
    fy[i] = rng.uniform(0.5, 2.0);
    ph[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  ImageRGB out(w, h);
  for (int y = 0; y < h; ++y) {
    const double v = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
    for (int x = 0; x < w; ++x) {
      const double u = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
      double ink[4];
      for (int i = 0; i < 4; ++i) {
        const double s = std::sin(2.0 * std::numbers::pi * (fx[i] * u + fy[i] * v) + ph[i]);
        // c, m, y in [0.11, 0.39]; k in [0.02, 0.11].
        ink[i] = i < 3 ? 0.25 + 0.14 * s : 0.065 + 0.045 * s;
      }
      const auto rgb = rgb_from_cmyk(ink[0], ink[1], ink[2], ink[3]);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb[c];
    }
  }
  return out;
}

ImageRGB hi_diversity(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  ImageRGB out(w, h);
  for (double& v : out.data) v = rng.next_double();
  return out;
}

PrintScanModel random_inrange_model(Rng& rng) {
  PrintScanModel m;
  for (int ch = 0; ch < 3; ++ch)
    for (int t = 0; t < kPrintScanTerms; ++t) m.coeffs[ch][t] = rng.uniform(-0.5, 0.5);
  // The polynomial is multilinear, so its extremes over the unit cube sit at
  // the 32 corners; an affine remap pins each channel's range inside
  // [0.05, 0.95].
  for (int ch = 0; ch < 3; ++ch) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int corner = 0; corner < 32; ++corner) {
      const double x = (corner >> 0) & 1;
      const double y = (corner >> 1) & 1;
      const double r = (corner >> 2) & 1;
      const double g = (corner >> 3) & 1;
      const double b = (corner >> 4) & 1;
      const double v = m.evaluate(x, y, r, g, b)[ch];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double alpha = 0.9 / std::max(hi - lo, 0.5);
    const double beta = 0.5 - alpha * (lo + hi) / 2.0;
    for (int t = 0; t < kPrintScanTerms; ++t) m.coeffs[ch][t] *= alpha;
    m.coeffs[ch][0] += beta;
  }
  return m;
}

GenConfig test_gen_config(int target_w, int target_h) {
  GenConfig cfg;
  cfg.target_w = target_w;
  cfg.target_h = target_h;
  cfg.streak.width_min = 3;
  cfg.streak.width_max = 6;
  cfg.banding.width_min = 10;
  cfg.banding.width_max = std::max(11, std::min(target_w, target_h) / 3);
  return cfg;
}

bool images_equal(const ImageRGB& a, const ImageRGB& b) {
  return a.width == b.width && a.height == b.height && a.data == b.data;
}

double max_abs_diff(const ImageRGB& a, const ImageRGB& b) {
  if (a.width != b.width || a.height != b.height) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

bool masks_equal(const LabelMask& a, const LabelMask& b) {
  return a.width == b.width && a.height == b.height && a.labels == b.labels;
}

LabelMask random_mask(int w, int h, const ClassScheme& scheme, Rng& rng) {
  LabelMask out(w, h, scheme);
  for (auto& v : out.labels)
    v = static_cast<std::uint8_t>(rng.uniform_int(0, scheme.num_classes() - 1));
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::ostringstream name;
  name << "printmap_test_" << ::getpid() << "_" << counter++;
  path_ = fs::temp_directory_path() / name.str();
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
  static std::atomic<int> counter{0};
  std::ostringstream base;
  base << (fs::temp_directory_path() / "printmap_cli_").string() << ::getpid() << "_" << counter++;
  const fs::path out_file = base.str() + ".out";
  const fs::path err_file = base.str() + ".err";

  std::string cmd = shell_quote(PRINTMAP_CLI_PATH);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(out_file.string()) + " 2> " + shell_quote(err_file.string());

  const int rc = std::system(cmd.c_str());
  CliResult res;
  if (rc == -1)
    res.exit_code = -1;
  else if (WIFEXITED(rc))
    res.exit_code = WEXITSTATUS(rc);
  else
    res.exit_code = -2;
  res.out = read_text(out_file);
  res.err = read_text(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return res;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

bool files_equal(const fs::path& a, const fs::path& b) {
  return read_text(a) == read_text(b) && fs::exists(a) && fs::exists(b);
}

}  // namespace testsupport
