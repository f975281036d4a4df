#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "printmap/noise.hpp"
#include "printmap/printscan.hpp"
#include "printmap/raster.hpp"

namespace printmap {

// How many defects a defective page gets and how kinds are drawn. Kind
// probabilities: p_streak for a streak, otherwise one of the four inks with
// the given shares; p_streak + sum(shares) must be 1.
struct ScenarioConfig {
  double p_defective = 0.9;
  double p_streak = 0.4;
  std::array<double, 4> banding_shares{0.15, 0.15, 0.15, 0.15};  // C, M, Y, K
  int defect_count_min = 1;
  int defect_count_max = 4;
  double full_span_prob = 1.0;    // defect spans the whole axis
  double partial_min_frac = 0.3;  // shortest partial span, fraction of the axis
};

// Streak geometry and appearance. Width and amplitude are drawn uniformly;
// widths are expressed in target-resolution pixels.
struct StreakConfig {
  double amp_min = 0.05;
  double amp_max = 0.9;
  int width_min = 3;
  int width_max = 15;
  double gray_min = 0.0;
  double gray_max = 0.25;
  double modulation = 0.25;
  double edge_floor = 0.45;
};

// Banding geometry. lobe_frac places the two profile peaks at f and 1-f of
// the band width; the sigma window keeps the profile visibly bimodal while
// holding the band edges above a usable floor. p_excess applies to key-channel
// bands only; chromatic bands always deposit excess ink, since under max-black
// extraction some chromatic ink is zero at every pixel and a lack band there
// would label pixels it cannot move.
struct BandingConfig {
  double amp_min = 0.05;
  double amp_max = 0.5;
  int width_min = 20;
  int width_max = 200;
  double lobe_frac_min = 0.24;
  double lobe_frac_max = 0.28;
  double p_excess = 0.5;
};

struct GenConfig {
  ClassScheme scheme;
  int target_w = 1920;
  int target_h = 1080;
  ScenarioConfig scenario;
  StreakConfig streak;
  BandingConfig banding;
  PerlinParams noise;  // per-streak seeds override noise.seed
  std::uint64_t master_seed = 0;
  // Path to a fitted color model; empty means identity. When a config is
  // embedded in a manifest the coefficients are inlined instead.
  std::string printscan_model;
};

// Throws ConfigError on any out-of-range or inconsistent field.
void validate_gen_config(const GenConfig& cfg);

StreakTextureParams texture_params(const GenConfig& cfg);

nlohmann::json gen_config_to_json(const GenConfig& cfg);
// Rejects unknown keys so typos never silently fall back to defaults.
GenConfig gen_config_from_json(const nlohmann::json& j);

GenConfig load_gen_config(const std::filesystem::path& path);
void save_gen_config(const std::filesystem::path& path, const GenConfig& cfg);

}  // namespace printmap
