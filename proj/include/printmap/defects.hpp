#pragma once

#include <cstdint>
#include <vector>

#include "printmap/noise.hpp"
#include "printmap/raster.hpp"

namespace printmap {

enum class DefectKind { Streak, Banding };
enum class Orientation { Horizontal, Vertical };
enum class BandSign { Excess, Lack };

// Bimodal cross profile of a banding defect: mean of two Gaussians over the
// band width, peak-normalized so the maximum equals `amplitude`.
struct BandProfile {
  double mu1 = 0.0;  // lobe centers in [0, width - 1]; mu1 + mu2 = width - 1
  double mu2 = 0.0;
  double sigma = 1.0;
  double amplitude = 0.0;
};

// One synthetic defect. Streaks use texture_seed / gray; banding uses
// channel / sign / profile.
struct DefectSpec {
  DefectKind kind = DefectKind::Streak;
  Orientation orientation = Orientation::Horizontal;
  Rect region;
  double amplitude = 0.0;

  std::uint64_t texture_seed = 0;  // streak
  double gray = 0.1;               // streak blend target

  InkChannel channel = InkChannel::Cyan;  // banding
  BandSign sign = BandSign::Excess;
  BandProfile profile;
};

// Discrete profile weights for a band of `width` rows (or columns).
// Zero-amplitude profiles are identically zero.
std::vector<double> banding_profile(int width, const BandProfile& profile);

// Blends each region pixel toward a dark gray by the streak darkness field;
// the result never exceeds the input, so streaks only darken.
ImageRGB apply_streak(const ImageRGB& img, const DefectSpec& spec,
                      const StreakTextureParams& texture);

// Shifts a single ink channel inside the region by the signed cross profile
// (Excess adds ink, Lack removes it), converting through CMYK per pixel.
ImageRGB apply_banding(const ImageRGB& img, const DefectSpec& spec);

// Applies defects in order; pixels outside every region are untouched.
ImageRGB apply_defects(const ImageRGB& img, const std::vector<DefectSpec>& specs,
                       const StreakTextureParams& texture);

// Paints each spec's full region with its class label, in spec order, except
// that streak pixels are never overwritten by banding.
LabelMask render_mask(const std::vector<DefectSpec>& specs, int w, int h,
                      const ClassScheme& scheme);

std::uint8_t label_for(const DefectSpec& spec, const ClassScheme& scheme);

}  // namespace printmap
