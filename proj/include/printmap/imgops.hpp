#pragma once

#include <array>
#include <vector>

#include "printmap/raster.hpp"

namespace printmap {

// ---------------------------------------------------------------------------
// Color space

// Naive conversion: k = 1 - max(r,g,b); c = (1-r-k)/(1-k), 0 when k = 1.
std::array<double, 4> cmyk_from_rgb(double r, double g, double b);
std::array<double, 3> rgb_from_cmyk(double c, double m, double y, double k);

ImageCMYK rgb_to_cmyk(const ImageRGB& img);
ImageRGB cmyk_to_rgb(const ImageCMYK& img);

// ---------------------------------------------------------------------------
// Resampling

// Separable Catmull-Rom (a = -0.5), center-aligned sampling, edge taps
// clamped. Intermediate pass is kept unclamped; the final pass clamps to
// [0, 1]. Identity size is an exact copy.
ImageRGB resize_bicubic(const ImageRGB& img, int out_w, int out_h);
ChannelStack resize_bicubic(const ChannelStack& stack, int out_w, int out_h);

// Nearest neighbour with the same center-aligned mapping. Never invents
// labels.
LabelMask resize_nearest(const LabelMask& mask, int out_w, int out_h);

// ---------------------------------------------------------------------------
// Normalization

inline constexpr double kNormalizeEpsilon = 1e-8;

struct NormalizedImage {
  ChannelStack values;
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
  // Channel was flat (population stddev below epsilon); epsilon was used as
  // the divisor.
  std::array<bool, 3> constant_channel{};
};

// Per-channel zero-mean, unit-variance (population stddev).
NormalizedImage normalize(const ImageRGB& img);

// ---------------------------------------------------------------------------
// Patch tiling

// Non-overlapping patch x patch tiles anchored at multiples of the patch
// size; a final tile per axis is flush-anchored to the image edge when the
// stride leaves a remainder. An axis shorter than the patch yields the full
// extent of that axis.
std::vector<Rect> patch_grid(int w, int h, int patch);

// ---------------------------------------------------------------------------
// Layout helpers

ChannelStack as_stack(const ImageRGB& img);
ImageRGB rgb_from_stack(const ChannelStack& stack);
ChannelStack concat_channels(const ChannelStack& a, const ChannelStack& b);

ChannelStack crop(const ChannelStack& stack, const Rect& r);
ImageRGB crop(const ImageRGB& img, const Rect& r);
LabelMask crop(const LabelMask& mask, const Rect& r);

}  // namespace printmap
