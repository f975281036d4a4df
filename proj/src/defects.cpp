#include "printmap/defects.hpp"

#include <algorithm>
#include <cmath>

#include "printmap/imgops.hpp"

namespace printmap {

std::vector<double> banding_profile(int width, const BandProfile& profile) {
  if (width < 1) throw ConfigError("banding_profile: width must be positive");
  if (profile.sigma <= 0.0) throw ConfigError("banding_profile: sigma must be positive");
  if (profile.amplitude < 0.0 || profile.amplitude > 1.0)
    throw ConfigError("banding_profile: amplitude outside [0,1]");
  std::vector<double> w(width, 0.0);
  if (profile.amplitude == 0.0) return w;
  const double inv = 1.0 / (2.0 * profile.sigma * profile.sigma);
  double peak = 0.0;
  for (int v = 0; v < width; ++v) {
    const double d1 = v - profile.mu1;
    const double d2 = v - profile.mu2;
    w[v] = 0.5 * (std::exp(-d1 * d1 * inv) + std::exp(-d2 * d2 * inv));
    peak = std::max(peak, w[v]);
  }
  // Peak normalization: the strongest row shifts by exactly `amplitude`.
  // Divide by peak first so the maximum maps through 1.0 and the result
  // never exceeds amplitude by a rounding ulp.
  for (double& v : w) v = (v / peak) * profile.amplitude;
  return w;
}

std::uint8_t label_for(const DefectSpec& spec, const ClassScheme& scheme) {
  return spec.kind == DefectKind::Streak ? ClassScheme::kStreak
                                         : scheme.banding_label(spec.channel);
}

ImageRGB apply_streak(const ImageRGB& img, const DefectSpec& spec,
                      const StreakTextureParams& texture) {
  if (spec.kind != DefectKind::Streak) throw ConfigError("apply_streak: spec is not a streak");
  if (!spec.region.inside(img.width, img.height))
    throw RegionOutOfBounds("apply_streak: region outside image");
  const bool horizontal = spec.orientation == Orientation::Horizontal;
  const int length = horizontal ? spec.region.w : spec.region.h;
  const int width = horizontal ? spec.region.h : spec.region.w;

  StreakTextureParams tp = texture;
  tp.peak = spec.amplitude;
  const GrayField d = streak_texture(length, width, spec.texture_seed, tp);

  ImageRGB out = img;
  for (int dy = 0; dy < spec.region.h; ++dy) {
    for (int dx = 0; dx < spec.region.w; ++dx) {
      const int u = horizontal ? dx : dy;
      const int v = horizontal ? dy : dx;
      const double t = d.at(u, v);
      const int x = spec.region.x + dx;
      const int y = spec.region.y + dy;
      for (int c = 0; c < 3; ++c) {
        const double in = img.at(x, y, c);
        const double blended = (1.0 - t) * in + t * spec.gray;
        out.at(x, y, c) = std::min(in, blended);
      }
    }
  }
  return out;
}

ImageRGB apply_banding(const ImageRGB& img, const DefectSpec& spec) {
  if (spec.kind != DefectKind::Banding) throw ConfigError("apply_banding: spec is not banding");
  if (!spec.region.inside(img.width, img.height))
    throw RegionOutOfBounds("apply_banding: region outside image");
  const bool horizontal = spec.orientation == Orientation::Horizontal;
  const int band_width = horizontal ? spec.region.h : spec.region.w;

  BandProfile prof = spec.profile;
  prof.amplitude = spec.amplitude;
  const std::vector<double> weights = banding_profile(band_width, prof);
  const double sign = spec.sign == BandSign::Excess ? 1.0 : -1.0;
  const int ink = static_cast<int>(spec.channel);

  ImageRGB out = img;
  for (int dy = 0; dy < spec.region.h; ++dy) {
    for (int dx = 0; dx < spec.region.w; ++dx) {
      const int v = horizontal ? dy : dx;
      const int x = spec.region.x + dx;
      const int y = spec.region.y + dy;
      auto cmyk = cmyk_from_rgb(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      cmyk[ink] = std::clamp(cmyk[ink] + sign * weights[v], 0.0, 1.0);
      const auto rgb = rgb_from_cmyk(cmyk[0], cmyk[1], cmyk[2], cmyk[3]);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = rgb[c];
    }
  }
  return out;
}

ImageRGB apply_defects(const ImageRGB& img, const std::vector<DefectSpec>& specs,
                       const StreakTextureParams& texture) {
  ImageRGB out = img;
  for (const DefectSpec& spec : specs) {
    out = spec.kind == DefectKind::Streak ? apply_streak(out, spec, texture)
                                          : apply_banding(out, spec);
  }
  return out;
}

LabelMask render_mask(const std::vector<DefectSpec>& specs, int w, int h,
                      const ClassScheme& scheme) {
  LabelMask mask(w, h, scheme);
  for (const DefectSpec& spec : specs) {
    if (!spec.region.inside(w, h)) throw RegionOutOfBounds("render_mask: region outside image");
    const std::uint8_t label = label_for(spec, scheme);
    for (int dy = 0; dy < spec.region.h; ++dy) {
      for (int dx = 0; dx < spec.region.w; ++dx) {
        std::uint8_t& cell = mask.at(spec.region.x + dx, spec.region.y + dy);
        // Streaks win every overlap; banding layers in spec order otherwise.
        if (spec.kind == DefectKind::Banding && cell == ClassScheme::kStreak) continue;
        cell = label;
      }
    }
  }
  return mask;
}

}  // namespace printmap
