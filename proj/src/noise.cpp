#include "printmap/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "printmap/errors.hpp"
#include "printmap/rng.hpp"

namespace printmap {

namespace {

// Eight unit gradients at 45 degree steps. With these the bilinear blend is
// bounded by sqrt(2)/2 in magnitude, comfortably inside [-1, 1].
constexpr double kSqrtHalf = 0.7071067811865476;
constexpr double kGradX[8] = {1.0, kSqrtHalf, 0.0, -kSqrtHalf, -1.0, -kSqrtHalf, 0.0, kSqrtHalf};
constexpr double kGradY[8] = {0.0, kSqrtHalf, 1.0, kSqrtHalf, 0.0, -kSqrtHalf, -1.0, -kSqrtHalf};

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

PerlinNoise::PerlinNoise(const PerlinParams& params) : params_(params) {
  if (params_.cell_size <= 0.0) throw ConfigError("perlin: cell_size must be positive");
  if (params_.octaves < 1) throw ConfigError("perlin: need at least one octave");
  if (params_.persistence <= 0.0) throw ConfigError("perlin: persistence must be positive");
  std::vector<std::uint8_t> table(256);
  for (int i = 0; i < 256; ++i) table[i] = static_cast<std::uint8_t>(i);
  Rng rng(params_.seed);
  rng.shuffle(table);
  for (int i = 0; i < 256; ++i) {
    perm_[i] = table[i];
    perm_[i + 256] = table[i];
  }
}

double PerlinNoise::lattice_noise(double u, double v) const {
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  // Cast through uint32 so negative cells wrap consistently.
  const std::uint32_t cu = static_cast<std::uint32_t>(static_cast<std::int64_t>(fu));
  const std::uint32_t cv = static_cast<std::uint32_t>(static_cast<std::int64_t>(fv));
  const double du = u - fu;
  const double dv = v - fv;

  const auto grad_at = [&](std::uint32_t ix, std::uint32_t iy, double ox, double oy) {
    const std::uint8_t h = perm_[perm_[ix & 255u] + (iy & 255u)] & 7u;
    return kGradX[h] * ox + kGradY[h] * oy;
  };

  const double n00 = grad_at(cu, cv, du, dv);
  const double n10 = grad_at(cu + 1u, cv, du - 1.0, dv);
  const double n01 = grad_at(cu, cv + 1u, du, dv - 1.0);
  const double n11 = grad_at(cu + 1u, cv + 1u, du - 1.0, dv - 1.0);

  const double su = fade(du);
  const double sv = fade(dv);
  return lerp(lerp(n00, n10, su), lerp(n01, n11, su), sv);
}

double PerlinNoise::sample(double x, double y) const {
  const double base_u = x / params_.cell_size;
  const double base_v = y / params_.cell_size;
  double amp = 1.0;
  double freq = 1.0;
  double total = 0.0;
  double norm = 0.0;
  for (int o = 0; o < params_.octaves; ++o) {
    total += amp * lattice_noise(base_u * freq, base_v * freq);
    norm += amp;
    amp *= params_.persistence;
    freq *= 2.0;
  }
  return total / norm;
}

GrayField streak_texture(int length, int width, std::uint64_t seed,
                         const StreakTextureParams& params) {
  if (length < 1 || width < 1) throw ConfigError("streak_texture: nonpositive size");
  if (params.peak < 0.0 || params.peak > 1.0) throw ConfigError("streak_texture: peak outside [0,1]");
  PerlinParams np = params.noise;
  np.seed = seed;
  const PerlinNoise noise(np);

  // Soft window across the streak; never reaches zero so the whole labeled
  // band stays visibly darkened.
  std::vector<double> window(width);
  for (int v = 0; v < width; ++v) {
    const double s = std::sin(std::numbers::pi * (v + 0.5) / width);
    window[v] = params.edge_floor + (1.0 - params.edge_floor) * s * s;
  }

  // One modulation value per along-axis position; the texture varies along
  // the streak, not across it.
  std::vector<double> mod(length);
  for (int u = 0; u < length; ++u)
    mod[u] = 1.0 + params.modulation * noise.sample(static_cast<double>(u), 0.5);

  GrayField out(length, width);
  for (int v = 0; v < width; ++v)
    for (int u = 0; u < length; ++u)
      out.at(u, v) = std::clamp(params.peak * window[v] * mod[u], 0.0, 1.0);
  return out;
}

}  // namespace printmap
