#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace printmap {

struct GrayField {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // y * width + x

  GrayField() = default;
  GrayField(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct PerlinParams {
  std::uint64_t seed = 0;
  double cell_size = 8.0;  // pixels per lattice cell at the base octave
  int octaves = 2;
  double persistence = 0.5;
};

// Classic 2D gradient noise over an integer lattice, quintic fade, seeded
// permutation table, eight unit gradient directions. Octaves are summed with
// persistence weights and renormalized, so the result stays in [-1, 1] for
// any octave count.
class PerlinNoise {
 public:
  explicit PerlinNoise(const PerlinParams& params);

  // Multi-octave value at pixel coordinates; base frequency 1 / cell_size.
  double sample(double x, double y) const;

  // Single octave in lattice coordinates. Zero at every lattice point.
  double lattice_noise(double u, double v) const;

  const PerlinParams& params() const { return params_; }

 private:
  PerlinParams params_;
  std::array<std::uint8_t, 512> perm_{};
};

struct StreakTextureParams {
  double peak = 0.8;        // maximum darkness of the cross profile
  double modulation = 0.25; // relative strength of the along-axis noise
  double edge_floor = 0.45; // window value at the outermost rows
  PerlinParams noise;       // seed is overridden by the texture seed
};

// Darkness field for one streak: a smooth cross profile (soft window that
// fades toward the long edges) modulated along the axis by Perlin noise; the
// modulation depends on the along coordinate only. Values in [0, 1].
// u is the along axis (length), v the across axis (width).
GrayField streak_texture(int length, int width, std::uint64_t seed,
                         const StreakTextureParams& params);

}  // namespace printmap
