#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "printmap/imgops.hpp"
#include "printmap/rng.hpp"
#include "support/fixtures.hpp"

using namespace printmap;
using namespace testsupport;

TEST_CASE("cmyk conversion closed forms") {
  auto c = cmyk_from_rgb(1.0, 1.0, 1.0);
  CHECK(c == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});

  c = cmyk_from_rgb(0.0, 0.0, 0.0);
  CHECK(c == std::array<double, 4>{0.0, 0.0, 0.0, 1.0});

  c = cmyk_from_rgb(1.0, 0.0, 0.0);
  CHECK(c[3] == doctest::Approx(0.0));
  CHECK(c[0] == doctest::Approx(0.0));
  CHECK(c[1] == doctest::Approx(1.0));
  CHECK(c[2] == doctest::Approx(1.0));

  // k = 1 - max(r,g,b); remaining inks normalized by 1 - k.
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double r = rng.next_double(), g = rng.next_double(), b = rng.next_double();
    const auto v = cmyk_from_rgb(r, g, b);
    const double k = 1.0 - std::max({r, g, b});
    CHECK(v[3] == doctest::Approx(k).epsilon(1e-14));
    if (k < 1.0) {
      CHECK(v[0] == doctest::Approx((1.0 - r - k) / (1.0 - k)).epsilon(1e-12));
      CHECK(v[1] == doctest::Approx((1.0 - g - k) / (1.0 - k)).epsilon(1e-12));
      CHECK(v[2] == doctest::Approx((1.0 - b - k) / (1.0 - k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cmyk roundtrip is the identity on rgb") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const double r = rng.next_double(), g = rng.next_double(), b = rng.next_double();
    const auto k = cmyk_from_rgb(r, g, b);
    const auto back = rgb_from_cmyk(k[0], k[1], k[2], k[3]);
    CHECK(std::abs(back[0] - r) < 1e-12);
    CHECK(std::abs(back[1] - g) < 1e-12);
    CHECK(std::abs(back[2] - b) < 1e-12);
  }

  const ImageRGB img = hi_diversity(17, 9, 3);
  const ImageRGB back = cmyk_to_rgb(rgb_to_cmyk(img));
  CHECK(max_abs_diff(img, back) < 1e-12);
}

TEST_CASE("bicubic identity resize is an exact copy") {
  const ImageRGB img = hi_diversity(13, 7, 4);
  const ImageRGB out = resize_bicubic(img, 13, 7);
  CHECK(images_equal(img, out));

  ChannelStack stack(5, 4, 6);
  Rng rng(5);
  for (double& v : stack.data) v = rng.next_double();
  const ChannelStack sout = resize_bicubic(stack, 5, 4);
  CHECK(sout.data == stack.data);
}

TEST_CASE("bicubic checkerboard reduction matches the hand-computed values") {
  // 4x4 checkerboard, 1 where x+y is even. Catmull-Rom taps at s = 0.5 and
  // 2.5 give the frozen 2x2 result below (worked out by hand from the kernel
  // weights W(0.5) = 0.5625, W(1.5) = -0.0625).
  ImageRGB img(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = (x + y) % 2 == 0 ? 1.0 : 0.0;
  const ImageRGB out = resize_bicubic(img, 2, 2);
  for (int c = 0; c < 3; ++c) {
    CHECK(out.at(0, 0, c) == doctest::Approx(0.5078125).epsilon(1e-12));
    CHECK(out.at(1, 0, c) == doctest::Approx(0.4921875).epsilon(1e-12));
    CHECK(out.at(0, 1, c) == doctest::Approx(0.4921875).epsilon(1e-12));
    CHECK(out.at(1, 1, c) == doctest::Approx(0.5078125).epsilon(1e-12));
  }
}

namespace {

double catmull_rom(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return a * (((x - 5.0) * x + 8.0) * x - 4.0);
  return 0.0;
}

// Direct tensor-product evaluation: every output pixel sums 16 weighted
// source taps with clamped indices. No separable intermediate, so it is an
// independent check of the two-pass implementation.
ImageRGB bicubic_oracle(const ImageRGB& in, int out_w, int out_h) {
  ImageRGB out(out_w, out_h);
  for (int oy = 0; oy < out_h; ++oy) {
    const double sy = (oy + 0.5) * in.height / out_h - 0.5;
    const int by = static_cast<int>(std::floor(sy));
    for (int ox = 0; ox < out_w; ++ox) {
      const double sx = (ox + 0.5) * in.width / out_w - 0.5;
      const int bx = static_cast<int>(std::floor(sx));
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int j = -1; j <= 2; ++j) {
          const double wy = catmull_rom(sy - (by + j));
          const int yy = std::clamp(by + j, 0, in.height - 1);
          for (int i = -1; i <= 2; ++i) {
            const double wx = catmull_rom(sx - (bx + i));
            const int xx = std::clamp(bx + i, 0, in.width - 1);
            acc += wy * wx * in.at(xx, yy, c);
          }
        }
        out.at(ox, oy, c) = std::clamp(acc, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("bicubic resize matches a direct tensor-product oracle") {
  Rng rng(21);
  const int sizes[][4] = {{7, 5, 4, 3}, {5, 7, 9, 11}, {16, 16, 5, 13}, {3, 9, 8, 2}};
  for (const auto& s : sizes) {
    const ImageRGB img = hi_diversity(s[0], s[1], rng.next_u64());
    const ImageRGB got = resize_bicubic(img, s[2], s[3]);
    const ImageRGB want = bicubic_oracle(img, s[2], s[3]);
    CHECK(max_abs_diff(got, want) < 1e-12);
  }
}

TEST_CASE("nearest resize follows the center-aligned index map") {
  const ClassScheme scheme{SchemeVariant::Collapsed};
  LabelMask mask(4, 1, scheme);
  mask.at(0, 0) = 0;
  mask.at(1, 0) = 1;
  mask.at(2, 0) = 2;
  mask.at(3, 0) = 0;

  // 4 -> 2 picks source columns 1 and 3.
  const LabelMask down = resize_nearest(mask, 2, 1);
  CHECK(down.at(0, 0) == 1);
  CHECK(down.at(1, 0) == 0);

  // 2 -> 4 repeats each source column twice.
  LabelMask two(2, 1, scheme);
  two.at(0, 0) = 1;
  two.at(1, 0) = 2;
  const LabelMask up = resize_nearest(two, 4, 1);
  CHECK(up.at(0, 0) == 1);
  CHECK(up.at(1, 0) == 1);
  CHECK(up.at(2, 0) == 2);
  CHECK(up.at(3, 0) == 2);

  Rng rng(31);
  const LabelMask src = random_mask(11, 6, scheme, rng);
  const LabelMask out = resize_nearest(src, 17, 4);
  for (int y = 0; y < out.height; ++y) {
    const int sy = std::min(src.height - 1, static_cast<int>((y + 0.5) * src.height / out.height));
    for (int x = 0; x < out.width; ++x) {
      const int sx = std::min(src.width - 1, static_cast<int>((x + 0.5) * src.width / out.width));
      CHECK(out.at(x, y) == src.at(sx, sy));
    }
  }
}

TEST_CASE("nearest resize never invents labels") {
  const ClassScheme scheme{SchemeVariant::Multi};
  Rng rng(32);
  const LabelMask src = random_mask(9, 13, scheme, rng);
  std::set<std::uint8_t> in_labels(src.labels.begin(), src.labels.end());
  const LabelMask out = resize_nearest(src, 30, 7);
  for (const std::uint8_t v : out.labels) CHECK(in_labels.count(v) == 1);
}

TEST_CASE("normalize produces zero mean unit variance per channel") {
  // Per channel: half zeros, half ones -> mean 0.5, population stddev 0.5,
  // normalized values exactly -1 and +1.
  ImageRGB img(4, 2);
  for (int x = 0; x < 4; ++x)
    for (int c = 0; c < 3; ++c) {
      img.at(x, 0, c) = 0.0;
      img.at(x, 1, c) = 1.0;
    }
  const NormalizedImage n = normalize(img);
  for (int c = 0; c < 3; ++c) {
    CHECK(n.mean[c] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(n.stddev[c] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_FALSE(n.constant_channel[c]);
  }
  for (int x = 0; x < 4; ++x)
    for (int c = 0; c < 3; ++c) {
      CHECK(n.values.at(x, 0, c) == doctest::Approx(-1.0).epsilon(1e-15));
      CHECK(n.values.at(x, 1, c) == doctest::Approx(1.0).epsilon(1e-15));
    }

  const ImageRGB rnd = hi_diversity(23, 17, 7);
  const NormalizedImage nr = normalize(rnd);
  const std::size_t count = rnd.pixel_count();
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
      sum += nr.values.data[p * 3 + c];
      sq += nr.values.data[p * 3 + c] * nr.values.data[p * 3 + c];
    }
    CHECK(std::abs(sum / count) < 1e-9);
    CHECK(sq / count == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("normalize flags constant channels instead of dividing by zero") {
  ImageRGB img(5, 3, 0.25);
  Rng rng(9);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) img.at(x, y, 2) = rng.next_double();
  const NormalizedImage n = normalize(img);
  CHECK(n.constant_channel[0]);
  CHECK(n.constant_channel[1]);
  CHECK_FALSE(n.constant_channel[2]);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) {
      CHECK(n.values.at(x, y, 0) == 0.0);
      CHECK(n.values.at(x, y, 1) == 0.0);
    }
}

TEST_CASE("patch grid handles the documented tilings") {
  // Image smaller than the patch: one full-extent rect.
  auto rects = patch_grid(300, 300, 513);
  REQUIRE(rects.size() == 1);
  CHECK(rects[0] == Rect{0, 0, 300, 300});

  // Exact fit: one tile.
  rects = patch_grid(513, 513, 513);
  REQUIRE(rects.size() == 1);
  CHECK(rects[0] == Rect{0, 0, 513, 513});

  // 600 = 513 + remainder: the second tile is flush-anchored at 87.
  rects = patch_grid(600, 600, 513);
  REQUIRE(rects.size() == 4);
  CHECK(rects[0] == Rect{0, 0, 513, 513});
  CHECK(rects[1] == Rect{87, 0, 513, 513});
  CHECK(rects[2] == Rect{0, 87, 513, 513});
  CHECK(rects[3] == Rect{87, 87, 513, 513});

  // Full-page tiling: 4 columns x 3 rows.
  rects = patch_grid(1920, 1080, 513);
  REQUIRE(rects.size() == 12);
  const std::set<int> xs{0, 513, 1026, 1407};
  const std::set<int> ys{0, 513, 567};
  for (const Rect& r : rects) {
    CHECK(xs.count(r.x) == 1);
    CHECK(ys.count(r.y) == 1);
    CHECK(r.w == 513);
    CHECK(r.h == 513);
  }
}

TEST_CASE("patch grid covers every pixel with in-bounds tiles") {
  Rng rng(41);
  for (int it = 0; it < 30; ++it) {
    const int w = static_cast<int>(rng.uniform_int(1, 90));
    const int h = static_cast<int>(rng.uniform_int(1, 90));
    const int patch = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<int> cover(static_cast<std::size_t>(w) * h, 0);
    for (const Rect& r : patch_grid(w, h, patch)) {
      CHECK(r.inside(w, h));
      CHECK(r.w == std::min(patch, w));
      CHECK(r.h == std::min(patch, h));
      for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x) ++cover[static_cast<std::size_t>(y) * w + x];
    }
    CHECK(std::count(cover.begin(), cover.end(), 0) == 0);
  }
}

TEST_CASE("stack layout helpers round-trip and concatenate") {
  const ImageRGB img = hi_diversity(6, 5, 10);
  const ChannelStack stack = as_stack(img);
  CHECK(stack.channels == 3);
  CHECK(images_equal(rgb_from_stack(stack), img));

  const ImageRGB other = hi_diversity(6, 5, 11);
  const ChannelStack both = concat_channels(as_stack(img), as_stack(other));
  CHECK(both.channels == 6);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x)
      for (int c = 0; c < 3; ++c) {
        CHECK(both.at(x, y, c) == img.at(x, y, c));
        CHECK(both.at(x, y, c + 3) == other.at(x, y, c));
      }

  ChannelStack bad(4, 4, 2);
  CHECK_THROWS_AS(rgb_from_stack(bad), ChannelCountMismatch);
  CHECK_THROWS_AS(concat_channels(stack, bad), DimMismatch);
}

TEST_CASE("crop copies the rect and rejects out-of-bounds requests") {
  const ImageRGB img = hi_diversity(10, 8, 12);
  const Rect r{3, 2, 4, 5};
  const ImageRGB sub = crop(img, r);
  CHECK(sub.width == 4);
  CHECK(sub.height == 5);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x)
      for (int c = 0; c < 3; ++c) CHECK(sub.at(x, y, c) == img.at(r.x + x, r.y + y, c));

  CHECK_THROWS_AS(crop(img, Rect{8, 0, 4, 4}), RectOutOfBounds);
  CHECK_THROWS_AS(crop(img, Rect{0, 0, 0, 4}), RectOutOfBounds);
  CHECK_THROWS_AS(crop(img, Rect{-1, 0, 4, 4}), RectOutOfBounds);

  const ClassScheme scheme{SchemeVariant::Multi};
  Rng rng(13);
  const LabelMask mask = random_mask(10, 8, scheme, rng);
  const LabelMask msub = crop(mask, r);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) CHECK(msub.at(x, y) == mask.at(r.x + x, r.y + y));
}
