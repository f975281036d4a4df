#include "printmap/imgops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace printmap {

// ---------------------------------------------------------------------------
// Color space

std::array<double, 4> cmyk_from_rgb(double r, double g, double b) {
  const double k = 1.0 - std::max(r, std::max(g, b));
  if (k >= 1.0) return {0.0, 0.0, 0.0, 1.0};
  const double inv = 1.0 - k;
  return {(1.0 - r - k) / inv, (1.0 - g - k) / inv, (1.0 - b - k) / inv, k};
}

std::array<double, 3> rgb_from_cmyk(double c, double m, double y, double k) {
  const double inv = 1.0 - k;
  return {(1.0 - c) * inv, (1.0 - m) * inv, (1.0 - y) * inv};
}

ImageCMYK rgb_to_cmyk(const ImageRGB& img) {
  ImageCMYK out(img.width, img.height);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const auto v = cmyk_from_rgb(img.data[p * 3], img.data[p * 3 + 1], img.data[p * 3 + 2]);
    for (int c = 0; c < 4; ++c) out.data[p * 4 + c] = v[c];
  }
  return out;
}

ImageRGB cmyk_to_rgb(const ImageCMYK& img) {
  ImageRGB out(img.width, img.height);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = rgb_from_cmyk(img.data[p * 4], img.data[p * 4 + 1], img.data[p * 4 + 2],
                                 img.data[p * 4 + 3]);
    for (int c = 0; c < 3; ++c) out.data[p * 3 + c] = v[c];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

// Catmull-Rom kernel (cubic with a = -0.5).
double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((((x - 5.0) * x + 8.0) * x - 4.0)) * a;
  return 0.0;
}

struct TapSet {
  int idx[4];
  double w[4];
};

// Source taps for one output coordinate; center-aligned mapping with the
// four nearest samples, indices clamped to the valid range.
std::vector<TapSet> make_taps(int in_size, int out_size) {
  std::vector<TapSet> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    const double s = (o + 0.5) * scale - 0.5;
    const double base = std::floor(s);
    const double t = s - base;
    const int ib = static_cast<int>(base);
    TapSet& ts = taps[o];
    ts.w[0] = cubic_weight(t + 1.0);
    ts.w[1] = cubic_weight(t);
    ts.w[2] = cubic_weight(1.0 - t);
    ts.w[3] = cubic_weight(2.0 - t);
    for (int k = 0; k < 4; ++k) ts.idx[k] = std::clamp(ib - 1 + k, 0, in_size - 1);
  }
  return taps;
}

// Two-pass separable resize over interleaved data. The horizontal
// intermediate stays unclamped so the vertical pass sees true filter values;
// only the final result is clamped to [0, 1].
std::vector<double> resize_planes(const double* src, int w, int h, int ch, int out_w, int out_h) {
  const auto tx = make_taps(w, out_w);
  const auto ty = make_taps(h, out_h);

  std::vector<double> tmp(static_cast<std::size_t>(out_w) * h * ch);
  for (int y = 0; y < h; ++y) {
    const double* row = src + static_cast<std::size_t>(y) * w * ch;
    double* trow = tmp.data() + static_cast<std::size_t>(y) * out_w * ch;
    for (int x = 0; x < out_w; ++x) {
      const TapSet& ts = tx[x];
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += ts.w[k] * row[static_cast<std::size_t>(ts.idx[k]) * ch + c];
        trow[static_cast<std::size_t>(x) * ch + c] = acc;
      }
    }
  }

  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h * ch);
  for (int y = 0; y < out_h; ++y) {
    const TapSet& ts = ty[y];
    double* orow = out.data() + static_cast<std::size_t>(y) * out_w * ch;
    for (int x = 0; x < out_w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k)
          acc += ts.w[k] * tmp[(static_cast<std::size_t>(ts.idx[k]) * out_w + x) * ch + c];
        orow[static_cast<std::size_t>(x) * ch + c] = std::clamp(acc, 0.0, 1.0);
      }
    }
  }
  return out;
}

void check_resize_args(int w, int h, int out_w, int out_h) {
  if (w < 1 || h < 1) throw DimMismatch("resize: empty source");
  if (out_w < 1 || out_h < 1)
    throw DimMismatch("resize: bad target " + std::to_string(out_w) + "x" + std::to_string(out_h));
}

}  // namespace

ImageRGB resize_bicubic(const ImageRGB& img, int out_w, int out_h) {
  check_resize_args(img.width, img.height, out_w, out_h);
  ImageRGB out(out_w, out_h);
  out.data = resize_planes(img.data.data(), img.width, img.height, 3, out_w, out_h);
  return out;
}

ChannelStack resize_bicubic(const ChannelStack& stack, int out_w, int out_h) {
  check_resize_args(stack.width, stack.height, out_w, out_h);
  ChannelStack out(out_w, out_h, stack.channels);
  out.data = resize_planes(stack.data.data(), stack.width, stack.height, stack.channels, out_w, out_h);
  return out;
}

LabelMask resize_nearest(const LabelMask& mask, int out_w, int out_h) {
  check_resize_args(mask.width, mask.height, out_w, out_h);
  LabelMask out(out_w, out_h, mask.scheme);
  const double sx = static_cast<double>(mask.width) / out_w;
  const double sy = static_cast<double>(mask.height) / out_h;
  std::vector<int> col(out_w);
  for (int x = 0; x < out_w; ++x)
    col[x] = std::min(mask.width - 1, static_cast<int>((x + 0.5) * sx));
  for (int y = 0; y < out_h; ++y) {
    const int src_y = std::min(mask.height - 1, static_cast<int>((y + 0.5) * sy));
    for (int x = 0; x < out_w; ++x) out.at(x, y) = mask.at(col[x], src_y);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

NormalizedImage normalize(const ImageRGB& img) {
  NormalizedImage out;
  out.values = ChannelStack(img.width, img.height, 3);
  const std::size_t n = img.pixel_count();
  if (n == 0) throw DimMismatch("normalize: empty image");
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) sum += img.data[p * 3 + c];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = img.data[p * 3 + c] - mean;
      sq += d * d;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(n));
    out.mean[c] = mean;
    out.stddev[c] = stddev;
    out.constant_channel[c] = stddev < kNormalizeEpsilon;
    const double div = out.constant_channel[c] ? kNormalizeEpsilon : stddev;
    for (std::size_t p = 0; p < n; ++p)
      out.values.data[p * 3 + c] = (img.data[p * 3 + c] - mean) / div;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch tiling

namespace {

std::vector<int> grid_positions(int dim, int patch) {
  std::vector<int> pos;
  if (dim <= patch) {
    pos.push_back(0);
    return pos;
  }
  for (int p = 0; p + patch <= dim; p += patch) pos.push_back(p);
  if (pos.back() + patch < dim) pos.push_back(dim - patch);
  return pos;
}

}  // namespace

std::vector<Rect> patch_grid(int w, int h, int patch) {
  if (w < 1 || h < 1 || patch < 1) throw DimMismatch("patch_grid: nonpositive size");
  const auto xs = grid_positions(w, patch);
  const auto ys = grid_positions(h, patch);
  const int pw = std::min(patch, w);
  const int ph = std::min(patch, h);
  std::vector<Rect> rects;
  rects.reserve(xs.size() * ys.size());
  for (int y : ys)
    for (int x : xs) rects.push_back(Rect{x, y, pw, ph});
  return rects;
}

// ---------------------------------------------------------------------------
// Layout helpers

ChannelStack as_stack(const ImageRGB& img) {
  ChannelStack out(img.width, img.height, 3);
  out.data = img.data;
  return out;
}

ImageRGB rgb_from_stack(const ChannelStack& stack) {
  if (stack.channels != 3) throw ChannelCountMismatch("rgb_from_stack: need 3 channels");
  ImageRGB out(stack.width, stack.height);
  out.data = stack.data;
  return out;
}

ChannelStack concat_channels(const ChannelStack& a, const ChannelStack& b) {
  if (a.width != b.width || a.height != b.height)
    throw DimMismatch("concat_channels: size mismatch");
  ChannelStack out(a.width, a.height, a.channels + b.channels);
  const std::size_t n = static_cast<std::size_t>(a.width) * a.height;
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = 0; c < a.channels; ++c) out.data[p * out.channels + c] = a.data[p * a.channels + c];
    for (int c = 0; c < b.channels; ++c)
      out.data[p * out.channels + a.channels + c] = b.data[p * b.channels + c];
  }
  return out;
}

ChannelStack crop(const ChannelStack& stack, const Rect& r) {
  if (!r.inside(stack.width, stack.height)) throw RectOutOfBounds("crop: rect outside stack");
  ChannelStack out(r.w, r.h, stack.channels);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x)
      for (int c = 0; c < stack.channels; ++c) out.at(x, y, c) = stack.at(r.x + x, r.y + y, c);
  return out;
}

ImageRGB crop(const ImageRGB& img, const Rect& r) {
  if (!r.inside(img.width, img.height)) throw RectOutOfBounds("crop: rect outside image");
  ImageRGB out(r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(r.x + x, r.y + y, c);
  return out;
}

LabelMask crop(const LabelMask& mask, const Rect& r) {
  if (!r.inside(mask.width, mask.height)) throw RectOutOfBounds("crop: rect outside mask");
  LabelMask out(r.w, r.h, mask.scheme);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) out.at(x, y) = mask.at(r.x + x, r.y + y);
  return out;
}

}  // namespace printmap
