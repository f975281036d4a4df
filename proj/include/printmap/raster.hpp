#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "printmap/errors.hpp"

namespace printmap {

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Rect&) const = default;

  bool inside(int img_w, int img_h) const {
    return w >= 1 && h >= 1 && x >= 0 && y >= 0 && x + w <= img_w && y + h <= img_h;
  }
};

enum class SchemeVariant { Multi, Collapsed };

enum class InkChannel { Cyan = 0, Magenta = 1, Yellow = 2, Key = 3 };

// Label layout. Multi keeps one class per ink; Collapsed folds all banding
// into a single class.
struct ClassScheme {
  SchemeVariant variant = SchemeVariant::Multi;

  static constexpr std::uint8_t kBackground = 0;
  static constexpr std::uint8_t kStreak = 1;

  bool operator==(const ClassScheme&) const = default;

  int num_classes() const { return variant == SchemeVariant::Multi ? 6 : 3; }

  std::uint8_t banding_label(InkChannel ch) const {
    if (variant == SchemeVariant::Collapsed) return 2;
    return static_cast<std::uint8_t>(2 + static_cast<int>(ch));
  }

  bool is_banding(std::uint8_t label) const { return label >= 2 && label < num_classes(); }

  std::string class_name(int label) const;
};

ClassScheme scheme_from_name(const std::string& name);
std::string scheme_name(const ClassScheme& scheme);

// Interleaved RGB raster, values nominally in [0, 1]. Double storage: the
// synthesis pipeline needs exact roundtrips and sub-quantization deltas.
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // (y * width + x) * 3 + c

  ImageRGB() = default;
  ImageRGB(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  double at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

struct ImageCMYK {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // (y * width + x) * 4 + c

  ImageCMYK() = default;
  ImageCMYK(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 4, fill) {}

  double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 4 + c]; }
  double at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 4 + c]; }
};

// Generic interleaved multi-channel raster; model inputs (3-channel NR,
// 6-channel FR) and normalized tensors live here.
struct ChannelStack {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;  // (y * width + x) * channels + c

  ChannelStack() = default;
  ChannelStack(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

// Per-pixel class labels under a given scheme.
struct LabelMask {
  int width = 0;
  int height = 0;
  ClassScheme scheme;
  std::vector<std::uint8_t> labels;  // y * width + x

  LabelMask() = default;
  LabelMask(int w, int h, ClassScheme s = {})
      : width(w), height(h), scheme(s), labels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

inline std::string scheme_name(const ClassScheme& scheme) {
  return scheme.variant == SchemeVariant::Multi ? "multi" : "collapsed";
}

inline ClassScheme scheme_from_name(const std::string& name) {
  if (name == "multi") return ClassScheme{SchemeVariant::Multi};
  if (name == "collapsed") return ClassScheme{SchemeVariant::Collapsed};
  throw ConfigError("unknown class scheme: " + name);
}

inline std::string ClassScheme::class_name(int label) const {
  static const char* multi[] = {"background", "streak",    "banding_c",
                                "banding_m",  "banding_y", "banding_k"};
  static const char* collapsed[] = {"background", "streak", "banding"};
  if (label < 0 || label >= num_classes()) throw LabelOutOfRange("label " + std::to_string(label));
  return variant == SchemeVariant::Multi ? multi[label] : collapsed[label];
}

}  // namespace printmap
