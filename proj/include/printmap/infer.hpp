#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "printmap/noise.hpp"
#include "printmap/raster.hpp"

namespace printmap {

// Per-pixel, per-class scores. Doubles internally; the file format is
// float32 (see tensor_io).
struct ScoreMap {
  int width = 0;
  int height = 0;
  int classes = 0;
  std::vector<double> scores;  // (y * width + x) * classes + c

  ScoreMap() = default;
  ScoreMap(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), classes(c), scores(static_cast<std::size_t>(w) * h * c, fill) {}

  double& at(int x, int y, int c) {
    return scores[(static_cast<std::size_t>(y) * width + x) * classes + c];
  }
  double at(int x, int y, int c) const {
    return scores[(static_cast<std::size_t>(y) * width + x) * classes + c];
  }
};

// Where the handed stack sits inside the canonical image, so segmenters that
// carry canonical-resolution state (oracle, external scores) can slice it.
struct SegmentContext {
  Rect region;
  int canonical_w = 0;
  int canonical_h = 0;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual int input_channels() const = 0;
  virtual ClassScheme scheme() const = 0;
  virtual ScoreMap segment(const ChannelStack& stack, const SegmentContext& ctx) const = 0;
};

// Ties resolve to the lowest class index.
LabelMask argmax_labels(const ScoreMap& scores, const ClassScheme& scheme);

// --------------------------------------------------------------------------
// Strategies. Both return a mask of exactly the input stack's dimensions.

// Bicubic-resize the stack to the working size, segment once, nearest-map
// the labels back.
LabelMask infer_resized(const ChannelStack& stack, const Segmenter& seg, int work_w = 1280,
                        int work_h = 720);

// Tile with patch_grid, segment each tile, average overlapping scores
// (deterministic accumulation order), then argmax.
LabelMask infer_patches(const ChannelStack& stack, const Segmenter& seg, int patch = 513);

// --------------------------------------------------------------------------
// Raster utilities shared by the baselines

GrayField gaussian_blur(const GrayField& in, double sigma);

// 3x3 dilation followed by 3x3 erosion on a 0/1 field.
std::vector<std::uint8_t> binary_close3(const std::vector<std::uint8_t>& in, int w, int h);

struct Components {
  std::vector<int> label;  // -1 for background pixels
  int count = 0;
};

// 8-connected components of the nonzero pixels.
Components connected_components8(const std::vector<std::uint8_t>& in, int w, int h);

// --------------------------------------------------------------------------
// Baselines

// Reference/defective difference heuristic (6-channel stacks: reference
// first). Blurred max-channel absdiff is thresholded, closed, and grouped
// into components; elongated thin boxes become streaks, the rest banding
// with the ink picked from the mean CMYK deviation. Component boxes are
// painted with score 1; background score is max(tau - diff, 0).
struct FrDiffParams {
  double tau = 0.04;
  double blur_sigma = 0.5;
  double min_aspect = 4.0;
  int max_thickness = 18;
  int min_area = 64;
};

ScoreMap fr_diff_scores(const ChannelStack& stack, const FrDiffParams& params,
                        const ClassScheme& scheme);

// No-reference projection heuristic (3-channel stacks). Per-axis line means
// are compared against a sliding median; lines whose robust z-score passes
// the threshold are flagged and painted, thin runs as streaks, wide runs as
// banding.
struct NrProjParams {
  double z_thresh = 3.5;
  int window = 31;
  int max_thickness = 18;
  // Added to the robust scale before dividing. On noiseless synthetic pages
  // the line-residual MAD collapses toward zero and a pure z-score flags
  // every smooth trend; the floor makes lines pass an absolute significance
  // bar (about one quantization step) as well as a relative one.
  double sigma_floor = 1.0 / 255.0;
};

ScoreMap nr_projection_scores(const ChannelStack& stack, const NrProjParams& params,
                              const ClassScheme& scheme);

class FrDiffSegmenter : public Segmenter {
 public:
  explicit FrDiffSegmenter(const ClassScheme& scheme, const FrDiffParams& params = {})
      : scheme_(scheme), params_(params) {}
  int input_channels() const override { return 6; }
  ClassScheme scheme() const override { return scheme_; }
  ScoreMap segment(const ChannelStack& stack, const SegmentContext& ctx) const override;

 private:
  ClassScheme scheme_;
  FrDiffParams params_;
};

class NrProjectionSegmenter : public Segmenter {
 public:
  explicit NrProjectionSegmenter(const ClassScheme& scheme, const NrProjParams& params = {})
      : scheme_(scheme), params_(params) {}
  int input_channels() const override { return 3; }
  ClassScheme scheme() const override { return scheme_; }
  ScoreMap segment(const ChannelStack& stack, const SegmentContext& ctx) const override;

 private:
  ClassScheme scheme_;
  NrProjParams params_;
};

// Answers with one-hot scores sliced from a ground-truth mask; resizes the
// mask (nearest) when the canonical size differs from the mask size.
class OracleSegmenter : public Segmenter {
 public:
  explicit OracleSegmenter(LabelMask gt) : gt_(std::move(gt)) {}
  int input_channels() const override { return 3; }
  ClassScheme scheme() const override { return gt_.scheme; }
  ScoreMap segment(const ChannelStack& stack, const SegmentContext& ctx) const override;

 private:
  LabelMask gt_;
};

// Replays a score tensor produced elsewhere (e.g. a trained network); the
// tensor must cover the canonical image.
class ExternalScoreSegmenter : public Segmenter {
 public:
  ExternalScoreSegmenter(ScoreMap scores, const ClassScheme& scheme, int input_channels);
  int input_channels() const override { return channels_; }
  ClassScheme scheme() const override { return scheme_; }
  ScoreMap segment(const ChannelStack& stack, const SegmentContext& ctx) const override;

 private:
  ScoreMap scores_;
  ClassScheme scheme_;
  int channels_;
};

struct SegmenterOptions {
  ClassScheme scheme;
  FrDiffParams fr;
  NrProjParams nr;
  const LabelMask* gt = nullptr;            // oracle
  std::filesystem::path scores_path;        // external
  int external_channels = 3;
};

std::vector<std::string> segmenter_names();
std::unique_ptr<Segmenter> make_segmenter(const std::string& name, const SegmenterOptions& opts);

}  // namespace printmap
