#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "printmap/datagen.hpp"
#include "printmap/infer.hpp"
#include "printmap/raster.hpp"

namespace printmap {

// ---------------------------------------------------------------------------
// Confusion and IoU

struct ConfusionMatrix {
  int classes = 0;
  std::vector<std::uint64_t> counts;  // gt * classes + pred

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int c)
      : classes(c), counts(static_cast<std::size_t>(c) * c, 0) {}

  std::uint64_t at(int gt, int pred) const {
    return counts[static_cast<std::size_t>(gt) * classes + pred];
  }

  // Accumulates one prediction/ground-truth pair. Throws DimMismatch on size
  // differences and LabelOutOfRange on labels outside [0, classes).
  void add(const LabelMask& pred, const LabelMask& gt);

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  std::uint64_t total() const;
};

struct IouReport {
  std::vector<double> per_class;
  std::vector<bool> present;  // union nonzero; absent classes are skipped
  double miou = 0.0;
};

// IoU_c = tp / (tp + fp + fn) over the confusion matrix; the mean covers
// only classes with a nonzero union. Throws AllClassesEmpty when no class
// qualifies.
IouReport iou_from_confusion(const ConfusionMatrix& cm);

double pixel_accuracy(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Training loss

// Background weight is deliberately tiny; defect pixels dominate the loss.
std::vector<double> default_class_weights(int classes, double background_weight = 0.05);

// Mean over pixels of w[gt] * (-log softmax(scores)[gt]), numerically
// stabilized by max subtraction.
double weighted_cross_entropy(const ScoreMap& scores, const LabelMask& gt,
                              const std::vector<double>& weights);

// Analytic d(loss)/d(scores): w[gt] * (softmax - onehot(gt)) / pixel_count.
ScoreMap wce_gradient(const ScoreMap& scores, const LabelMask& gt,
                      const std::vector<double>& weights);

// ---------------------------------------------------------------------------
// Visualization

// Alpha-blends labeled pixels: green for streaks, magenta for banding.
ImageRGB render_overlay(const ImageRGB& img, const LabelMask& mask, double alpha = 0.6);

// ---------------------------------------------------------------------------
// Dataset-level evaluation

enum class Strategy { Resized, Patch };

Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

struct EvalOptions {
  Strategy strategy = Strategy::Resized;
  int runs = 1;
  int patch = 513;
  int work_w = 1280;
  int work_h = 720;
  std::string method;  // free-form label for reports
};

struct EvalResult {
  std::string method;
  std::string strategy;
  int classes = 0;
  int images = 0;
  int runs = 0;
  std::vector<double> per_class_iou;
  std::vector<bool> class_present;
  std::vector<std::string> class_names;
  double miou_mean = 0.0;
  double miou_std = 0.0;  // sample stddev across runs, 0 for a single run
  double pixel_acc = 0.0;
  double seconds_per_image = 0.0;
};

// Builds a segmenter per sample (oracle needs the ground truth; stateless
// baselines can ignore the arguments).
using SegmenterFactory =
    std::function<std::unique_ptr<Segmenter>(const SampleRecord&, const LabelMask& gt)>;

// Runs the chosen strategy over every manifest sample `runs` times. Each run
// accumulates a single dataset-level confusion matrix; the report carries
// mean and stddev of the per-run mean IoU plus inference seconds per image.
EvalResult run_eval(const Manifest& manifest, const std::filesystem::path& dataset_dir,
                    const SegmenterFactory& factory, const EvalOptions& opts);

// Pairs same-named PNG files of two directories. Throws FileSetMismatch when
// the name sets differ.
EvalResult evaluate_mask_dirs(const std::filesystem::path& pred_dir,
                              const std::filesystem::path& gt_dir, const ClassScheme& scheme);

nlohmann::json eval_result_to_json(const EvalResult& r);
std::string eval_csv_header();
std::string eval_csv_row(const EvalResult& r);

}  // namespace printmap
