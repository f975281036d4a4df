#include "printmap/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "printmap/imgops.hpp"
#include "printmap/png_io.hpp"

namespace printmap {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Confusion and IoU

void ConfusionMatrix::add(const LabelMask& pred, const LabelMask& gt) {
  if (pred.width != gt.width || pred.height != gt.height)
    throw DimMismatch("confusion: prediction and ground truth sizes differ");
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const int p = pred.labels[i];
    const int g = gt.labels[i];
    if (p >= classes) throw LabelOutOfRange("confusion: prediction label " + std::to_string(p));
    if (g >= classes) throw LabelOutOfRange("confusion: ground truth label " + std::to_string(g));
    ++counts[static_cast<std::size_t>(g) * classes + p];
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes != classes) throw DimMismatch("confusion: class counts differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const std::uint64_t c : counts) t += c;
  return t;
}

IouReport iou_from_confusion(const ConfusionMatrix& cm) {
  IouReport out;
  out.per_class.assign(cm.classes, 0.0);
  out.present.assign(cm.classes, false);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < cm.classes; ++c) {
    std::uint64_t row = 0, col = 0;
    for (int k = 0; k < cm.classes; ++k) {
      row += cm.at(c, k);
      col += cm.at(k, c);
    }
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t uni = row + col - tp;
    if (uni == 0) continue;  // class absent from both; excluded from the mean
    out.present[c] = true;
    out.per_class[c] = static_cast<double>(tp) / static_cast<double>(uni);
    sum += out.per_class[c];
    ++present;
  }
  if (present == 0) throw AllClassesEmpty("iou: every class has an empty union");
  out.miou = sum / present;
  return out;
}

double pixel_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) return 0.0;
  std::uint64_t diag = 0;
  for (int c = 0; c < cm.classes; ++c) diag += cm.at(c, c);
  return static_cast<double>(diag) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Training loss

std::vector<double> default_class_weights(int classes, double background_weight) {
  std::vector<double> w(classes, 1.0);
  if (classes > 0) w[0] = background_weight;
  return w;
}

namespace {

void check_loss_args(const ScoreMap& scores, const LabelMask& gt,
                     const std::vector<double>& weights) {
  if (scores.width != gt.width || scores.height != gt.height)
    throw DimMismatch("loss: score and mask sizes differ");
  if (static_cast<int>(weights.size()) != scores.classes)
    throw DimMismatch("loss: weight count does not match classes");
  if (scores.classes < 1 || scores.width < 1 || scores.height < 1)
    throw DimMismatch("loss: empty input");
}

}  // namespace

double weighted_cross_entropy(const ScoreMap& scores, const LabelMask& gt,
                              const std::vector<double>& weights) {
  check_loss_args(scores, gt, weights);
  const int classes = scores.classes;
  double total = 0.0;
  for (int y = 0; y < scores.height; ++y) {
    for (int x = 0; x < scores.width; ++x) {
      const int g = gt.at(x, y);
      if (g >= classes) throw LabelOutOfRange("loss: label " + std::to_string(g));
      double mx = scores.at(x, y, 0);
      for (int c = 1; c < classes; ++c) mx = std::max(mx, scores.at(x, y, c));
      double denom = 0.0;
      for (int c = 0; c < classes; ++c) denom += std::exp(scores.at(x, y, c) - mx);
      const double log_p = scores.at(x, y, g) - mx - std::log(denom);
      total += weights[g] * -log_p;
    }
  }
  return total / (static_cast<double>(scores.width) * scores.height);
}

ScoreMap wce_gradient(const ScoreMap& scores, const LabelMask& gt,
                      const std::vector<double>& weights) {
  check_loss_args(scores, gt, weights);
  const int classes = scores.classes;
  const double inv_n = 1.0 / (static_cast<double>(scores.width) * scores.height);
  ScoreMap grad(scores.width, scores.height, classes, 0.0);
  for (int y = 0; y < scores.height; ++y) {
    for (int x = 0; x < scores.width; ++x) {
      const int g = gt.at(x, y);
      if (g >= classes) throw LabelOutOfRange("loss: label " + std::to_string(g));
      double mx = scores.at(x, y, 0);
      for (int c = 1; c < classes; ++c) mx = std::max(mx, scores.at(x, y, c));
      double denom = 0.0;
      for (int c = 0; c < classes; ++c) denom += std::exp(scores.at(x, y, c) - mx);
      for (int c = 0; c < classes; ++c) {
        const double soft = std::exp(scores.at(x, y, c) - mx) / denom;
        grad.at(x, y, c) = weights[g] * (soft - (c == g ? 1.0 : 0.0)) * inv_n;
      }
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Visualization

ImageRGB render_overlay(const ImageRGB& img, const LabelMask& mask, double alpha) {
  if (img.width != mask.width || img.height != mask.height)
    throw DimMismatch("overlay: image and mask sizes differ");
  ImageRGB out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t label = mask.at(x, y);
      if (label == ClassScheme::kBackground) continue;
      const bool streak = label == ClassScheme::kStreak;
      const double color[3] = {streak ? 0.0 : 1.0, streak ? 1.0 : 0.0, streak ? 0.0 : 1.0};
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = (1.0 - alpha) * img.at(x, y, c) + alpha * color[c];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dataset-level evaluation

Strategy strategy_from_name(const std::string& name) {
  if (name == "resized") return Strategy::Resized;
  if (name == "patch") return Strategy::Patch;
  throw ConfigError("unknown strategy: " + name);
}

std::string strategy_name(Strategy s) { return s == Strategy::Resized ? "resized" : "patch"; }

namespace {

EvalResult finish_result(const ConfusionMatrix& cm, const std::vector<double>& run_mious,
                         const ClassScheme& scheme, const EvalOptions& opts, int images,
                         double seconds_total) {
  const IouReport iou = iou_from_confusion(cm);
  EvalResult r;
  r.method = opts.method;
  r.strategy = strategy_name(opts.strategy);
  r.classes = cm.classes;
  r.images = images;
  r.runs = static_cast<int>(run_mious.size());
  r.per_class_iou = iou.per_class;
  r.class_present = iou.present;
  for (int c = 0; c < cm.classes; ++c) r.class_names.push_back(scheme.class_name(c));
  double mean = 0.0;
  for (const double m : run_mious) mean += m;
  mean /= static_cast<double>(run_mious.size());
  double var = 0.0;
  if (run_mious.size() > 1) {
    for (const double m : run_mious) var += (m - mean) * (m - mean);
    var /= static_cast<double>(run_mious.size() - 1);
  }
  r.miou_mean = mean;
  r.miou_std = std::sqrt(var);
  r.pixel_acc = pixel_accuracy(cm);
  const long total_inferences = static_cast<long>(images) * r.runs;
  r.seconds_per_image = total_inferences > 0 ? seconds_total / total_inferences : 0.0;
  return r;
}

}  // namespace

EvalResult run_eval(const Manifest& manifest, const fs::path& dataset_dir,
                    const SegmenterFactory& factory, const EvalOptions& opts) {
  if (opts.runs < 1) throw ConfigError("run_eval: need at least one run");
  const ClassScheme scheme = manifest.config.scheme;
  const int classes = scheme.num_classes();
  if (manifest.samples.empty()) throw ConfigError("run_eval: manifest has no samples");

  std::vector<double> run_mious;
  ConfusionMatrix last(classes);
  double seconds_total = 0.0;

  for (int run = 0; run < opts.runs; ++run) {
    ConfusionMatrix cm(classes);
    for (const SampleRecord& rec : manifest.samples) {
      const LabelMask gt = read_mask_png(dataset_dir / rec.mask, scheme);
      const std::unique_ptr<Segmenter> seg = factory(rec, gt);
      if (!seg) throw SegmenterFailure("run_eval: factory returned no segmenter");
      if (seg->scheme().num_classes() != classes)
        throw SegmenterFailure("run_eval: segmenter scheme does not match the dataset");

      const ImageRGB defective = read_image_png(dataset_dir / rec.defective);
      ChannelStack stack = as_stack(defective);
      if (seg->input_channels() == 6) {
        const ImageRGB reference = read_image_png(dataset_dir / rec.reference);
        stack = concat_channels(as_stack(reference), stack);
      } else if (seg->input_channels() != 3) {
        throw ChannelCountMismatch("run_eval: segmenter wants unsupported channel count");
      }

      const auto t0 = std::chrono::steady_clock::now();
      const LabelMask pred = opts.strategy == Strategy::Resized
                                 ? infer_resized(stack, *seg, opts.work_w, opts.work_h)
                                 : infer_patches(stack, *seg, opts.patch);
      const auto t1 = std::chrono::steady_clock::now();
      seconds_total += std::chrono::duration<double>(t1 - t0).count();
      cm.add(pred, gt);
    }
    run_mious.push_back(iou_from_confusion(cm).miou);
    last = cm;
  }
  return finish_result(last, run_mious, scheme, opts,
                       static_cast<int>(manifest.samples.size()), seconds_total);
}

EvalResult evaluate_mask_dirs(const fs::path& pred_dir, const fs::path& gt_dir,
                              const ClassScheme& scheme) {
  const auto list_names = [](const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("directory not found: " + dir.string());
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".png")
        names.insert(entry.path().filename().string());
    return names;
  };
  const std::set<std::string> pred_names = list_names(pred_dir);
  const std::set<std::string> gt_names = list_names(gt_dir);
  if (pred_names.empty()) throw FileSetMismatch("no prediction masks in " + pred_dir.string());
  if (pred_names != gt_names) {
    std::string detail;
    for (const auto& n : pred_names)
      if (!gt_names.count(n)) detail += " +" + n;
    for (const auto& n : gt_names)
      if (!pred_names.count(n)) detail += " -" + n;
    throw FileSetMismatch("prediction and ground-truth sets differ:" + detail);
  }

  ConfusionMatrix cm(scheme.num_classes());
  for (const std::string& name : pred_names) {
    const LabelMask pred = read_mask_png(pred_dir / name, scheme);
    const LabelMask gt = read_mask_png(gt_dir / name, scheme);
    cm.add(pred, gt);
  }
  EvalOptions opts;
  opts.method = "masks";
  std::vector<double> run_mious{iou_from_confusion(cm).miou};
  return finish_result(cm, run_mious, scheme, opts, static_cast<int>(pred_names.size()), 0.0);
}

nlohmann::json eval_result_to_json(const EvalResult& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["strategy"] = r.strategy;
  j["classes"] = r.classes;
  j["images"] = r.images;
  j["runs"] = r.runs;
  j["miou_mean"] = r.miou_mean;
  j["miou_std"] = r.miou_std;
  j["pixel_accuracy"] = r.pixel_acc;
  j["seconds_per_image"] = r.seconds_per_image;
  nlohmann::json per;
  for (int c = 0; c < r.classes; ++c) {
    if (r.class_present[c])
      per[r.class_names[c]] = r.per_class_iou[c];
    else
      per[r.class_names[c]] = nullptr;  // class absent; excluded from the mean
  }
  j["per_class_iou"] = per;
  return j;
}

std::string eval_csv_header() {
  return "method,strategy,classes,images,runs,miou_mean,miou_std,pixel_accuracy,seconds_per_image";
}

std::string eval_csv_row(const EvalResult& r) {
  std::ostringstream out;
  out << r.method << ',' << r.strategy << ',' << r.classes << ',' << r.images << ',' << r.runs
      << ',' << r.miou_mean << ',' << r.miou_std << ',' << r.pixel_acc << ','
      << r.seconds_per_image;
  return out.str();
}

}  // namespace printmap
