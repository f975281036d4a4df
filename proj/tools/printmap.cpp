// printmap: synthetic print-defect dataset generation, baseline inference
// and evaluation in one binary.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "printmap/config.hpp"
#include "printmap/datagen.hpp"
#include "printmap/eval.hpp"
#include "printmap/imgops.hpp"
#include "printmap/infer.hpp"
#include "printmap/png_io.hpp"
#include "printmap/printscan.hpp"
#include "printmap/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace printmap;

namespace {

// Exit codes: 0 ok, 1 I/O, 2 numeric failure, 3 source too small,
// 4 usage/config, 5 prediction/ground-truth mismatch, 6 audit failure.
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitTooSmall = 3;
constexpr int kExitUsage = 4;
constexpr int kExitMismatch = 5;
constexpr int kExitAudit = 6;

struct UsageError : Error {
  using Error::Error;
};

PrintScanModel load_model_arg(const std::string& model_path, const GenConfig& cfg,
                              const fs::path& config_dir) {
  if (!model_path.empty()) return load_model(model_path).first;
  if (!cfg.printscan_model.empty()) {
    fs::path p(cfg.printscan_model);
    if (!p.is_absolute() && !fs::exists(p) && fs::exists(config_dir / p)) p = config_dir / p;
    return load_model(p).first;
  }
  return PrintScanModel::identity();
}

GenConfig load_config_arg(const std::string& config_path) {
  if (config_path.empty()) return GenConfig{};
  return load_gen_config(config_path);
}

// ---------------------------------------------------------------------------

int cmd_fit_printscan(const std::string& src, const std::string& dst, const std::string& out,
                      int samples, double ridge) {
  const ImageRGB a = read_image_png(src);
  const ImageRGB b = read_image_png(dst);
  const auto [model, report] = fit_printscan(a, b, samples, ridge);
  save_model(out, model, report);
  std::printf("fit %d samples, ridge %g, condition %.3g\n", report.sample_count, report.ridge,
              report.condition);
  std::printf("rmse r %.6g g %.6g b %.6g\n", report.rmse[0], report.rmse[1], report.rmse[2]);
  return kExitOk;
}

void ensure_parent(const fs::path& p) {
  const fs::path dir = p.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

int cmd_synth(const std::string& in, const std::string& config_path,
              const std::string& model_path, std::uint64_t seed, const std::string& out_img,
              const std::string& out_mask, const std::string& out_ref,
              const std::string& overlay) {
  const GenConfig cfg = load_config_arg(config_path);
  const PrintScanModel model =
      load_model_arg(model_path, cfg, fs::path(config_path).parent_path());
  const ImageRGB src = read_image_png(in);
  const SamplePair pair = generate_sample(src, model, cfg, seed);
  ensure_parent(out_img);
  write_image_png(out_img, pair.defective);
  ensure_parent(out_mask);
  write_mask_png(out_mask, pair.mask);
  if (!out_ref.empty()) {
    ensure_parent(out_ref);
    write_image_png(out_ref, pair.reference);
  }
  if (!overlay.empty()) {
    ensure_parent(overlay);
    write_image_png(overlay, render_overlay(pair.defective, pair.mask));
  }
  std::printf("seed %llu: %zu defects -> %s\n", static_cast<unsigned long long>(seed),
              pair.specs.size(), out_img.c_str());
  return kExitOk;
}

int cmd_gen_dataset(const std::string& src_dir, const std::string& out_dir,
                    const std::string& config_path, const std::string& model_path, int count,
                    std::int64_t seed_override) {
  GenConfig cfg = load_config_arg(config_path);
  if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
  const PrintScanModel model =
      load_model_arg(model_path, cfg, fs::path(config_path).parent_path());
  const Manifest manifest = export_dataset(src_dir, out_dir, cfg, model, count);
  std::printf("generated %zu samples, skipped %zu\n", manifest.samples.size(),
              manifest.skipped.size());
  for (const SkipRecord& s : manifest.skipped)
    std::fprintf(stderr, "warning: sample %d (%s): %s\n", s.index, s.source.c_str(),
                 s.reason.c_str());
  return kExitOk;
}

int cmd_export_patches(const std::string& dataset, const std::string& out_dir,
                       const std::string& mode_name, int patch, int per_image,
                       std::uint64_t seed, double train_frac) {
  const InputMode mode = input_mode_from_name(mode_name);
  const fs::path dataset_dir(dataset);
  const Manifest manifest = load_manifest(dataset_dir / "manifest.json");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  nlohmann::json index;
  index["mode"] = mode_name;
  index["patch"] = patch;
  index["per_image"] = per_image;
  index["seed"] = seed;
  index["entries"] = nlohmann::json::array();

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const SampleRecord& rec = manifest.samples[i];
    ids.push_back(rec.id);
    SamplePair pair;
    pair.defective = read_image_png(dataset_dir / rec.defective);
    pair.reference = read_image_png(dataset_dir / rec.reference);
    pair.mask = read_mask_png(dataset_dir / rec.mask, manifest.config.scheme);
    pair.specs = rec.specs;
    Rng rng(derive_seed(seed, i));
    for (int k = 0; k < per_image; ++k) {
      const TrainingPatch tp = extract_training_patch(pair, mode, patch, rng, rec.id);
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_p%03d", k);
      const std::string stem = rec.id + suffix;
      write_tensor(dir / (stem + ".bin"), tp.input);
      write_mask_png(dir / (stem + "_mask.png"), tp.mask);
      index["entries"].push_back({{"tensor", stem + ".bin"},
                                  {"mask", stem + "_mask.png"},
                                  {"sample", tp.sample_id},
                                  {"rect", {tp.rect.x, tp.rect.y, tp.rect.w, tp.rect.h}}});
    }
  }
  const auto [train, val] = split_dataset(ids, train_frac, seed);
  index["split"] = {{"train", train}, {"val", val}};
  std::ofstream out(dir / "patches_index.json");
  if (!out) throw IoError("cannot write patches_index.json");
  out << index.dump(2) << "\n";
  std::printf("exported %zu patches from %zu samples\n", index["entries"].size(), ids.size());
  return kExitOk;
}

struct InferArgs {
  std::string img, ref, gt, scores_in, segmenter = "nrproj";
  std::string strategy = "resized";
  std::string classes = "multi";
  std::string out = "pred_mask.png";
  std::string overlay;
  int patch = 513;
  int work_w = 1280, work_h = 720;
  FrDiffParams fr;
  NrProjParams nr;
};

std::unique_ptr<Segmenter> build_segmenter(const InferArgs& a, const LabelMask* gt) {
  SegmenterOptions opts;
  opts.scheme = scheme_from_name(a.classes);
  opts.fr = a.fr;
  opts.nr = a.nr;
  opts.gt = gt;
  if (!a.scores_in.empty()) opts.scores_path = a.scores_in;
  if (a.segmenter == "oracle" && gt == nullptr)
    throw UsageError("oracle segmenter requires --gt");
  if (a.segmenter == "external" && a.scores_in.empty())
    throw UsageError("external segmenter requires --scores-in");
  return make_segmenter(a.segmenter, opts);
}

int cmd_infer(const InferArgs& a) {
  const ImageRGB img = read_image_png(a.img);
  ChannelStack stack = as_stack(img);

  LabelMask gt;
  const LabelMask* gt_ptr = nullptr;
  if (!a.gt.empty()) {
    gt = read_mask_png(a.gt, scheme_from_name(a.classes));
    gt_ptr = &gt;
  }
  const std::unique_ptr<Segmenter> seg = build_segmenter(a, gt_ptr);

  if (seg->input_channels() == 6) {
    if (a.ref.empty())
      throw UsageError("segmenter \"" + a.segmenter + "\" requires --ref");
    stack = concat_channels(as_stack(read_image_png(a.ref)), stack);
  }

  const Strategy strategy = strategy_from_name(a.strategy);
  const auto t0 = std::chrono::steady_clock::now();
  const LabelMask pred = strategy == Strategy::Resized
                             ? infer_resized(stack, *seg, a.work_w, a.work_h)
                             : infer_patches(stack, *seg, a.patch);
  const auto t1 = std::chrono::steady_clock::now();

  write_mask_png(a.out, pred);
  if (!a.overlay.empty()) write_image_png(a.overlay, render_overlay(img, pred));

  std::uint64_t labeled = 0;
  for (const std::uint8_t v : pred.labels) labeled += v != 0;
  std::printf("%s %s: %.3f s, %.2f%% pixels labeled, mask -> %s\n", a.segmenter.c_str(),
              a.strategy.c_str(), std::chrono::duration<double>(t1 - t0).count(),
              100.0 * static_cast<double>(labeled) / static_cast<double>(pred.labels.size()),
              a.out.c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string pred_dir, gt_dir;
  std::string dataset, segmenter, scores_in;
  std::string strategy = "resized";
  std::string classes = "multi";
  std::string out_json, out_csv;
  int runs = 4;
  int patch = 513;
  int work_w = 1280, work_h = 720;
  FrDiffParams fr;
  NrProjParams nr;
};

void write_eval_outputs(const EvalResult& r, const EvalArgs& a) {
  const nlohmann::json j = eval_result_to_json(r);
  std::cout << j.dump(2) << "\n";
  if (!a.out_json.empty()) {
    std::ofstream out(a.out_json);
    if (!out) throw IoError("cannot write " + a.out_json);
    out << j.dump(2) << "\n";
  }
  if (!a.out_csv.empty()) {
    const bool fresh = !fs::exists(a.out_csv) || fs::file_size(a.out_csv) == 0;
    std::ofstream out(a.out_csv, std::ios::app);
    if (!out) throw IoError("cannot write " + a.out_csv);
    if (fresh) out << eval_csv_header() << "\n";
    out << eval_csv_row(r) << "\n";
  }
}

int cmd_eval(const EvalArgs& a) {
  const bool dir_mode = !a.pred_dir.empty() || !a.gt_dir.empty();
  const bool dataset_mode = !a.dataset.empty();
  if (dir_mode == dataset_mode)
    throw UsageError("eval needs either --pred-dir/--gt-dir or --dataset/--segmenter");

  if (dir_mode) {
    if (a.pred_dir.empty() || a.gt_dir.empty())
      throw UsageError("--pred-dir and --gt-dir must be given together");
    const EvalResult r = evaluate_mask_dirs(a.pred_dir, a.gt_dir, scheme_from_name(a.classes));
    write_eval_outputs(r, a);
    return kExitOk;
  }

  if (a.segmenter.empty()) throw UsageError("--dataset requires --segmenter");
  const fs::path dataset_dir(a.dataset);
  const Manifest manifest = load_manifest(dataset_dir / "manifest.json");

  SegmenterOptions opts;
  opts.scheme = manifest.config.scheme;
  opts.fr = a.fr;
  opts.nr = a.nr;
  if (!a.scores_in.empty()) opts.scores_path = a.scores_in;
  if (a.segmenter == "external" && a.scores_in.empty())
    throw UsageError("external segmenter requires --scores-in");
  const std::string name = a.segmenter;
  const SegmenterFactory factory = [&](const SampleRecord&, const LabelMask& gt) {
    SegmenterOptions o = opts;
    o.gt = &gt;
    return make_segmenter(name, o);
  };

  EvalOptions eopts;
  eopts.strategy = strategy_from_name(a.strategy);
  eopts.runs = a.runs;
  eopts.patch = a.patch;
  eopts.work_w = a.work_w;
  eopts.work_h = a.work_h;
  eopts.method = a.segmenter;
  const EvalResult r = run_eval(manifest, dataset_dir, factory, eopts);
  write_eval_outputs(r, a);
  return kExitOk;
}

int cmd_audit(const std::string& dataset) {
  const AuditReport report = audit_dataset(fs::path(dataset) / "manifest.json");
  std::printf("audited %d samples, %.4f%% of labeled pixels visibly modified\n",
              report.samples_checked, report.visible_fraction * 100.0);
  for (const std::string& issue : report.issues)
    std::fprintf(stderr, "audit: %s\n", issue.c_str());
  if (!report.passed) {
    std::printf("audit FAILED (%zu issues)\n", report.issues.size());
    return kExitAudit;
  }
  std::printf("audit passed\n");
  return kExitOk;
}

void add_fr_nr_flags(CLI::App* cmd, FrDiffParams& fr, NrProjParams& nr) {
  cmd->add_option("--tau", fr.tau, "frdiff: difference threshold");
  cmd->add_option("--blur-sigma", fr.blur_sigma, "frdiff: pre-threshold blur");
  cmd->add_option("--min-aspect", fr.min_aspect, "frdiff: streak aspect ratio bound");
  cmd->add_option("--max-thickness", fr.max_thickness, "streak thickness bound (both baselines)")
      ->each([&nr](const std::string& v) { nr.max_thickness = std::stoi(v); });
  cmd->add_option("--min-area", fr.min_area, "frdiff: minimum component area");
  cmd->add_option("--z-thresh", nr.z_thresh, "nrproj: robust z-score threshold");
  cmd->add_option("--window", nr.window, "nrproj: sliding median window");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic print defect pipeline"};
  app.require_subcommand(1);

  // fit-printscan
  std::string fit_src, fit_dst, fit_out;
  int fit_samples = 10000;
  double fit_ridge = 1e-8;
  auto* fit = app.add_subcommand("fit-printscan", "fit the color transfer polynomial");
  fit->add_option("--src", fit_src, "clean page PNG")->required();
  fit->add_option("--dst", fit_dst, "printed-and-scanned page PNG")->required();
  fit->add_option("--out", fit_out, "model JSON to write")->required();
  fit->add_option("--samples", fit_samples, "pixel samples for the fit (stratified grid)");
  fit->add_option("--ridge", fit_ridge, "ridge regularization strength");

  // synth
  std::string synth_in, synth_config, synth_model;
  std::string synth_out_img = "sample_img.png", synth_out_mask = "sample_mask.png";
  std::string synth_out_ref, synth_overlay;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "generate one reference/defective/mask triple");
  synth->add_option("--in", synth_in, "source page PNG")->required();
  synth->add_option("--model", synth_model, "color model JSON (default identity)");
  synth->add_option("--config", synth_config, "generation config JSON");
  synth->add_option("--seed", synth_seed, "sample seed");
  synth->add_option("--out-img", synth_out_img, "defective image PNG to write");
  synth->add_option("--out-mask", synth_out_mask, "label mask PNG to write");
  synth->add_option("--out-ref", synth_out_ref, "reference image PNG to write");
  synth->add_option("--overlay", synth_overlay, "mask overlay PNG to write");

  // gen-dataset
  std::string gen_src, gen_out, gen_config, gen_model;
  int gen_count = 0;
  std::int64_t gen_seed = -1;
  auto* gen = app.add_subcommand("gen-dataset", "generate a dataset with a manifest");
  gen->add_option("--src-dir", gen_src, "directory of source PNGs")->required();
  gen->add_option("--out-dir", gen_out, "dataset directory to create")->required();
  gen->add_option("--count", gen_count, "number of samples")->required();
  gen->add_option("--config", gen_config, "generation config JSON");
  gen->add_option("--model", gen_model, "color model JSON (default identity)");
  gen->add_option("--seed", gen_seed, "override the config master seed");

  // export-patches
  std::string pat_dataset, pat_out, pat_mode = "nr";
  int pat_size = 513, pat_per_image = 1;
  std::uint64_t pat_seed = 0;
  double pat_train_frac = 0.9;
  auto* patches = app.add_subcommand("export-patches", "export normalized training patches");
  patches->add_option("--dataset", pat_dataset, "dataset directory (with manifest.json)")
      ->required();
  patches->add_option("--out", pat_out, "output directory")->required();
  patches->add_option("--mode", pat_mode, "nr or fr");
  patches->add_option("--patch-size", pat_size, "patch side length");
  patches->add_option("--per-image", pat_per_image, "patches per sample");
  patches->add_option("--seed", pat_seed, "patch placement seed");
  patches->add_option("--train-frac", pat_train_frac, "train share of the sample split");

  // infer
  InferArgs infer_args;
  auto* infer = app.add_subcommand("infer", "segment one image");
  infer->add_option("--img", infer_args.img, "defective image PNG")->required();
  infer->add_option("--ref", infer_args.ref, "reference image PNG (FR segmenters)");
  infer->add_option("--gt", infer_args.gt, "ground-truth mask (oracle segmenter)");
  infer->add_option("--scores-in", infer_args.scores_in, "score tensor (external segmenter)");
  infer->add_option("--segmenter", infer_args.segmenter, "frdiff | nrproj | oracle | external");
  infer->add_option("--strategy", infer_args.strategy, "resized | patch");
  infer->add_option("--classes", infer_args.classes, "multi | collapsed");
  infer->add_option("--out", infer_args.out, "prediction mask PNG");
  infer->add_option("--overlay", infer_args.overlay, "overlay PNG");
  infer->add_option("--patch", infer_args.patch, "patch strategy tile size");
  infer->add_option("--work-w", infer_args.work_w, "resized strategy width");
  infer->add_option("--work-h", infer_args.work_h, "resized strategy height");
  add_fr_nr_flags(infer, infer_args.fr, infer_args.nr);

  // eval
  EvalArgs eval_args;
  auto* evalc = app.add_subcommand("eval", "evaluate predictions or a segmenter");
  evalc->add_option("--pred-dir", eval_args.pred_dir, "directory of prediction masks");
  evalc->add_option("--gt-dir", eval_args.gt_dir, "directory of ground-truth masks");
  evalc->add_option("--dataset", eval_args.dataset, "dataset directory (with manifest.json)");
  evalc->add_option("--segmenter", eval_args.segmenter, "frdiff | nrproj | oracle | external");
  evalc->add_option("--scores-in", eval_args.scores_in, "score tensor (external segmenter)");
  evalc->add_option("--strategy", eval_args.strategy, "resized | patch");
  evalc->add_option("--classes", eval_args.classes, "multi | collapsed (dir mode)");
  evalc->add_option("--runs", eval_args.runs, "repeated runs for the mIoU spread");
  evalc->add_option("--patch", eval_args.patch, "patch strategy tile size");
  evalc->add_option("--work-w", eval_args.work_w, "resized strategy width");
  evalc->add_option("--work-h", eval_args.work_h, "resized strategy height");
  evalc->add_option("--out", eval_args.out_json, "write the report JSON here");
  evalc->add_option("--csv", eval_args.out_csv, "append a CSV row here");
  add_fr_nr_flags(evalc, eval_args.fr, eval_args.nr);

  // audit
  std::string audit_dataset_dir;
  auto* audit = app.add_subcommand("audit", "re-derive and verify a dataset");
  audit->add_option("--dataset", audit_dataset_dir, "dataset directory (with manifest.json)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit->parsed())
      return cmd_fit_printscan(fit_src, fit_dst, fit_out, fit_samples, fit_ridge);
    if (synth->parsed())
      return cmd_synth(synth_in, synth_config, synth_model, synth_seed, synth_out_img,
                       synth_out_mask, synth_out_ref, synth_overlay);
    if (gen->parsed())
      return cmd_gen_dataset(gen_src, gen_out, gen_config, gen_model, gen_count, gen_seed);
    if (patches->parsed())
      return cmd_export_patches(pat_dataset, pat_out, pat_mode, pat_size, pat_per_image, pat_seed,
                                pat_train_frac);
    if (infer->parsed()) return cmd_infer(infer_args);
    if (evalc->parsed()) return cmd_eval(eval_args);
    if (audit->parsed()) return cmd_audit(audit_dataset_dir);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const SourceTooSmall& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTooSmall;
  } catch (const ImageTooSmall& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTooSmall;
  } catch (const RankDeficient& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const FileSetMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMismatch;
  } catch (const DimMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMismatch;
  } catch (const LabelOutOfRange& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMismatch;
  } catch (const ChannelCountMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
