#include "printmap/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "printmap/png_io.hpp"

namespace printmap {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Scenario sampling

double cover_scale(int w, int h, int target_w, int target_h) {
  return std::max(static_cast<double>(target_w) / w, static_cast<double>(target_h) / h);
}

namespace {

int clamp_int(long v, int lo, int hi) {
  return static_cast<int>(std::clamp(v, static_cast<long>(lo), static_cast<long>(hi)));
}

// Span of a defect along its axis: either the whole axis or a uniformly
// placed partial run.
void sample_span(Rng& rng, const ScenarioConfig& sc, int axis_len, int& pos, int& len) {
  if (rng.bernoulli(sc.full_span_prob)) {
    pos = 0;
    len = axis_len;
    return;
  }
  const double frac = rng.uniform(sc.partial_min_frac, 1.0);
  len = clamp_int(std::lround(frac * axis_len), 1, axis_len);
  pos = static_cast<int>(rng.uniform_int(0, axis_len - len));
}

DefectSpec sample_streak(Rng& rng, const GenConfig& cfg, int w, int h, double scale) {
  DefectSpec spec;
  spec.kind = DefectKind::Streak;
  spec.orientation = rng.bernoulli(0.5) ? Orientation::Horizontal : Orientation::Vertical;
  const bool horizontal = spec.orientation == Orientation::Horizontal;
  const int cross_extent = horizontal ? h : w;
  const int axis_len = horizontal ? w : h;

  const int wt = static_cast<int>(rng.uniform_int(cfg.streak.width_min, cfg.streak.width_max));
  const int wn = clamp_int(std::lround(wt / scale), 1, cross_extent);
  int pos = 0, len = axis_len;
  sample_span(rng, cfg.scenario, axis_len, pos, len);
  const int cross_pos = static_cast<int>(rng.uniform_int(0, cross_extent - wn));

  spec.region = horizontal ? Rect{pos, cross_pos, len, wn} : Rect{cross_pos, pos, wn, len};
  spec.amplitude = rng.uniform(cfg.streak.amp_min, cfg.streak.amp_max);
  spec.texture_seed = rng.next_u64();
  spec.gray = rng.uniform(cfg.streak.gray_min, cfg.streak.gray_max);
  return spec;
}

DefectSpec sample_banding(Rng& rng, const GenConfig& cfg, InkChannel channel, BandSign sign,
                          int w, int h, double scale) {
  DefectSpec spec;
  spec.kind = DefectKind::Banding;
  spec.channel = channel;
  spec.sign = sign;
  spec.orientation = rng.bernoulli(0.5) ? Orientation::Horizontal : Orientation::Vertical;
  const bool horizontal = spec.orientation == Orientation::Horizontal;
  const int cross_extent = horizontal ? h : w;
  const int axis_len = horizontal ? w : h;

  const int wt = static_cast<int>(rng.uniform_int(cfg.banding.width_min, cfg.banding.width_max));
  const int wn = clamp_int(std::lround(wt / scale), 1, cross_extent);
  int pos = 0, len = axis_len;
  sample_span(rng, cfg.scenario, axis_len, pos, len);
  const int cross_pos = static_cast<int>(rng.uniform_int(0, cross_extent - wn));

  spec.region = horizontal ? Rect{pos, cross_pos, len, wn} : Rect{cross_pos, pos, wn, len};
  spec.amplitude = rng.uniform(cfg.banding.amp_min, cfg.banding.amp_max);

  // Lobe centers at f and 1-f of the band; the sigma window keeps the two
  // peaks separated while the band edges stay clearly shifted.
  const double f = rng.uniform(cfg.banding.lobe_frac_min, cfg.banding.lobe_frac_max);
  const double s_lo = f / 1.85;
  const double s_hi = (0.5 - f) / 1.25;
  const double s = rng.uniform(s_lo, std::max(s_lo, s_hi));
  const double extent = wn - 1;
  spec.profile.mu1 = f * extent;
  spec.profile.mu2 = extent - spec.profile.mu1;
  spec.profile.sigma = std::max(s * extent, 1e-6);
  spec.profile.amplitude = spec.amplitude;
  return spec;
}

}  // namespace

ScenarioSpec sample_scenario(Rng& rng, const GenConfig& cfg, int w, int h, double scale) {
  if (w < 1 || h < 1) throw ConfigError("sample_scenario: empty canvas");
  if (!(scale > 0.0)) throw ConfigError("sample_scenario: scale must be positive");
  ScenarioSpec out;
  out.defective = rng.bernoulli(cfg.scenario.p_defective);
  if (!out.defective) return out;
  const int n =
      static_cast<int>(rng.uniform_int(cfg.scenario.defect_count_min, cfg.scenario.defect_count_max));
  // Lack is sampled for the key channel only, with one sign per page. The
  // max-black rgb/cmyk decomposition leaves at least one chromatic ink at
  // zero on every pixel, so removing chromatic ink would produce rectangles
  // of labeled-but-untouched pixels; key ink is positive wherever the page
  // is non-white. A single per-page key sign also keeps overlapping key
  // bands from cancelling each other.
  const BandSign key_sign =
      rng.bernoulli(cfg.banding.p_excess) ? BandSign::Excess : BandSign::Lack;
  out.defects.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    if (u < cfg.scenario.p_streak) {
      out.defects.push_back(sample_streak(rng, cfg, w, h, scale));
      continue;
    }
    double cum = cfg.scenario.p_streak;
    InkChannel channel = InkChannel::Key;
    for (int c = 0; c < 4; ++c) {
      cum += cfg.scenario.banding_shares[c];
      if (u < cum) {
        channel = static_cast<InkChannel>(c);
        break;
      }
    }
    const BandSign sign = channel == InkChannel::Key ? key_sign : BandSign::Excess;
    out.defects.push_back(sample_banding(rng, cfg, channel, sign, w, h, scale));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample generation

NativeSample generate_native(const ImageRGB& src, const PrintScanModel& model,
                             const GenConfig& cfg, std::uint64_t seed) {
  if (src.width < cfg.target_w || src.height < cfg.target_h)
    throw SourceTooSmall("source " + std::to_string(src.width) + "x" + std::to_string(src.height) +
                         " smaller than target " + std::to_string(cfg.target_w) + "x" +
                         std::to_string(cfg.target_h));
  NativeSample out;
  out.clean = apply_printscan(src, model);
  Rng rng(seed);
  const double scale = cover_scale(src.width, src.height, cfg.target_w, cfg.target_h);
  ScenarioSpec scenario = sample_scenario(rng, cfg, src.width, src.height, scale);
  out.specs = std::move(scenario.defects);
  out.defective = apply_defects(out.clean, out.specs, texture_params(cfg));
  out.mask = render_mask(out.specs, src.width, src.height, cfg.scheme);
  return out;
}

SamplePair finalize_sample(const NativeSample& native, const GenConfig& cfg) {
  const int w = native.clean.width;
  const int h = native.clean.height;
  const double s = cover_scale(w, h, cfg.target_w, cfg.target_h);
  const int rw = std::max(cfg.target_w, static_cast<int>(std::lround(w * s)));
  const int rh = std::max(cfg.target_h, static_cast<int>(std::lround(h * s)));
  const Rect view{(rw - cfg.target_w) / 2, (rh - cfg.target_h) / 2, cfg.target_w, cfg.target_h};

  SamplePair out;
  out.reference = crop(resize_bicubic(native.clean, rw, rh), view);
  out.defective = crop(resize_bicubic(native.defective, rw, rh), view);
  out.mask = crop(resize_nearest(native.mask, rw, rh), view);
  out.specs = native.specs;
  return out;
}

SamplePair generate_sample(const ImageRGB& src, const PrintScanModel& model, const GenConfig& cfg,
                           std::uint64_t seed) {
  SamplePair pair = finalize_sample(generate_native(src, model, cfg, seed), cfg);
  pair.sample_seed = seed;
  return pair;
}

// ---------------------------------------------------------------------------
// Spec and manifest serialization

nlohmann::json defect_spec_to_json(const DefectSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind == DefectKind::Streak ? "streak" : "banding";
  j["orientation"] = spec.orientation == Orientation::Horizontal ? "horizontal" : "vertical";
  j["region"] = {spec.region.x, spec.region.y, spec.region.w, spec.region.h};
  j["amplitude"] = spec.amplitude;
  if (spec.kind == DefectKind::Streak) {
    j["texture_seed"] = spec.texture_seed;
    j["gray"] = spec.gray;
  } else {
    const char* inks = "cmyk";
    j["channel"] = std::string(1, inks[static_cast<int>(spec.channel)]);
    j["sign"] = spec.sign == BandSign::Excess ? "excess" : "lack";
    j["profile"] = {{"mu1", spec.profile.mu1}, {"mu2", spec.profile.mu2},
                    {"sigma", spec.profile.sigma}};
  }
  return j;
}

DefectSpec defect_spec_from_json(const nlohmann::json& j) {
  DefectSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "streak")
    spec.kind = DefectKind::Streak;
  else if (kind == "banding")
    spec.kind = DefectKind::Banding;
  else
    throw ConfigError("defect spec: unknown kind \"" + kind + "\"");
  const std::string ori = j.at("orientation").get<std::string>();
  if (ori == "horizontal")
    spec.orientation = Orientation::Horizontal;
  else if (ori == "vertical")
    spec.orientation = Orientation::Vertical;
  else
    throw ConfigError("defect spec: unknown orientation \"" + ori + "\"");
  const auto& r = j.at("region");
  if (!r.is_array() || r.size() != 4) throw ConfigError("defect spec: region must be [x,y,w,h]");
  spec.region = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()};
  spec.amplitude = j.at("amplitude").get<double>();
  if (spec.kind == DefectKind::Streak) {
    spec.texture_seed = j.at("texture_seed").get<std::uint64_t>();
    spec.gray = j.at("gray").get<double>();
  } else {
    const std::string ch = j.at("channel").get<std::string>();
    const std::string inks = "cmyk";
    const auto pos = inks.find(ch);
    if (ch.size() != 1 || pos == std::string::npos)
      throw ConfigError("defect spec: unknown channel \"" + ch + "\"");
    spec.channel = static_cast<InkChannel>(pos);
    const std::string sign = j.at("sign").get<std::string>();
    if (sign == "excess")
      spec.sign = BandSign::Excess;
    else if (sign == "lack")
      spec.sign = BandSign::Lack;
    else
      throw ConfigError("defect spec: unknown sign \"" + sign + "\"");
    const auto& p = j.at("profile");
    spec.profile.mu1 = p.at("mu1").get<double>();
    spec.profile.mu2 = p.at("mu2").get<double>();
    spec.profile.sigma = p.at("sigma").get<double>();
    spec.profile.amplitude = spec.amplitude;
  }
  return spec;
}

namespace {

constexpr const char* kManifestFormat = "printmap-dataset-v1";

nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json j;
  j["format"] = kManifestFormat;
  j["class_scheme"] = scheme_name(m.config.scheme);
  nlohmann::json cfg = gen_config_to_json(m.config);
  // Inline the coefficients so audits never depend on an external model file.
  cfg["printscan_model"] = model_to_json(m.model, FitReport{});
  j["config"] = cfg;
  j["samples"] = nlohmann::json::array();
  for (const SampleRecord& s : m.samples) {
    nlohmann::json js;
    js["id"] = s.id;
    js["seed"] = s.seed;
    js["source"] = s.source;
    js["reference"] = s.reference;
    js["defective"] = s.defective;
    js["mask"] = s.mask;
    js["specs"] = nlohmann::json::array();
    for (const DefectSpec& d : s.specs) js["specs"].push_back(defect_spec_to_json(d));
    j["samples"].push_back(std::move(js));
  }
  j["skipped"] = nlohmann::json::array();
  for (const SkipRecord& s : m.skipped)
    j["skipped"].push_back({{"index", s.index}, {"source", s.source}, {"reason", s.reason}});
  return j;
}

Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  if (j.value("format", "") != kManifestFormat)
    throw IoError("manifest: unknown format field");
  nlohmann::json cfg = j.at("config");
  if (cfg.contains("printscan_model") && cfg.at("printscan_model").is_object()) {
    m.model = model_from_json(cfg.at("printscan_model")).first;
    cfg.erase("printscan_model");
  } else {
    m.model = PrintScanModel::identity();
  }
  m.config = gen_config_from_json(cfg);
  if (j.contains("class_scheme"))
    m.config.scheme = scheme_from_name(j.at("class_scheme").get<std::string>());
  for (const auto& js : j.at("samples")) {
    SampleRecord s;
    s.id = js.at("id").get<std::string>();
    s.seed = js.at("seed").get<std::uint64_t>();
    s.source = js.at("source").get<std::string>();
    s.reference = js.at("reference").get<std::string>();
    s.defective = js.at("defective").get<std::string>();
    s.mask = js.at("mask").get<std::string>();
    for (const auto& jd : js.at("specs")) s.specs.push_back(defect_spec_from_json(jd));
    m.samples.push_back(std::move(s));
  }
  if (j.contains("skipped")) {
    for (const auto& js : j.at("skipped")) {
      SkipRecord s;
      s.index = js.at("index").get<int>();
      s.source = js.at("source").get<std::string>();
      s.reason = js.at("reason").get<std::string>();
      m.skipped.push_back(std::move(s));
    }
  }
  return m;
}

}  // namespace

void save_manifest(const fs::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << manifest_to_json(manifest).dump(2) << "\n";
  if (!out) throw IoError("failed writing manifest " + path.string());
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest " + path.string() + ": " + e.what());
  }
  try {
    return manifest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Dataset export

namespace {

std::string sample_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%05d", index);
  return buf;
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("source directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

Manifest export_dataset(const fs::path& src_dir, const fs::path& out_dir, const GenConfig& cfg,
                        const PrintScanModel& model, int count) {
  validate_gen_config(cfg);
  if (count < 0) throw ConfigError("export_dataset: negative count");
  const std::vector<fs::path> sources = list_pngs(src_dir);
  if (sources.empty()) throw IoError("no .png sources in " + src_dir.string());
  fs::create_directories(out_dir);

  Manifest manifest;
  manifest.config = cfg;
  manifest.model = model;

  for (int i = 0; i < count; ++i) {
    const fs::path& source = sources[static_cast<std::size_t>(i) % sources.size()];
    const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));

    ImageRGB src;
    try {
      src = read_image_png(source);
    } catch (const IoError& e) {
      manifest.skipped.push_back({i, source.string(), std::string("unreadable: ") + e.what()});
      continue;
    }
    SamplePair pair;
    try {
      pair = generate_sample(src, model, cfg, seed);
    } catch (const SourceTooSmall& e) {
      manifest.skipped.push_back({i, source.string(), std::string("too_small: ") + e.what()});
      continue;
    }

    SampleRecord rec;
    rec.id = sample_name(i);
    rec.seed = seed;
    rec.source = source.string();
    rec.reference = rec.id + "_ref.png";
    rec.defective = rec.id + "_img.png";
    rec.mask = rec.id + "_mask.png";
    rec.specs = pair.specs;
    write_image_png(out_dir / rec.reference, pair.reference);
    write_image_png(out_dir / rec.defective, pair.defective);
    write_mask_png(out_dir / rec.mask, pair.mask);
    manifest.samples.push_back(std::move(rec));
  }

  save_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

// ---------------------------------------------------------------------------
// Augmentation

namespace {

template <typename Get, typename Set>
void transform_pixels(int in_w, int in_h, AugmentOp op, const Get& get, const Set& set) {
  switch (op) {
    case AugmentOp::Rot90CW:
      // (x, y) -> (in_h - 1 - y, x): output is in_h wide, in_w tall.
      for (int y = 0; y < in_h; ++y)
        for (int x = 0; x < in_w; ++x) set(in_h - 1 - y, x, get(x, y));
      break;
    case AugmentOp::Rot90CCW:
      for (int y = 0; y < in_h; ++y)
        for (int x = 0; x < in_w; ++x) set(y, in_w - 1 - x, get(x, y));
      break;
    case AugmentOp::HFlip:
      for (int y = 0; y < in_h; ++y)
        for (int x = 0; x < in_w; ++x) set(in_w - 1 - x, y, get(x, y));
      break;
  }
}

bool swaps_axes(AugmentOp op) { return op != AugmentOp::HFlip; }

}  // namespace

ImageRGB augment(const ImageRGB& img, AugmentOp op) {
  ImageRGB out(swaps_axes(op) ? img.height : img.width, swaps_axes(op) ? img.width : img.height);
  transform_pixels(
      img.width, img.height, op,
      [&](int x, int y) { return std::array<double, 3>{img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)}; },
      [&](int x, int y, const std::array<double, 3>& v) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = v[c];
      });
  return out;
}

ChannelStack augment(const ChannelStack& stack, AugmentOp op) {
  ChannelStack out(swaps_axes(op) ? stack.height : stack.width,
                   swaps_axes(op) ? stack.width : stack.height, stack.channels);
  transform_pixels(
      stack.width, stack.height, op,
      [&](int x, int y) {
        std::vector<double> v(stack.channels);
        for (int c = 0; c < stack.channels; ++c) v[c] = stack.at(x, y, c);
        return v;
      },
      [&](int x, int y, const std::vector<double>& v) {
        for (int c = 0; c < stack.channels; ++c) out.at(x, y, c) = v[c];
      });
  return out;
}

LabelMask augment(const LabelMask& mask, AugmentOp op) {
  LabelMask out(swaps_axes(op) ? mask.height : mask.width,
                swaps_axes(op) ? mask.width : mask.height, mask.scheme);
  transform_pixels(
      mask.width, mask.height, op, [&](int x, int y) { return mask.at(x, y); },
      [&](int x, int y, std::uint8_t v) { out.at(x, y) = v; });
  return out;
}

// ---------------------------------------------------------------------------
// Training patches and splits

InputMode input_mode_from_name(const std::string& name) {
  if (name == "nr") return InputMode::NR;
  if (name == "fr") return InputMode::FR;
  throw ConfigError("unknown input mode: " + name);
}

std::string input_mode_name(InputMode mode) { return mode == InputMode::NR ? "nr" : "fr"; }

TrainingPatch extract_training_patch(const SamplePair& pair, InputMode mode, int patch, Rng& rng,
                                     const std::string& sample_id) {
  const int w = pair.defective.width;
  const int h = pair.defective.height;
  if (pair.mask.width != w || pair.mask.height != h)
    throw DimMismatch("extract_training_patch: mask size differs from image");
  if (patch < 1) throw ConfigError("extract_training_patch: patch must be positive");
  if (patch > w || patch > h)
    throw ImageTooSmall("extract_training_patch: image " + std::to_string(w) + "x" +
                        std::to_string(h) + " smaller than patch " + std::to_string(patch));

  ChannelStack input = normalize(pair.defective).values;
  if (mode == InputMode::FR) {
    if (pair.reference.width != w || pair.reference.height != h)
      throw DimMismatch("extract_training_patch: reference size differs");
    input = concat_channels(normalize(pair.reference).values, input);
  }

  TrainingPatch out;
  out.rect.x = static_cast<int>(rng.uniform_int(0, w - patch));
  out.rect.y = static_cast<int>(rng.uniform_int(0, h - patch));
  out.rect.w = patch;
  out.rect.h = patch;
  out.input = crop(input, out.rect);
  out.mask = crop(pair.mask, out.rect);
  out.sample_id = sample_id;
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_dataset(
    const std::vector<std::string>& ids, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ConfigError("split_dataset: train_fraction outside [0,1]");
  std::vector<std::string> shuffled = ids;
  Rng rng(seed);
  rng.shuffle(shuffled);
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(shuffled.size())));
  std::vector<std::string> train(shuffled.begin(), shuffled.begin() + n_train);
  std::vector<std::string> val(shuffled.begin() + n_train, shuffled.end());
  return {std::move(train), std::move(val)};
}

// ---------------------------------------------------------------------------
// Audit

namespace {

fs::path resolve_source(const std::string& recorded, const fs::path& manifest_dir) {
  fs::path p(recorded);
  if (fs::exists(p)) return p;
  const fs::path alt = manifest_dir / p;
  if (fs::exists(alt)) return alt;
  return p;  // let the read fail with a clear message
}

bool images_equal(const ImageRGB& a, const ImageRGB& b) {
  return a.width == b.width && a.height == b.height && a.data == b.data;
}

}  // namespace

AuditReport audit_dataset(const fs::path& manifest_path) {
  const Manifest manifest = load_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  AuditReport report;
  report.passed = true;

  std::uint64_t labeled_total = 0;
  std::uint64_t visible_total = 0;
  constexpr double kStep = 1.0 / 255.0;

  for (const SampleRecord& rec : manifest.samples) {
    auto fail = [&](const std::string& what) {
      report.passed = false;
      report.issues.push_back(rec.id + ": " + what);
    };

    ImageRGB src;
    try {
      src = read_image_png(resolve_source(rec.source, dir));
    } catch (const IoError& e) {
      fail(std::string("source unavailable: ") + e.what());
      continue;
    }

    NativeSample native;
    try {
      native = generate_native(src, manifest.model, manifest.config, rec.seed);
    } catch (const Error& e) {
      fail(std::string("regeneration failed: ") + e.what());
      continue;
    }

    // Locality: untouched pixels are bit-identical; any modified pixel must
    // carry a label.
    std::uint64_t outside_modified = 0;
    std::uint64_t labeled = 0;
    std::uint64_t visible = 0;
    for (int y = 0; y < native.mask.height; ++y) {
      for (int x = 0; x < native.mask.width; ++x) {
        double delta = 0.0;
        for (int c = 0; c < 3; ++c)
          delta = std::max(delta, std::abs(native.defective.at(x, y, c) - native.clean.at(x, y, c)));
        if (native.mask.at(x, y) == 0) {
          if (delta != 0.0) ++outside_modified;
        } else {
          ++labeled;
          if (delta > kStep) ++visible;
        }
      }
    }
    if (outside_modified > 0)
      fail(std::to_string(outside_modified) + " pixels modified outside labeled regions");
    labeled_total += labeled;
    visible_total += visible;

    // Determinism: the stored files must equal a fresh render bit for bit
    // after 8-bit quantization.
    const SamplePair pair = finalize_sample(native, manifest.config);
    try {
      const ImageRGB ref = read_image_png(dir / rec.reference);
      const ImageRGB img = read_image_png(dir / rec.defective);
      const LabelMask mask = read_mask_png(dir / rec.mask, manifest.config.scheme);
      if (!images_equal(quantize_roundtrip(pair.reference), ref))
        fail("stored reference differs from regeneration");
      if (!images_equal(quantize_roundtrip(pair.defective), img))
        fail("stored defective image differs from regeneration");
      if (mask.width != pair.mask.width || mask.height != pair.mask.height ||
          mask.labels != pair.mask.labels)
        fail("stored mask differs from regeneration");
    } catch (const Error& e) {
      fail(std::string("stored files unreadable: ") + e.what());
    }
    ++report.samples_checked;
  }

  report.visible_fraction =
      labeled_total == 0 ? 1.0
                         : static_cast<double>(visible_total) / static_cast<double>(labeled_total);
  if (report.visible_fraction < 0.99) {
    report.passed = false;
    report.issues.push_back("only " + std::to_string(report.visible_fraction * 100.0) +
                            "% of labeled pixels are visibly modified (need 99%)");
  }
  return report;
}

}  // namespace printmap
