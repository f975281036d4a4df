#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "printmap/config.hpp"
#include "printmap/defects.hpp"
#include "printmap/imgops.hpp"
#include "printmap/printscan.hpp"
#include "printmap/rng.hpp"

namespace printmap {

// ---------------------------------------------------------------------------
// Scenario sampling

struct ScenarioSpec {
  bool defective = false;
  std::vector<DefectSpec> defects;
};

// Draws one page scenario. Geometry is sampled in native (w, h) coordinates;
// configured widths refer to target-resolution pixels and are divided by
// `cover_scale` (the native-to-target scale factor, <= 1) so defects come out
// at the configured size after the final resize.
ScenarioSpec sample_scenario(Rng& rng, const GenConfig& cfg, int w, int h, double cover_scale);

// Scale factor of the cover resize for a native -> target mapping.
double cover_scale(int w, int h, int target_w, int target_h);

// ---------------------------------------------------------------------------
// Sample generation

// Full-resolution intermediate: the color-distorted page before and after
// defect injection, plus its mask. Kept around for audits.
struct NativeSample {
  ImageRGB clean;
  ImageRGB defective;
  LabelMask mask;
  std::vector<DefectSpec> specs;
};

// Final training pair at target resolution.
struct SamplePair {
  ImageRGB reference;
  ImageRGB defective;
  LabelMask mask;
  std::vector<DefectSpec> specs;
  std::uint64_t sample_seed = 0;
};

// Runs the source through the color model and injects a seeded scenario.
// Throws SourceTooSmall if the source cannot cover the target.
NativeSample generate_native(const ImageRGB& src, const PrintScanModel& model,
                             const GenConfig& cfg, std::uint64_t seed);

// Cover-resize (bicubic for images, nearest for the mask) plus center crop
// down to the configured target.
SamplePair finalize_sample(const NativeSample& native, const GenConfig& cfg);

SamplePair generate_sample(const ImageRGB& src, const PrintScanModel& model, const GenConfig& cfg,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dataset export

struct SampleRecord {
  std::string id;
  std::uint64_t seed = 0;
  std::string source;     // source path as given at generation time
  std::string reference;  // file names relative to the dataset directory
  std::string defective;
  std::string mask;
  std::vector<DefectSpec> specs;
};

struct SkipRecord {
  int index = -1;
  std::string source;
  std::string reason;
};

struct Manifest {
  GenConfig config;
  PrintScanModel model;
  std::vector<SampleRecord> samples;
  std::vector<SkipRecord> skipped;
};

nlohmann::json defect_spec_to_json(const DefectSpec& spec);
DefectSpec defect_spec_from_json(const nlohmann::json& j);

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

// Generates `count` samples cycling through the PNG files of src_dir in
// sorted order. Unusable sources (too small, unreadable) become skip records;
// sample index i always draws from seed derive_seed(master_seed, i), so
// skips never shift later samples. Writes PNGs and manifest.json to out_dir.
Manifest export_dataset(const std::filesystem::path& src_dir,
                        const std::filesystem::path& out_dir, const GenConfig& cfg,
                        const PrintScanModel& model, int count);

// ---------------------------------------------------------------------------
// Training-side helpers

enum class AugmentOp { Rot90CW, Rot90CCW, HFlip };

ImageRGB augment(const ImageRGB& img, AugmentOp op);
ChannelStack augment(const ChannelStack& stack, AugmentOp op);
LabelMask augment(const LabelMask& mask, AugmentOp op);

enum class InputMode { NR, FR };

InputMode input_mode_from_name(const std::string& name);
std::string input_mode_name(InputMode mode);

// Normalized model input plus its label crop. FR stacks hold the reference
// channels first, then the defective ones.
struct TrainingPatch {
  ChannelStack input;
  LabelMask mask;
  std::string sample_id;
  Rect rect;
};

// Normalizes the full image(s), then crops a uniformly positioned patch.
// Throws ImageTooSmall when the pair is smaller than the patch.
TrainingPatch extract_training_patch(const SamplePair& pair, InputMode mode, int patch, Rng& rng,
                                     const std::string& sample_id);

// Deterministic shuffled split; every id lands in exactly one side.
std::pair<std::vector<std::string>, std::vector<std::string>> split_dataset(
    const std::vector<std::string>& ids, double train_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Audit

struct AuditReport {
  bool passed = false;
  int samples_checked = 0;
  std::vector<std::string> issues;
  // Fraction of labeled pixels whose native-resolution color moved by more
  // than one 8-bit step.
  double visible_fraction = 1.0;
};

// Regenerates every sample from the manifest and verifies: pixels outside
// defect regions are bit-identical to the defect-free render, labeled pixels
// are visibly modified, and the stored files match the regeneration.
AuditReport audit_dataset(const std::filesystem::path& manifest_path);

}  // namespace printmap
