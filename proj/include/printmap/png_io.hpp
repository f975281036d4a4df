#pragma once

#include <filesystem>

#include "printmap/raster.hpp"

namespace printmap {

// 8-bit RGB PNG. Values are quantized with round(v * 255) on write and
// mapped back as v / 255 on read.
ImageRGB read_image_png(const std::filesystem::path& path);
void write_image_png(const std::filesystem::path& path, const ImageRGB& img);

// Single-channel 8-bit PNG where the pixel value is the class label.
// Reading validates every label against the scheme.
LabelMask read_mask_png(const std::filesystem::path& path, const ClassScheme& scheme);
void write_mask_png(const std::filesystem::path& path, const LabelMask& mask);

// Quantization helpers shared by the PNG layer and the audit path.
std::uint8_t quantize8(double v);
ImageRGB quantize_roundtrip(const ImageRGB& img);

}  // namespace printmap
