#pragma once

#include <filesystem>

#include "printmap/infer.hpp"
#include "printmap/raster.hpp"

namespace printmap {

// Binary tensor container: 8-byte magic "PMTENS01", then width, height,
// channels as little-endian uint32, then float32 data in row-major order
// with the channel index fastest. Used for exported training patches and
// for score maps exchanged with external models.
void write_tensor(const std::filesystem::path& path, const ChannelStack& stack);
ChannelStack read_tensor(const std::filesystem::path& path);

void write_score_map(const std::filesystem::path& path, const ScoreMap& scores);
ScoreMap read_score_map(const std::filesystem::path& path);

}  // namespace printmap
