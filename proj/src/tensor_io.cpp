#include "printmap/tensor_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace printmap {

namespace {

constexpr char kMagic[8] = {'P', 'M', 'T', 'E', 'N', 'S', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_raw(const std::filesystem::path& path, int w, int h, int c,
               const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write tensor " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(w));
  write_u32(out, static_cast<std::uint32_t>(h));
  write_u32(out, static_cast<std::uint32_t>(c));
  std::vector<float> buf(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) buf[i] = static_cast<float>(data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw IoError("failed writing tensor " + path.string());
}

void read_raw(const std::filesystem::path& path, int& w, int& h, int& c,
              std::vector<double>& data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open tensor " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("tensor " + path.string() + ": bad magic");
  w = static_cast<int>(read_u32(in));
  h = static_cast<int>(read_u32(in));
  c = static_cast<int>(read_u32(in));
  if (!in || w < 1 || h < 1 || c < 1)
    throw IoError("tensor " + path.string() + ": bad header");
  const std::size_t n = static_cast<std::size_t>(w) * h * c;
  std::vector<float> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw IoError("tensor " + path.string() + ": truncated data");
  data.resize(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = static_cast<double>(buf[i]);
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const ChannelStack& stack) {
  write_raw(path, stack.width, stack.height, stack.channels, stack.data);
}

ChannelStack read_tensor(const std::filesystem::path& path) {
  ChannelStack out;
  read_raw(path, out.width, out.height, out.channels, out.data);
  return out;
}

void write_score_map(const std::filesystem::path& path, const ScoreMap& scores) {
  write_raw(path, scores.width, scores.height, scores.classes, scores.scores);
}

ScoreMap read_score_map(const std::filesystem::path& path) {
  ScoreMap out;
  read_raw(path, out.width, out.height, out.classes, out.scores);
  return out;
}

}  // namespace printmap
