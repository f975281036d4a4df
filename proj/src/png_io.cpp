#include "printmap/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace printmap {

std::uint8_t quantize8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

ImageRGB quantize_roundtrip(const ImageRGB& img) {
  ImageRGB out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    out.data[i] = static_cast<double>(quantize8(img.data[i])) / 255.0;
  return out;
}

ImageRGB read_image_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw IoError("failed to open PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("failed to read PNG " + path.string() + ": " + msg);
  }
  ImageRGB out(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<double>(buf[i]) / 255.0;
  return out;
}

void write_image_png(const std::filesystem::path& path, const ImageRGB& img) {
  if (img.width < 1 || img.height < 1) throw IoError("write PNG: empty image");
  std::vector<std::uint8_t> buf(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) buf[i] = quantize8(img.data[i]);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
    throw IoError("failed to write PNG " + path.string() + ": " + image.message);
}

LabelMask read_mask_png(const std::filesystem::path& path, const ClassScheme& scheme) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw IoError("failed to open PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("failed to read PNG " + path.string() + ": " + msg);
  }
  LabelMask out(static_cast<int>(image.width), static_cast<int>(image.height), scheme);
  const int classes = scheme.num_classes();
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (buf[i] >= classes)
      throw LabelOutOfRange("mask " + path.string() + ": label " + std::to_string(buf[i]) +
                            " exceeds scheme (" + std::to_string(classes) + " classes)");
    out.labels[i] = buf[i];
  }
  return out;
}

void write_mask_png(const std::filesystem::path& path, const LabelMask& mask) {
  if (mask.width < 1 || mask.height < 1) throw IoError("write PNG: empty mask");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width);
  image.height = static_cast<png_uint_32>(mask.height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, mask.labels.data(), 0, nullptr))
    throw IoError("failed to write PNG " + path.string() + ": " + image.message);
}

}  // namespace printmap
