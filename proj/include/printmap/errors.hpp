#pragma once

#include <stdexcept>

namespace printmap {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read, written or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad or inconsistent configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two rasters that must share dimensions do not.
class DimMismatch : public Error {
 public:
  using Error::Error;
};

// A mask pixel carries a label outside the active class scheme.
class LabelOutOfRange : public Error {
 public:
  using Error::Error;
};

// A defect region does not fit inside its image.
class RegionOutOfBounds : public Error {
 public:
  using Error::Error;
};

// A requested crop rectangle leaves the canonical image.
class RectOutOfBounds : public Error {
 public:
  using Error::Error;
};

// Source image smaller than the generation target.
class SourceTooSmall : public Error {
 public:
  using Error::Error;
};

// Image smaller than the requested patch.
class ImageTooSmall : public Error {
 public:
  using Error::Error;
};

// Normal equations are numerically rank deficient.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// Segmenter was handed a stack with the wrong channel count.
class ChannelCountMismatch : public Error {
 public:
  using Error::Error;
};

// Every class had an empty union; mean IoU is undefined.
class AllClassesEmpty : public Error {
 public:
  using Error::Error;
};

// A segmenter returned scores that violate its contract.
class SegmenterFailure : public Error {
 public:
  using Error::Error;
};

// Prediction and ground-truth directories do not pair up.
class FileSetMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace printmap
