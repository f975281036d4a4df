#include "printmap/infer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "printmap/imgops.hpp"
#include "printmap/tensor_io.hpp"

namespace printmap {

LabelMask argmax_labels(const ScoreMap& scores, const ClassScheme& scheme) {
  if (scores.classes != scheme.num_classes())
    throw DimMismatch("argmax_labels: score classes do not match scheme");
  LabelMask out(scores.width, scores.height, scheme);
  for (int y = 0; y < scores.height; ++y) {
    for (int x = 0; x < scores.width; ++x) {
      int best = 0;
      double best_v = scores.at(x, y, 0);
      for (int c = 1; c < scores.classes; ++c) {
        const double v = scores.at(x, y, c);
        if (v > best_v) {
          best_v = v;
          best = c;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

namespace {

void check_segmenter_input(const ChannelStack& stack, const Segmenter& seg) {
  if (stack.channels != seg.input_channels())
    throw ChannelCountMismatch("strategy: stack has " + std::to_string(stack.channels) +
                               " channels, segmenter expects " +
                               std::to_string(seg.input_channels()));
  if (stack.width < 1 || stack.height < 1) throw DimMismatch("strategy: empty stack");
}

void check_scores(const ScoreMap& sm, int w, int h, int classes) {
  if (sm.width != w || sm.height != h || sm.classes != classes)
    throw SegmenterFailure("segmenter returned " + std::to_string(sm.width) + "x" +
                           std::to_string(sm.height) + "x" + std::to_string(sm.classes) +
                           " scores, expected " + std::to_string(w) + "x" + std::to_string(h) +
                           "x" + std::to_string(classes));
}

}  // namespace

LabelMask infer_resized(const ChannelStack& stack, const Segmenter& seg, int work_w, int work_h) {
  check_segmenter_input(stack, seg);
  if (work_w < 1 || work_h < 1) throw DimMismatch("infer_resized: bad working size");
  const bool same = stack.width == work_w && stack.height == work_h;
  ChannelStack resized;
  const ChannelStack* work = &stack;
  if (!same) {
    resized = resize_bicubic(stack, work_w, work_h);
    work = &resized;
  }
  const SegmentContext ctx{Rect{0, 0, work_w, work_h}, work_w, work_h};
  const ScoreMap sm = seg.segment(*work, ctx);
  check_scores(sm, work_w, work_h, seg.scheme().num_classes());
  LabelMask labels = argmax_labels(sm, seg.scheme());
  if (same) return labels;
  return resize_nearest(labels, stack.width, stack.height);
}

LabelMask infer_patches(const ChannelStack& stack, const Segmenter& seg, int patch) {
  check_segmenter_input(stack, seg);
  if (patch < 1) throw DimMismatch("infer_patches: bad patch size");
  const int w = stack.width;
  const int h = stack.height;
  const int classes = seg.scheme().num_classes();

  ScoreMap accum(w, h, classes, 0.0);
  std::vector<std::uint32_t> coverage(static_cast<std::size_t>(w) * h, 0);

  // Tiles are visited in grid order and accumulated sequentially, so the
  // result does not depend on scheduling.
  for (const Rect& r : patch_grid(w, h, patch)) {
    const ChannelStack sub = crop(stack, r);
    const ScoreMap sm = seg.segment(sub, SegmentContext{r, w, h});
    check_scores(sm, r.w, r.h, classes);
    for (int y = 0; y < r.h; ++y) {
      for (int x = 0; x < r.w; ++x) {
        const std::size_t p = static_cast<std::size_t>(r.y + y) * w + (r.x + x);
        ++coverage[p];
        for (int c = 0; c < classes; ++c)
          accum.scores[p * classes + c] += sm.at(x, y, c);
      }
    }
  }
  for (std::size_t p = 0; p < coverage.size(); ++p) {
    const double n = static_cast<double>(coverage[p]);
    for (int c = 0; c < classes; ++c) accum.scores[p * classes + c] /= n;
  }
  return argmax_labels(accum, seg.scheme());
}

// ---------------------------------------------------------------------------
// Raster utilities

GrayField gaussian_blur(const GrayField& in, double sigma) {
  if (sigma <= 0.0) return in;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  GrayField tmp(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * in.at(std::clamp(x + i, 0, in.width - 1), y);
      tmp.at(x, y) = acc;
    }
  }
  GrayField out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp.at(x, std::clamp(y + i, 0, in.height - 1));
      out.at(x, y) = acc;
    }
  }
  return out;
}

std::vector<std::uint8_t> binary_close3(const std::vector<std::uint8_t>& in, int w, int h) {
  const auto get = [&](const std::vector<std::uint8_t>& v, int x, int y,
                       std::uint8_t outside) -> std::uint8_t {
    if (x < 0 || y < 0 || x >= w || y >= h) return outside;
    return v[static_cast<std::size_t>(y) * w + x];
  };
  std::vector<std::uint8_t> dil(in.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = 0;
      for (int dy = -1; dy <= 1 && !v; ++dy)
        for (int dx = -1; dx <= 1 && !v; ++dx) v = get(in, x + dx, y + dy, 0);
      dil[static_cast<std::size_t>(y) * w + x] = v;
    }
  std::vector<std::uint8_t> out(in.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = 1;
      // Erosion treats the outside as foreground so closing stays extensive:
      // shapes touching the border keep their border pixels.
      for (int dy = -1; dy <= 1 && v; ++dy)
        for (int dx = -1; dx <= 1 && v; ++dx) v = get(dil, x + dx, y + dy, 1);
      out[static_cast<std::size_t>(y) * w + x] = v;
    }
  return out;
}

Components connected_components8(const std::vector<std::uint8_t>& in, int w, int h) {
  Components out;
  out.label.assign(in.size(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < in.size(); ++start) {
    if (!in[start] || out.label[start] != -1) continue;
    const int id = out.count++;
    out.label[start] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const int x = static_cast<int>(p % w);
      const int y = static_cast<int>(p / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
          if (in[q] && out.label[q] == -1) {
            out.label[q] = id;
            queue.push_back(q);
          }
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// FR baseline

ScoreMap fr_diff_scores(const ChannelStack& stack, const FrDiffParams& params,
                        const ClassScheme& scheme) {
  if (stack.channels != 6)
    throw ChannelCountMismatch("fr_diff: need a 6-channel stack (reference + defective)");
  const int w = stack.width;
  const int h = stack.height;
  const int classes = scheme.num_classes();

  GrayField diff(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double d = 0.0;
      for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(stack.at(x, y, c) - stack.at(x, y, c + 3)));
      diff.at(x, y) = d;
    }
  diff = gaussian_blur(diff, params.blur_sigma);

  std::vector<std::uint8_t> binary(static_cast<std::size_t>(w) * h, 0);
  for (std::size_t p = 0; p < binary.size(); ++p)
    binary[p] = diff.values[p] > params.tau ? 1 : 0;
  binary = binary_close3(binary, w, h);
  const Components comps = connected_components8(binary, w, h);

  struct Box {
    int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
    std::uint64_t area = 0;
    double ink[4] = {0, 0, 0, 0};
  };
  std::vector<Box> boxes(comps.count);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int id = comps.label[static_cast<std::size_t>(y) * w + x];
      if (id < 0) continue;
      Box& b = boxes[id];
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
      ++b.area;
      const auto ref = cmyk_from_rgb(stack.at(x, y, 0), stack.at(x, y, 1), stack.at(x, y, 2));
      const auto def = cmyk_from_rgb(stack.at(x, y, 3), stack.at(x, y, 4), stack.at(x, y, 5));
      for (int c = 0; c < 4; ++c) b.ink[c] += def[c] - ref[c];
    }
  }

  ScoreMap scores(w, h, classes, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      scores.at(x, y, 0) = std::max(params.tau - diff.at(x, y), 0.0);

  for (const Box& b : boxes) {
    if (b.area < static_cast<std::uint64_t>(params.min_area)) continue;
    const int bw = b.x1 - b.x0 + 1;
    const int bh = b.y1 - b.y0 + 1;
    const double aspect = static_cast<double>(std::max(bw, bh)) / std::min(bw, bh);
    const int thickness = std::min(bw, bh);
    int cls;
    if (aspect >= params.min_aspect && thickness <= params.max_thickness) {
      cls = ClassScheme::kStreak;
    } else if (scheme.variant == SchemeVariant::Collapsed) {
      cls = 2;
    } else {
      int best = 0;
      for (int c = 1; c < 4; ++c)
        if (std::abs(b.ink[c]) > std::abs(b.ink[best])) best = c;
      cls = 2 + best;
    }
    for (int y = b.y0; y <= b.y1; ++y)
      for (int x = b.x0; x <= b.x1; ++x) scores.at(x, y, cls) = 1.0;
  }
  return scores;
}

ScoreMap FrDiffSegmenter::segment(const ChannelStack& stack, const SegmentContext&) const {
  return fr_diff_scores(stack, params_, scheme_);
}

// ---------------------------------------------------------------------------
// NR baseline

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lo);
  }
  return m;
}

std::vector<double> sliding_median(const std::vector<double>& v, int window) {
  const int n = static_cast<int>(v.size());
  const int k = window / 2;
  std::vector<double> out(n);
  std::vector<double> buf;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - k);
    const int hi = std::min(n - 1, i + k);
    buf.assign(v.begin() + lo, v.begin() + hi + 1);
    out[i] = median_of(std::move(buf));
  }
  return out;
}

struct LineStats {
  std::vector<double> z;       // robust z-score per line
  std::vector<double> dr, dg, db;  // per-channel residuals for attribution
};

LineStats line_stats(const std::vector<double>& lum, const std::vector<double>& r,
                     const std::vector<double>& g, const std::vector<double>& b, int window,
                     double sigma_floor) {
  const int n = static_cast<int>(lum.size());
  LineStats st;
  const auto med = sliding_median(lum, window);
  std::vector<double> resid(n);
  for (int i = 0; i < n; ++i) resid[i] = lum[i] - med[i];
  const double center = median_of(resid);
  std::vector<double> dev(n);
  for (int i = 0; i < n; ++i) dev[i] = std::abs(resid[i] - center);
  const double mad = median_of(dev);
  const double scale = 1.4826 * mad + sigma_floor;
  st.z.resize(n);
  for (int i = 0; i < n; ++i) st.z[i] = resid[i] / scale;

  const auto med_r = sliding_median(r, window);
  const auto med_g = sliding_median(g, window);
  const auto med_b = sliding_median(b, window);
  st.dr.resize(n);
  st.dg.resize(n);
  st.db.resize(n);
  for (int i = 0; i < n; ++i) {
    st.dr[i] = r[i] - med_r[i];
    st.dg[i] = g[i] - med_g[i];
    st.db[i] = b[i] - med_b[i];
  }
  return st;
}

// Picks the ink class for a flagged run from mean RGB drops: near-equal
// drops read as gray (K), otherwise the strongest single channel names the
// ink.
int attribute_ink(double dr, double dg, double db, const ClassScheme& scheme) {
  if (scheme.variant == SchemeVariant::Collapsed) return 2;
  const double ir = -dr;
  const double ig = -dg;
  const double ib = -db;
  const double m = std::max({std::abs(ir), std::abs(ig), std::abs(ib)});
  if (m <= 0.0) return 2 + static_cast<int>(InkChannel::Key);
  const double spread = std::max({std::abs(ir - ig), std::abs(ig - ib), std::abs(ir - ib)});
  if (spread < 0.35 * m) return 2 + static_cast<int>(InkChannel::Key);
  if (std::abs(ir) >= std::abs(ig) && std::abs(ir) >= std::abs(ib))
    return 2 + static_cast<int>(InkChannel::Cyan);
  if (std::abs(ig) >= std::abs(ib)) return 2 + static_cast<int>(InkChannel::Magenta);
  return 2 + static_cast<int>(InkChannel::Yellow);
}

}  // namespace

ScoreMap nr_projection_scores(const ChannelStack& stack, const NrProjParams& params,
                              const ClassScheme& scheme) {
  if (stack.channels != 3)
    throw ChannelCountMismatch("nr_projection: need a 3-channel stack");
  const int w = stack.width;
  const int h = stack.height;
  const int classes = scheme.num_classes();

  ScoreMap scores(w, h, classes, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) scores.at(x, y, 0) = 1.0;

  // Axis 0: rows (horizontal defects), axis 1: columns.
  for (int axis = 0; axis < 2; ++axis) {
    const int lines = axis == 0 ? h : w;
    const int span = axis == 0 ? w : h;
    std::vector<double> lum(lines), r(lines), g(lines), b(lines);
    for (int i = 0; i < lines; ++i) {
      double sr = 0.0, sg = 0.0, sb = 0.0;
      for (int j = 0; j < span; ++j) {
        const int x = axis == 0 ? j : i;
        const int y = axis == 0 ? i : j;
        sr += stack.at(x, y, 0);
        sg += stack.at(x, y, 1);
        sb += stack.at(x, y, 2);
      }
      r[i] = sr / span;
      g[i] = sg / span;
      b[i] = sb / span;
      lum[i] = (r[i] + g[i] + b[i]) / 3.0;
    }
    const LineStats st = line_stats(lum, r, g, b, params.window, params.sigma_floor);

    int i = 0;
    while (i < lines) {
      if (std::abs(st.z[i]) < params.z_thresh) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 < lines && std::abs(st.z[j + 1]) >= params.z_thresh) ++j;
      const int run = j - i + 1;
      int cls;
      if (run <= params.max_thickness) {
        cls = ClassScheme::kStreak;
      } else {
        double dr = 0.0, dg = 0.0, db = 0.0;
        for (int k = i; k <= j; ++k) {
          dr += st.dr[k];
          dg += st.dg[k];
          db += st.db[k];
        }
        cls = attribute_ink(dr / run, dg / run, db / run, scheme);
      }
      for (int k = i; k <= j; ++k) {
        for (int s = 0; s < span; ++s) {
          const int x = axis == 0 ? s : k;
          const int y = axis == 0 ? k : s;
          scores.at(x, y, cls) = 2.0;
        }
      }
      i = j + 1;
    }
  }
  return scores;
}

ScoreMap NrProjectionSegmenter::segment(const ChannelStack& stack, const SegmentContext&) const {
  return nr_projection_scores(stack, params_, scheme_);
}

// ---------------------------------------------------------------------------
// Oracle and external scores

ScoreMap OracleSegmenter::segment(const ChannelStack& stack, const SegmentContext& ctx) const {
  const int cw = ctx.canonical_w > 0 ? ctx.canonical_w : stack.width;
  const int ch = ctx.canonical_h > 0 ? ctx.canonical_h : stack.height;
  Rect region = ctx.region;
  if (region.w == 0 || region.h == 0) region = Rect{0, 0, stack.width, stack.height};
  if (!region.inside(cw, ch))
    throw RectOutOfBounds("oracle: region outside the canonical image");
  if (region.w != stack.width || region.h != stack.height)
    throw SegmenterFailure("oracle: stack size does not match the context region");

  const LabelMask base =
      (gt_.width == cw && gt_.height == ch) ? gt_ : resize_nearest(gt_, cw, ch);
  const int classes = gt_.scheme.num_classes();
  ScoreMap out(region.w, region.h, classes, 0.0);
  for (int y = 0; y < region.h; ++y) {
    for (int x = 0; x < region.w; ++x) {
      const std::uint8_t label = base.at(region.x + x, region.y + y);
      if (label >= classes) throw LabelOutOfRange("oracle: ground truth label out of range");
      out.at(x, y, label) = 1.0;
    }
  }
  return out;
}

ExternalScoreSegmenter::ExternalScoreSegmenter(ScoreMap scores, const ClassScheme& scheme,
                                               int input_channels)
    : scores_(std::move(scores)), scheme_(scheme), channels_(input_channels) {
  if (scores_.classes != scheme_.num_classes())
    throw SegmenterFailure("external scores: class count does not match the scheme");
}

ScoreMap ExternalScoreSegmenter::segment(const ChannelStack& stack,
                                         const SegmentContext& ctx) const {
  const int cw = ctx.canonical_w > 0 ? ctx.canonical_w : stack.width;
  const int ch = ctx.canonical_h > 0 ? ctx.canonical_h : stack.height;
  if (scores_.width != cw || scores_.height != ch)
    throw SegmenterFailure("external scores: tensor is " + std::to_string(scores_.width) + "x" +
                           std::to_string(scores_.height) + ", canonical image is " +
                           std::to_string(cw) + "x" + std::to_string(ch));
  Rect region = ctx.region;
  if (region.w == 0 || region.h == 0) region = Rect{0, 0, stack.width, stack.height};
  if (!region.inside(cw, ch))
    throw RectOutOfBounds("external scores: region outside the canonical image");
  ScoreMap out(region.w, region.h, scores_.classes, 0.0);
  for (int y = 0; y < region.h; ++y)
    for (int x = 0; x < region.w; ++x)
      for (int c = 0; c < scores_.classes; ++c)
        out.at(x, y, c) = scores_.at(region.x + x, region.y + y, c);
  return out;
}

// ---------------------------------------------------------------------------
// Registry

std::vector<std::string> segmenter_names() { return {"frdiff", "nrproj", "oracle", "external"}; }

std::unique_ptr<Segmenter> make_segmenter(const std::string& name, const SegmenterOptions& opts) {
  if (name == "frdiff") return std::make_unique<FrDiffSegmenter>(opts.scheme, opts.fr);
  if (name == "nrproj") return std::make_unique<NrProjectionSegmenter>(opts.scheme, opts.nr);
  if (name == "oracle") {
    if (opts.gt == nullptr)
      throw ConfigError("oracle segmenter needs a ground-truth mask");
    return std::make_unique<OracleSegmenter>(*opts.gt);
  }
  if (name == "external") {
    if (opts.scores_path.empty())
      throw ConfigError("external segmenter needs a score tensor path");
    ScoreMap scores = read_score_map(opts.scores_path);
    ClassScheme scheme = opts.scheme;
    if (scores.classes != scheme.num_classes()) {
      if (scores.classes == 6)
        scheme = ClassScheme{SchemeVariant::Multi};
      else if (scores.classes == 3)
        scheme = ClassScheme{SchemeVariant::Collapsed};
      else
        throw SegmenterFailure("external scores: unsupported class count " +
                               std::to_string(scores.classes));
    }
    return std::make_unique<ExternalScoreSegmenter>(std::move(scores), scheme,
                                                    opts.external_channels);
  }
  throw ConfigError("unknown segmenter \"" + name + "\"");
}

}  // namespace printmap
