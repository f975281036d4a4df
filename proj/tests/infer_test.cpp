#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "printmap/imgops.hpp"
#include "printmap/infer.hpp"
#include "printmap/rng.hpp"
#include "printmap/tensor_io.hpp"
#include "support/fixtures.hpp"

using namespace printmap;
using namespace testsupport;

namespace {

ChannelStack const_stack(int w, int h, int channels, double v) {
  ChannelStack s(w, h, channels, v);
  return s;
}

// 6-channel FR stack from two images: reference channels first.
ChannelStack fr_stack(const ImageRGB& ref, const ImageRGB& def) {
  return concat_channels(as_stack(ref), as_stack(def));
}

// Deliberately broken segmenter: returns 1x1 scores regardless of input.
class ShrunkSegmenter : public Segmenter {
 public:
  int input_channels() const override { return 3; }
  ClassScheme scheme() const override { return ClassScheme{SchemeVariant::Collapsed}; }
  ScoreMap segment(const ChannelStack&, const SegmentContext&) const override {
    return ScoreMap(1, 1, 3, 0.0);
  }
};

}  // namespace

TEST_CASE("argmax_labels breaks ties toward the lowest class") {
  ScoreMap sm(3, 1, 3, 0.0);
  sm.at(0, 0, 0) = 0.5;
  sm.at(0, 0, 1) = 0.5;  // tie 0 vs 1 -> 0
  sm.at(1, 0, 1) = 0.2;
  sm.at(1, 0, 2) = 0.7;  // clear winner 2
  // pixel (2,0): all zero -> 0
  const LabelMask m = argmax_labels(sm, ClassScheme{SchemeVariant::Collapsed});
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(1, 0) == 2);
  CHECK(m.at(2, 0) == 0);

  CHECK_THROWS_AS(argmax_labels(sm, ClassScheme{SchemeVariant::Multi}), DimMismatch);
}

TEST_CASE("infer_resized is exact when the stack already has the working size") {
  Rng rng(1);
  const LabelMask gt = random_mask(64, 36, ClassScheme{SchemeVariant::Multi}, rng);
  const OracleSegmenter seg(gt);
  const ChannelStack stack = const_stack(64, 36, 3, 0.5);
  const LabelMask out = infer_resized(stack, seg, 64, 36);
  CHECK(masks_equal(out, gt));
}

TEST_CASE("infer_resized maps labels through the working resolution") {
  Rng rng(2);
  const LabelMask gt = random_mask(100, 80, ClassScheme{SchemeVariant::Collapsed}, rng);
  const OracleSegmenter seg(gt);
  const ChannelStack stack = const_stack(100, 80, 3, 0.4);
  const LabelMask out = infer_resized(stack, seg, 40, 30);
  // The oracle sees a 40x30 canonical image, so the pipeline is exactly a
  // nearest round trip of the ground truth.
  const LabelMask expect = resize_nearest(resize_nearest(gt, 40, 30), 100, 80);
  CHECK(masks_equal(out, expect));

  CHECK_THROWS_AS(infer_resized(stack, seg, 0, 30), DimMismatch);
}

TEST_CASE("infer_patches stitches oracle tiles back into the ground truth") {
  Rng rng(3);
  for (const auto& [w, h, patch] : std::vector<std::array<int, 3>>{
           {130, 90, 64}, {128, 64, 64}, {60, 45, 513}, {64, 64, 16}}) {
    const LabelMask gt = random_mask(w, h, ClassScheme{SchemeVariant::Multi}, rng);
    const OracleSegmenter seg(gt);
    const ChannelStack stack = const_stack(w, h, 3, 0.7);
    const LabelMask out = infer_patches(stack, seg, patch);
    CHECK(masks_equal(out, gt));
  }
  const ChannelStack stack = const_stack(20, 20, 3, 0.7);
  Rng rng2(4);
  const OracleSegmenter seg(random_mask(20, 20, ClassScheme{SchemeVariant::Multi}, rng2));
  CHECK_THROWS_AS(infer_patches(stack, seg, 0), DimMismatch);
}

TEST_CASE("strategies validate channel counts and score shapes") {
  const ChannelStack three = const_stack(32, 32, 3, 0.5);
  const ChannelStack six = const_stack(32, 32, 6, 0.5);
  const FrDiffSegmenter fr{ClassScheme{SchemeVariant::Multi}};
  CHECK_THROWS_AS(infer_resized(three, fr, 32, 32), ChannelCountMismatch);
  CHECK_THROWS_AS(infer_patches(three, fr, 16), ChannelCountMismatch);
  const NrProjectionSegmenter nr{ClassScheme{SchemeVariant::Multi}};
  CHECK_THROWS_AS(infer_resized(six, nr, 32, 32), ChannelCountMismatch);

  const ShrunkSegmenter bad;
  CHECK_THROWS_AS(infer_resized(three, bad, 32, 32), SegmenterFailure);
  CHECK_THROWS_AS(infer_patches(three, bad, 16), SegmenterFailure);
}

TEST_CASE("gaussian_blur spreads an impulse by the separable kernel") {
  const double sigma = 0.5;
  const int radius = 2;  // ceil(3 * 0.5) rounds up to 2
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;

  GrayField in(21, 15);
  in.at(10, 7) = 1.0;
  const GrayField out = gaussian_blur(in, sigma);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 21; ++x) {
      const int dx = x - 10, dy = y - 7;
      const double want = (std::abs(dx) <= radius && std::abs(dy) <= radius)
                              ? k[dx + radius] * k[dy + radius]
                              : 0.0;
      CHECK(out.at(x, y) == doctest::Approx(want).epsilon(1e-15));
    }
  // Mass is conserved away from the borders.
  double mass = 0.0;
  for (const double v : out.values) mass += v;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // Corner impulse: clamped taps pile onto the replicated edge sample.
  GrayField corner(9, 9);
  corner.at(0, 0) = 1.0;
  const GrayField cblur = gaussian_blur(corner, sigma);
  const double edge = k[0] + k[1] + k[2];  // taps -2, -1, 0 all clamp to 0
  CHECK(cblur.at(0, 0) == doctest::Approx(edge * edge).epsilon(1e-13));
  // At x = 1 the taps -2 and -1 clamp onto the corner sample.
  CHECK(cblur.at(1, 0) == doctest::Approx((k[0] + k[1]) * edge).epsilon(1e-13));

  // Sigma 0 is a copy, and uniform fields are fixed points.
  const GrayField same = gaussian_blur(in, 0.0);
  CHECK(same.values == in.values);
  GrayField uni(12, 8);
  for (double& v : uni.values) v = 0.37;
  const GrayField ublur = gaussian_blur(uni, 1.0);
  for (const double v : ublur.values) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("binary_close3 is extensive, keeps singletons, and bridges gaps") {
  Rng rng(5);
  const int w = 23, h = 17;
  std::vector<std::uint8_t> field(static_cast<std::size_t>(w) * h);
  for (auto& v : field) v = rng.bernoulli(0.3) ? 1 : 0;
  const auto closed = binary_close3(field, w, h);
  for (std::size_t p = 0; p < field.size(); ++p)
    if (field[p]) CHECK(closed[p] == 1);

  // An isolated pixel comes back unchanged.
  std::vector<std::uint8_t> dot(11 * 11, 0);
  dot[5 * 11 + 5] = 1;
  CHECK(binary_close3(dot, 11, 11) == dot);

  // A one-pixel gap inside a line is filled.
  std::vector<std::uint8_t> gap(11 * 11, 0);
  for (int x = 2; x <= 8; ++x) gap[5 * 11 + x] = 1;
  gap[5 * 11 + 5] = 0;
  const auto bridged = binary_close3(gap, 11, 11);
  CHECK(bridged[5 * 11 + 5] == 1);
  for (int x = 2; x <= 8; ++x) CHECK(bridged[5 * 11 + x] == 1);

  // Border-touching rows keep their border pixels (erosion treats the
  // outside as foreground).
  std::vector<std::uint8_t> row(9 * 7, 0);
  for (int x = 0; x < 9; ++x) row[x] = 1;  // y = 0
  const auto kept = binary_close3(row, 9, 7);
  for (int x = 0; x < 9; ++x) CHECK(kept[x] == 1);
  for (int x = 0; x < 9; ++x) CHECK(kept[9 + x] == 0);
}

TEST_CASE("connected_components8 joins diagonals and labels background -1") {
  const int w = 7, h = 5;
  std::vector<std::uint8_t> in(static_cast<std::size_t>(w) * h, 0);
  in[1 * w + 1] = 1;
  in[2 * w + 2] = 1;  // diagonal neighbor of (1,1)
  in[4 * w + 5] = 1;  // far away
  const Components comps = connected_components8(in, w, h);
  CHECK(comps.count == 2);
  CHECK(comps.label[1 * w + 1] == comps.label[2 * w + 2]);
  CHECK(comps.label[4 * w + 5] != comps.label[1 * w + 1]);
  CHECK(comps.label[0] == -1);
  int labeled = 0;
  for (const int v : comps.label)
    if (v >= 0) ++labeled;
  CHECK(labeled == 3);
}

TEST_CASE("fr_diff flags a thin dark bar as a streak with exact bounds") {
  const int w = 200, h = 100;
  ImageRGB ref(w, h, 0.7);
  ImageRGB def = ref;
  for (int y = 40; y <= 45; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) def.at(x, y, c) = 0.4;

  const ClassScheme multi{SchemeVariant::Multi};
  const ScoreMap scores = fr_diff_scores(fr_stack(ref, def), FrDiffParams{}, multi);
  const LabelMask mask = argmax_labels(scores, multi);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((y >= 40 && y <= 45) ? 1 : 0));

  // Background score is tau where the images agree, zero inside the defect.
  CHECK(scores.at(0, 0, 0) == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(scores.at(50, 42, 0) == 0.0);
  CHECK(scores.at(50, 42, 1) == 1.0);

  // The segmenter wrapper reproduces the free function.
  const FrDiffSegmenter seg(multi);
  const ScoreMap via = seg.segment(fr_stack(ref, def), SegmentContext{Rect{0, 0, w, h}, w, h});
  CHECK(via.scores == scores.scores);
}

TEST_CASE("fr_diff attributes wide bands to the shifted ink") {
  const int w = 200, h = 100;
  ImageRGB ref(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      ref.at(x, y, 0) = 0.8;
      ref.at(x, y, 1) = 0.7;
      ref.at(x, y, 2) = 0.6;
    }
  ImageRGB def = ref;
  // Yellow ink +0.2 over rows 30..79: b channel 0.6 -> 0.44.
  for (int y = 30; y <= 79; ++y)
    for (int x = 0; x < w; ++x) def.at(x, y, 2) = 0.44;

  const ClassScheme multi{SchemeVariant::Multi};
  const LabelMask mask = argmax_labels(fr_diff_scores(fr_stack(ref, def), FrDiffParams{}, multi), multi);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((y >= 30 && y <= 79) ? 4 : 0));

  const ClassScheme collapsed{SchemeVariant::Collapsed};
  const LabelMask cmask =
      argmax_labels(fr_diff_scores(fr_stack(ref, def), FrDiffParams{}, collapsed), collapsed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(cmask.at(x, y) == ((y >= 30 && y <= 79) ? 2 : 0));
}

TEST_CASE("fr_diff drops small components and passes clean pairs") {
  const int w = 120, h = 90;
  ImageRGB ref(w, h, 0.7);
  ImageRGB def = ref;
  for (int y = 20; y < 25; ++y)
    for (int x = 40; x < 45; ++x)
      for (int c = 0; c < 3; ++c) def.at(x, y, c) = 0.4;  // 25 px < min_area

  const ClassScheme multi{SchemeVariant::Multi};
  const LabelMask mask = argmax_labels(fr_diff_scores(fr_stack(ref, def), FrDiffParams{}, multi), multi);
  for (const auto v : mask.labels) CHECK(v == 0);

  const LabelMask clean = argmax_labels(fr_diff_scores(fr_stack(ref, ref), FrDiffParams{}, multi), multi);
  for (const auto v : clean.labels) CHECK(v == 0);

  CHECK_THROWS_AS(fr_diff_scores(const_stack(8, 8, 3, 0.5), FrDiffParams{}, multi),
                  ChannelCountMismatch);
}

TEST_CASE("nr projection keeps clean pages background") {
  const ClassScheme multi{SchemeVariant::Multi};
  const ScoreMap scores = nr_projection_scores(const_stack(120, 90, 3, 0.6), NrProjParams{}, multi);
  const LabelMask mask = argmax_labels(scores, multi);
  for (const auto v : mask.labels) CHECK(v == 0);
  CHECK(scores.at(0, 0, 0) == 1.0);

  CHECK_THROWS_AS(nr_projection_scores(const_stack(8, 8, 6, 0.5), NrProjParams{}, multi),
                  ChannelCountMismatch);
}

TEST_CASE("nr projection flags a single dark row as a streak") {
  const int w = 120, h = 90;
  ImageRGB img(w, h, 0.6);
  for (int x = 0; x < w; ++x)
    for (int c = 0; c < 3; ++c) img.at(x, 45, c) = 0.3;

  const ClassScheme multi{SchemeVariant::Multi};
  const LabelMask mask = argmax_labels(nr_projection_scores(as_stack(img), NrProjParams{}, multi), multi);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == (y == 45 ? 1 : 0));
}

TEST_CASE("nr projection flags thin dark columns as streaks") {
  const int w = 100, h = 80;
  ImageRGB img(w, h, 0.6);
  for (int y = 0; y < h; ++y)
    for (int x = 20; x <= 25; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 0.3;

  const ClassScheme multi{SchemeVariant::Multi};
  const LabelMask mask = argmax_labels(nr_projection_scores(as_stack(img), NrProjParams{}, multi), multi);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((x >= 20 && x <= 25) ? 1 : 0));
}

TEST_CASE("nr projection attributes wide runs to an ink") {
  const int w = 100, h = 120;
  NrProjParams params;
  params.window = 51;  // must exceed twice the band width to stay visible

  SUBCASE("blue-only deficit reads as yellow banding") {
    ImageRGB img(w, h, 0.6);
    for (int y = 40; y <= 59; ++y)
      for (int x = 0; x < w; ++x) img.at(x, y, 2) = 0.35;
    const ClassScheme multi{SchemeVariant::Multi};
    const LabelMask mask = argmax_labels(nr_projection_scores(as_stack(img), params, multi), multi);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((y >= 40 && y <= 59) ? 4 : 0));
  }

  SUBCASE("uniform darkening reads as key banding") {
    ImageRGB img(w, h, 0.6);
    for (int y = 40; y <= 59; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = 0.35;
    const ClassScheme multi{SchemeVariant::Multi};
    const LabelMask mask = argmax_labels(nr_projection_scores(as_stack(img), params, multi), multi);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((y >= 40 && y <= 59) ? 5 : 0));
  }

  SUBCASE("collapsed scheme folds every ink into one label") {
    ImageRGB img(w, h, 0.6);
    for (int y = 40; y <= 59; ++y)
      for (int x = 0; x < w; ++x) img.at(x, y, 2) = 0.35;
    const ClassScheme collapsed{SchemeVariant::Collapsed};
    const LabelMask mask =
        argmax_labels(nr_projection_scores(as_stack(img), params, collapsed), collapsed);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) CHECK(mask.at(x, y) == ((y >= 40 && y <= 59) ? 2 : 0));
  }
}

TEST_CASE("oracle segmenter slices and resizes the ground truth") {
  Rng rng(6);
  const ClassScheme multi{SchemeVariant::Multi};
  const LabelMask gt = random_mask(40, 30, multi, rng);
  const OracleSegmenter seg(gt);
  CHECK(seg.input_channels() == 3);
  CHECK(seg.scheme() == multi);

  // Full-frame context: one-hot of the gt labels.
  const ScoreMap full = seg.segment(const_stack(40, 30, 3, 0.1), SegmentContext{Rect{0, 0, 40, 30}, 40, 30});
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x)
      for (int c = 0; c < 6; ++c)
        CHECK(full.at(x, y, c) == (c == gt.at(x, y) ? 1.0 : 0.0));

  // Zeroed region rect defaults to the whole stack.
  const ScoreMap defaulted = seg.segment(const_stack(40, 30, 3, 0.1), SegmentContext{Rect{}, 40, 30});
  CHECK(defaulted.scores == full.scores);

  // Sub-region slicing.
  const Rect r{10, 5, 16, 12};
  const ScoreMap sub = seg.segment(const_stack(16, 12, 3, 0.1), SegmentContext{r, 40, 30});
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x)
      CHECK(sub.at(x, y, gt.at(10 + x, 5 + y)) == 1.0);

  // Canonical size different from the mask: nearest-resized ground truth.
  const ScoreMap shrunk = seg.segment(const_stack(20, 15, 3, 0.1), SegmentContext{Rect{0, 0, 20, 15}, 20, 15});
  const LabelMask small = resize_nearest(gt, 20, 15);
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 20; ++x) CHECK(shrunk.at(x, y, small.at(x, y)) == 1.0);

  CHECK_THROWS_AS(seg.segment(const_stack(16, 12, 3, 0.1), SegmentContext{Rect{0, 0, 40, 30}, 40, 30}),
                  SegmenterFailure);
  CHECK_THROWS_AS(seg.segment(const_stack(16, 12, 3, 0.1), SegmentContext{Rect{30, 20, 16, 12}, 40, 30}),
                  RectOutOfBounds);

  LabelMask bad = gt;
  bad.at(0, 0) = 7;
  const OracleSegmenter bad_seg(bad);
  CHECK_THROWS_AS(
      bad_seg.segment(const_stack(40, 30, 3, 0.1), SegmentContext{Rect{0, 0, 40, 30}, 40, 30}),
      LabelOutOfRange);
}

TEST_CASE("external score segmenter replays a canonical tensor") {
  Rng rng(7);
  ScoreMap scores(40, 30, 3);
  for (double& v : scores.scores) v = rng.next_double();

  CHECK_THROWS_AS(ExternalScoreSegmenter(scores, ClassScheme{SchemeVariant::Multi}, 3),
                  SegmenterFailure);

  const ExternalScoreSegmenter seg(scores, ClassScheme{SchemeVariant::Collapsed}, 3);
  const ScoreMap full = seg.segment(const_stack(40, 30, 3, 0.2), SegmentContext{Rect{0, 0, 40, 30}, 40, 30});
  CHECK(full.scores == scores.scores);

  const Rect r{5, 8, 12, 10};
  const ScoreMap sub = seg.segment(const_stack(12, 10, 3, 0.2), SegmentContext{r, 40, 30});
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x)
      for (int c = 0; c < 3; ++c) CHECK(sub.at(x, y, c) == scores.at(5 + x, 8 + y, c));

  CHECK_THROWS_AS(seg.segment(const_stack(50, 30, 3, 0.2), SegmentContext{Rect{0, 0, 50, 30}, 50, 30}),
                  SegmenterFailure);
}

TEST_CASE("make_segmenter wires names to implementations") {
  CHECK(segmenter_names() == std::vector<std::string>{"frdiff", "nrproj", "oracle", "external"});

  SegmenterOptions opts;
  opts.scheme = ClassScheme{SchemeVariant::Multi};
  CHECK(make_segmenter("frdiff", opts)->input_channels() == 6);
  CHECK(make_segmenter("nrproj", opts)->input_channels() == 3);
  CHECK_THROWS_AS(make_segmenter("oracle", opts), ConfigError);
  CHECK_THROWS_AS(make_segmenter("external", opts), ConfigError);
  CHECK_THROWS_AS(make_segmenter("cnn", opts), ConfigError);

  Rng rng(8);
  const LabelMask gt = random_mask(16, 12, ClassScheme{SchemeVariant::Collapsed}, rng);
  opts.gt = &gt;
  const auto oracle = make_segmenter("oracle", opts);
  CHECK(oracle->scheme() == gt.scheme);

  // External class-count inference: 6 -> multi, 3 -> collapsed, else error.
  TempDir tmp;
  ScoreMap six(10, 8, 6);
  for (double& v : six.scores) v = 0.25;
  write_score_map(tmp / "six.bin", six);
  ScoreMap three(10, 8, 3);
  write_score_map(tmp / "three.bin", three);
  ScoreMap four(10, 8, 4);
  write_score_map(tmp / "four.bin", four);

  SegmenterOptions eopts;
  eopts.scheme = ClassScheme{SchemeVariant::Collapsed};
  eopts.scores_path = tmp / "six.bin";
  CHECK(make_segmenter("external", eopts)->scheme().num_classes() == 6);
  eopts.scheme = ClassScheme{SchemeVariant::Multi};
  eopts.scores_path = tmp / "three.bin";
  CHECK(make_segmenter("external", eopts)->scheme().num_classes() == 3);
  eopts.scores_path = tmp / "four.bin";
  CHECK_THROWS_AS(make_segmenter("external", eopts), SegmenterFailure);
}

TEST_CASE("tensor files roundtrip exactly for float-representable data") {
  TempDir tmp;
  ChannelStack stack(9, 7, 4);
  for (std::size_t i = 0; i < stack.data.size(); ++i)
    stack.data[i] = static_cast<double>(i % 512) / 256.0;  // exact in float32
  write_tensor(tmp / "t.bin", stack);
  const ChannelStack back = read_tensor(tmp / "t.bin");
  CHECK(back.width == 9);
  CHECK(back.height == 7);
  CHECK(back.channels == 4);
  CHECK(back.data == stack.data);

  // Arbitrary doubles are preserved to float precision.
  Rng rng(9);
  ChannelStack noisy(5, 4, 2);
  for (double& v : noisy.data) v = rng.uniform(-10.0, 10.0);
  write_tensor(tmp / "n.bin", noisy);
  const ChannelStack nback = read_tensor(tmp / "n.bin");
  for (std::size_t i = 0; i < noisy.data.size(); ++i)
    CHECK(nback.data[i] == doctest::Approx(noisy.data[i]).epsilon(1e-6));

  ScoreMap sm(6, 3, 3);
  for (std::size_t i = 0; i < sm.scores.size(); ++i) sm.scores[i] = static_cast<double>(i) / 64.0;
  write_score_map(tmp / "s.bin", sm);
  const ScoreMap sback = read_score_map(tmp / "s.bin");
  CHECK(sback.width == 6);
  CHECK(sback.height == 3);
  CHECK(sback.classes == 3);
  CHECK(sback.scores == sm.scores);
}

TEST_CASE("tensor files reject corrupt headers and truncation") {
  TempDir tmp;
  ChannelStack stack(4, 3, 2, 0.5);
  write_tensor(tmp / "good.bin", stack);

  std::string bytes = read_text(tmp / "good.bin");
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  write_text(tmp / "magic.bin", bad_magic);
  CHECK_THROWS_AS(read_tensor(tmp / "magic.bin"), IoError);

  write_text(tmp / "short.bin", bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_tensor(tmp / "short.bin"), IoError);

  write_text(tmp / "header.bin", bytes.substr(0, 10));
  CHECK_THROWS_AS(read_tensor(tmp / "header.bin"), IoError);

  std::string zero_dim = bytes;
  for (int i = 8; i < 12; ++i) zero_dim[i] = '\0';  // width = 0
  write_text(tmp / "zdim.bin", zero_dim);
  CHECK_THROWS_AS(read_tensor(tmp / "zdim.bin"), IoError);

  CHECK_THROWS_AS(read_tensor(tmp / "absent.bin"), IoError);
}
