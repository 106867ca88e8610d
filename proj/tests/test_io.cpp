#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ast/eval.hpp"
#include "ast/io.hpp"
#include "ast/synth.hpp"

namespace ast {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ast_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write_raw(const std::string& name, const std::string& bytes) {
    std::ofstream(dir_ / name, std::ios::binary) << bytes;
  }

  fs::path dir_;
};

std::string pgm_bytes(const std::string& header, const std::string& pixels) { return header + pixels; }

TEST_F(TempDir, LoadsZeroFrame) {
  write_raw("a.pgm", pgm_bytes("P5\n4 4\n255\n", std::string(16, '\0')));
  const auto frames = load_frames(dir_);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].width, 4);
  EXPECT_EQ(frames[0].height, 4);
  EXPECT_EQ(frames[0].pixels, std::vector<std::uint8_t>(16, 0));
  EXPECT_EQ(frames[0].index, 1u);
}

TEST_F(TempDir, LexicographicOrder) {
  for (const auto& [name, v] : std::vector<std::pair<std::string, char>>{{"f002.pgm", 2}, {"f010.pgm", 10}, {"f001.pgm", 1}}) {
    write_raw(name, pgm_bytes("P5 1 1 255\n", std::string(1, v)));
  }
  write_raw("notes.txt", "ignored");
  const auto files = list_frame_files(dir_);
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "f001.pgm");
  EXPECT_EQ(files[1].filename(), "f002.pgm");
  EXPECT_EQ(files[2].filename(), "f010.pgm");
  const auto frames = load_frames(dir_);
  EXPECT_EQ(frames[0].pixels[0], 1);
  EXPECT_EQ(frames[1].pixels[0], 2);
  EXPECT_EQ(frames[2].pixels[0], 10);
  EXPECT_EQ(frames[2].index, 3u);
}

TEST(Pgm, CommentLineParsesIdentically) {
  const std::string px = "\x01\x02\x03\x04\x05\x06";
  std::istringstream plain(pgm_bytes("P5\n3 2\n255\n", px));
  std::istringstream commented(pgm_bytes("P5\n# made by hand\n3 2 # trailing\n255\n", px));
  const Frame a = read_pgm(plain);
  const Frame b = read_pgm(commented);
  EXPECT_EQ(a.width, b.width);
  EXPECT_EQ(a.height, b.height);
  EXPECT_EQ(a.pixels, b.pixels);
}

TEST(Pgm, RejectsUnsupportedFormats) {
  std::istringstream p2("P2\n2 2\n255\n0 0 0 0\n");
  EXPECT_THROW(read_pgm(p2, "p2.pgm"), FormatError);
  std::istringstream wide(pgm_bytes("P5\n2 2\n65535\n", std::string(8, '\0')));
  EXPECT_THROW(read_pgm(wide), FormatError);
  std::istringstream short_data(pgm_bytes("P5\n2 2\n255\n", std::string(3, '\0')));
  EXPECT_THROW(read_pgm(short_data), FormatError);
  try {
    std::istringstream again("P6\n1 1\n255\nabc");
    read_pgm(again, "colour.ppm");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("colour.ppm"), std::string::npos);
  }
}

TEST_F(TempDir, SizeMismatchAcrossFrames) {
  write_raw("a.pgm", pgm_bytes("P5 2 2 255\n", std::string(4, '\0')));
  write_raw("b.pgm", pgm_bytes("P5 3 2 255\n", std::string(6, '\0')));
  EXPECT_THROW(load_frames(dir_), FormatError);
}

TEST_F(TempDir, RoundTripIsContentExact) {
  SynthSpec spec;
  spec.length = 6;
  spec.frame_w = 64;
  spec.frame_h = 48;
  spec.object_w = spec.object_h = 10;
  spec.start_x = 5;
  spec.start_y = 5;
  spec.end_x = 40;
  spec.end_y = 30;
  spec.noise_std = 6;
  const SynthSequence seq = write_synthetic(spec, dir_);
  const auto frames = load_frames(dir_);
  ASSERT_EQ(frames.size(), seq.frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) EXPECT_EQ(frames[i].pixels, seq.frames[i].pixels);
  EXPECT_EQ(load_ground_truth(dir_ / kGroundTruthFile), seq.truth);
}

TEST(Records, EmptyListIsHeaderOnly) {
  std::ostringstream out;
  save_records(out, std::vector<TrackRecord>{});
  EXPECT_EQ(out.str(), "frame,x,y,s,w,h,score\n");
  std::istringstream in(out.str());
  EXPECT_TRUE(load_records(in).empty());
}

TEST(Records, RoundTrip) {
  const std::vector<TrackRecord> recs = {{1, 10.5, 20.25, 1.0, 40, 40, 0.0}, {2, -3.125, 7.0, 1.25, 50, 50, 0.875}};
  std::ostringstream out;
  save_records(out, recs);
  EXPECT_EQ(out.str(),
            "frame,x,y,s,w,h,score\n"
            "1,10.500000,20.250000,1.000000,40,40,0.000000\n"
            "2,-3.125000,7.000000,1.250000,50,50,0.875000\n");
  std::istringstream in(out.str());
  EXPECT_EQ(load_records(in), recs);
}

TEST(Records, MalformedRowReportsLine) {
  std::istringstream in("frame,x,y,s,w,h,score\n1,0,0,1,4,4,0\n2,0,zero,1,4,4,0\n");
  try {
    load_records(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream missing("1,0,0,1,4,4,0\n");
  EXPECT_THROW(load_records(missing), ParseError);
}

TEST(GroundTruth, ParseAndErrors) {
  std::istringstream in("1,2,3,4\n\n5,6,7,8\n");
  const auto boxes = load_ground_truth(in);
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[1], (GroundTruthBox{5, 6, 7, 8}));
  std::istringstream bad("1,2,3,4\n1,2,0,4\n");
  try {
    load_ground_truth(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(MatrixText, RoundTripBitExact) {
  Matrix m = Matrix::from_rows({{1.0 / 3.0, -2.5e-300}, {6.02e23, 0.1}});
  std::ostringstream out;
  write_matrix(out, m);
  std::istringstream in(out.str());
  EXPECT_EQ(read_matrix(in), m);
}

TEST_F(TempDir, BagDump) {
  ModelBag bag(3, 1);
  bag.maybe_update(AffineSubspace({1, 2, 3}, LinearSubspace(Matrix::from_rows({{1}, {0}, {0}}))), 1);
  bag.maybe_update(AffineSubspace({4, 5, 6}, LinearSubspace(3)), 2);
  dump_bag(dir_ / "bag", bag);
  std::ifstream in0(dir_ / "bag" / "model_00.txt");
  const AffineSubspace m0 = read_model(in0);
  EXPECT_EQ(m0.origin(), Vector({1, 2, 3}));
  EXPECT_EQ(m0.rank(), 1u);
  std::ifstream in1(dir_ / "bag" / "model_01.txt");
  EXPECT_EQ(read_model(in1).rank(), 0u);
}

TEST(DrawBox, OutlineOnly) {
  const Frame f(10, 10, 0);
  const Frame g = draw_box(f, TrackRecord{1, 2, 3, 1.0, 4, 5, 0});
  EXPECT_EQ(g.at(2, 3), 255);
  EXPECT_EQ(g.at(5, 7), 255);
  EXPECT_EQ(g.at(3, 4), 0);
  EXPECT_EQ(g.at(6, 3), 0);
}

TrackRecord rec(double x, double y, int w = 10, int h = 10) { return TrackRecord{1, x, y, 1.0, w, h, 0.0}; }

TEST(Evaluate, IdenticalIsPerfect) {
  const std::vector<GroundTruthBox> truth = {{1, 2, 10, 10}, {3, 4, 10, 10}};
  const auto m = evaluate(records_from_truth(truth), truth);
  EXPECT_EQ(m.mean_cle, 0.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.frames_evaluated, 2u);
}

TEST(Evaluate, ThreeFourFive) {
  const std::vector<GroundTruthBox> truth = {{0, 0, 10, 10}, {20, 30, 10, 10}, {7, 1, 10, 10}};
  std::vector<TrackRecord> recs;
  for (const auto& b : truth) recs.push_back(rec(b.x + 3, b.y + 4));
  const auto m = evaluate(recs, truth, 20.0);
  EXPECT_EQ(m.mean_cle, 5.0);
  EXPECT_EQ(m.precision, 1.0);
}

TEST(Evaluate, BoundaryCountsAsHit) {
  const std::vector<GroundTruthBox> truth = {{0, 0, 10, 10}, {0, 0, 10, 10}};
  const std::vector<TrackRecord> recs = {rec(0, 0), rec(0, 40)};
  const auto m = evaluate(recs, truth, 20.0);
  EXPECT_EQ(m.mean_cle, 20.0);
  EXPECT_EQ(m.precision, 0.5);
  const auto exact = evaluate(std::vector<TrackRecord>{rec(0, 20)}, std::vector<GroundTruthBox>{{0, 0, 10, 10}}, 20.0);
  EXPECT_EQ(exact.precision, 1.0);
}

TEST(Evaluate, CountMismatchAndSymmetry) {
  const std::vector<GroundTruthBox> truth = {{0, 0, 10, 10}};
  EXPECT_THROW(evaluate(std::vector<TrackRecord>{}, truth), InvalidInput);
  const std::vector<GroundTruthBox> a = {{0, 0, 10, 10}, {5, 9, 12, 8}};
  const std::vector<GroundTruthBox> b = {{3, 1, 10, 10}, {-2, 4, 6, 8}};
  EXPECT_EQ(center_location_errors(records_from_truth(a), b), center_location_errors(records_from_truth(b), a));
}

TEST(Synth, ConstantObjectWithoutNoiseOrDrift) {
  SynthSpec spec;
  spec.length = 12;
  const SynthSequence seq = generate_synthetic(spec);
  ASSERT_EQ(seq.frames.size(), 12u);
  const auto& b0 = seq.truth[0];
  for (std::size_t t = 1; t < seq.frames.size(); ++t) {
    const auto& b = seq.truth[t];
    for (int r = 0; r < b.h; ++r)
      for (int c = 0; c < b.w; ++c) ASSERT_EQ(seq.frames[t].at(b.x + c, b.y + r), seq.frames[0].at(b0.x + c, b0.y + r));
  }
}

TEST(Synth, DeterministicAndSeedSensitive) {
  SynthSpec spec;
  spec.length = 5;
  spec.noise_std = 4;
  spec.illumination = 0.15;
  spec.occluder = true;
  const SynthSequence a = generate_synthetic(spec);
  const SynthSequence b = generate_synthetic(spec);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(a.frames[t].pixels, b.frames[t].pixels);
  spec.seed = 2;
  EXPECT_NE(generate_synthetic(spec).frames[0].pixels, a.frames[0].pixels);
}

TEST(Synth, TrajectoryEndpointsAndSelfEvaluation) {
  SynthSpec spec;
  spec.length = 120;
  const auto truth = synth_trajectory(spec);
  EXPECT_EQ(truth.front(), (GroundTruthBox{60, 80, 40, 40}));
  EXPECT_EQ(truth.back(), (GroundTruthBox{220, 120, 40, 40}));
  EXPECT_EQ(evaluate(records_from_truth(truth), truth).mean_cle, 0.0);
  spec.trajectory = Trajectory::sinusoidal;
  const auto wave = synth_trajectory(spec);
  EXPECT_EQ(wave.front(), truth.front());
  EXPECT_NE(wave[30], truth[30]);
}

TEST(Synth, OccluderCoversLowerHalf) {
  SynthSpec spec;
  spec.length = 40;
  spec.occluder = true;
  const SynthSequence seq = generate_synthetic(spec);
  const auto [first, last] = occluder_span(40);
  EXPECT_EQ(last - first + 1, kOccluderFrames);
  const auto& b = seq.truth[first - 1];
  const Frame& f = seq.frames[first - 1];
  for (int c = 0; c < b.w; ++c) EXPECT_EQ(f.at(b.x + c, b.y + b.h - 1), kOccluderGray);
  const Frame& after = seq.frames[last];
  const auto& ba = seq.truth[last];
  int gray = 0;
  for (int c = 0; c < ba.w; ++c) gray += after.at(ba.x + c, ba.y + ba.h - 1) == kOccluderGray;
  EXPECT_LT(gray, ba.w);
}

TEST(Synth, InfeasibleTrajectory) {
  SynthSpec spec;
  spec.end_x = 300;
  EXPECT_THROW(generate_synthetic(spec), InvalidInput);
  spec = SynthSpec{};
  spec.length = 0;
  EXPECT_THROW(generate_synthetic(spec), InvalidInput);
}

}  // namespace
}  // namespace ast
