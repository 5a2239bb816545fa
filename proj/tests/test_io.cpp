#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "zoll/trajectory_io.hpp"

namespace {

using namespace zoll;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("zoll_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ZonalField random_field(std::uint64_t seed, std::int64_t K) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ZonalField f(K);
  for (auto& c : f.coeffs) {
    const double re = g(rng);
    c = cplx(re, g(rng));
  }
  return f;
}

void expect_bitwise_equal(const ZonalField& a, const ZonalField& b) {
  ASSERT_EQ(a.cutoff(), b.cutoff());
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
    EXPECT_EQ(a.coeffs[k], b.coeffs[k]) << "k=" << k;
  }
}

TEST(FieldIo, BinaryAndTextRoundTrip) {
  const auto dir = scratch("field");
  const ZonalField f = random_field(3, 17);
  save_field((dir / "f.zf").string(), f, true);
  save_field((dir / "f.txt").string(), f, false);
  expect_bitwise_equal(load_field((dir / "f.zf").string()), f);
  expect_bitwise_equal(load_field((dir / "f.txt").string()), f);
}

TEST(FieldIo, RejectsMalformedText) {
  std::istringstream skipped("0 1 0\n2 1 0\n");
  EXPECT_THROW(read_text(skipped), std::runtime_error);
  std::istringstream short_line("0 1\n");
  EXPECT_THROW(read_text(short_line), std::runtime_error);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_text(empty), std::runtime_error);
}

TEST(FieldIo, RejectsTruncatedBinary) {
  std::ostringstream os;
  write_binary(os, random_field(1, 5));
  const std::string full = os.str();
  std::istringstream cut(full.substr(0, full.size() - 3));
  EXPECT_THROW(read_binary(cut), std::runtime_error);
}

SolverConfig small_config() {
  SolverConfig cfg;
  cfg.K = 16;
  cfg.dt = 1e-2;
  cfg.T = 0.2;
  cfg.store_every = 3;
  return cfg;
}

TEST(TrajectoryIo, RoundTripIsExact) {
  const auto dir = scratch("traj");
  const SolverConfig cfg = small_config();
  const Trajectory tr = evolve(cfg, make_initial_data(cfg.K, 0.1, 5));
  save_trajectory(dir / "run", tr);
  ASSERT_TRUE(fs::exists(dir / "run.ztr"));
  ASSERT_TRUE(fs::exists(dir / "run.json"));
  const Trajectory back = load_trajectory(dir / "run");
  EXPECT_EQ(back.config.K, cfg.K);
  EXPECT_EQ(back.config.dt, cfg.dt);
  EXPECT_EQ(back.config.store_every, cfg.store_every);
  EXPECT_EQ(back.times, tr.times);
  EXPECT_EQ(back.mass, tr.mass);
  EXPECT_EQ(back.energy, tr.energy);
  EXPECT_EQ(back.truncation_loss, tr.truncation_loss);
  ASSERT_EQ(back.states.size(), tr.states.size());
  for (std::size_t i = 0; i < tr.states.size(); ++i) expect_bitwise_equal(back.states[i], tr.states[i]);
}

TEST(TrajectoryIo, StoresEveryKthStepPlusTheLast) {
  const SolverConfig cfg = small_config();
  const Trajectory tr = evolve(cfg, make_initial_data(cfg.K, 0.1, 5));
  EXPECT_EQ(tr.mass.size(), 21u);
  // steps 0,3,...,18 and 20
  ASSERT_EQ(tr.times.size(), 8u);
  EXPECT_EQ(frame_step(tr, 7), 20);
  EXPECT_EQ(frame_step(tr, 6), 18);
}

TEST(TrajectoryIo, ResumeFromAnyFrameMatchesUninterruptedRun) {
  const auto dir = scratch("resume");
  const SolverConfig cfg = small_config();
  const Trajectory full = evolve(cfg, make_initial_data(cfg.K, 0.1, 9));
  save_trajectory(dir / "run", full);
  const Trajectory stored = load_trajectory(dir / "run");
  for (std::size_t frame : {std::size_t{0}, std::size_t{2}, std::size_t{5}, full.times.size() - 1}) {
    const Trajectory r = resume(stored, frame);
    EXPECT_EQ(r.times, full.times) << "frame " << frame;
    EXPECT_EQ(r.mass, full.mass) << "frame " << frame;
    EXPECT_EQ(r.energy, full.energy) << "frame " << frame;
    EXPECT_EQ(r.truncation_loss, full.truncation_loss) << "frame " << frame;
    ASSERT_EQ(r.states.size(), full.states.size());
    for (std::size_t i = 0; i < r.states.size(); ++i) expect_bitwise_equal(r.states[i], full.states[i]);
  }
}

TEST(TrajectoryIo, ResumeExtendsTheHorizon) {
  SolverConfig cfg = small_config();
  const ZonalField phi = make_initial_data(cfg.K, 0.1, 2);
  const Trajectory part = evolve(cfg, phi);
  SolverConfig longer = cfg;
  longer.T = 0.35;
  const Trajectory full = evolve(longer, phi);
  const Trajectory r = resume(part, part.times.size() - 1, 0.35);
  EXPECT_EQ(r.mass, full.mass);
  expect_bitwise_equal(r.states.back(), full.states.back());
  EXPECT_THROW(resume(part, 99), std::out_of_range);
}

TEST(TrajectoryIo, DetectsInconsistentFiles) {
  const auto dir = scratch("bad");
  const SolverConfig cfg = small_config();
  const Trajectory tr = evolve(cfg, make_initial_data(cfg.K, 0.1, 5));
  save_trajectory(dir / "run", tr);
  {
    std::fstream f(dir / "run.ztr", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  EXPECT_THROW(load_trajectory(dir / "run"), std::runtime_error);
  fs::resize_file(dir / "run.ztr", 40);
  EXPECT_THROW(load_trajectory(dir / "run"), std::runtime_error);
  EXPECT_THROW(load_trajectory(dir / "missing"), std::runtime_error);
}

TEST(PathIo, RoundTripWithInfiniteTail) {
  const auto dir = scratch("path");
  StepPath p;
  p.times = {-1.0, 0.25, 2.0, INFINITY};
  p.values = {random_field(1, 6), random_field(2, 6), random_field(3, 6)};
  p.evolving = Flow::modified;
  save_path(dir / "p", p);
  const StepPath q = load_path(dir / "p");
  EXPECT_EQ(q.times, p.times);
  ASSERT_TRUE(q.evolving.has_value());
  EXPECT_EQ(*q.evolving, Flow::modified);
  ASSERT_EQ(q.values.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) expect_bitwise_equal(q.values[i], p.values[i]);
  EXPECT_DOUBLE_EQ(vp_norm(q, 2.0), vp_norm(p, 2.0));
}

TEST(PathIo, StaticPathAndMissingPiece) {
  const auto dir = scratch("path2");
  const StepPath p = single_step(0.0, 1.0, random_field(4, 3));
  save_path(dir / "s", p);
  const StepPath q = load_path(dir / "s");
  EXPECT_FALSE(q.evolving.has_value());
  fs::remove(dir / "s.piece0000.zf");
  EXPECT_THROW(load_path(dir / "s"), std::runtime_error);
}

}  // namespace
