#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "gridcast/error.hpp"
#include "gridcast/tensor.hpp"
#include "gridcast/util/binary_io.hpp"
#include "gridcast/util/files.hpp"
#include "gridcast/util/random.hpp"
#include "gridcast/util/text.hpp"
#include "gridcast_test/synthetic.hpp"

namespace gridcast {
namespace {

TEST(Tensor, RowMajorIndexing) {
  Tensor t({2, 3, 4});
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k);
  EXPECT_EQ(t.at(1, 2, 3), 23.0);
  EXPECT_EQ(t.row(1)[0], 12.0);
  EXPECT_EQ(t.row(1).size(), 12u);
  const auto r = t.reshaped({6, 4});
  EXPECT_EQ(r.at(5, 3), 23.0);
  EXPECT_THROW(t.reshaped({5, 5}), ShapeError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_EQ(shape_string({2, 3}), "[2, 3]");
}

TEST(Tensor, FiniteCheck) {
  Tensor t({3}, 1.0);
  EXPECT_TRUE(t.all_finite());
  t[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(t.all_finite());
}

TEST(Rng, SeededStreamsRepeat) {
  util::Rng a(5), b(5), c(6);
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    if (k == 0) EXPECT_NE(x, c.next());
  }
}

TEST(Rng, UniformAndBelowRanges) {
  util::Rng rng(1);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const auto b = rng.below(7);
    EXPECT_LT(b, 7u);
    seen.insert(b);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, NormalMoments) {
  util::Rng rng(2);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(BinaryIo, RoundTripAndTruncation) {
  std::stringstream buffer;
  util::BinaryWriter w(buffer);
  w.bytes("MAGIC");
  w.u32(7);
  w.u64(1ULL << 40);
  w.i64(-5);
  w.f64(0.1);
  util::BinaryReader r(buffer);
  EXPECT_EQ(r.bytes(5, "magic"), "MAGIC");
  EXPECT_EQ(r.u32("a"), 7u);
  EXPECT_EQ(r.u64("b"), 1ULL << 40);
  EXPECT_EQ(r.i64("c"), -5);
  EXPECT_EQ(r.f64("d"), 0.1);
  try {
    r.u32("tail");
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("tail"), std::string::npos);
  }
}

TEST(Files, AtomicWriteLeavesNoTemporary) {
  testing::TempDir dir("files");
  const auto path = dir.path() / "x.txt";
  util::write_file_atomic(path, [](std::ostream& out) { out << "hello"; });
  EXPECT_EQ(util::read_file(path), "hello");
  util::write_file_atomic(path, [](std::ostream& out) { out << "bye"; });
  EXPECT_EQ(util::read_file(path), "bye");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(util::read_file(dir.path() / "missing"), Error);
}

TEST(Files, Fingerprint) {
  EXPECT_EQ(util::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(util::hex64(util::fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Text, DoublesRoundTrip) {
  util::Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(*util::parse_double(util::format_double(v)), v);
  }
  EXPECT_EQ(*util::parse_double("+1.5"), 1.5);
  EXPECT_EQ(*util::parse_double(util::trim_cell(" 2.5\r")), 2.5);
  EXPECT_FALSE(util::parse_double(" 1"));
  EXPECT_FALSE(util::parse_double(""));
  EXPECT_FALSE(util::parse_double("1.5x"));
  const auto cells = util::split_commas("a,\"b,c\",d");
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[1], "b,c");
}

}  // namespace
}  // namespace gridcast
