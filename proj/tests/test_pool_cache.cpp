#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nflsim/pool_cache.hpp"
#include "support.hpp"

using namespace nflsim;
using namespace testing_support;

namespace {

std::vector<NextScoreSample> some_samples() { return {{25, 7}, {40, -3}, {75, 0}, {5, -2}}; }

}  // namespace

TEST(PoolCache, RoundTrip) {
  std::mt19937_64 g(70);
  auto plays = random_plays(g, 3000);
  plays[0].team = "LAC";
  plays[1].season = 1999;
  auto bytes = encode_pool_cache(plays, some_samples());
  auto back = decode_pool_cache(bytes);
  ASSERT_EQ(back.plays.size(), plays.size());
  for (std::size_t i = 0; i < plays.size(); ++i) ASSERT_EQ(back.plays[i], plays[i]) << i;
  ASSERT_EQ(back.next_score.size(), 4u);
  EXPECT_EQ(back.next_score[1].yards_from_own_goal, 40);
  EXPECT_DOUBLE_EQ(back.next_score[1].value, -3);
}

TEST(PoolCache, EncodingIsDeterministic) {
  std::mt19937_64 a(71), b(71);
  EXPECT_EQ(encode_pool_cache(random_plays(a, 500)), encode_pool_cache(random_plays(b, 500)));
}

TEST(PoolCache, FileRoundTrip) {
  auto path = std::filesystem::temp_directory_path() / "nflsim_cache_test" / "pool.bin";
  std::mt19937_64 g(72);
  auto plays = random_plays(g, 200);
  write_pool_cache(path, plays, some_samples());
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  auto back = read_pool_cache(path);
  EXPECT_EQ(back.plays, plays);
  std::filesystem::remove_all(path.parent_path());
  EXPECT_THROW(read_pool_cache(path), IoError);
}

TEST(PoolCache, DetectsCorruption) {
  std::mt19937_64 g(73);
  auto bytes = encode_pool_cache(random_plays(g, 100));
  for (std::size_t pos : {std::size_t{12}, bytes.size() / 2, bytes.size() - 9}) {
    auto bad = bytes;
    bad[pos] ^= 0x40;
    EXPECT_THROW(decode_pool_cache(bad), IoError) << pos;
  }
}

TEST(PoolCache, RejectsBadMagicAndTruncation) {
  std::mt19937_64 g(74);
  auto bytes = encode_pool_cache(random_plays(g, 10));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_pool_cache(bad), IoError);
  std::vector<std::uint8_t> tiny(bytes.begin(), bytes.begin() + 10);
  EXPECT_THROW(decode_pool_cache(tiny), IoError);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(decode_pool_cache(cut), IoError);
}

TEST(PoolCache, DecodedPlaysBuildAPool) {
  std::mt19937_64 g(75);
  auto plays = random_plays(g, 400);
  PlayPool pool = build_index(decode_pool_cache(encode_pool_cache(plays)).plays);
  EXPECT_EQ(pool.size(), 400u);
}
