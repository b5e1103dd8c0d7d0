#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "nflsim/ep_model.hpp"
#include "nflsim/error.hpp"
#include "nflsim/play.hpp"
#include "nflsim/pool.hpp"

namespace nflsim {

// Columnar on-disk form of a prepped pool, plus the next-score samples needed
// to refit an EP model without the raw CSVs.
//
//   "NFLSPOOL" u32 version u32 n_plays u32 n_teams {u16 len, bytes}*
//   columns (n_plays each): kind u8, down u8, ytg u8, yardline u8,
//     gained i16, flags u16, net_kick i16, team u16, season u16, pass_yards i16
//   u32 n_samples {yardline u8, value i8}*
//   u64 FNV-1a of everything above
//
// All integers little-endian.
inline constexpr char kPoolCacheMagic[8] = {'N', 'F', 'L', 'S', 'P', 'O', 'O', 'L'};
inline constexpr std::uint32_t kPoolCacheVersion = 1;

struct PoolCache {
  std::vector<Play> plays;
  std::vector<NextScoreSample> next_score;
};

namespace detail {

inline std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

class ByteWriter {
 public:
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void bytes(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t n) : p_(data), end_(data + n) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(p_[i]) << (8 * i);
    p_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(p_), n);
    p_ += n;
    return s;
  }
  bool done() const { return p_ == end_; }

 private:
  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end_ - p_) < n) throw IoError("pool cache is truncated");
  }
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

enum : std::uint16_t {
  kFlagTouchdown = 1 << 0,
  kFlagTurnover = 1 << 1,
  kFlagFgPresent = 1 << 2,
  kFlagFgMade = 1 << 3,
  kFlagNetPresent = 1 << 4,
  kFlagPassAttempt = 1 << 5,
  kFlagComplete = 1 << 6,
  kFlagPassTd = 1 << 7,
  kFlagInterception = 1 << 8,
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_pool_cache(std::span<const Play> plays,
                                                    std::span<const NextScoreSample> next_score = {}) {
  std::map<std::string, std::uint16_t> team_ids;
  std::vector<const std::string*> teams;
  for (const Play& p : plays) {
    if (team_ids.emplace(p.team, static_cast<std::uint16_t>(teams.size())).second) teams.push_back(&p.team);
  }
  detail::ByteWriter w;
  w.bytes(kPoolCacheMagic, sizeof kPoolCacheMagic);
  w.put<std::uint32_t>(kPoolCacheVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(plays.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(teams.size()));
  for (const std::string* t : teams) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t->size()));
    w.bytes(t->data(), t->size());
  }
  for (const Play& p : plays) w.put<std::uint8_t>(static_cast<std::uint8_t>(p.kind));
  for (const Play& p : plays) w.put<std::uint8_t>(static_cast<std::uint8_t>(p.down));
  for (const Play& p : plays) w.put<std::uint8_t>(static_cast<std::uint8_t>(p.yards_to_go));
  for (const Play& p : plays) w.put<std::uint8_t>(static_cast<std::uint8_t>(p.yards_from_own_goal));
  for (const Play& p : plays) w.put<std::int16_t>(static_cast<std::int16_t>(p.yards_gained));
  for (const Play& p : plays) {
    std::uint16_t f = 0;
    if (p.is_touchdown) f |= detail::kFlagTouchdown;
    if (p.is_turnover) f |= detail::kFlagTurnover;
    if (p.field_goal_made) f |= detail::kFlagFgPresent;
    if (p.field_goal_made.value_or(false)) f |= detail::kFlagFgMade;
    if (p.net_kick_yards) f |= detail::kFlagNetPresent;
    if (p.passing.attempt) f |= detail::kFlagPassAttempt;
    if (p.passing.complete) f |= detail::kFlagComplete;
    if (p.passing.touchdown) f |= detail::kFlagPassTd;
    if (p.passing.interception) f |= detail::kFlagInterception;
    w.put<std::uint16_t>(f);
  }
  for (const Play& p : plays) w.put<std::int16_t>(static_cast<std::int16_t>(p.net_kick_yards.value_or(0)));
  for (const Play& p : plays) w.put<std::uint16_t>(team_ids.at(p.team));
  for (const Play& p : plays) w.put<std::uint16_t>(static_cast<std::uint16_t>(p.season));
  for (const Play& p : plays) w.put<std::int16_t>(static_cast<std::int16_t>(p.passing.yards));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(next_score.size()));
  for (const auto& s : next_score) {
    w.put<std::uint8_t>(static_cast<std::uint8_t>(s.yards_from_own_goal));
    w.put<std::int8_t>(static_cast<std::int8_t>(std::lround(s.value)));
  }
  auto& buf = w.buffer();
  const std::uint64_t sum = detail::fnv1a(buf.data(), buf.size());
  w.put<std::uint64_t>(sum);
  return std::move(buf);
}

inline PoolCache decode_pool_cache(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kPoolCacheMagic + 8 ||
      std::memcmp(bytes.data(), kPoolCacheMagic, sizeof kPoolCacheMagic) != 0) {
    throw IoError("not a pool cache file (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  detail::ByteReader tail(bytes.data() + body, 8);
  if (tail.get<std::uint64_t>() != detail::fnv1a(bytes.data(), body)) throw IoError("pool cache checksum mismatch");

  detail::ByteReader r(bytes.data() + sizeof kPoolCacheMagic, body - sizeof kPoolCacheMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kPoolCacheVersion) {
    throw IoError("unsupported pool cache version " + std::to_string(version));
  }
  const std::size_t n = r.get<std::uint32_t>();
  const std::size_t n_teams = r.get<std::uint32_t>();
  std::vector<std::string> teams(n_teams);
  for (auto& t : teams) t = r.str(r.get<std::uint16_t>());

  PoolCache out;
  out.plays.resize(n);
  auto& ps = out.plays;
  for (auto& p : ps) {
    const auto k = r.get<std::uint8_t>();
    if (k > 3) throw IoError("pool cache holds an unknown play kind");
    p.kind = static_cast<PlayKind>(k);
  }
  for (auto& p : ps) p.down = r.get<std::uint8_t>();
  for (auto& p : ps) p.yards_to_go = r.get<std::uint8_t>();
  for (auto& p : ps) p.yards_from_own_goal = r.get<std::uint8_t>();
  for (auto& p : ps) p.yards_gained = r.get<std::int16_t>();
  std::vector<std::uint16_t> flags(n);
  for (auto& f : flags) f = r.get<std::uint16_t>();
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = flags[i];
    Play& p = ps[i];
    p.is_touchdown = f & detail::kFlagTouchdown;
    p.is_turnover = f & detail::kFlagTurnover;
    if (f & detail::kFlagFgPresent) p.field_goal_made = (f & detail::kFlagFgMade) != 0;
    p.passing.attempt = f & detail::kFlagPassAttempt;
    p.passing.complete = f & detail::kFlagComplete;
    p.passing.touchdown = f & detail::kFlagPassTd;
    p.passing.interception = f & detail::kFlagInterception;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto net = r.get<std::int16_t>();
    if (flags[i] & detail::kFlagNetPresent) ps[i].net_kick_yards = net;
  }
  for (auto& p : ps) {
    const auto t = r.get<std::uint16_t>();
    if (t >= teams.size()) throw IoError("pool cache team id out of range");
    p.team = teams[t];
  }
  for (auto& p : ps) p.season = r.get<std::uint16_t>();
  for (auto& p : ps) p.passing.yards = r.get<std::int16_t>();
  const std::size_t n_samples = r.get<std::uint32_t>();
  out.next_score.resize(n_samples);
  for (auto& s : out.next_score) {
    s.yards_from_own_goal = r.get<std::uint8_t>();
    s.value = r.get<std::int8_t>();
  }
  if (!r.done()) throw IoError("pool cache has trailing bytes");
  return out;
}

inline void write_pool_cache(const std::filesystem::path& path, std::span<const Play> plays,
                             std::span<const NextScoreSample> next_score = {}) {
  const auto bytes = encode_pool_cache(plays, next_score);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write pool cache " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to pool cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline PoolCache read_pool_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pool cache " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_pool_cache(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace nflsim
