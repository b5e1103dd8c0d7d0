#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <curl/curl.h>

#include "nflsim/error.hpp"

namespace nflsim {

enum class PbpSource { nflfastr, nflscrapr };

inline std::string_view to_string(PbpSource s) { return s == PbpSource::nflfastr ? "nflfastr" : "nflscrapr"; }

inline std::optional<PbpSource> parse_pbp_source(std::string_view s) {
  if (s == "nflfastr") return PbpSource::nflfastr;
  if (s == "nflscrapr") return PbpSource::nflscrapr;
  return std::nullopt;
}

inline int current_season() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  // Seasons start in September.
  return tm.tm_year + 1900 - (tm.tm_mon < 8 ? 1 : 0);
}

struct SeasonRange {
  int first;
  int last;
};

inline SeasonRange supported_seasons(PbpSource s) {
  if (s == PbpSource::nflscrapr) return {2009, 2019};
  return {1999, current_season()};
}

inline std::string default_base_url(PbpSource s) {
  if (s == PbpSource::nflscrapr) {
    return "https://raw.githubusercontent.com/ryurko/nflscrapR-data/master/play_by_play_data/regular_season";
  }
  return "https://github.com/nflverse/nflverse-data/releases/download/pbp";
}

inline std::string pbp_file_name(PbpSource s, int season) {
  if (s == PbpSource::nflscrapr) return "reg_pbp_" + std::to_string(season) + ".csv";
  return "play_by_play_" + std::to_string(season) + ".csv.gz";
}

// Data directory: NFLSIM_CACHE_DIR if set, else ./data/pbp.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("NFLSIM_CACHE_DIR"); env && *env) return env;
  return std::filesystem::path("data") / "pbp";
}

struct DownloadOptions {
  PbpSource source = PbpSource::nflfastr;
  std::string base_url;  // empty: the source's public default
  bool force = false;
  int attempts = 3;
  long timeout_seconds = 300;
  std::function<void(const std::string&)> progress;
};

struct DownloadedFile {
  int season = 0;
  std::filesystem::path path;
  bool cached = false;
  std::uint64_t bytes_transferred = 0;
};

namespace detail {

struct CurlGlobal {
  CurlGlobal() { curl_global_init(CURL_GLOBAL_DEFAULT); }
  ~CurlGlobal() { curl_global_cleanup(); }
};

inline void ensure_curl() { static CurlGlobal g; }

inline std::size_t curl_write(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
  auto* f = static_cast<std::FILE*>(userdata);
  return std::fwrite(ptr, size, nmemb, f);
}

// Fetches `url` into `dest`; returns bytes written.
inline std::uint64_t fetch_once(const std::string& url, const std::filesystem::path& dest, long timeout) {
  ensure_curl();
  std::FILE* f = std::fopen(dest.c_str(), "wb");
  if (!f) throw IoError("cannot write " + dest.string());
  CURL* h = curl_easy_init();
  if (!h) {
    std::fclose(f);
    throw FetchError("curl initialisation failed", url, true);
  }
  curl_easy_setopt(h, CURLOPT_URL, url.c_str());
  curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, curl_write);
  curl_easy_setopt(h, CURLOPT_WRITEDATA, f);
  curl_easy_setopt(h, CURLOPT_TIMEOUT, timeout);
  curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(h, CURLOPT_USERAGENT, "nflsim/0.1");
  curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
  const CURLcode rc = curl_easy_perform(h);
  long status = 0;
  curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &status);
  curl_off_t got = 0;
  curl_easy_getinfo(h, CURLINFO_SIZE_DOWNLOAD_T, &got);
  curl_easy_cleanup(h);
  const bool closed_ok = std::fclose(f) == 0;

  if (rc != CURLE_OK) {
    throw FetchError(std::string("download failed: ") + curl_easy_strerror(rc), url, true);
  }
  if (status >= 400) {
    const bool retryable = status >= 500 || status == 408 || status == 429;
    throw FetchError("download failed: HTTP " + std::to_string(status), url, retryable);
  }
  if (!closed_ok) throw IoError("error closing " + dest.string());
  return static_cast<std::uint64_t>(got);
}

}  // namespace detail

// Ensures one local file per season under `destination`. Cached files are
// reused unless `force`; partial downloads are removed before the error is
// raised.
inline std::vector<DownloadedFile> download_pbp(const std::set<int>& seasons, const std::filesystem::path& destination,
                                                const DownloadOptions& opts = {}) {
  if (seasons.empty()) throw ValidationError("no seasons requested");
  const SeasonRange range = supported_seasons(opts.source);
  for (int s : seasons) {
    if (s < range.first || s > range.last) {
      throw ValidationError("season " + std::to_string(s) + " outside " + std::string(to_string(opts.source)) +
                            " range " + std::to_string(range.first) + "-" + std::to_string(range.last));
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(destination, ec);
  if (ec) throw IoError("cannot create " + destination.string() + ": " + ec.message());

  std::string base = opts.base_url.empty() ? default_base_url(opts.source) : opts.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();

  std::vector<DownloadedFile> out;
  for (int season : seasons) {
    const std::string name = pbp_file_name(opts.source, season);
    DownloadedFile file{season, destination / name, false, 0};
    if (!opts.force && std::filesystem::exists(file.path)) {
      file.cached = true;
      if (opts.progress) opts.progress(name + ": cached");
      out.push_back(file);
      continue;
    }
    const std::string url = base + "/" + name;
    const auto part = std::filesystem::path(file.path.string() + ".part");
    for (int attempt = 1;; ++attempt) {
      if (opts.progress) opts.progress(name + ": fetching " + url);
      try {
        file.bytes_transferred = detail::fetch_once(url, part, opts.timeout_seconds);
        std::filesystem::rename(part, file.path);
        break;
      } catch (const FetchError& e) {
        std::filesystem::remove(part, ec);
        if (!e.retryable() || attempt >= opts.attempts) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(500 * attempt));
      } catch (...) {
        std::filesystem::remove(part, ec);
        throw;
      }
    }
    if (opts.progress) opts.progress(name + ": " + std::to_string(file.bytes_transferred) + " bytes");
    out.push_back(file);
  }
  return out;
}

}  // namespace nflsim
