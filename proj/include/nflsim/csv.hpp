#pragma once

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nflsim/error.hpp"

namespace nflsim {

// Streaming RFC-4180 reader. Plain and gzip-compressed files are both accepted;
// zlib passes uncompressed input through unchanged.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path) {
    file_.reset(gzopen(path.string().c_str(), "rb"));
    if (!file_) throw IoError("cannot open " + path.string());
    gzbuffer(file_.get(), 1 << 17);
  }

  // Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = get();
    if (c == EOF) return false;

    std::string field;
    bool quoted = false;
    bool after_quote = false;
    for (;; c = get()) {
      if (quoted) {
        if (c == EOF) throw IoError(path_.string() + ": unterminated quoted field near record " + std::to_string(records_ + 1));
        if (c == '"') {
          int n = get();
          if (n == '"') {
            field.push_back('"');
          } else {
            quoted = false;
            after_quote = true;
            unget(n);
          }
        } else {
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '\n' || c == EOF) {
        break;
      } else if (c == '\r') {
        int n = get();
        if (n != '\n') unget(n);
        break;
      } else if (c == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
    fields.push_back(std::move(field));
    ++records_;
    return true;
  }

  std::size_t records_read() const { return records_; }

 private:
  struct GzClose {
    void operator()(gzFile f) const { gzclose(f); }
  };

  int get() {
    if (pending_ != kNone) {
      int c = pending_;
      pending_ = kNone;
      return c;
    }
    return gzgetc(file_.get());
  }
  void unget(int c) { pending_ = c; }

  static constexpr int kNone = -2;
  std::filesystem::path path_;
  std::unique_ptr<gzFile_s, GzClose> file_;
  int pending_ = kNone;
  std::size_t records_ = 0;
};

// Quotes a field only when it needs it.
inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace nflsim
