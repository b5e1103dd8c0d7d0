#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "nflsim/error.hpp"

namespace nflsim {

inline constexpr const char* kVersion = "0.1.0";

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char two[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

// Everything needed to re-run an experiment.
struct RunManifest {
  std::vector<std::string> command_line;
  std::map<std::string, std::string> config;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::string tool_version = kVersion;

  void add_input(const std::filesystem::path& p) { input_digests[p.string()] = sha256_file(p); }
};

inline void to_json(nlohmann::ordered_json& j, const RunManifest& m) {
  j = nlohmann::ordered_json{{"tool_version", m.tool_version},
                             {"command_line", m.command_line},
                             {"master_seed", m.master_seed},
                             {"config", m.config},
                             {"input_digests", m.input_digests}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.command_line = j.at("command_line").get<std::vector<std::string>>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.config = j.at("config").get<std::map<std::string, std::string>>();
  m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
  return m;
}

}  // namespace nflsim
