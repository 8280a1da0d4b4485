#pragma once

// Run manifest: every CLI command records its parameters, seed, input
// digests and outputs as JSON, so a run can be reproduced bit-exactly.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace lakern {

inline constexpr const char* kVersion = "0.1.0";

inline std::uint64_t fnv1a_digest(std::istream& in) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (in.eof()) break;
  }
  return h;
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char hex[19];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a_digest(in)));
  return hex;
}

class RunManifest {
 public:
  explicit RunManifest(std::string command) {
    json_["command"] = std::move(command);
    json_["tool_version"] = kVersion;
    json_["parameters"] = nlohmann::json::object();
    json_["inputs"] = nlohmann::json::object();
    json_["outputs"] = nlohmann::json::array();
  }

  template <class T>
  void parameter(const std::string& name, const T& value) {
    json_["parameters"][name] = value;
  }

  void input(const std::string& name, const std::string& path) {
    json_["inputs"][name] = {{"path", path}, {"digest", file_digest(path)}};
  }

  void output(const std::string& path) { json_["outputs"].push_back(path); }

  template <class T>
  void note(const std::string& name, const T& value) {
    json_[name] = value;
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << json_.dump(2) << '\n';
  }

 private:
  nlohmann::json json_;
};

}  // namespace lakern
