#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace factshap {

std::string_view library_version();

// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

// Record of one CLI run: the resolved configuration, digests of every
// input file, and the outputs written. Contains no timestamps so reruns
// with the same inputs produce the same manifest.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace factshap
