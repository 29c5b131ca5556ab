#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace deepbarcode::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FileRecord {
  std::string role;
  std::string path;
  std::string sha256;
};

/// Everything needed to re-execute a command and check that it reproduced.
/// `args` are the command-line arguments (without the program name) with
/// every path made absolute.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::vector<std::string> args;
  nlohmann::ordered_json config;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::vector<std::pair<std::string, double>> timings_ms;

  void add_input(std::string role, const std::filesystem::path& path);
  void add_output(std::string role, const std::filesystem::path& path);
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::ordered_json& j);

void save_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

/// Human-readable description of each input or output whose current digest
/// differs from the recorded one (or which is missing).
std::vector<std::string> digest_mismatches(const std::vector<FileRecord>& records);

}  // namespace deepbarcode::cli
