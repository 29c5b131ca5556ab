#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

#include "deepbarcode/error.hpp"
#include "deepbarcode/feature_store.hpp"

namespace deepbarcode::cli {

std::string sha256_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "sha256 failed for " + path.string());
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    std::array<char, 3> buf{};
    std::snprintf(buf.data(), buf.size(), "%02x", digest[i]);
    hex += buf.data();
  }
  return hex;
}

void RunManifest::add_input(std::string role, const std::filesystem::path& path) {
  inputs.push_back({std::move(role), std::filesystem::absolute(path).string(), sha256_file(path)});
}

void RunManifest::add_output(std::string role, const std::filesystem::path& path) {
  outputs.push_back({std::move(role), std::filesystem::absolute(path).string(), sha256_file(path)});
}

namespace {

nlohmann::ordered_json records_to_json(const std::vector<FileRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    arr.push_back({{"role", r.role}, {"path", r.path}, {"sha256", r.sha256}});
  }
  return arr;
}

std::vector<FileRecord> records_from_json(const nlohmann::ordered_json& arr) {
  std::vector<FileRecord> out;
  for (const auto& r : arr) {
    out.push_back({r.at("role").get<std::string>(), r.at("path").get<std::string>(),
                   r.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "deepbarcode";
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["args"] = m.args;
  j["config"] = m.config;
  j["inputs"] = records_to_json(m.inputs);
  j["outputs"] = records_to_json(m.outputs);
  auto timings = nlohmann::ordered_json::object();
  for (const auto& [stage, ms] : m.timings_ms) {
    timings[stage] = ms;
  }
  j["timings_ms"] = timings;
  return j;
}

RunManifest manifest_from_json(const nlohmann::ordered_json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.config = j.at("config");
    m.inputs = records_from_json(j.at("inputs"));
    m.outputs = records_from_json(j.at("outputs"));
    for (const auto& [stage, ms] : j.at("timings_ms").items()) {
      m.timings_ms.emplace_back(stage, ms.get<double>());
    }
    return m;
  } catch (const nlohmann::ordered_json::exception& e) {
    fail(ErrorKind::Format, std::string("malformed manifest: ") + e.what());
  }
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(m).dump(2) + "\n");
}

RunManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const auto j = nlohmann::ordered_json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) {
    fail(ErrorKind::Format, path.string() + " is not valid JSON");
  }
  return manifest_from_json(j);
}

std::vector<std::string> digest_mismatches(const std::vector<FileRecord>& records) {
  std::vector<std::string> bad;
  for (const auto& r : records) {
    if (!std::filesystem::exists(r.path)) {
      bad.push_back(r.role + ": " + r.path + " is missing");
    } else if (sha256_file(r.path) != r.sha256) {
      bad.push_back(r.role + ": " + r.path + " digest differs");
    }
  }
  return bad;
}

}  // namespace deepbarcode::cli
