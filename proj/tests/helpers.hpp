// SPDX-License-Identifier: Apache-2.0
// Small builders shared by the unit tests.
#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include <paperclf/paperclf.hpp>

namespace testutil {

using nlohmann::json;

/// "w0 w1 ... w{n-1}" with an optional prefix on every word.
inline std::string words(std::size_t n, const std::string& prefix = "w") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.empty()) s += ' ';
    s += prefix + std::to_string(i);
  }
  return s;
}

inline json paper_record(const std::string& id, const std::vector<std::string>& paragraphs,
                         const std::vector<std::string>& refs = {}, const std::string& title = "",
                         const std::string& abstract = "") {
  json r;
  r["id"] = id;
  r["title"] = title;
  r["abstract"] = abstract;
  r["sections"] = json::array({json{{"name", "body"}, {"paragraphs", paragraphs}}});
  r["bib_refs"] = refs;
  return r;
}

/// Captures warnings for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  std::function<void(const std::string&)> saved;
  WarningCapture() : saved(paperclf::warning_sink()) {
    paperclf::warning_sink() = [this](const std::string& m) { messages.push_back(m); };
  }
  ~WarningCapture() { paperclf::warning_sink() = saved; }
};

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("paperclf_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil
