// Copyright 2026 The crm-active Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace crmactive {

// Append-only newline-delimited JSON event log, one file per session. Every
// append is flushed before returning.
class SessionJournal {
 public:
  explicit SessionJournal(std::filesystem::path path);

  void append(nlohmann::json event);
  std::size_t size() const { return next_seq_; }
  const std::filesystem::path& path() const { return path_; }

  // Parses every line; throws DataError naming the offending line.
  static std::vector<nlohmann::json> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t next_seq_ = 0;
};

}  // namespace crmactive
