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

#include "crmactive/journal.hpp"

#include <string>

#include "crmactive/error.hpp"

namespace crmactive {

SessionJournal::SessionJournal(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) next_seq_ = read(path_).size();
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error("cannot open journal " + path_.string());
}

void SessionJournal::append(nlohmann::json event) {
  event["seq"] = next_seq_;
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw Error("failed to write journal " + path_.string());
  ++next_seq_;
}

std::vector<nlohmann::json> SessionJournal::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open journal " + path.string());
  std::vector<nlohmann::json> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json event;
    try {
      event = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("journal line " + std::to_string(line_no) + " is not valid JSON: " + e.what());
    }
    if (!event.is_object() || !event.contains("type") || !event.contains("seq")) {
      throw DataError("journal line " + std::to_string(line_no) + " is missing 'type' or 'seq'");
    }
    if (event.at("seq") != events.size()) {
      throw DataError("journal line " + std::to_string(line_no) + " is out of sequence");
    }
    events.push_back(std::move(event));
  }
  return events;
}

}  // namespace crmactive
