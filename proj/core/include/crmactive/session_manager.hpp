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
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crmactive/dataset.hpp"
#include "crmactive/engine.hpp"
#include "crmactive/journal.hpp"

namespace crmactive {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct RecoveryReport {
  std::vector<std::string> recovered;
  // session id -> reason (includes the index of the event that failed)
  std::map<std::string, std::string> rejected;
};

// Interactive-oracle sessions backed by journals under `data_dir/sessions`.
// Mutations of one session are serialized by that session's mutex; distinct
// sessions proceed independently.
class SessionManager {
 public:
  explicit SessionManager(std::filesystem::path data_dir);

  RecoveryReport recover();

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse get_session(const std::string& id) const;
  ApiResponse get_batch(const std::string& id) const;
  ApiResponse submit_label(const std::string& id, const nlohmann::json& body);
  ApiResponse advance(const std::string& id);
  ApiResponse metrics(const std::string& id) const;
  ApiResponse clusters(const std::string& id) const;
  ApiResponse vocabulary(const std::string& id) const;

  // Session snapshot plus the labels submitted for the open batch.
  nlohmann::json snapshot(const std::string& id) const;
  std::vector<std::string> session_ids() const;

 private:
  struct Entry {
    mutable std::mutex mutex;
    std::string id;
    std::filesystem::path dataset_path;
    std::unique_ptr<Dataset> dataset;
    std::unique_ptr<Session> session;
    std::unique_ptr<SessionJournal> journal;
    std::map<SampleId, LabelSet> pending;
    bool batch_journaled = false;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::shared_ptr<Entry> replay(const std::string& id, const std::filesystem::path& journal_path);
  void issue_batch(Entry& entry);
  static nlohmann::json status_body(const Entry& entry);

  std::filesystem::path data_dir_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::size_t next_session_ = 1;
};

}  // namespace crmactive
