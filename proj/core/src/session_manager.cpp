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

#include "crmactive/session_manager.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <spdlog/spdlog.h>

#include "crmactive/error.hpp"

namespace crmactive {

namespace fs = std::filesystem;

namespace {

ApiResponse error_response(int status, const std::string& message) { return {status, {{"error", message}}}; }

Strategy strategy_from(const nlohmann::json& j) {
  const auto name = j.is_string() ? j.get<std::string>() : std::string("crm_active");
  if (name == "crm_active") return Strategy::crm_active;
  if (name == "random") return Strategy::random;
  throw DataError("unknown strategy '" + name + "'");
}

std::vector<std::string> sorted_names(const Dataset& dataset, const LabelSet& labels) {
  auto names = dataset.label_names(labels);
  std::sort(names.begin(), names.end());
  return names;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  return std::to_string(secs);
}

std::string parse_session_number(const std::string& id) {
  constexpr std::string_view prefix = "session-";
  if (id.rfind(prefix, 0) != 0) return {};
  return id.substr(prefix.size());
}

}  // namespace

SessionManager::SessionManager(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  fs::create_directories(data_dir_ / "sessions");
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

void SessionManager::issue_batch(Entry& entry) {
  if (entry.session->status() != SessionStatus::awaiting_labels || entry.batch_journaled) return;
  entry.journal->append({{"type", "batch_issued"},
                         {"round", entry.session->round()},
                         {"sample_ids", entry.session->current_batch()}});
  entry.batch_journaled = true;
}

nlohmann::json SessionManager::status_body(const Entry& entry) {
  const Session& s = *entry.session;
  return {{"session_id", entry.id},
          {"status", to_string(s.status())},
          {"strategy", to_string(s.strategy())},
          {"round", s.round()},
          {"labeled_count", s.labeled().size()},
          {"unlabeled_count", s.unlabeled().size()},
          {"batch_size", s.current_batch().size()},
          {"labels_submitted", entry.pending.size()}};
}

ApiResponse SessionManager::create_session(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("dataset_path") || !body.at("dataset_path").is_string()) {
    return error_response(400, "body must contain a string 'dataset_path'");
  }
  auto entry = std::make_shared<Entry>();
  RunConfig config;
  Strategy strategy = Strategy::crm_active;
  try {
    entry->dataset_path = fs::absolute(body.at("dataset_path").get<std::string>());
    entry->dataset = std::make_unique<Dataset>(load_dataset(entry->dataset_path));
    config = config_from_json(body.value("config", nlohmann::json::object()));
    strategy = strategy_from(body.value("strategy", nlohmann::json("crm_active")));
    entry->session = std::make_unique<Session>(*entry->dataset, config, strategy);
  } catch (const Error& e) {
    return error_response(400, e.what());
  }

  {
    std::unique_lock lock(sessions_mutex_);
    do {
      entry->id = "session-" + std::to_string(next_session_++);
    } while (sessions_.contains(entry->id) || fs::exists(data_dir_ / "sessions" / (entry->id + ".jsonl")));
    sessions_.emplace(entry->id, entry);
  }

  std::lock_guard guard(entry->mutex);
  try {
    entry->journal = std::make_unique<SessionJournal>(data_dir_ / "sessions" / (entry->id + ".jsonl"));
    entry->journal->append({{"type", "session_created"},
                            {"session_id", entry->id},
                            {"dataset_path", entry->dataset_path.string()},
                            {"strategy", to_string(strategy)},
                            {"config", to_json(config)}});
    entry->session->start();
    issue_batch(*entry);
  } catch (const std::exception& e) {
    std::unique_lock lock(sessions_mutex_);
    sessions_.erase(entry->id);
    return error_response(500, e.what());
  }
  spdlog::info("created {} on {}", entry->id, entry->dataset_path.string());
  auto body_out = status_body(*entry);
  return {201, std::move(body_out)};
}

ApiResponse SessionManager::get_session(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  return {200, status_body(*entry)};
}

ApiResponse SessionManager::get_batch(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  const Session& session = *entry->session;
  if (session.status() != SessionStatus::awaiting_labels) return error_response(409, "session has no open batch");

  const Dataset& data = *entry->dataset;
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& sid : session.current_batch()) {
    const Sample& s = data.sample(sid);
    nlohmann::json suggestions = nlohmann::json::array();
    for (const auto& c : session.model().annotate(s.features, session.config().annotation_length)) {
      suggestions.push_back({{"concept", data.vocabulary()[c.word].name}, {"posterior", c.posterior}});
    }
    nlohmann::json submitted;
    if (const auto it = entry->pending.find(sid); it != entry->pending.end()) {
      submitted = sorted_names(data, it->second);
    }
    samples.push_back({{"id", sid},
                       {"features", s.raw_features},
                       {"model_suggestions", std::move(suggestions)},
                       {"submitted_concepts", std::move(submitted)}});
  }
  return {200, {{"round", session.round()}, {"samples", std::move(samples)}}};
}

ApiResponse SessionManager::submit_label(const std::string& id, const nlohmann::json& body) {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  if (!body.is_object() || !body.contains("sample_id") || !body.at("sample_id").is_string() ||
      !body.contains("concepts") || !body.at("concepts").is_array()) {
    return error_response(400, "body must be {sample_id: string, concepts: [string]}");
  }
  std::lock_guard guard(entry->mutex);
  const Session& session = *entry->session;
  if (session.status() != SessionStatus::awaiting_labels) return error_response(409, "session has no open batch");

  const auto sample_id = body.at("sample_id").get<std::string>();
  const auto& batch = session.current_batch();
  if (std::find(batch.begin(), batch.end(), sample_id) == batch.end()) {
    return error_response(409, "sample '" + sample_id + "' is not in the current batch");
  }
  LabelSet labels;
  std::vector<std::string> names;
  try {
    names = body.at("concepts").get<std::vector<std::string>>();
    labels = entry->dataset->labels_from_names(names);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, e.what());
  } catch (const DataError& e) {
    return error_response(400, e.what());
  }

  const auto existing = entry->pending.find(sample_id);
  const bool duplicate = existing != entry->pending.end() && existing->second == labels;
  if (!duplicate) {
    entry->journal->append({{"type", "label_submitted"},
                            {"round", session.round()},
                            {"sample_id", sample_id},
                            {"concepts", sorted_names(*entry->dataset, labels)},
                            {"timestamp", now_iso8601()}});
    entry->pending[sample_id] = std::move(labels);
  }
  return {200,
          {{"accepted", true},
           {"deduplicated", duplicate},
           {"remaining", batch.size() - entry->pending.size()}}};
}

ApiResponse SessionManager::advance(const std::string& id) {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  Session& session = *entry->session;
  if (session.status() != SessionStatus::awaiting_labels) return error_response(409, "session has no open batch");
  std::vector<SampleId> missing;
  for (const auto& sid : session.current_batch()) {
    if (!entry->pending.contains(sid)) missing.push_back(sid);
  }
  if (!missing.empty()) return {409, {{"error", "batch is not fully labeled"}, {"missing", missing}}};

  const std::size_t closed = session.round();
  try {
    session.complete_round(entry->pending);
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
  entry->journal->append(
      {{"type", "round_completed"}, {"round", closed}, {"metrics", to_json(session.history().back())}});
  entry->pending.clear();
  entry->batch_journaled = false;
  issue_batch(*entry);

  auto out = status_body(*entry);
  out["metrics"] = to_json(session.history().back());
  return {200, std::move(out)};
}

ApiResponse SessionManager::metrics(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  nlohmann::json history = nlohmann::json::array();
  for (const auto& m : entry->session->history()) history.push_back(to_json(m));
  return {200, {{"session_id", id}, {"history", std::move(history)}}};
}

ApiResponse SessionManager::clusters(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  const Session& s = *entry->session;
  return {200, cluster_summary(s.clusters(), s.store(), s.entropy_params())};
}

ApiResponse SessionManager::vocabulary(const std::string& id) const {
  auto entry = find(id);
  if (!entry) return error_response(404, "unknown session '" + id + "'");
  return {200, {{"concepts", entry->dataset->concept_names()}}};
}

nlohmann::json SessionManager::snapshot(const std::string& id) const {
  auto entry = find(id);
  if (!entry) throw InvalidArgument("unknown session '" + id + "'");
  std::lock_guard guard(entry->mutex);
  auto snap = entry->session->snapshot();
  nlohmann::json pending = nlohmann::json::object();
  for (const auto& [sid, labels] : entry->pending) pending[sid] = sorted_names(*entry->dataset, labels);
  snap["pending_labels"] = std::move(pending);
  snap["session_id"] = entry->id;
  return snap;
}

std::shared_ptr<SessionManager::Entry> SessionManager::replay(const std::string& id, const fs::path& journal_path) {
  const auto events = SessionJournal::read(journal_path);
  if (events.empty()) throw DataError("event 0: journal is empty");

  auto entry = std::make_shared<Entry>();
  entry->id = id;
  std::size_t index = 0;
  auto fail = [&](const std::string& why) {
    throw DataError("event " + std::to_string(index) + " (" + events[index].value("type", "?") + "): " + why);
  };
  try {
    const auto& created = events.front();
    if (created.at("type") != "session_created") fail("first event must be session_created");
    entry->dataset_path = created.at("dataset_path").get<std::string>();
    entry->dataset = std::make_unique<Dataset>(load_dataset(entry->dataset_path));
    entry->session = std::make_unique<Session>(*entry->dataset, config_from_json(created.at("config")),
                                               strategy_from(created.at("strategy")));
    entry->session->start();

    for (index = 1; index < events.size(); ++index) {
      const auto& e = events[index];
      const auto type = e.at("type").get<std::string>();
      Session& session = *entry->session;
      if (type == "batch_issued") {
        if (session.status() != SessionStatus::awaiting_labels) fail("session has no open batch");
        if (e.at("round").get<std::size_t>() != session.round()) fail("round mismatch");
        if (e.at("sample_ids").get<std::vector<SampleId>>() != session.current_batch()) fail("batch mismatch");
        entry->batch_journaled = true;
      } else if (type == "label_submitted") {
        if (session.status() != SessionStatus::awaiting_labels) fail("session has no open batch");
        const auto sid = e.at("sample_id").get<std::string>();
        const auto& batch = session.current_batch();
        if (std::find(batch.begin(), batch.end(), sid) == batch.end()) fail("sample not in batch");
        entry->pending[sid] = entry->dataset->labels_from_names(e.at("concepts").get<std::vector<std::string>>());
      } else if (type == "round_completed") {
        if (e.at("round").get<std::size_t>() != session.round()) fail("round mismatch");
        session.complete_round(entry->pending);
        if (to_json(session.history().back()) != e.at("metrics")) fail("replayed metrics differ from the journal");
        entry->pending.clear();
        entry->batch_journaled = false;
      } else {
        fail("unknown event type");
      }
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }

  entry->journal = std::make_unique<SessionJournal>(journal_path);
  issue_batch(*entry);
  return entry;
}

RecoveryReport SessionManager::recover() {
  RecoveryReport report;
  std::vector<fs::path> journals;
  for (const auto& f : fs::directory_iterator(data_dir_ / "sessions")) {
    if (f.is_regular_file() && f.path().extension() == ".jsonl") journals.push_back(f.path());
  }
  std::sort(journals.begin(), journals.end());
  for (const auto& path : journals) {
    const auto id = path.stem().string();
    if (find(id)) continue;
    try {
      auto entry = replay(id, path);
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(id, std::move(entry));
      report.recovered.push_back(id);
    } catch (const std::exception& e) {
      spdlog::error("refusing to load {}: {}", id, e.what());
      report.rejected.emplace(id, e.what());
    }
    const auto number = parse_session_number(id);
    if (!number.empty() && std::all_of(number.begin(), number.end(), ::isdigit)) {
      std::unique_lock lock(sessions_mutex_);
      next_session_ = std::max<std::size_t>(next_session_, std::stoull(number) + 1);
    }
  }
  return report;
}

}  // namespace crmactive
