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

#include "crmactive/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "crmactive/error.hpp"

namespace crmactive {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("malformed number '" + std::string(text) + "' in " + std::string(what));
  }
  return value;
}

std::vector<SampleId> ids_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("splits missing '") + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw DataError(std::string("split '") + key + "' must be an array");
  std::vector<SampleId> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw DataError(std::string("split '") + key + "' must hold string ids");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Splits splits_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("'splits' must be an object");
  return Splits{ids_from_json(j, "initial_labeled"), ids_from_json(j, "unlabeled"), ids_from_json(j, "test")};
}

nlohmann::json splits_to_json(const Splits& s) {
  return {{"initial_labeled", s.initial_labeled}, {"unlabeled", s.unlabeled}, {"test", s.test}};
}

}  // namespace

std::vector<double> NormalizationStats::apply(FeatureView raw) const {
  if (raw.size() != mean.size()) throw DataError("feature dimension mismatch during normalization");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = zero_variance[i] ? 0.0 : (raw[i] - mean[i]) / stddev[i];
  }
  return out;
}

std::vector<bool> NormalizationStats::active_dims() const {
  std::vector<bool> active(zero_variance.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = !zero_variance[i];
  return active;
}

std::size_t NormalizationStats::num_active() const {
  return static_cast<std::size_t>(std::count(zero_variance.begin(), zero_variance.end(), false));
}

nlohmann::json to_json(const NormalizationStats& stats) {
  return {{"mean", stats.mean}, {"stddev", stats.stddev}, {"zero_variance", stats.zero_variance}};
}

NormalizationStats normalization_from_json(const nlohmann::json& j) {
  NormalizationStats stats;
  stats.mean = j.at("mean").get<std::vector<double>>();
  stats.stddev = j.at("stddev").get<std::vector<double>>();
  stats.zero_variance = j.at("zero_variance").get<std::vector<bool>>();
  if (stats.mean.size() != stats.stddev.size() || stats.mean.size() != stats.zero_variance.size()) {
    throw DataError("normalization stats have inconsistent lengths");
  }
  return stats;
}

Dataset::Dataset(std::vector<std::string> vocabulary, std::size_t feature_dim, std::vector<Sample> samples,
                 Splits splits)
    : feature_dim_(feature_dim), samples_(std::move(samples)), splits_(std::move(splits)) {
  vocabulary_.reserve(vocabulary.size());
  for (std::size_t d = 0; d < vocabulary.size(); ++d) {
    vocabulary_.push_back(Concept{std::move(vocabulary[d]), d});
  }
  validate_and_normalize();
}

void Dataset::validate_and_normalize() {
  if (vocabulary_.empty()) throw DataError("vocabulary is empty");
  std::unordered_set<std::string> names;
  for (const auto& c : vocabulary_) {
    if (c.name.empty()) throw DataError("concept names must be non-empty");
    if (!names.insert(c.name).second) throw DataError("duplicate concept '" + c.name + "'");
  }
  if (feature_dim_ == 0) throw DataError("feature_dim must be positive");
  if (samples_.empty()) throw DataError("dataset has no samples");

  const std::size_t num_concepts = vocabulary_.size();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.id.empty()) throw DataError("sample id must be non-empty");
    if (!index_.emplace(s.id, i).second) throw DataError("duplicate sample id '" + s.id + "'");
    if (s.raw_features.size() != feature_dim_) {
      throw DataError("sample '" + s.id + "' has " + std::to_string(s.raw_features.size()) +
                      " features, expected " + std::to_string(feature_dim_));
    }
    for (double v : s.raw_features) {
      if (!std::isfinite(v)) throw DataError("sample '" + s.id + "' has a non-finite feature");
    }
    if (s.labels && s.labels->size() != num_concepts) {
      throw DataError("sample '" + s.id + "' label vector has wrong length");
    }
  }

  // Splits partition the sample ids.
  std::unordered_set<SampleId> seen;
  auto claim = [&](const std::vector<SampleId>& ids, const char* name) {
    for (const auto& id : ids) {
      if (!index_.contains(id)) throw DataError(std::string("split '") + name + "' names unknown sample '" + id + "'");
      if (!seen.insert(id).second) throw DataError("sample '" + id + "' appears in more than one split");
    }
  };
  claim(splits_.initial_labeled, "initial_labeled");
  claim(splits_.unlabeled, "unlabeled");
  claim(splits_.test, "test");
  if (seen.size() != samples_.size()) throw DataError("splits do not cover every sample");
  if (splits_.initial_labeled.empty()) throw DataError("initial labeled split is empty");

  for (const auto& id : splits_.test) {
    if (!sample(id).labels) throw DataError("test sample '" + id + "' has no ground-truth labels");
  }
  std::vector<bool> covered(num_concepts, false);
  for (const auto& id : splits_.initial_labeled) {
    const auto& labels = sample(id).labels;
    if (!labels) throw DataError("initial labeled sample '" + id + "' has no labels");
    for (std::size_t d : labels->positives()) covered[d] = true;
  }
  for (std::size_t d = 0; d < num_concepts; ++d) {
    if (!covered[d]) {
      throw DataError("concept '" + vocabulary_[d].name + "' has no positive example in the initial labeled split");
    }
  }

  // Population mean/variance over the training split.
  const auto training = training_ids();
  normalization_.mean.assign(feature_dim_, 0.0);
  normalization_.stddev.assign(feature_dim_, 0.0);
  normalization_.zero_variance.assign(feature_dim_, false);
  const double n = static_cast<double>(training.size());
  for (const auto& id : training) {
    const auto& f = sample(id).raw_features;
    for (std::size_t i = 0; i < feature_dim_; ++i) normalization_.mean[i] += f[i];
  }
  for (double& m : normalization_.mean) m /= n;
  for (const auto& id : training) {
    const auto& f = sample(id).raw_features;
    for (std::size_t i = 0; i < feature_dim_; ++i) {
      const double d = f[i] - normalization_.mean[i];
      normalization_.stddev[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < feature_dim_; ++i) {
    const double var = normalization_.stddev[i] / n;
    normalization_.stddev[i] = std::sqrt(var);
    normalization_.zero_variance[i] =
        !(var > 1e-24 * std::max(1.0, normalization_.mean[i] * normalization_.mean[i]));
  }
  for (auto& s : samples_) s.features = normalization_.apply(s.raw_features);
}

std::vector<std::string> Dataset::concept_names() const {
  std::vector<std::string> out;
  out.reserve(vocabulary_.size());
  for (const auto& c : vocabulary_) out.push_back(c.name);
  return out;
}

const Sample& Dataset::sample(const SampleId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw InvalidArgument("unknown sample '" + id + "'");
  return samples_[it->second];
}

std::vector<SampleId> Dataset::training_ids() const {
  std::vector<SampleId> out = splits_.initial_labeled;
  out.insert(out.end(), splits_.unlabeled.begin(), splits_.unlabeled.end());
  return out;
}

std::vector<const Sample*> Dataset::test_samples() const {
  std::vector<const Sample*> out;
  out.reserve(splits_.test.size());
  for (const auto& id : splits_.test) out.push_back(&sample(id));
  return out;
}

std::optional<std::size_t> Dataset::concept_index(std::string_view name) const {
  for (const auto& c : vocabulary_) {
    if (c.name == name) return c.index;
  }
  return std::nullopt;
}

LabelSet Dataset::labels_from_names(std::span<const std::string> names) const {
  LabelSet labels(vocabulary_.size());
  for (const auto& name : names) {
    const auto d = concept_index(name);
    if (!d) throw DataError("concept '" + name + "' is not in the vocabulary");
    labels.set(*d);
  }
  return labels;
}

std::vector<std::string> Dataset::label_names(const LabelSet& labels) const {
  std::vector<std::string> out;
  for (std::size_t d : labels.positives()) out.push_back(vocabulary_.at(d).name);
  return out;
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? DatasetFormat::csv : DatasetFormat::json;
}

Dataset dataset_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw DataError("dataset document must be a JSON object");
    auto vocabulary = doc.at("vocabulary").get<std::vector<std::string>>();
    const auto feature_dim = doc.at("feature_dim").get<std::size_t>();

    std::unordered_map<std::string, std::size_t> concept_of;
    for (std::size_t d = 0; d < vocabulary.size(); ++d) concept_of.emplace(vocabulary[d], d);

    std::vector<Sample> samples;
    for (const auto& js : doc.at("samples")) {
      Sample s;
      s.id = js.at("id").get<std::string>();
      s.raw_features = js.at("features").get<std::vector<double>>();
      const auto& jl = js.contains("labels") ? js.at("labels") : nlohmann::json();
      if (!jl.is_null()) {
        LabelSet labels(vocabulary.size());
        for (const auto& name : jl) {
          const auto n = name.get<std::string>();
          const auto it = concept_of.find(n);
          if (it == concept_of.end()) {
            throw DataError("sample '" + s.id + "' uses concept '" + n + "' not in the vocabulary");
          }
          labels.set(it->second);
        }
        s.labels = std::move(labels);
      }
      samples.push_back(std::move(s));
    }
    return Dataset(std::move(vocabulary), feature_dim, std::move(samples), splits_from_json(doc.at("splits")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed dataset: ") + e.what());
  }
}

nlohmann::json dataset_to_json(const Dataset& dataset) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : dataset.samples()) {
    nlohmann::json js;
    js["id"] = s.id;
    js["features"] = s.raw_features;
    js["labels"] = s.labels ? nlohmann::json(dataset.label_names(*s.labels)) : nlohmann::json();
    samples.push_back(std::move(js));
  }
  return {{"vocabulary", dataset.concept_names()},
          {"feature_dim", dataset.feature_dim()},
          {"samples", std::move(samples)},
          {"splits", splits_to_json(dataset.splits())}};
}

std::filesystem::path csv_sidecar_path(const std::filesystem::path& csv_path) {
  auto sidecar = csv_path;
  sidecar.replace_extension(".splits.json");
  return sidecar;
}

Dataset dataset_from_csv(std::string_view csv_text, const nlohmann::json& sidecar) {
  std::vector<std::string_view> lines;
  for (auto line : split(csv_text, '\n')) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw DataError("CSV has no header");

  const auto header = split(lines.front(), ',');
  if (header.size() < 3 || trim(header.front()) != "id" || trim(header.back()) != "labels") {
    throw DataError("CSV header must be id,f0..f{M-1},labels");
  }
  const std::size_t feature_dim = header.size() - 2;
  for (std::size_t i = 0; i < feature_dim; ++i) {
    if (trim(header[i + 1]) != "f" + std::to_string(i)) throw DataError("CSV header must be id,f0..f{M-1},labels");
  }

  std::vector<std::string> vocabulary;
  const bool fixed_vocabulary = sidecar.contains("vocabulary");
  if (fixed_vocabulary) vocabulary = sidecar.at("vocabulary").get<std::vector<std::string>>();

  std::vector<std::pair<Sample, std::vector<std::string>>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != header.size()) {
      throw DataError("CSV row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    Sample s;
    s.id = std::string(trim(cells.front()));
    for (std::size_t i = 0; i < feature_dim; ++i) {
      s.raw_features.push_back(parse_double(cells[i + 1], "row " + std::to_string(r)));
    }
    std::vector<std::string> names;
    const auto label_cell = trim(cells.back());
    if (!label_cell.empty()) {
      for (auto name : split(label_cell, '|')) {
        name = trim(name);
        if (name.empty()) continue;
        names.emplace_back(name);
        if (!fixed_vocabulary && std::find(vocabulary.begin(), vocabulary.end(), names.back()) == vocabulary.end()) {
          vocabulary.push_back(names.back());
        }
      }
      s.labels = LabelSet();  // sized below once the vocabulary is known
    }
    rows.emplace_back(std::move(s), std::move(names));
  }

  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (auto& [s, names] : rows) {
    if (s.labels) {
      LabelSet labels(vocabulary.size());
      for (const auto& n : names) {
        const auto it = std::find(vocabulary.begin(), vocabulary.end(), n);
        if (it == vocabulary.end()) throw DataError("sample '" + s.id + "' uses concept '" + n + "' not in the vocabulary");
        labels.set(static_cast<std::size_t>(it - vocabulary.begin()));
      }
      s.labels = std::move(labels);
    }
    samples.push_back(std::move(s));
  }
  if (!sidecar.contains("splits")) throw DataError("CSV sidecar has no 'splits'");
  try {
    return Dataset(std::move(vocabulary), feature_dim, std::move(samples), splits_from_json(sidecar.at("splits")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed CSV sidecar: ") + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  const std::string text = read_file(path);
  if (format == DatasetFormat::json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return dataset_from_json(doc);
  }
  const auto sidecar_path = csv_sidecar_path(path);
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(read_file(sidecar_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed JSON in " + sidecar_path.string() + ": " + e.what());
  }
  return dataset_from_csv(text, sidecar);
}

Dataset load_dataset(const std::filesystem::path& path) { return load_dataset(path, format_for_path(path)); }

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DatasetFormat format) {
  if (format == DatasetFormat::json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << dataset_to_json(dataset).dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "id";
  for (std::size_t i = 0; i < dataset.feature_dim(); ++i) out << ",f" << i;
  out << ",labels\n";
  for (const auto& s : dataset.samples()) {
    out << s.id;
    for (double v : s.raw_features) out << ',' << nlohmann::json(v).dump();
    out << ',';
    if (s.labels) {
      const auto names = dataset.label_names(*s.labels);
      for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "|" : "") << names[i];
    }
    out << '\n';
  }
  std::ofstream side(csv_sidecar_path(path), std::ios::binary);
  if (!side) throw Error("cannot write " + csv_sidecar_path(path).string());
  side << nlohmann::json{{"vocabulary", dataset.concept_names()}, {"splits", splits_to_json(dataset.splits())}}.dump(2)
       << '\n';
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  save_dataset(dataset, path, format_for_path(path));
}

}  // namespace crmactive
