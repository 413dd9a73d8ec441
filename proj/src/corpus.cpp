#include "factshap/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "factshap/error.hpp"
#include "factshap/random.hpp"

namespace factshap {

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto begin = std::find_if(s.begin(), s.end(), not_space);
  auto end = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return begin < end ? std::string_view(begin, end) : std::string_view();
}

std::optional<std::string> optional_field(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

// RFC 4180 style: quoted fields may contain commas, doubled quotes and
// newlines. Returns false at end of input.
bool read_csv_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // swallowed; CRLF line endings
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line);
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

void validate(const std::vector<ClaimRecord>& records) {
  std::unordered_map<std::string_view, const ClaimRecord*> by_id;
  by_id.reserve(records.size());
  for (const auto& r : records) {
    if (r.id.empty()) throw ValidationError("record with empty id");
    if (trim(r.text).empty()) throw ValidationError("record '" + r.id + "' has empty text");
    if (!by_id.emplace(r.id, &r).second) throw ValidationError("duplicate id '" + r.id + "'");
  }
  for (const auto& r : records) {
    if (!r.parent_id) continue;
    auto it = by_id.find(*r.parent_id);
    if (it == by_id.end()) {
      throw ValidationError("record '" + r.id + "' refers to unknown parent '" + *r.parent_id + "'");
    }
    if (it->second->label != r.label) {
      throw ValidationError("record '" + r.id + "' has a different label than its parent '" +
                            *r.parent_id + "'");
    }
  }
}

}  // namespace

Label parse_label(std::string_view token) {
  const std::string t = lower(trim(token));
  if (t == "true" || t == "real") return Label::true_claim;
  if (t == "fake" || t == "false") return Label::fake_claim;
  throw ValidationError("unknown label token '" + std::string(token) + "'");
}

std::string_view label_name(Label label) {
  return label == Label::true_claim ? "true" : "fake";
}

Dataset::Dataset(std::string name, std::vector<ClaimRecord> records)
    : name_(std::move(name)), records_(std::move(records)) {
  validate(records_);
}

const ClaimRecord* Dataset::find(std::string_view id) const {
  for (const auto& r : records_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

ClassCounts Dataset::class_counts() const {
  ClassCounts counts;
  for (const auto& r : records_) {
    if (r.label == Label::true_claim) {
      ++counts.true_claims;
    } else {
      ++counts.fake_claims;
    }
  }
  return counts;
}

void Dataset::require_both_classes() const {
  const auto counts = class_counts();
  if (counts.true_claims == 0 || counts.fake_claims == 0) {
    throw ValidationError("dataset '" + name_ + "' needs at least one record of each label");
  }
}

Dataset Dataset::subset(const std::vector<std::string>& ids, std::string name) const {
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  std::vector<ClaimRecord> out;
  out.reserve(ids.size());
  for (const auto& r : records_) {
    if (wanted.count(r.id)) out.push_back(r);
  }
  // A subset may drop parents of retained augmentation products.
  for (auto& r : out) {
    if (r.parent_id && !wanted.count(*r.parent_id)) r.parent_id.reset();
  }
  return Dataset(std::move(name), std::move(out));
}

DataFormat parse_format(std::string_view token) {
  const std::string t = lower(token);
  if (t == "jsonl") return DataFormat::jsonl;
  if (t == "csv") return DataFormat::csv;
  throw ValidationError("unknown format '" + std::string(token) + "' (expected jsonl or csv)");
}

DataFormat format_from_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".csv" ? DataFormat::csv : DataFormat::jsonl;
}

Dataset read_jsonl(std::istream& in, std::string name) {
  std::vector<ClaimRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line_no);
    ClaimRecord r;
    for (const char* key : {"id", "text", "label"}) {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_string()) {
        throw ParseError(std::string("missing or non-string field '") + key + "'", line_no);
      }
    }
    r.id = obj["id"].get<std::string>();
    r.text = obj["text"].get<std::string>();
    try {
      r.label = parse_label(obj["label"].get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (trim(r.text).empty()) throw ParseError("record '" + r.id + "' has empty text", line_no);
    r.source = optional_field(obj, "source", line_no);
    r.date = optional_field(obj, "date", line_no);
    r.evidence = optional_field(obj, "evidence", line_no);
    r.parent_id = optional_field(obj, "parent_id", line_no);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ValidationError("no records");
  return Dataset(std::move(name), std::move(records));
}

Dataset read_csv(std::istream& in, std::string name) {
  std::vector<std::string> header;
  std::size_t line = 1;
  if (!read_csv_row(in, header, line)) throw ValidationError("no records");
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[lower(trim(header[i]))] = i;
  for (const char* key : {"id", "text", "label"}) {
    if (!column.count(key)) throw ParseError(std::string("header lacks column '") + key + "'", 1);
  }
  auto get = [&](const std::vector<std::string>& row, const char* key) -> std::optional<std::string> {
    auto it = column.find(key);
    if (it == column.end() || it->second >= row.size() || row[it->second].empty()) return std::nullopt;
    return row[it->second];
  };

  std::vector<ClaimRecord> records;
  std::vector<std::string> row;
  while (true) {
    const std::size_t row_line = line;
    if (!read_csv_row(in, row, line)) break;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() > header.size()) throw ParseError("more fields than header columns", row_line);
    ClaimRecord r;
    r.id = get(row, "id").value_or("");
    r.text = get(row, "text").value_or("");
    if (r.id.empty()) throw ParseError("missing id", row_line);
    if (trim(r.text).empty()) throw ParseError("record '" + r.id + "' has empty text", row_line);
    try {
      r.label = parse_label(get(row, "label").value_or(""));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), row_line);
    }
    r.source = get(row, "source");
    r.date = get(row, "date");
    r.evidence = get(row, "evidence");
    r.parent_id = get(row, "parent_id");
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ValidationError("no records");
  return Dataset(std::move(name), std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::string name = path.stem().string();
  return format == DataFormat::csv ? read_csv(in, std::move(name)) : read_jsonl(in, std::move(name));
}

void write_jsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& r : dataset.records()) {
    json obj = json::object();
    obj["id"] = r.id;
    obj["text"] = r.text;
    obj["label"] = label_name(r.label);
    if (r.source) obj["source"] = *r.source;
    if (r.date) obj["date"] = *r.date;
    if (r.evidence) obj["evidence"] = *r.evidence;
    if (r.parent_id) obj["parent_id"] = *r.parent_id;
    out << obj.dump() << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  write_jsonl(out, dataset);
}

std::vector<std::string> SplitPlan::training_ids(const Dataset& dataset, std::size_t fold) const {
  std::unordered_set<std::string_view> held_out(folds.at(fold).begin(), folds.at(fold).end());
  std::vector<std::string> ids;
  for (const auto& r : dataset.records()) {
    if (!held_out.count(r.id)) ids.push_back(r.id);
  }
  return ids;
}

SplitPlan stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2, got " + std::to_string(k));
  if (k > dataset.size()) {
    throw ValidationError("k=" + std::to_string(k) + " exceeds the record count (" +
                          std::to_string(dataset.size()) + ")");
  }

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[label_value(dataset[i].label)].push_back(i);
  }

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> members(k);
  std::size_t next = 0;
  // Dealing each shuffled class round-robin, continuing where the previous
  // class stopped, gives per-fold counts of floor or ceil of n_c / k.
  for (auto& indices : by_class) {
    shuffle(std::span<std::size_t>(indices), rng);
    for (std::size_t idx : indices) {
      members[next].push_back(idx);
      next = (next + 1) % k;
    }
  }

  SplitPlan plan;
  plan.seed = seed;
  plan.stratified = true;
  plan.folds.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(members[f].begin(), members[f].end());
    for (std::size_t idx : members[f]) plan.folds[f].push_back(dataset[idx].id);
  }
  return plan;
}

}  // namespace factshap
