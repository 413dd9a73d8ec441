#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factshap {

enum class Label { fake_claim = 0, true_claim = 1 };

// Accepts "true"/"real" and "fake"/"false", case-insensitive.
Label parse_label(std::string_view token);
std::string_view label_name(Label label);
inline int label_value(Label label) { return label == Label::true_claim ? 1 : 0; }

struct ClaimRecord {
  std::string id;
  std::string text;
  Label label = Label::fake_claim;
  std::optional<std::string> source;
  std::optional<std::string> date;
  std::optional<std::string> evidence;
  // Set when this record was produced by augmenting record `parent_id`.
  std::optional<std::string> parent_id;

  bool operator==(const ClaimRecord&) const = default;
};

struct ClassCounts {
  std::size_t true_claims = 0;
  std::size_t fake_claims = 0;
};

class Dataset {
 public:
  Dataset() = default;
  // Validates ids, texts, and parent links; throws ValidationError.
  Dataset(std::string name, std::vector<ClaimRecord> records);

  const std::string& name() const { return name_; }
  const std::vector<ClaimRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const ClaimRecord& operator[](std::size_t i) const { return records_[i]; }

  const ClaimRecord* find(std::string_view id) const;
  ClassCounts class_counts() const;
  // Throws unless both labels are present.
  void require_both_classes() const;

  // Records whose ids are in `ids`, in dataset order.
  Dataset subset(const std::vector<std::string>& ids, std::string name) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::string name_;
  std::vector<ClaimRecord> records_;
};

enum class DataFormat { jsonl, csv };
DataFormat parse_format(std::string_view token);
// Picks the format from the file extension; ".csv" -> csv, otherwise jsonl.
DataFormat format_from_path(const std::filesystem::path& path);

Dataset read_jsonl(std::istream& in, std::string name);
Dataset read_csv(std::istream& in, std::string name);
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);

void write_jsonl(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

struct SplitPlan {
  std::vector<std::vector<std::string>> folds;
  std::uint64_t seed = 0;
  bool stratified = true;

  // Ids of every fold except `fold`, in dataset order.
  std::vector<std::string> training_ids(const Dataset& dataset, std::size_t fold) const;
};

// Partitions every record id into k folds preserving class proportions.
// Deterministic for fixed (dataset order, k, seed). Requires
// 2 <= k <= record count; a class smaller than k leaves some folds without it.
SplitPlan stratified_kfold(const Dataset& dataset, std::size_t k, std::uint64_t seed);

}  // namespace factshap
