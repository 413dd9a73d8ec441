#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factshap/corpus.hpp"

namespace factshap {

struct TeacherTarget {
  double p_true = 0.5;
  std::optional<double> logit;
};

// Per-claim truth probabilities from an external teacher model.
struct TeacherTargets {
  std::map<std::string, TeacherTarget, std::less<>> by_id;
  std::string teacher_name;
  std::string created;
  // Lines whose id is not in the dataset.
  std::size_t ignored_extra = 0;

  std::size_t size() const { return by_id.size(); }
  // Throws ValidationError when the id has no target.
  double p_true(std::string_view id) const;
};

inline constexpr double kLogitTolerance = 1e-6;

// Parses teacher JSONL ({"id", "p_true", "logit"?} per line; an optional
// first-line {"teacher": ..., "created": ...} header is accepted) and checks
// coverage of every record of `dataset`.
TeacherTargets read_teacher_targets(std::istream& in, const Dataset& dataset);
TeacherTargets ingest_teacher_targets(const std::filesystem::path& path, const Dataset& dataset);

// Writes the teacher JSONL exchange format.
void write_teacher_targets(std::ostream& out, const TeacherTargets& targets);

}  // namespace factshap
