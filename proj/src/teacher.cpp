#include "factshap/teacher.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "factshap/error.hpp"

namespace factshap {

namespace {

using nlohmann::json;

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double TeacherTargets::p_true(std::string_view id) const {
  auto it = by_id.find(id);
  if (it == by_id.end()) throw ValidationError("no teacher target for id '" + std::string(id) + "'");
  return it->second.p_true;
}

TeacherTargets read_teacher_targets(std::istream& in, const Dataset& dataset) {
  TeacherTargets targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line_no);
    if (!obj.contains("id") && obj.contains("teacher")) {
      targets.teacher_name = obj.value("teacher", "");
      targets.created = obj.value("created", "");
      continue;
    }
    if (!obj.contains("id") || !obj["id"].is_string()) throw ParseError("missing string 'id'", line_no);
    if (!obj.contains("p_true") || !obj["p_true"].is_number()) {
      throw ParseError("missing numeric 'p_true'", line_no);
    }
    const auto id = obj["id"].get<std::string>();
    TeacherTarget t;
    t.p_true = obj["p_true"].get<double>();
    if (!(t.p_true >= 0.0 && t.p_true <= 1.0)) {
      throw ValidationError("teacher probability for '" + id + "' is outside [0,1]: " +
                            obj["p_true"].dump());
    }
    if (obj.contains("logit") && !obj["logit"].is_null()) {
      if (!obj["logit"].is_number()) throw ParseError("'logit' must be a number", line_no);
      t.logit = obj["logit"].get<double>();
      if (std::abs(sigmoid(*t.logit) - t.p_true) > kLogitTolerance) {
        throw ValidationError("teacher logit for '" + id + "' disagrees with p_true");
      }
    }
    if (!dataset.find(id)) {
      ++targets.ignored_extra;
      continue;
    }
    if (!targets.by_id.emplace(id, t).second) {
      throw ValidationError("duplicate teacher target for '" + id + "'");
    }
  }

  std::vector<std::string> missing;
  std::size_t missing_count = 0;
  for (const auto& r : dataset.records()) {
    if (targets.by_id.count(r.id)) continue;
    ++missing_count;
    if (missing.size() < 10) missing.push_back(r.id);
  }
  if (missing_count > 0) {
    std::string msg = "teacher targets missing for " + std::to_string(missing_count) + " claim(s):";
    for (const auto& id : missing) msg += " " + id;
    if (missing_count > missing.size()) msg += " ...";
    throw ValidationError(msg);
  }
  return targets;
}

TeacherTargets ingest_teacher_targets(const std::filesystem::path& path, const Dataset& dataset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return read_teacher_targets(in, dataset);
}

void write_teacher_targets(std::ostream& out, const TeacherTargets& targets) {
  if (!targets.teacher_name.empty() || !targets.created.empty()) {
    json header = {{"teacher", targets.teacher_name}};
    if (!targets.created.empty()) header["created"] = targets.created;
    out << header.dump() << '\n';
  }
  for (const auto& [id, t] : targets.by_id) {
    json obj = {{"id", id}, {"p_true", t.p_true}};
    if (t.logit) obj["logit"] = *t.logit;
    out << obj.dump() << '\n';
  }
}

}  // namespace factshap
