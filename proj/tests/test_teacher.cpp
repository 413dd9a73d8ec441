#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "factshap/error.hpp"
#include "factshap/models.hpp"
#include "factshap/teacher.hpp"

using namespace factshap;

namespace {

Dataset ten_claims() {
  std::vector<ClaimRecord> records;
  for (int i = 0; i < 10; ++i) {
    ClaimRecord r;
    r.id = "c" + std::to_string(i);
    r.text = "claim number " + std::to_string(i);
    r.label = i % 2 ? Label::true_claim : Label::fake_claim;
    records.push_back(r);
  }
  return Dataset("ten", records);
}

std::string targets_for(const Dataset& d, double p) {
  std::ostringstream out;
  for (const auto& r : d.records()) out << R"({"id":")" << r.id << R"(","p_true":)" << p << "}\n";
  return out.str();
}

std::string message_of(const std::string& text, const Dataset& d) {
  std::istringstream in(text);
  try {
    read_teacher_targets(in, d);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Teacher, ExactCoverage) {
  const auto d = ten_claims();
  std::istringstream in(targets_for(d, 0.25));
  const auto t = read_teacher_targets(in, d);
  EXPECT_EQ(t.size(), 10u);
  EXPECT_EQ(t.p_true("c3"), 0.25);
}

TEST(Teacher, HeaderLineIsMetadata) {
  const auto d = ten_claims();
  std::istringstream in(R"({"teacher":"distilbert","created":"2021-01-01"})" "\n" + targets_for(d, 0.5));
  const auto t = read_teacher_targets(in, d);
  EXPECT_EQ(t.teacher_name, "distilbert");
  EXPECT_EQ(t.created, "2021-01-01");
}

TEST(Teacher, OutOfRangeNamesId) {
  const auto d = ten_claims();
  auto text = targets_for(d, 0.5);
  const std::string line = R"("c4","p_true":0.5)";
  text.replace(text.find(line), line.size(), R"("c4","p_true":1.3)");
  const auto msg = message_of(text, d);
  EXPECT_NE(msg.find("c4"), std::string::npos) << msg;
}

TEST(Teacher, MissingCoverageFailsLoudly) {
  const auto d = ten_claims();
  auto text = targets_for(d, 0.5);
  text = text.substr(text.find('\n') + 1);  // drop c0
  const auto msg = message_of(text, d);
  EXPECT_NE(msg.find("c0"), std::string::npos) << msg;
}

TEST(Teacher, DuplicateRejected) {
  const auto d = ten_claims();
  EXPECT_NE(message_of(targets_for(d, 0.5) + R"({"id":"c1","p_true":0.5})" "\n", d).find("c1"), std::string::npos);
}

TEST(Teacher, ExtraIdsCounted) {
  const auto d = ten_claims();
  std::istringstream in(targets_for(d, 0.5) + R"({"id":"elsewhere","p_true":0.5})" "\n");
  EXPECT_EQ(read_teacher_targets(in, d).ignored_extra, 1u);
}

TEST(Teacher, LogitMustAgreeWithProbability) {
  const auto d = ten_claims();
  std::ostringstream ok, bad;
  for (const auto& r : d.records()) {
    ok << R"({"id":")" << r.id << R"(","p_true":0.7310585786300049,"logit":1.0})" << "\n";
    bad << R"({"id":")" << r.id << R"(","p_true":0.7310585786300049,"logit":1.1})" << "\n";
  }
  std::istringstream in(ok.str());
  EXPECT_NO_THROW(read_teacher_targets(in, d));
  EXPECT_NE(message_of(bad.str(), d).find("logit"), std::string::npos);
}

TEST(Teacher, HardLabelsAccepted) {
  const auto d = ten_claims();
  std::ostringstream out;
  for (const auto& r : d.records()) out << R"({"id":")" << r.id << R"(","p_true":)" << label_value(r.label) << "}\n";
  std::istringstream in(out.str());
  const auto t = read_teacher_targets(in, d);
  EXPECT_EQ(t.p_true("c1"), 1.0);
  EXPECT_EQ(t.p_true("c2"), 0.0);
}

TEST(Teacher, WriteReadRoundTrip) {
  const auto d = ten_claims();
  TeacherTargets t;
  t.teacher_name = "fixture";
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = 0.05 + 0.09 * double(i);
    t.by_id[d[i].id] = TeacherTarget{p, logit(p)};
  }
  std::ostringstream out;
  write_teacher_targets(out, t);
  std::istringstream in(out.str());
  const auto back = read_teacher_targets(in, d);
  EXPECT_EQ(back.teacher_name, "fixture");
  for (const auto& [id, target] : t.by_id) {
    EXPECT_EQ(back.by_id.at(id).p_true, target.p_true);
    EXPECT_LE(std::abs(sigmoid(*back.by_id.at(id).logit) - back.by_id.at(id).p_true), 1e-6);
  }
}
