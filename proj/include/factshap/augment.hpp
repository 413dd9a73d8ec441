#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "factshap/corpus.hpp"

namespace factshap {

struct TranslationRequest {
  std::string text;
  std::string source_lang;
  std::string target_lang;
  // Id of the claim being augmented; lets fixture clients look up answers.
  std::string record_id;
};

// Throws TransportError when the service cannot produce a translation.
class TranslationClient {
 public:
  virtual ~TranslationClient() = default;
  virtual std::string translate(const TranslationRequest& request) = 0;
};

// Returns its input unchanged; every round trip is skipped as identical.
class IdentityClient final : public TranslationClient {
 public:
  std::string translate(const TranslationRequest& request) override { return request.text; }
};

// Replays recorded round trips from a JSONL table of {"id", "paraphrase"}.
// The outbound leg yields the paraphrase for the record id and the return
// leg passes it through, so a full round trip returns the paraphrase.
class FixtureClient final : public TranslationClient {
 public:
  explicit FixtureClient(std::map<std::string, std::string, std::less<>> paraphrases)
      : paraphrases_(std::move(paraphrases)) {}
  static FixtureClient load(const std::filesystem::path& path);

  std::string translate(const TranslationRequest& request) override;
  std::size_t size() const { return paraphrases_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> paraphrases_;
};

struct HttpClientConfig {
  std::string endpoint;  // e.g. http://localhost:8080/translate
  std::string auth_token;
  double timeout_seconds = 30.0;
};

// POST {"text", "source", "target"} -> {"text"}; non-2xx is a failure.
class HttpTranslationClient final : public TranslationClient {
 public:
  explicit HttpTranslationClient(HttpClientConfig config);
  std::string translate(const TranslationRequest& request) override;

 private:
  HttpClientConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

enum class AugmentScope { train_folds_only, whole_dataset };
std::string_view scope_name(AugmentScope scope);
AugmentScope parse_scope(std::string_view name);

struct AugmentationReport {
  std::size_t produced = 0;
  std::size_t skipped_identical = 0;
  std::size_t failed = 0;
  // Records not eligible under the scope, or already augmentation products.
  std::size_t not_eligible = 0;
  std::string pivot_language = "de";
  AugmentScope scope = AugmentScope::train_folds_only;
  std::vector<std::string> failures;  // "id: reason"

  bool operator==(const AugmentationReport&) const = default;
};

inline constexpr const char* kSourceLanguage = "en";
inline constexpr const char* kDefaultPivot = "de";

// Id given to the back-translation of `parent_id`.
std::string augmented_id(std::string_view parent_id, std::string_view pivot);

// Round-trips the text through `pivot`. Returns nullopt when the result
// matches the original case-insensitively. Throws TransportError on client
// failure or an empty translation.
std::optional<ClaimRecord> back_translate(TranslationClient& client, const ClaimRecord& record,
                                          std::string_view pivot = kDefaultPivot);

struct AugmentOptions {
  std::string pivot = kDefaultPivot;
  AugmentScope scope = AugmentScope::train_folds_only;
  // With train_folds_only, only these ids are augmented. Unset means every
  // original record is eligible (the caller is augmenting a training split).
  std::optional<std::set<std::string, std::less<>>> eligible_ids;
  // Upper bound on concurrent translation requests.
  std::size_t max_concurrency = 1;
};

struct AugmentResult {
  Dataset dataset;
  AugmentationReport report;
};

// Appends one back-translated product per eligible original record.
// Originals are kept unchanged and in order; products follow in input order
// regardless of completion order. Records with parent_id set are never
// re-augmented. Failures are counted, never fatal.
AugmentResult augment_dataset(TranslationClient& client, const Dataset& dataset,
                              const AugmentOptions& options = {});

}  // namespace factshap
