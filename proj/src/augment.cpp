#include "factshap/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "factshap/error.hpp"

namespace factshap {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

FixtureClient FixtureClient::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::map<std::string, std::string, std::less<>> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() || !obj.contains("paraphrase") ||
        !obj["paraphrase"].is_string()) {
      throw ParseError("expected {\"id\": str, \"paraphrase\": str}", line_no);
    }
    if (!table.emplace(obj["id"].get<std::string>(), obj["paraphrase"].get<std::string>()).second) {
      throw ParseError("duplicate fixture id", line_no);
    }
  }
  return FixtureClient(std::move(table));
}

std::string FixtureClient::translate(const TranslationRequest& request) {
  if (request.target_lang == kSourceLanguage) return request.text;
  auto it = paraphrases_.find(request.record_id);
  if (it == paraphrases_.end()) {
    throw TransportError("fixture has no paraphrase for '" + request.record_id + "'");
  }
  return it->second;
}

HttpTranslationClient::HttpTranslationClient(HttpClientConfig config) : config_(std::move(config)) {
  const auto& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("translation endpoint must be an http(s) URL: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string HttpTranslationClient::translate(const TranslationRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto seconds = static_cast<time_t>(config_.timeout_seconds);
  const auto micros = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  httplib::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);

  const json body = {{"text", request.text}, {"source", request.source_lang}, {"target", request.target_lang}};
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransportError("translation request failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("translation service returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto reply = json::parse(res->body);
    return reply.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed translation response: ") + e.what());
  }
}

std::string_view scope_name(AugmentScope scope) {
  return scope == AugmentScope::whole_dataset ? "whole_dataset" : "train_folds_only";
}

AugmentScope parse_scope(std::string_view name) {
  if (name == "train_folds_only") return AugmentScope::train_folds_only;
  if (name == "whole_dataset") return AugmentScope::whole_dataset;
  throw ValidationError("unknown augmentation scope '" + std::string(name) +
                        "' (expected train_folds_only or whole_dataset)");
}

std::string augmented_id(std::string_view parent_id, std::string_view pivot) {
  return std::string(parent_id) + "#bt-" + std::string(pivot);
}

std::optional<ClaimRecord> back_translate(TranslationClient& client, const ClaimRecord& record,
                                          std::string_view pivot) {
  if (blank(record.text)) throw ValidationError("record '" + record.id + "' has empty text");
  const std::string there = client.translate({record.text, kSourceLanguage, std::string(pivot), record.id});
  if (blank(there)) throw TransportError("empty translation into '" + std::string(pivot) + "'");
  std::string back = client.translate({there, std::string(pivot), kSourceLanguage, record.id});
  if (blank(back)) throw TransportError("empty translation back into English");
  if (lower(back) == lower(record.text)) return std::nullopt;

  ClaimRecord product = record;
  product.id = augmented_id(record.id, pivot);
  product.text = std::move(back);
  product.parent_id = record.id;
  return product;
}

AugmentResult augment_dataset(TranslationClient& client, const Dataset& dataset, const AugmentOptions& options) {
  AugmentationReport report;
  report.pivot_language = options.pivot;
  report.scope = options.scope;

  std::set<std::string_view> has_product;
  for (const auto& r : dataset.records()) {
    if (r.parent_id) has_product.insert(*r.parent_id);
  }
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset[i];
    const bool restricted = options.scope == AugmentScope::train_folds_only && options.eligible_ids;
    if (r.parent_id || has_product.count(r.id) || (restricted && !options.eligible_ids->count(r.id))) {
      ++report.not_eligible;
      continue;
    }
    work.push_back(i);
  }

  enum class Outcome { produced, identical, failed };
  struct Slot {
    Outcome outcome = Outcome::failed;
    std::optional<ClaimRecord> product;
    std::string error;
  };
  std::vector<Slot> slots(work.size());

  auto run = [&](std::size_t k) {
    Slot& slot = slots[k];
    try {
      slot.product = back_translate(client, dataset[work[k]], options.pivot);
      slot.outcome = slot.product ? Outcome::produced : Outcome::identical;
    } catch (const std::exception& e) {
      slot.outcome = Outcome::failed;
      slot.error = e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.max_concurrency, 1, std::max<std::size_t>(1, work.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < work.size(); ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < work.size();) run(k);
      });
    }
    for (auto& t : threads) t.join();
  }

  std::vector<ClaimRecord> records = dataset.records();
  for (std::size_t k = 0; k < work.size(); ++k) {
    auto& slot = slots[k];
    switch (slot.outcome) {
      case Outcome::produced:
        ++report.produced;
        records.push_back(std::move(*slot.product));
        break;
      case Outcome::identical:
        ++report.skipped_identical;
        break;
      case Outcome::failed:
        ++report.failed;
        report.failures.push_back(dataset[work[k]].id + ": " + slot.error);
        break;
    }
  }
  return {Dataset(dataset.name(), std::move(records)), std::move(report)};
}

}  // namespace factshap
