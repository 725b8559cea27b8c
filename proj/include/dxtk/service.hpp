#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "dxtk/reward.hpp"
#include "dxtk/taxonomy.hpp"

namespace dxtk {

// One scoring call as carried on the wire.
struct ScoreRequest {
  std::string completion;
  TaxonomyAnnotation truth;
  std::vector<OptionRef> options;
  TagSet tags = TagSet::rl();
  ParseMode mode = ParseMode::strict;
};

// Raised while decoding a request body. `unprocessable` distinguishes
// well-formed bodies with unresolvable values (HTTP 422) from malformed ones
// (HTTP 400); `field` names the offending field.
class RequestError : public std::runtime_error {
 public:
  RequestError(std::string field, const std::string& message, bool unprocessable)
      : std::runtime_error(message), field_(std::move(field)),
        unprocessable_(unprocessable) {}

  const std::string& field() const { return field_; }
  bool unprocessable() const { return unprocessable_; }

 private:
  std::string field_;
  bool unprocessable_;
};

// Decodes a request. Ground truth arrives either as an explicit
// "ground_truth_path" or as a "ground_truth_label" resolved through `tree`.
ScoreRequest parse_score_request(const nlohmann::json& body, const TaxonomyTree& tree);

RewardBreakdown score(const ScoreRequest& request, const RewardConfig& cfg);

// FNV-1a over the file bytes, hex-encoded; stable across restarts.
std::string file_checksum(const std::string& path);

// HTTP reward service:
//   POST /v1/score        one request -> one breakdown
//   POST /v1/score_batch  {"requests": [...]} -> {"results": [...]}, ordered
//   GET  /v1/health       version, format_version, taxonomy checksum
// Handlers only call pure scoring functions over immutable shared state.
class RewardService {
 public:
  RewardService(TaxonomyTree tree, std::string taxonomy_checksum, RewardConfig cfg);
  ~RewardService();

  // Blocks until stop(); returns false if binding failed.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and serves on a background thread; returns the
  // port. Used by tests.
  int start_background(const std::string& host);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dxtk
