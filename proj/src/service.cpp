#include "dxtk/service.hpp"

#include <fstream>
#include <thread>

#include "httplib.h"

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"
#include "dxtk/rng.hpp"
#include "dxtk/serialize.hpp"
#include "dxtk/version.hpp"

namespace dxtk {

namespace {

using nlohmann::json;

std::string wire_string(const json& body, const char* field) {
  if (!body.contains(field) || !body[field].is_string()) {
    throw RequestError(field, std::string(field) + " must be a string", false);
  }
  return body[field].get<std::string>();
}

TagSet tags_from_body(const json& body) {
  if (!body.contains("tag_set")) return TagSet::rl();
  const auto& spec = body["tag_set"];
  if (spec.is_string()) {
    const auto preset = TagSet::preset(spec.get<std::string>());
    if (!preset) {
      throw RequestError("tag_set", "unknown tag preset \"" + spec.get<std::string>() + "\"",
                         true);
    }
    return *preset;
  }
  if (!spec.is_object()) {
    throw RequestError("tag_set", "tag_set must be a preset name or tag object", false);
  }
  TagSet tags;
  tags.open_think = wire_string(spec, "open_think");
  tags.close_think = wire_string(spec, "close_think");
  tags.open_answer = wire_string(spec, "open_answer");
  tags.close_answer = wire_string(spec, "close_answer");
  try {
    tags.validate();
  } catch (const DataError& e) {
    throw RequestError("tag_set", e.what(), true);
  }
  return tags;
}

json error_body(const std::string& field, const std::string& message) {
  return {{"error", {{"field", field}, {"message", message}}}};
}

}  // namespace

ScoreRequest parse_score_request(const json& body, const TaxonomyTree& tree) {
  if (!body.is_object()) throw RequestError("", "request body must be an object", false);
  ScoreRequest request;
  request.completion = wire_string(body, "completion");

  const bool has_path = body.contains("ground_truth_path");
  const bool has_label = body.contains("ground_truth_label");
  if (has_path == has_label) {
    throw RequestError("ground_truth_path",
                       "provide exactly one of ground_truth_path or ground_truth_label",
                       false);
  }
  if (has_path) {
    const auto& path = body["ground_truth_path"];
    if (!path.is_array()) {
      throw RequestError("ground_truth_path", "ground_truth_path must be a label array",
                         false);
    }
    for (const auto& label : path) {
      if (!label.is_string()) {
        throw RequestError("ground_truth_path", "path labels must be strings", false);
      }
      request.truth.path.push_back(canonical_label(label.get<std::string>()));
    }
    if (request.truth.path.empty()) {
      throw RequestError("ground_truth_path", "ground_truth_path must be non-empty", true);
    }
    const auto malignancy = parse_malignancy(wire_string(body, "malignancy"));
    if (!malignancy) {
      throw RequestError("malignancy", "unresolvable malignancy category", true);
    }
    request.truth.malignancy = *malignancy;
  } else {
    const std::string label = wire_string(body, "ground_truth_label");
    if (!tree.contains(label)) {
      throw RequestError("ground_truth_label",
                         "label \"" + canonical_label(label) + "\" not in taxonomy", true);
    }
    request.truth = tree.path_of(label);
  }

  if (body.contains("options")) {
    if (!body["options"].is_array()) {
      throw RequestError("options", "options must be an array", false);
    }
    for (const auto& opt : body["options"]) {
      const std::string letter = wire_string(opt, "letter");
      if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z') {
        throw RequestError("options", "option letter must be a single letter A-Z", true);
      }
      request.options.push_back({letter[0], wire_string(opt, "label")});
    }
  }

  request.tags = tags_from_body(body);
  if (body.contains("mode")) {
    const auto mode = parse_mode(wire_string(body, "mode"));
    if (!mode) throw RequestError("mode", "mode must be strict or lenient", true);
    request.mode = *mode;
  }
  return request;
}

RewardBreakdown score(const ScoreRequest& request, const RewardConfig& cfg) {
  ScoreTarget target{request.truth, request.options};
  return total_reward(request.completion, target, request.tags, request.mode, cfg);
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

struct RewardService::Impl {
  TaxonomyTree tree;
  std::string checksum;
  RewardConfig cfg;
  httplib::Server server;
  std::thread worker;

  Impl(TaxonomyTree t, std::string c, RewardConfig r)
      : tree(std::move(t)), checksum(std::move(c)), cfg(r) {
    server.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      handle_score(req, res);
    });
    server.Post("/v1/score_batch",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_batch(req, res);
                });
    server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      const json body{{"status", "ok"},
                      {"version", kVersion},
                      {"format_version", kFormatVersion},
                      {"taxonomy_checksum", checksum},
                      {"taxonomy_nodes", tree.size()}};
      res.set_content(body.dump(), "application/json");
    });
  }

  static std::optional<json> parse_body(const httplib::Request& req,
                                        httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      res.status = 400;
      res.set_content(error_body("", "malformed JSON body").dump(), "application/json");
      return std::nullopt;
    }
    return body;
  }

  void handle_score(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    try {
      const auto request = parse_score_request(*body, tree);
      res.set_content(to_json(score(request, cfg)).dump(), "application/json");
    } catch (const RequestError& e) {
      res.status = e.unprocessable() ? 422 : 400;
      res.set_content(error_body(e.field(), e.what()).dump(), "application/json");
    }
  }

  void handle_batch(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req, res);
    if (!body) return;
    if (!body->contains("requests") || !(*body)["requests"].is_array()) {
      res.status = 400;
      res.set_content(error_body("requests", "requests must be an array").dump(),
                      "application/json");
      return;
    }
    json results = json::array();
    std::size_t index = 0;
    try {
      for (const auto& entry : (*body)["requests"]) {
        const auto request = parse_score_request(entry, tree);
        results.push_back(to_json(score(request, cfg)));
        ++index;
      }
    } catch (const RequestError& e) {
      res.status = e.unprocessable() ? 422 : 400;
      res.set_content(error_body("requests[" + std::to_string(index) + "]." + e.field(),
                                 e.what())
                          .dump(),
                      "application/json");
      return;
    }
    res.set_content(json{{"results", std::move(results)}}.dump(), "application/json");
  }
};

RewardService::RewardService(TaxonomyTree tree, std::string taxonomy_checksum,
                             RewardConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(tree), std::move(taxonomy_checksum), cfg)) {}

RewardService::~RewardService() { stop(); }

bool RewardService::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int RewardService::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw DataError("cannot bind service port on " + host);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void RewardService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace dxtk
