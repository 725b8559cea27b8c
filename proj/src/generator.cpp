#include "dxtk/generator.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "dxtk/errors.hpp"

namespace dxtk {

std::string MockGenerator::generate(const std::string& prompt) {
  static constexpr std::string_view kAnchorPrefix = "explain concisely why \"";
  static constexpr std::string_view kAnchorSuffix = "\" best matches";

  std::string anchor = "the primary candidate";
  const auto start = prompt.find(kAnchorPrefix);
  if (start != std::string::npos) {
    const auto from = start + kAnchorPrefix.size();
    const auto end = prompt.find(kAnchorSuffix, from);
    if (end != std::string::npos) anchor = prompt.substr(from, end - from);
  }
  return "The observed features align with the presentation of " + anchor +
         ", while the defining features described for the alternative are absent.";
}

struct RemoteGenerator::Impl {
  RemoteGeneratorConfig config;
  httplib::Client client;

  explicit Impl(RemoteGeneratorConfig cfg)
      : config(std::move(cfg)), client(config.base_url) {
    client.set_connection_timeout(0, config.timeout_ms * 1000LL);
    client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
    client.set_write_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);
    if (!config.credential_env.empty()) {
      if (const char* token = std::getenv(config.credential_env.c_str())) {
        client.set_default_headers({{"Authorization", std::string("Bearer ") + token}});
      }
    }
  }
};

RemoteGenerator::RemoteGenerator(RemoteGeneratorConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteGenerator::~RemoteGenerator() = default;

std::string RemoteGenerator::generate(const std::string& prompt) {
  const nlohmann::json body = {
      {"model", impl_->config.model},
      {"temperature", impl_->config.temperature},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
  };
  const std::string payload = body.dump();

  std::string last_error;
  const int attempts = impl_->config.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    auto res = impl_->client.Post(impl_->config.path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty() || !doc["choices"][0].contains("message") ||
        !doc["choices"][0]["message"].contains("content") ||
        !doc["choices"][0]["message"]["content"].is_string()) {
      last_error = "malformed completion body";
      continue;
    }
    // Verbatim except trailing whitespace.
    std::string text = doc["choices"][0]["message"]["content"].get<std::string>();
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
      text.pop_back();
    }
    return text;
  }
  throw GeneratorError("generation failed after " +
                           std::to_string(impl_->config.max_retries) + " retries (" +
                           last_error + ")",
                       impl_->config.max_retries);
}

}  // namespace dxtk
