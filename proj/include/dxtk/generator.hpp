#pragma once

#include <memory>
#include <string>

namespace dxtk {

// Text-generation client used for the differential-comparison step.
// Implementations throw GeneratorError on failure.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const std::string& prompt) = 0;
};

// Pure function of the prompt: recovers the quoted anchor diagnosis from the
// comparator prompt and emits a fixed comparison sentence around it, so
// synthesis runs are reproducible without a live model.
class MockGenerator final : public TextGenerator {
 public:
  std::string generate(const std::string& prompt) override;
};

struct RemoteGeneratorConfig {
  std::string base_url = "http://127.0.0.1:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "default";
  double temperature = 0.7;
  int timeout_ms = 30000;
  int max_retries = 2;                           // retries after the first attempt
  std::string credential_env = "DXTK_API_KEY";   // bearer token env var, optional
};

// Speaks the common chat-completion wire protocol: POST {model, messages,
// temperature}, read choices[0].message.content. Retries timeouts,
// non-success statuses, and malformed bodies up to the retry budget.
class RemoteGenerator final : public TextGenerator {
 public:
  explicit RemoteGenerator(RemoteGeneratorConfig config);
  ~RemoteGenerator() override;
  std::string generate(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dxtk
