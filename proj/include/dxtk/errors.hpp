#pragma once

#include <stdexcept>
#include <string>

namespace dxtk {

// Invalid or inconsistent input data: bad files, unknown labels, schema
// violations. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Remote text generation failed after exhausting the retry budget.
class GeneratorError : public std::runtime_error {
 public:
  GeneratorError(const std::string& what, int retries)
      : std::runtime_error(what), retries_(retries) {}

  int retries() const { return retries_; }

 private:
  int retries_;
};

}  // namespace dxtk
