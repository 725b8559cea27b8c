#pragma once

#include <cstdint>
#include <string>

#include "dxtk/generator.hpp"
#include "dxtk/reward.hpp"

namespace dxtk {

// Toolkit-wide settings, loadable from a JSON file; CLI flags override fields.
struct ToolConfig {
  std::string taxonomy_path;
  std::string ddx_path;
  RemoteGeneratorConfig generator;
  double p_local = 0.5;
  int n_opts = 4;
  double gran_scale = kDefaultGranScale;
  std::string tag_preset = "rl";
  std::uint64_t seed = 0;

  static ToolConfig load_file(const std::string& path);
  void validate() const;  // gran_scale in (0,1], n_opts >= 2, known preset
};

}  // namespace dxtk
