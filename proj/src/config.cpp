#include "dxtk/config.hpp"

#include <fstream>

#include "json.hpp"

#include "dxtk/errors.hpp"

namespace dxtk {

ToolConfig ToolConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw DataError("invalid JSON config: " + path);

  ToolConfig cfg;
  cfg.taxonomy_path = doc.value("taxonomy", cfg.taxonomy_path);
  cfg.ddx_path = doc.value("ddx", cfg.ddx_path);
  cfg.p_local = doc.value("p_local", cfg.p_local);
  cfg.n_opts = doc.value("n_opts", cfg.n_opts);
  cfg.gran_scale = doc.value("gran_scale", cfg.gran_scale);
  cfg.tag_preset = doc.value("tag_preset", cfg.tag_preset);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("generator")) {
    const auto& gen = doc["generator"];
    cfg.generator.base_url = gen.value("base_url", cfg.generator.base_url);
    cfg.generator.path = gen.value("path", cfg.generator.path);
    cfg.generator.model = gen.value("model", cfg.generator.model);
    cfg.generator.temperature = gen.value("temperature", cfg.generator.temperature);
    cfg.generator.timeout_ms = gen.value("timeout_ms", cfg.generator.timeout_ms);
    cfg.generator.max_retries = gen.value("max_retries", cfg.generator.max_retries);
    cfg.generator.credential_env =
        gen.value("credential_env", cfg.generator.credential_env);
  }
  cfg.validate();
  return cfg;
}

void ToolConfig::validate() const {
  if (gran_scale <= 0.0 || gran_scale > 1.0) {
    throw DataError("config: gran_scale must be in (0, 1]");
  }
  if (n_opts < 2) throw DataError("config: n_opts must be >= 2");
  if (p_local < 0.0 || p_local > 1.0) throw DataError("config: p_local must be in [0, 1]");
  if (!TagSet::preset(tag_preset)) {
    throw DataError("config: unknown tag preset \"" + tag_preset + "\"");
  }
  if (generator.max_retries < 0) throw DataError("config: max_retries must be >= 0");
  if (generator.timeout_ms <= 0) throw DataError("config: timeout_ms must be > 0");
}

}  // namespace dxtk
