#include "ccgrag/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ccgrag/errors.hpp"

namespace ccgrag {

using nlohmann::json;
using nlohmann::ordered_json;

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, true, /*ignore_comments=*/true);

  for (const auto& [key, value] : j.items()) {
    if (key == "languages") {
      base.languages.clear();
      for (const json& jl : value) base.languages.push_back(language_from_string(jl));
    } else if (key == "h") {
      base.h = value.get<int>();
    } else if (key == "l") {
      base.l = value.get<int>();
    } else if (key == "gamma") {
      base.gamma = value.get<double>();
    } else if (key == "coarse_k") {
      base.coarse_k = value.get<int>();
    } else if (key == "top_m") {
      base.top_m = value.get<int>();
    } else if (key == "window") {
      base.window = value.get<int>();
    } else if (key == "stride") {
      base.stride = value.get<int>();
    } else if (key == "exclude_globs") {
      base.exclude_globs = value.get<std::vector<std::string>>();
    } else if (key == "dep_hop_rule") {
      const std::string rule = value.get<std::string>();
      if (rule == "attach") {
        base.hop_rule = DepHopRule::attach;
      } else if (rule == "attach_plus_one") {
        base.hop_rule = DepHopRule::attach_plus_one;
      } else {
        throw Error("config: dep_hop_rule must be attach or attach_plus_one");
      }
    } else if (key == "llm") {
      for (const auto& [lk, lv] : value.items()) {
        if (lk == "endpoint_url") {
          base.llm.endpoint_url = lv.get<std::string>();
        } else if (lk == "model_name") {
          base.llm.model_name = lv.get<std::string>();
        } else if (lk == "max_output_tokens") {
          base.llm.max_output_tokens = lv.get<int>();
        } else if (lk == "temperature") {
          base.llm.temperature = lv.get<double>();
        } else if (lk == "context_window_tokens") {
          base.llm.context_window_tokens = lv.get<int>();
        } else if (lk == "auth_token_env_name") {
          base.llm.auth_token_env_name = lv.get<std::string>();
        } else if (lk == "max_retries") {
          base.llm.max_retries = lv.get<int>();
        } else if (lk == "timeout_seconds") {
          base.llm.timeout_seconds = lv.get<double>();
        } else {
          throw Error("config: unknown llm key '" + lk + "'");
        }
      }
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  return base;
}

std::string config_to_json(const Config& config) {
  ordered_json j;
  ordered_json langs = ordered_json::array();
  for (Language lang : config.languages) langs.push_back(to_string(lang));
  j["languages"] = std::move(langs);
  j["h"] = config.h;
  j["l"] = config.l;
  j["gamma"] = config.gamma;
  j["coarse_k"] = config.coarse_k;
  j["top_m"] = config.top_m;
  j["window"] = config.window;
  j["stride"] = config.stride;
  j["exclude_globs"] = config.exclude_globs;
  j["dep_hop_rule"] = config.hop_rule == DepHopRule::attach ? "attach" : "attach_plus_one";
  ordered_json llm;
  llm["endpoint_url"] = config.llm.endpoint_url;
  llm["model_name"] = config.llm.model_name;
  llm["max_output_tokens"] = config.llm.max_output_tokens;
  llm["temperature"] = config.llm.temperature;
  llm["context_window_tokens"] = config.llm.context_window_tokens;
  llm["auth_token_env_name"] = config.llm.auth_token_env_name;
  llm["max_retries"] = config.llm.max_retries;
  llm["timeout_seconds"] = config.llm.timeout_seconds;
  j["llm"] = std::move(llm);
  return j.dump(2) + "\n";
}

}  // namespace ccgrag
