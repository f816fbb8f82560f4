// complete(): mock models for deterministic tests, plus the HTTP client for
// OpenAI-compatible completion endpoints.

#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "ccgrag/errors.hpp"
#include "ccgrag/lex.hpp"
#include "ccgrag/prompt_composer.hpp"

#include <httplib.h>

namespace ccgrag {

namespace {

std::string last_nonempty_line(std::string_view text) {
  size_t end = text.size();
  while (end > 0) {
    size_t nl = text.find_last_of('\n', end - 1);
    const size_t start = nl == std::string_view::npos ? 0 : nl + 1;
    std::string_view line = text.substr(start, end - start);
    const std::string norm = lex::normalize_ws(line);
    if (!norm.empty()) return std::string(line);
    if (nl == std::string_view::npos) break;
    end = nl;
  }
  return "";
}

// Simulates an LLM that continues a near-duplicate: find the context's last
// line inside a snippet (best first) and return the line that follows it.
std::string copy_next_line(const PromptBundle& bundle) {
  const std::string last = lex::normalize_ws(last_nonempty_line(bundle.prompt_text));
  if (last.empty()) return "";
  for (const Snippet& s : bundle.snippets) {
    for (size_t i = 0; i + 1 < s.lines.size(); ++i) {
      if (lex::normalize_ws(s.lines[i]) == last) {
        return s.lines[i + 1];
      }
    }
  }
  return "";
}

std::string run_mock(std::string_view model, const PromptBundle& bundle) {
  if (model == "echo") return last_nonempty_line(bundle.prompt_text);
  if (model == "copy-next-line") return copy_next_line(bundle);
  if (model.rfind("fixed:", 0) == 0) return std::string(model.substr(6));
  throw EndpointError(0, "unknown mock model: " + std::string(model));
}

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw EndpointError(0, "malformed endpoint url: " + url);
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string http_complete(const PromptBundle& bundle, const LlmConfig& config) {
  if (config.endpoint_url.rfind("https://", 0) == 0) {
    throw EndpointError(0, "https endpoints are not compiled in; use an http endpoint or proxy");
  }
  const ParsedUrl url = parse_url(config.endpoint_url);

  nlohmann::json body;
  body["model"] = config.model_name;
  body["prompt"] = bundle.prompt_text;
  body["max_tokens"] = config.max_output_tokens;
  body["temperature"] = config.temperature;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config.auth_token_env_name.empty()) {
    if (const char* token = std::getenv(config.auth_token_env_name.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  const int attempts = std::max(1, config.max_retries + 1);
  bool timed_out = false;
  int last_status = 0;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(100 * (1 << std::min(attempt - 1, 4))));
    }
    httplib::Client client(url.base);
    const auto secs = std::chrono::duration<double>(config.timeout_seconds);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);

    httplib::Result res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                  res.error() == httplib::Error::Read || res.error() == httplib::Error::Write;
      last_error = httplib::to_string(res.error());
      continue;  // transport failure: retry
    }
    last_status = res->status;
    if (res->status >= 200 && res->status < 300) {
      nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
      if (parsed.is_discarded()) {
        throw EndpointError(res->status, "endpoint returned malformed JSON");
      }
      if (parsed.contains("choices") && !parsed["choices"].empty()) {
        const nlohmann::json& choice = parsed["choices"][0];
        if (choice.contains("text")) return choice["text"].get<std::string>();
      }
      throw EndpointError(res->status, "endpoint response carries no completion text");
    }
    if (res->status >= 400 && res->status < 500) {
      // Client errors are not retried.
      throw EndpointError(res->status, "endpoint rejected the request (HTTP " +
                                           std::to_string(res->status) + ")");
    }
    last_error = "HTTP " + std::to_string(res->status);
  }
  if (timed_out && last_status == 0) {
    throw TimeoutError("endpoint did not answer within " +
                       std::to_string(config.timeout_seconds) + "s: " + last_error);
  }
  throw EndpointError(last_status, "endpoint kept failing after retries: " + last_error);
}

}  // namespace

std::string complete(const PromptBundle& bundle, const LlmConfig& config) {
  if (bundle.token_estimate > config.context_window_tokens) {
    throw BudgetExceeded("prompt estimate " + std::to_string(bundle.token_estimate) +
                         " tokens exceeds the window of " +
                         std::to_string(config.context_window_tokens));
  }
  std::string raw;
  if (config.endpoint_url.rfind("mock:", 0) == 0) {
    raw = run_mock(std::string_view(config.endpoint_url).substr(5), bundle);
  } else {
    raw = http_complete(bundle, config);
  }
  return first_completion_line(raw);
}

}  // namespace ccgrag
