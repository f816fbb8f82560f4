#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "ccgrag/errors.hpp"
#include "ccgrag/lex.hpp"
#include "ccgrag/prompt_composer.hpp"

using namespace ccgrag;

namespace {

Snippet snippet(int rank, const std::string& path, std::vector<std::string> lines) {
  Snippet s;
  s.rank = rank;
  s.file_path = path;
  s.window_start = 1;
  s.anchor_line = 1;
  s.lines = std::move(lines);
  return s;
}

}  // namespace

TEST_CASE("zero snippets: prompt is the context verbatim") {
  const PromptBundle b = compose_prompt({}, "a = 1\nb = 2\n", 4000, Language::python);
  CHECK(b.prompt_text == "a = 1\nb = 2\n");
  CHECK(b.snippet_count == 0);
  CHECK_FALSE(b.truncated);
}

TEST_CASE("one snippet: header, path, commented lines, blank, context") {
  const PromptBundle b = compose_prompt({snippet(1, "lib/util.py", {"x = 1", "y = x"})},
                                        "ctx = 1\n", 4000, Language::python);
  CHECK(b.prompt_text ==
        "# the below code fragment can be found in:\n"
        "# lib/util.py\n"
        "# x = 1\n"
        "# y = x\n"
        "\n"
        "ctx = 1\n");
  CHECK(b.snippet_count == 1);
  CHECK_FALSE(b.truncated);
}

TEST_CASE("java contexts use the java comment marker") {
  const PromptBundle b = compose_prompt({snippet(1, "A.java", {"int x = 1;"})},
                                        "int ctx = 1;\n", 4000, Language::java);
  CHECK(b.prompt_text.rfind("// the below code fragment can be found in:", 0) == 0);
}

TEST_CASE("snippets render in ascending similarity order, best last") {
  const PromptBundle b = compose_prompt({snippet(1, "best.py", {"best_line = 1"}),
                                         snippet(2, "mid.py", {"mid_line = 2"}),
                                         snippet(3, "worst.py", {"worst_line = 3"})},
                                        "tail = 0\n", 4000, Language::python);
  const size_t worst = b.prompt_text.find("worst.py");
  const size_t mid = b.prompt_text.find("mid.py");
  const size_t best = b.prompt_text.find("best.py");
  REQUIRE(worst != std::string::npos);
  REQUIRE(mid != std::string::npos);
  REQUIRE(best != std::string::npos);
  CHECK(worst < mid);
  CHECK(mid < best);
  CHECK(best < b.prompt_text.find("tail = 0"));
}

TEST_CASE("tight budget keeps exactly the best-ranked prefix that fits") {
  std::vector<Snippet> many;
  for (int r = 1; r <= 12; ++r) {
    many.push_back(snippet(r, "f" + std::to_string(r) + ".py",
                           {"alpha beta gamma delta epsilon zeta", "eta theta iota kappa"}));
  }
  // Each block costs a fixed token count; aim the effective snippet budget
  // (half the window times the 0.9 slack) midway between 3 and 4 blocks.
  const PromptBundle probe = compose_prompt({many[0]}, "", 1 << 20, Language::python);
  const int block_tokens = probe.token_estimate;
  const int budget = static_cast<int>(7.0 * block_tokens / 0.9);
  const PromptBundle b = compose_prompt(many, "ctx = 1\n", budget, Language::python);
  CHECK(b.snippet_count == 3);
  CHECK(b.truncated);
  CHECK(b.prompt_text.find("f1.py") != std::string::npos);
  CHECK(b.prompt_text.find("f2.py") != std::string::npos);
  CHECK(b.prompt_text.find("f3.py") != std::string::npos);
  CHECK(b.prompt_text.find("f4.py") == std::string::npos);
  // Best snippet sits immediately before the context.
  CHECK(b.prompt_text.find("f1.py") > b.prompt_text.find("f3.py"));
  CHECK(b.token_estimate <= budget);
}

TEST_CASE("at most ten snippets ever render") {
  std::vector<Snippet> many;
  for (int r = 1; r <= 12; ++r) many.push_back(snippet(r, "f" + std::to_string(r) + ".py", {"x"}));
  const PromptBundle b = compose_prompt(many, "ctx = 1\n", 1 << 20, Language::python);
  CHECK(b.snippet_count == 10);
}

TEST_CASE("over-long context is truncated from the start") {
  std::string context;
  for (int i = 0; i < 200; ++i) context += "line_" + std::to_string(i) + " = " +
                                           std::to_string(i) + "\n";
  const PromptBundle b = compose_prompt({}, context, 200, Language::python);
  CHECK(b.truncated);
  CHECK(b.token_estimate <= 200);
  // The tail survives, the head does not.
  CHECK(b.prompt_text.find("line_199") != std::string::npos);
  CHECK(b.prompt_text.find("line_0 =") == std::string::npos);
}

TEST_CASE("prompt composition is deterministic") {
  const std::vector<Snippet> snippets{snippet(1, "a.py", {"x = 1"}),
                                      snippet(2, "b.py", {"y = 2"})};
  const PromptBundle b1 = compose_prompt(snippets, "ctx\n", 500, Language::python);
  const PromptBundle b2 = compose_prompt(snippets, "ctx\n", 500, Language::python);
  CHECK(b1.prompt_text == b2.prompt_text);
  CHECK(b1.token_estimate == b2.token_estimate);
}

TEST_CASE("mock models") {
  LlmConfig config;
  SUBCASE("echo returns the last non-empty prompt line") {
    config.endpoint_url = "mock:echo";
    PromptBundle b = compose_prompt({}, "first = 1\nsecond = 2\n", 4000, Language::python);
    CHECK(complete(b, config) == "second = 2");
  }
  SUBCASE("fixed returns its payload") {
    config.endpoint_url = "mock:fixed:canned_line = 42";
    PromptBundle b = compose_prompt({}, "x = 1\n", 4000, Language::python);
    CHECK(complete(b, config) == "canned_line = 42");
  }
  SUBCASE("fixed trims to the first non-empty line") {
    config.endpoint_url = "mock:fixed:\n\nfirst real line\nsecond line";
    PromptBundle b = compose_prompt({}, "x = 1\n", 4000, Language::python);
    CHECK(complete(b, config) == "first real line");
  }
  SUBCASE("copy-next-line walks snippets best-first") {
    config.endpoint_url = "mock:copy-next-line";
    const Snippet best = snippet(1, "donor.py", {"prev = 1", "ctx_tail = 2", "wanted = 3"});
    PromptBundle b = compose_prompt({best}, "start = 0\nctx_tail = 2\n", 4000, Language::python);
    CHECK(complete(b, config) == "wanted = 3");
  }
  SUBCASE("copy-next-line falls back to empty when nothing matches") {
    config.endpoint_url = "mock:copy-next-line";
    PromptBundle b = compose_prompt({snippet(1, "donor.py", {"unrelated = 9"})},
                                    "ctx_tail = 2\n", 4000, Language::python);
    CHECK(complete(b, config).empty());
  }
  SUBCASE("budget overflow is rejected up front") {
    config.endpoint_url = "mock:echo";
    config.context_window_tokens = 3;
    PromptBundle b = compose_prompt({}, "a b c d e f g h\n", 4000, Language::python);
    CHECK_THROWS_AS(complete(b, config), BudgetExceeded);
  }
}

TEST_CASE("http client against a local server") {
  httplib::Server server;
  std::atomic<int> failures_left{0};
  server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (failures_left.fetch_sub(1) > 0) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
      return;
    }
    // Echo the configured model plus a fixed completion.
    res.set_content(R"({"choices": [{"text": "served_line = 7\nextra"}]})", "application/json");
  });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  LlmConfig config;
  config.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/completions";
  config.timeout_seconds = 5;
  const PromptBundle bundle = compose_prompt({}, "x = 1\n", 4000, Language::python);

  SUBCASE("success path trims to the first line") {
    CHECK(complete(bundle, config) == "served_line = 7");
  }
  SUBCASE("transient 5xx is retried") {
    failures_left = 2;
    config.max_retries = 3;
    CHECK(complete(bundle, config) == "served_line = 7");
  }
  SUBCASE("retries exhausted raises EndpointError") {
    failures_left = 100;
    config.max_retries = 1;
    CHECK_THROWS_AS(complete(bundle, config), EndpointError);
  }
  SUBCASE("4xx is never retried") {
    LlmConfig bad = config;
    bad.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/missing";
    failures_left = 0;
    int status = 0;
    try {
      complete(bundle, bad);
    } catch (const EndpointError& e) {
      status = e.status;
    }
    CHECK(status == 404);
  }

  server.stop();
  runner.join();
}
