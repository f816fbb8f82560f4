#include <doctest.h>

#include "ccgrag/lex.hpp"

using namespace ccgrag;
using lex::approx_token_count;
using lex::identifiers;
using lex::is_blank_or_comment_line;
using lex::normalize_ws;
using lex::tokenize;

TEST_CASE("python tokenization") {
  CHECK(tokenize("x = y + 1  # trailing", Language::python) ==
        std::vector<std::string>{"x", "=", "y", "+", "1"});
  CHECK(tokenize("s = \"a b c\"", Language::python) ==
        std::vector<std::string>{"s", "=", "\"a b c\""});
  CHECK(tokenize("r'raw\\n' + f\"v={x}\"", Language::python) ==
        std::vector<std::string>{"r'raw\\n'", "+", "f\"v={x}\""});
  CHECK(tokenize("'''multi\nline'''", Language::python) ==
        std::vector<std::string>{"'''multi\nline'''"});
  CHECK(tokenize("a <= b >= c != d == e", Language::python) ==
        std::vector<std::string>{"a", "<=", "b", ">=", "c", "!=", "d", "==", "e"});
  CHECK(tokenize("n = 1_000 + 0x1f + 2.5e-3", Language::python) ==
        std::vector<std::string>{"n", "=", "1_000", "+", "0x1f", "+", "2.5e-3"});
}

TEST_CASE("java tokenization") {
  CHECK(tokenize("int x = y / 2; // note", Language::java) ==
        std::vector<std::string>{"int", "x", "=", "y", "/", "2", ";"});
  CHECK(tokenize("a /* inline */ b", Language::java) == std::vector<std::string>{"a", "b"});
  CHECK(tokenize("s.equals(\"x;y\")", Language::java) ==
        std::vector<std::string>{"s", ".", "equals", "(", "\"x;y\"", ")"});
}

TEST_CASE("identifiers exclude keywords and literals") {
  CHECK(identifiers("for item in values:", Language::python) ==
        std::vector<std::string>{"item", "values"});
  CHECK(identifiers("return new Foo(bar, 3)", Language::java) ==
        std::vector<std::string>{"Foo", "bar"});
  CHECK(identifiers("total += compute(total)", Language::python) ==
        std::vector<std::string>{"total", "compute", "total"});
}

TEST_CASE("blank and comment lines") {
  CHECK(is_blank_or_comment_line("", Language::python));
  CHECK(is_blank_or_comment_line("   ", Language::python));
  CHECK(is_blank_or_comment_line("  # note", Language::python));
  CHECK(is_blank_or_comment_line("  // note", Language::java));
  CHECK(is_blank_or_comment_line("/* block */", Language::java));
  CHECK_FALSE(is_blank_or_comment_line("x = 1  # note", Language::python));
}

TEST_CASE("approximate token counting") {
  CHECK(approx_token_count("") == 0);
  CHECK(approx_token_count("alpha beta") == 2);
  CHECK(approx_token_count("f(x, y)") == 6);  // f ( x , y )
  CHECK(approx_token_count("  spaced   out  ") == 2);
}

TEST_CASE("whitespace normalization") {
  CHECK(normalize_ws("  a  b\tc ") == "a b c");
  CHECK(normalize_ws("") == "");
  CHECK(normalize_ws("single") == "single");
}
