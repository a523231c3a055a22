#include <doctest.h>

#include <string>

#include "imverde/config.hpp"
#include "imverde/error.hpp"

using namespace imverde;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const auto c = parse_config("{}");
  CHECK(c.alpha == 0.7);
  CHECK(c.context.r == 0.2);
  CHECK(c.context.walk_length == 10);
  CHECK(c.model.dim == 50);
  CHECK(c.model.negatives == 10);
  CHECK(c.dataset.kind == "karate");
  CHECK(c.seed == 42);
}

TEST_CASE("comments and nested sections") {
  const auto c = parse_config(R"({
    // line comment
    "dataset": {"kind": "planted", "sizes": [10, 50], "p_in": 0.3, "p_out": 0.02},
    /* block */
    "walker": {"alpha": 0.5},
    "model": {"d": 8, "T1": 3, "T2": 4, "hidden_x": [], "hidden_e": [6, 6]},
    "variants": ["vrrw-imverde", "vdrw-baseline"],
    "seed": 7
  })");
  CHECK(c.dataset.sizes == std::vector<std::size_t>{10, 50});
  CHECK(c.alpha == 0.5);
  CHECK(c.model.dim == 8);
  CHECK(c.model.hidden_x.empty());
  CHECK(c.model.hidden_e.size() == 2);
  CHECK(c.variants[1] == "vdrw-baseline");
  CHECK(c.seed == 7);
}

TEST_CASE("rejections") {
  CHECK(error_of(R"({"walker": {"alpha": 0.5, "beta": 1}})").find("unknown key 'walker.beta'") != std::string::npos);
  CHECK(error_of(R"({"model": {"d": "fifty"}})").find("'model.d' has the wrong type") != std::string::npos);
  CHECK(error_of(R"({"model": {"d": -3}})").find("'model.d'") != std::string::npos);
  CHECK(error_of(R"({"walker": {"alpha": 1.0}})").find("walker.alpha") != std::string::npos);
  CHECK(error_of(R"({"walk_stats": {"trace_length": 150, "trace_interval": 100}})").find("trace_length") !=
        std::string::npos);
  CHECK(error_of(R"({"variants": ["vdrw"]})").find("variant 'vdrw'") != std::string::npos);
  CHECK(error_of(R"({"split": {"kind": "given"}})").find("planetoid") != std::string::npos);
  CHECK_THROWS_AS(parse_config("{\"seed\": 1,}"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "extra": 2})"), ValidationError);
}

TEST_CASE("canonical json ignores key order") {
  const auto a = parse_config(R"({"seed": 3, "walker": {"alpha": 0.6}})");
  const auto b = parse_config(R"({"walker": {"alpha": 0.6}, "seed": 3})");
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() != parse_config("{}").to_json());
}

TEST_CASE("load_config resolves relative to the file") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/config.jsonc"), IoError);
}
