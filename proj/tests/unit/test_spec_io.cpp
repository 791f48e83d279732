#include <cmath>

#include "doctest.h"
#include "fragwave/spec_io.hpp"
#include "helpers.hpp"

using namespace fragwave;
using testhelp::contains;
using testhelp::thrown_message;

namespace {

const char* kGoodSpec = R"({
  "name": "binary-half",
  "atoms": [{"weight": 1.0, "fragments": [0.5, 0.5]}],
  "defaults": {"dx": 0.01, "x_max": 10.0, "horizon": 25.0,
               "block_cap": 250, "trials": 1234}
})";

}  // namespace

TEST_CASE("well-formed measure files round-trip") {
  SpecFile spec = parse_spec(kGoodSpec);
  CHECK(spec.measure.name() == "binary-half");
  CHECK(spec.measure.total_rate() == 1.0);
  CHECK(spec.measure.killing_rate() == 0.0);
  REQUIRE(spec.defaults.dx.has_value());
  CHECK(*spec.defaults.dx == 0.01);
  CHECK(*spec.defaults.x_max == 10.0);
  CHECK(*spec.defaults.horizon == 25.0);
  CHECK(*spec.defaults.block_cap == 250);
  CHECK(*spec.defaults.trials == 1234);

  SpecFile bare = parse_spec(
      R"({"atoms": [{"weight": 2.0, "fragments": [0.5, 0.25]}]})");
  CHECK(bare.measure.name().empty());
  CHECK(bare.measure.total_rate() == 2.0);
  CHECK_FALSE(bare.defaults.trials.has_value());
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(contains(thrown_message<SpecError>([] { parse_spec("{oops"); }), "JSON"));
  CHECK(contains(thrown_message<SpecError>([] { parse_spec("{}"); }), "atoms"));
  CHECK(contains(thrown_message<SpecError>([] { parse_spec(R"({"atoms": []})"); }),
                 "atoms"));
  CHECK(contains(thrown_message<SpecError>([] {
                   parse_spec(R"({"atoms": [{"fragments": [0.5, 0.5]}]})");
                 }),
                 "atoms[0].weight"));
  CHECK(contains(thrown_message<SpecError>([] {
                   parse_spec(R"({"atoms": [{"weight": 1.0}]})");
                 }),
                 "atoms[0].fragments"));

  // A single-fragment atom violates the standing no-trivial-split assumption.
  std::string msg = thrown_message<SpecError>([] {
    parse_spec(R"({"atoms": [{"weight": 1.0, "fragments": [1.0]}]})");
  });
  CHECK(contains(msg, "atoms[0]"));
  CHECK(contains(msg, "s2"));

  CHECK(contains(thrown_message<SpecError>([] {
                   parse_spec(R"({"atoms": [{"weight": -1, "fragments": [0.5, 0.5]}],
                                  "defaults": {}})");
                 }),
                 "weight"));
  CHECK(contains(thrown_message<SpecError>([] {
                   parse_spec(R"({"atoms": [{"weight": 1, "fragments": [0.5, 0.5]}],
                                  "defaults": {"bogus": 1}})");
                 }),
                 "bogus"));
  CHECK(contains(thrown_message<SpecError>([] {
                   parse_spec(R"({"atoms": [{"weight": 1, "fragments": [0.5, 0.5]}],
                                  "defaults": {"trials": -5}})");
                 }),
                 "trials"));
}

TEST_CASE("missing files are a spec error") {
  CHECK(contains(thrown_message<SpecError>(
                     [] { load_spec("/nonexistent/measure.json"); }),
                 "cannot open"));
}
