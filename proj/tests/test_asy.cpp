#include <doctest.h>

#include "bba/asy.hpp"
#include "bba/errors.hpp"
#include "support/fixtures.hpp"

using namespace bba;

TEST_CASE("single block extraction") {
  auto blocks = extract_asymptote("intro [asy]draw((0,0)--(1,1));[/asy] outro", "p1");
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].code == "draw((0,0)--(1,1));");
  CHECK(blocks[0].char_length == 19);
  CHECK(blocks[0].source_problem == "p1");
}

TEST_CASE("no markers yields an empty list") {
  CHECK(extract_asymptote("plain text").empty());
  CHECK(extract_asymptote("").empty());
}

TEST_CASE("multiple blocks come back in document order") {
  auto blocks = extract_asymptote("[asy]first[/asy] mid [asy]second[/asy]");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].code == "first");
  CHECK(blocks[1].code == "second");
}

TEST_CASE("unclosed block errors with the opening offset") {
  try {
    extract_asymptote("xx[asy]draw();");
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.offset() == 2);
  }
}

TEST_CASE("re-wrapping extracted blocks reproduces the block regions byte-for-byte") {
  std::string text = "A[asy]\n code one \n[/asy]B[asy]two[/asy]C";
  auto blocks = extract_asymptote(text);
  std::string reconstructed;
  for (const auto& block : blocks) reconstructed += "[asy]" + block.code + "[/asy]";
  CHECK(reconstructed == "[asy]\n code one \n[/asy][asy]two[/asy]");
  // char_length counts the trimmed code
  CHECK(blocks[0].char_length == 8);
  CHECK(blocks[1].char_length == 3);
}

TEST_CASE("asy_length_stats means over blocks of problems in the level range") {
  auto make = [](const std::string& id, int level, std::vector<int> lengths) {
    Problem p = test_support::geometry_problem();
    p.id = id;
    p.difficulty = level;
    p.dsl.clear();
    for (int n : lengths) {
      if (!p.dsl.empty()) p.dsl += "\n";
      p.dsl += "[asy]" + std::string(n, 'x') + "[/asy]";
    }
    return p;
  };

  SUBCASE("one problem, one 100-char block") {
    auto stats = asy_length_stats({make("a", 2, {100})}, 1, 3);
    CHECK(stats.mean == doctest::Approx(100.0));
    CHECK(stats.count == 1);
  }
  SUBCASE("two blocks 100/200") {
    auto stats = asy_length_stats({make("a", 2, {100, 200})}, 1, 3);
    CHECK(stats.mean == doctest::Approx(150.0));
    CHECK(stats.count == 2);
  }
  SUBCASE("level filter and empty selection") {
    std::vector<Problem> problems{make("a", 1, {10}), make("b", 4, {50})};
    auto low = asy_length_stats(problems, 1, 3);
    CHECK(low.count == 1);
    CHECK(low.mean == doctest::Approx(10.0));
    auto high = asy_length_stats(problems, 4, 5);
    CHECK(high.mean == doctest::Approx(50.0));
    auto none = asy_length_stats(problems, 5, 5);
    CHECK(none.count == 0);
    CHECK(none.mean == 0.0);  // explicit empty-stat, not NaN
  }
}
