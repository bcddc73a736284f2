#include <doctest.h>

#include "cmc/config.hpp"
#include "cmc/csv.hpp"
#include "cmc/error.hpp"
#include "cmc/rng.hpp"

using namespace cmc;

TEST_CASE("csv parse splits header and rows, skipping blanks and CR") {
  const auto t = csv::parse("a,b\r\n1,2\r\n\n3,4\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), DataError);
}

TEST_CASE("csv rejects ragged rows") { CHECK_THROWS_AS(csv::parse("a,b\n1\n"), DataError); }

TEST_CASE("number parsing is strict") {
  CHECK(csv::parse_double(" 2.5 ", "x") == 2.5);
  CHECK(csv::parse_int("7", "x") == 7);
  CHECK_THROWS_AS(csv::parse_double("2.5abc", "x"), DataError);
  CHECK_THROWS_AS(csv::parse_double("", "x"), DataError);
  CHECK_THROWS_AS(csv::parse_int("1.5", "x"), DataError);
}

TEST_CASE("format_double round-trips and format_fixed never prints negative zero") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(csv::parse_double(csv::format_double(v), "v") == v);
  }
  CHECK(csv::format_fixed(0.9644, 3) == "0.964");
  CHECK(csv::format_fixed(-0.0001, 3) == "0.000");
  CHECK(csv::format_fixed(0.0625, 3) == "0.062");
}

TEST_CASE("key-value config: comments, overrides, typed access") {
  auto kv = KeyValues::parse("# comment\na = 1\nb = hello world\n\na = 2\nflag = true\nset.x = 3\nset.y = 4\n");
  CHECK(kv.get_int("a", 0) == 2);
  CHECK(kv.require("b") == "hello world");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 1.5) == 1.5);
  CHECK_THROWS_AS(kv.require("missing"), Error);
  const auto sub = kv.with_prefix("set.");
  REQUIRE(sub.size() == 2);
  CHECK(sub[0].first == "x");
  kv.set("a", "9");
  CHECK(kv.get_int("a", 0) == 9);
  const auto again = KeyValues::parse(kv.to_string());
  CHECK(again.get_int("a", 0) == 9);
  CHECK(again.require("b") == "hello world");
}

TEST_CASE("config rejects lines without '=' and bad numbers") {
  CHECK_THROWS_AS(KeyValues::parse("novalue\n"), Error);
  CHECK_THROWS_AS(KeyValues::parse("a = x\n").get_int("a", 0), Error);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(5, {hash_label("x"), 1}), b(5, {hash_label("x"), 1}), c(5, {hash_label("x"), 2});
  const auto va = a.next();
  CHECK(va == b.next());
  CHECK(va != c.next());
  Rng u(9);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = u.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  for (int i = 0; i < 1000; ++i) CHECK(u.below(7) < 7);
}
