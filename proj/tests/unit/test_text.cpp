#include "doctest.h"
#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

using namespace vectrans;

TEST_CASE("trim and split_lines") {
  CHECK(trim("  a b \t\n") == "a b");
  CHECK(trim("") == "");
  auto lines = split_lines("a\r\nb\n\nc");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "a");
  CHECK(lines[2] == "");
  CHECK(lines[3] == "c");
}

TEST_CASE("replace_identifier respects identifier boundaries") {
  CHECK(replace_identifier("s1 s12 _s1 s1(x) a.s1", "s1", "t") == "t s12 _s1 t(x) a.t");
  CHECK(replace_identifier("s1113(a); s1113_opt(a);", "s1113", "s1113_opt") == "s1113_opt(a); s1113_opt(a);");
}

TEST_CASE("slot templates") {
  CHECK(template_slots("@@A@@ x @@B_2@@ @@A@@") == std::set<std::string>{"A", "B_2"});
  CHECK(instantiate("<@@A@@|@@B@@>", {{"A", "1"}, {"B", "@@A@@"}}) == "<1|@@A@@>");
  CHECK_THROWS_AS(instantiate("@@A@@ @@MISSING@@", {{"A", "1"}}), SlotMissing);
  CHECK(instantiate_partial("@@A@@ @@MISSING@@", {{"A", "1"}}) == "1 @@MISSING@@");
}
