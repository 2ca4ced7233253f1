#include "doctest.h"
#include "support.hpp"
#include "vectrans/compiler.hpp"
#include "vectrans/error.hpp"
#include "vectrans/text.hpp"

using namespace vectrans;

namespace {
const char* kFig1a =
    "#define LEN_1D 32000\n"
    "void s1113(int iters, float a[LEN_1D], float b[LEN_1D]) {\n"
    "    for (int nl = 0; nl < 2 * iters; nl++)\n"
    "        for (int i = 0; i < LEN_1D; i++)\n"
    "            a[i] = a[LEN_1D/2] + b[i];\n"
    "}\n";
}

TEST_CASE("Diagnose flags are exact and recorded on the command line") {
  CHECK(profile_flags(FlagsProfile::Diagnose) ==
        std::vector<std::string>{"-O3", "-ffast-math", "-Rpass=loop-vectorize", "-Rpass-analysis=loop-vectorize"});
  CHECK(profile_flags(FlagsProfile::Bench) == std::vector<std::string>{"-O3", "-ffast-math"});
  auto r = vt_test::compiler().compile(kFig1a, FlagsProfile::Diagnose, vt_test::scratch("flags"), "fig1a");
  REQUIRE(r.ok());
  for (const char* f : {"-O3", "-ffast-math", "-Rpass=loop-vectorize", "-Rpass-analysis=loop-vectorize"}) {
    CHECK(std::count(r.command_line.begin(), r.command_line.end(), std::string(f)) == 1);
  }
  CHECK(r.artifact_path);
}

TEST_CASE("Fig. 1a is rejected for a dependence reason") {
  auto r = vt_test::compiler().compile(kFig1a, FlagsProfile::Diagnose, vt_test::scratch("fig1a"), "fig1a");
  REQUIRE(r.ok());
  auto rep = parse_remarks(r.remarks_raw);
  REQUIRE(rep.loops.size() >= 1);
  CHECK_FALSE(is_fully_vectorized(rep));
  bool dependence = false;
  for (const auto& l : rep.loops) dependence = dependence || (l.reason && contains(*l.reason, "dependent memory"));
  CHECK(dependence);
}

TEST_CASE("syntax errors give an Error status with a diagnostic") {
  auto r = vt_test::compiler().compile("int f( {", FlagsProfile::Diagnose, vt_test::scratch("syntax"));
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("EmitIr writes textual IR before vectorization") {
  auto r = vt_test::compiler().compile(kFig1a, FlagsProfile::EmitIr, vt_test::scratch("ir"), "fig1a");
  REQUIRE(r.ok());
  std::string ir = read_file(*r.artifact_path);
  CHECK(contains(ir, "define"));
  CHECK_FALSE(contains(ir, "<4 x float>"));
  CHECK_FALSE(contains(ir, "<8 x float>"));
}

TEST_CASE("remarks are deterministic across compiles") {
  auto dir = vt_test::scratch("determinism");
  auto a = vt_test::compiler().compile(kFig1a, FlagsProfile::Diagnose, dir / "a", "x");
  auto b = vt_test::compiler().compile(kFig1a, FlagsProfile::Diagnose, dir / "b", "x");
  CHECK(a.remarks_raw == b.remarks_raw);
}

TEST_CASE("missing compiler and version pin") {
  CHECK_THROWS_AS(Compiler(CompilerConfig{"/nonexistent/clang"}), ToolMissing);
  CompilerConfig pinned;
  pinned.version_pin = "clang version 999.0";
  CHECK_THROWS_AS(Compiler{pinned}, ConfigError);
}

TEST_CASE("parse_remarks on single lines") {
  auto v = parse_remarks("file.c:4:9: remark: vectorized loop (vectorization width: 4, interleaved count: 2) "
                         "[-Rpass=loop-vectorize]");
  REQUIRE(v.loops.size() == 1);
  CHECK(v.loops[0].location == SourceLocation{4, 9});
  CHECK(v.loops[0].vectorized);
  CHECK_FALSE(v.loops[0].reason);

  auto n = parse_remarks("file.c:3:5: remark: loop not vectorized: unsafe dependent memory operations "
                         "[-Rpass-analysis=loop-vectorize]");
  REQUIRE(n.loops.size() == 1);
  CHECK(n.loops[0].location == SourceLocation{3, 5});
  CHECK_FALSE(n.loops[0].vectorized);
  CHECK(n.loops[0].reason == "unsafe dependent memory operations");

  CHECK(parse_remarks("").loops.empty());
  CHECK(parse_remarks("file.c:1:1: remark: something [-Rpass=inline]").loops.empty());

  auto bad = parse_remarks("garbage: remark: vectorized loop [-Rpass=loop-vectorize]");
  CHECK(bad.loops.empty());
  CHECK(bad.leftovers.size() == 1);
}

TEST_CASE("is_fully_vectorized") {
  VectorizationReport r;
  CHECK_FALSE(is_fully_vectorized(r));
  r.loops.push_back({{1, 1}, true, {}, {}});
  r.loops.push_back({{2, 1}, true, {}, {}});
  CHECK(is_fully_vectorized(r));
  r.loops.push_back({{3, 1}, false, "x", {}});
  CHECK_FALSE(is_fully_vectorized(r));
  std::vector<SourceLocation> sel{{1, 1}};
  CHECK(is_fully_vectorized(r, sel));
}

TEST_CASE("recorded remark corpus matches the frozen oracle output") {
  auto rep = parse_remarks(read_file(vt_test::fixtures() / "remarks" / "remarks_clang14.txt"));
  auto expected = vt_test::read_json(vt_test::fixtures() / "remarks" / "remarks_clang14.expected.json");
  auto diffs = vt_test::remark_mismatches(rep, expected);
  for (const auto& d : diffs) MESSAGE(d);
  CHECK(diffs.empty());
  CHECK(rep.leftovers.empty());
}
