#include <doctest.h>

#include <map>

#include "../support.hpp"
#include "patch/validate.hpp"

using namespace patch;
using namespace patch::test;

TEST_SUITE("validate") {
  TEST_CASE("reference bubble sort is clean") {
    const PatchDocument doc = bubble_sort();
    const ValidationReport r = validate(doc.program);
    CHECK(r.ok());
    CHECK(doc.program.modules.size() == 1);
    CHECK(doc.program.modules.front().steps.size() == 8);
  }

  TEST_CASE("two incoming solid edges") {
    PatchDocument doc = bubble_sort();
    auto& steps = doc.program.modules.front().steps;
    // step 7 already flows into 8; let step 4 flow there too
    for (auto& s : steps) {
      if (s.id == "4") s.next = "8";
    }
    const ValidationReport r = validate(doc.program);
    CHECK(r.has_rule("tree-shape"));
  }

  TEST_CASE("duplicate labels") {
    ModuleDef m = module("Pick", {decl("x", "string")}, {},
                         {root("1"), step("1", StepKind::Labeled, LabeledPayload{parse_expr("x")}, std::nullopt,
                                          {arm("\"Pea\"", "2"), arm("\"Pea\"", "3")}),
                          step("2", StepKind::Display, show("1")), step("3", StepKind::Display, show("2"))});
    const ValidationReport r = validate(single(m));
    REQUIRE(r.findings.size() == 1);
    CHECK(r.findings.front().rule == "label-unique");
  }

  TEST_CASE("counter is read-only") {
    ModuleDef m = module("Count", {}, {},
                         {root("1"), step("1", StepKind::CounterLoop, counter("i", "1", "3"), std::nullopt, {body("2")}),
                          step("2", StepKind::Transform, assign("i", "i + 1"))});
    CHECK(validate(single(m)).has_rule("counter-write"));
  }

  TEST_CASE("validation is pure and idempotent") {
    PatchDocument doc = bubble_sort();
    doc.program.modules.front().steps[3].next = "2";  // a cycle
    const PatchProgram before = doc.program;
    const ValidationReport a = validate(doc.program);
    const ValidationReport b = validate(doc.program);
    CHECK(a == b);
    CHECK(doc.program == before);
    CHECK(a.has_rule("tree-shape"));
  }

  TEST_CASE("valid trees reach every step by one path") {
    const PatchDocument doc = bubble_sort();
    const ModuleDef& m = doc.program.modules.front();
    std::map<std::string, int> paths;
    for (const auto& s : m.steps) {
      if (s.next) ++paths[*s.next];
      for (const auto& c : s.children) ++paths[c.step];
    }
    for (const auto& s : m.steps) {
      if (s.kind == StepKind::Module) {
        CHECK(paths[s.id] == 0);
      } else {
        CHECK(paths[s.id] == 1);
      }
    }
    CHECK(execution_order(m).size() == m.steps.size());
  }

  TEST_CASE("undeclared variables and unknown callees") {
    ModuleDef m = module("Main", {}, {},
                         {root("1"), step("1", StepKind::Display, show("z + 1"), "2"),
                          step("2", StepKind::Call, CallPayload{"Nowhere", {}, {}})});
    const ValidationReport r = validate(single(m));
    CHECK(r.has_rule("undeclared-var"));
    CHECK(r.has_rule("unknown-module"));
    CHECK_FALSE(r.ok());
  }

  TEST_CASE("module names collide after normalization") {
    PatchProgram p;
    p.entry = "sort";
    p.modules.push_back(module("sort", {}, {}, {root("1"), step("1", StepKind::Stop, NoPayload{})}));
    p.modules.push_back(module("SORT", {}, {}, {root("1"), step("1", StepKind::Stop, NoPayload{})}));
    CHECK(validate(p).has_rule("duplicate-module"));
  }
}
