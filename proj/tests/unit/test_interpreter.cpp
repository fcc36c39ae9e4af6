#include <doctest.h>

#include <algorithm>
#include <random>

#include "../support.hpp"
#include "patch/error.hpp"
#include "patch/trace.hpp"
#include "patch/validate.hpp"

using namespace patch;
using namespace patch::test;

namespace {

std::vector<std::string> displays(const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& v : r.displays) out.push_back(render_value(v));
  return out;
}

RunResult run(const ModuleDef& m, std::vector<Argument> args = {}, RunOptions opts = {}) {
  const PatchProgram p = single(m);
  const ValidationReport report = validate(p);
  for (const auto& f : report.findings) MESSAGE(f.step_id << " " << f.rule << " " << f.message);
  REQUIRE(report.ok());
  return run_module(p, "", args, opts);
}

}  // namespace

TEST_SUITE("interpreter") {
  TEST_CASE("expressions") {
    std::map<std::string, Value> env{{"y", Value::integer(17)}};
    CHECK(eval_expr(parse_expr("y - 1"), env) == Value::integer(16));
    env["x"] = Value::list({Value::string("Moscow"), Value::string("Java"), Value::string("Pea")});
    CHECK(eval_expr(parse_expr("x[3]"), env) == Value::string("Pea"));
    try {
      eval_expr(parse_expr("z + 1"), {});
      FAIL("expected unbound-variable");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::UnboundVariable);
    }
    int compares = 0;
    eval_expr(parse_expr("y > 3 AND y < 20"), env, [&](const Value&, const Value&, Op, bool) { ++compares; });
    CHECK(compares == 2);
  }

  TEST_CASE("counter loop sums to the closed form") {
    for (std::int64_t n : {0, 1, 5, 17}) {
      ModuleDef m = module("Sum", {decl("n", "integer")}, {decl("s", "integer")},
                           {root("1"), step("1", StepKind::Assign, assign("s", "0"), "2"),
                            step("2", StepKind::CounterLoop, counter("i", "1", "n"), std::nullopt, {body("3")}),
                            step("3", StepKind::Transform, assign("s", "s + i"))});
      const RunResult r = run(m, {{std::string("n"), Value::integer(n)}});
      const std::int64_t iterations = n >= 1 ? n : 2 - n;  // counts down when n < 1
      std::int64_t closed = 0;
      if (n >= 1) {
        closed = n * (n + 1) / 2;
      } else {
        for (std::int64_t i = 1; i >= n; --i) closed += i;
      }
      CHECK(r.outputs.front().second == Value::integer(closed));
      CHECK(static_cast<std::int64_t>(count(r.trace, EventKind::LoopIter)) == iterations);
    }
  }

  TEST_CASE("by-pass with a false condition is skipped") {
    ModuleDef m = module("Skip", {}, {},
                         {root("1"), step("1", StepKind::ByPass, cond("FALSE"), std::nullopt, {body("2")}),
                          step("2", StepKind::Display, show("1"))});
    const RunResult r = run(m);
    CHECK(count(r.trace, EventKind::Display) == 0);
  }

  TEST_CASE("either-or runs exactly one group") {
    for (bool flag : {true, false}) {
      ModuleDef m = module("Pick", {decl("flag", "boolean")}, {},
                           {root("1"),
                            step("1", StepKind::EitherOr, cond("flag"), std::nullopt, {then_("2"), else_("3")}),
                            step("2", StepKind::Display, show("\"then\"")), step("3", StepKind::Display, show("\"else\""))});
      const RunResult r = run(m, {{std::string("flag"), Value::boolean(flag)}});
      CHECK(displays(r) == std::vector<std::string>{flag ? "\"then\"" : "\"else\""});
    }
  }

  TEST_CASE("labeled branch on any constant") {
    ModuleDef m = module("Pick", {decl("x", "string")}, {},
                         {root("1"),
                          step("1", StepKind::Labeled, LabeledPayload{parse_expr("x")}, std::nullopt,
                               {arm("\"Moscow\"", "2"), arm("\"Pea\"", "3")}),
                          step("2", StepKind::Display, show("1")), step("3", StepKind::Display, show("3"))});
    CHECK(displays(run(m, {{std::string("x"), Value::string("Pea")}})) == std::vector<std::string>{"3"});
    CHECK(displays(run(m, {{std::string("x"), Value::string("Oslo")}})).empty());
    m.steps[1].children.push_back({ChildGroup::Default, std::nullopt, "4"});
    m.steps.push_back(step("4", StepKind::Display, show("0")));
    CHECK(displays(run(m, {{std::string("x"), Value::string("Oslo")}})) == std::vector<std::string>{"0"});
  }

  TEST_CASE("sentinel loop stops before the marker") {
    ModuleDef m = module("Walk", {decl("xs", "list(integer)")}, {},
                         {root("1"),
                          step("1", StepKind::SentinelLoop,
                               SentinelPayload{"e", parse_expr("xs"), parse_expr("0")}, std::nullopt, {body("2")}),
                          step("2", StepKind::Display, show("e"))});
    CHECK(displays(run(m, {{std::string("xs"), int_list({4, 5, 0, 6})}})) == std::vector<std::string>{"4", "5"});
    CHECK(displays(run(m, {{std::string("xs"), int_list({4, 5})}})) == std::vector<std::string>{"4", "5"});
    std::get<SentinelPayload>(m.steps[1].payload).marker.reset();
    CHECK(displays(run(m, {{std::string("xs"), int_list({4, 0, 6})}})) == std::vector<std::string>{"4", "0", "6"});
  }

  TEST_CASE("conditional loop re-tests before each pass") {
    ModuleDef m = module("Halve", {decl("n", "integer")}, {decl("k", "integer")},
                         {root("1"), step("1", StepKind::Assign, assign("k", "0"), "2"),
                          step("2", StepKind::ConditionalLoop, cond("n > 1"), std::nullopt, {body("3")}),
                          step("3", StepKind::Transform, assign("n", "n / 2"), "4"),
                          step("4", StepKind::Transform, assign("k", "k + 1"))});
    CHECK(run(m, {{std::string("n"), Value::integer(16)}}).outputs.front().second == Value::integer(4));
    CHECK(run(m, {{std::string("n"), Value::integer(1)}}).outputs.front().second == Value::integer(0));
  }

  TEST_CASE("EXIT leaves one level") {
    // loop body: by-pass (i = 3) { EXIT } then display i
    ModuleDef branch = module("Main", {}, {},
                              {root("1"),
                               step("1", StepKind::CounterLoop, counter("i", "1", "4"), "5", {body("2")}),
                               step("2", StepKind::ByPass, cond("i = 3"), "4", {body("3")}),
                               step("3", StepKind::Exit, NoPayload{}), step("4", StepKind::Display, show("i")),
                               step("5", StepKind::Display, show("-1"))});
    CHECK(displays(run(branch)) == std::vector<std::string>{"1", "2", "3", "4", "-1"});

    // EXIT directly in the loop body ends the loop
    ModuleDef loop = module("Main", {}, {},
                            {root("1"), step("1", StepKind::CounterLoop, counter("i", "1", "4"), "4", {body("2")}),
                             step("2", StepKind::Display, show("i"), "3"), step("3", StepKind::Exit, NoPayload{}),
                             step("4", StepKind::Display, show("-1"))});
    const RunResult r = run(loop);
    CHECK(displays(r) == std::vector<std::string>{"1", "-1"});
    CHECK(count(r.trace, EventKind::Exited) == 1);
  }

  TEST_CASE("STOP ends the module") {
    ModuleDef m = module("Main", {}, {decl("x", "integer")},
                         {root("1"), step("1", StepKind::Assign, assign("x", "7"), "2"),
                          step("2", StepKind::Stop, NoPayload{})});
    const RunResult r = run(m);
    CHECK(r.stopped);
    CHECK(r.outputs.front().second == Value::integer(7));
  }

  TEST_CASE("real to integer on assignment") {
    ModuleDef m = module("Main", {}, {decl("x", "integer"), decl("y", "real")},
                         {root("1"), step("1", StepKind::Transform, assign("x", "2 + 3.57"), "2"),
                          step("2", StepKind::Transform, assign("y", "45 + 3"))});
    const RunResult r = run(m);
    CHECK(r.outputs[0].second == Value::integer(5));
    CHECK(render_value(r.outputs[1].second) == "48.0");
  }

  TEST_CASE("assignment copies, transformation mutates") {
    ModuleDef m = module("Main", {}, {decl("a", "list(integer)"), decl("b", "list(integer)")},
                         {root("1"), step("1", StepKind::Assign, assign("a", "[1, 2]"), "2"),
                          step("2", StepKind::Assign, assign("b", "a"), "3"),
                          step("3", StepKind::Transform, assign("b[1]", "9"))});
    const RunResult r = run(m);
    CHECK(render_value(r.outputs[0].second) == "[1, 2]");
    CHECK(render_value(r.outputs[1].second) == "[9, 2]");
    for (const auto& e : r.trace) {
      if (e.kind == EventKind::Assign && e.step_id == "2") CHECK(e.var == "b");
    }
  }

  TEST_CASE("runtime errors name the step") {
    ModuleDef m = module("Main", {decl("xs", "list(integer)")}, {},
                         {root("1"), step("1", StepKind::Display, show("xs[5]"))});
    try {
      run(m, {{std::string("xs"), int_list({1})}});
      FAIL("expected index-out-of-range");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::IndexOutOfRange);
      CHECK(e.step_id() == "1");
    }
  }

  TEST_CASE("iteration budget") {
    ModuleDef m = module("Spin", {}, {}, {root("1"), step("1", StepKind::ConditionalLoop, cond("TRUE"), std::nullopt, {body("2")}),
                                          step("2", StepKind::Assign, assign("x", "1"))});
    RunOptions opts;
    opts.iteration_budget = 1000;
    opts.keep_trace = false;
    try {
      run(m, {}, opts);
      FAIL("expected budget-exceeded");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
  }

  TEST_CASE("console reads and displays") {
    ModuleDef m = module("Echo", {decl("n", "integer", Binding::Console)}, {decl("d", "integer", Binding::Console)},
                         {root("1"), step("1", StepKind::Transform, assign("d", "n * 2"))});
    ScriptedConsole console({"21"});
    InMemoryRepository repo;
    run_module(single(m), "", {}, console, repo);
    CHECK(console.output() == std::vector<std::string>{"42"});
    ScriptedConsole empty;
    try {
      run_module(single(m), "", {}, empty, repo);
      FAIL("expected read-failed");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::ReadFailed);
    }
  }

  TEST_CASE("module calls bind through the resolver") {
    PatchProgram p;
    p.entry = "Main";
    p.modules.push_back(module(
        "Main", {}, {decl("r", "integer")},
        {root("1"), step("1", StepKind::Call,
                         CallPayload{"twice", {{std::nullopt, parse_expr("\"x\"")}, {std::nullopt, parse_expr("21")}},
                                     {{"out", parse_expr("r")}}})}));
    p.modules.push_back(module("Twice", {decl("n", "integer"), decl("label", "string")}, {decl("out", "integer")},
                               {root("1"), step("1", StepKind::Transform, assign("out", "n * 2"))}));
    REQUIRE(validate(p).ok());
    CHECK(run_module(p, "", {}).outputs.front().second == Value::integer(42));
  }

  TEST_CASE("bubble sort") {
    const PatchDocument doc = bubble_sort();
    CHECK(ints(sort_run(doc.program, {29, -4, 2, 17, 45, 9}).outputs.front().second) ==
          std::vector<std::int64_t>{-4, 2, 9, 17, 29, 45});
    CHECK(ints(sort_run(doc.program, {}).outputs.front().second).empty());
    CHECK(ints(sort_run(doc.program, {1}).outputs.front().second) == std::vector<std::int64_t>{1});
    CHECK(count(sort_run(doc.program, {1, 2, 3}).trace, EventKind::Swap) == 0);
    CHECK(count(sort_run(doc.program, {3, 2, 1}).trace, EventKind::Swap) == 3);
  }

  TEST_CASE("swap count equals inversions on random lists") {
    const PatchDocument doc = bubble_sort();
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
      std::vector<std::int64_t> xs(rng() % 20);
      for (auto& x : xs) x = static_cast<std::int64_t>(rng() % 41) - 20;
      const RunResult r = sort_run(doc.program, xs);
      CHECK(count(r.trace, EventKind::Swap) == inversions(xs));
      auto sorted = xs;
      std::sort(sorted.begin(), sorted.end());
      CHECK(ints(r.outputs.front().second) == sorted);
    }
  }

  TEST_CASE("watch history") {
    const PatchDocument doc = bubble_sort();
    const RunResult r = sort_run(doc.program, {3, 1, 2});
    const auto history = watch(r.trace, "list");
    REQUIRE(!history.empty());
    CHECK(history.front().second == int_list({3, 1, 2}));
    CHECK(history.back().second == r.outputs.front().second);
    CHECK(watch(r.trace, "nothing").empty());
    for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i - 1].first < history[i].first);
  }

  TEST_CASE("deterministic traces") {
    const PatchDocument doc = bubble_sort();
    CHECK(sort_run(doc.program, {5, 4, 9, 1}).trace == sort_run(doc.program, {5, 4, 9, 1}).trace);
  }

  TEST_CASE("every enter has an exit") {
    const PatchDocument doc = bubble_sort();
    const RunResult r = sort_run(doc.program, {5, 4, 9, 1});
    CHECK(count(r.trace, EventKind::Enter) == count(r.trace, EventKind::ExitStep));
    for (std::size_t i = 0; i < r.trace.size(); ++i) CHECK(r.trace[i].seq == i + 1);
  }

  TEST_CASE("preview halts after the prefix") {
    const PatchDocument doc = bubble_sort();
    RunOptions opts;
    opts.preview_until = "2";
    const RunResult r = sort_run(doc.program, {3, 1}, opts);
    CHECK(r.status == RunResult::Status::Halted);
    bool has_sorted = false;
    for (const auto& [name, v] : r.variables) {
      if (name == "sorted") {
        has_sorted = true;
        CHECK(v == Value::boolean(false));
      }
    }
    CHECK(has_sorted);
    opts.preview_until = "8";
    const RunResult whole = sort_run(doc.program, {3, 1}, opts);
    CHECK(whole.status == RunResult::Status::Finished);
    CHECK(whole.outputs == sort_run(doc.program, {3, 1}).outputs);
  }
}
