#include <doctest.h>

#include "../support.hpp"
#include "patch/error.hpp"

using namespace patch;
using namespace patch::test;

namespace {

ErrorKind resolve_error(const CallSignature& call, const ModuleDef& callee) {
  try {
    resolve_call(call, callee);
  } catch (const PatchError& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

ActualSpec actual(std::optional<std::string> name, const std::string& type) { return {std::move(name), parse_type(type)}; }

}  // namespace

TEST_SUITE("resolver") {
  TEST_CASE("names win regardless of order") {
    ModuleDef callee = module("Addr", {decl("city", "string"), decl("zip", "integer")}, {}, {});
    CallSignature call{{actual("zip", "integer"), actual("city", "string")}};
    const Mapping m = resolve_call(call, callee);
    CHECK(m.formal_of_actual == std::vector<std::string>{"zip", "city"});
    const auto oracle = all_bijections(call, callee);
    REQUIRE(oracle.size() == 1);
    CHECK(oracle.front() == m);
  }

  TEST_CASE("unique type per slot") {
    ModuleDef callee = module("Tally", {decl("count", "integer"), decl("label", "string")}, {}, {});
    CallSignature call{{actual(std::nullopt, "string"), actual(std::nullopt, "integer")}};
    CHECK(resolve_call(call, callee).formal_of_actual == std::vector<std::string>{"label", "count"});
  }

  TEST_CASE("indistinguishable candidates") {
    ModuleDef callee = module("Range", {decl("lo", "integer"), decl("hi", "integer")}, {}, {});
    CallSignature call{{actual(std::nullopt, "integer"), actual(std::nullopt, "integer")}};
    CHECK(resolve_error(call, callee) == ErrorKind::AmbiguousMapping);
    CHECK(all_bijections(call, callee).size() == 2);
    // naming one of them settles both
    call.actuals[0].name = "hi";
    CHECK(resolve_call(call, callee).formal_of_actual == std::vector<std::string>{"hi", "lo"});
  }

  TEST_CASE("arity and impossible matches") {
    ModuleDef callee = module("One", {decl("a", "integer")}, {}, {});
    CHECK(resolve_error({{}}, callee) == ErrorKind::ArityMismatch);
    CHECK(resolve_error({{actual(std::nullopt, "string")}}, callee) == ErrorKind::Unresolvable);
    CHECK(resolve_error({{actual("a", "string")}}, callee) == ErrorKind::Unresolvable);
  }

  TEST_CASE("fixed point binds chains of unique candidates") {
    // the string settles first, which leaves one numeric slot for the real
    ModuleDef callee = module("F", {decl("s", "string"), decl("n", "integer"), decl("x", "real")}, {}, {});
    CallSignature call{{actual("n", "integer"), actual(std::nullopt, "real"), actual(std::nullopt, "string")}};
    CHECK(resolve_call(call, callee).formal_of_actual == std::vector<std::string>{"n", "x", "s"});
  }

  TEST_CASE("modules resolve case-insensitively") {
    PatchProgram p;
    p.modules.push_back(module("BubbleSort", {decl("list", "list(integer)")}, {}, {}));
    CallSignature call{{actual(std::nullopt, "list(integer)")}};
    CHECK(resolve_module("bubblesort", call, p).first->name == "BubbleSort");
    try {
      resolve_module("quicksort", call, p);
      FAIL("expected unknown-module");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::UnknownModule);
    }
  }

  TEST_CASE("randomized signatures agree with the bijection oracle") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 300; ++k) {
      const SignatureCase c = random_signature(rng);
      const auto oracle = all_bijections(c.call, c.callee);
      REQUIRE(!oracle.empty());
      if (oracle.size() == 1) {
        CHECK(resolve_call(c.call, c.callee) == oracle.front());
      } else {
        CHECK(resolve_error(c.call, c.callee) == ErrorKind::AmbiguousMapping);
      }
    }
  }
}
