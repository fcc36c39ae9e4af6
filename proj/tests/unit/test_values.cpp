#include <doctest.h>

#include <random>

#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"
#include "patch/value.hpp"

using namespace patch;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const PatchError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

Value strings(std::initializer_list<const char*> xs) {
  std::vector<Value> items;
  for (auto x : xs) items.push_back(Value::string(x));
  return Value::list(std::move(items));
}

Value address() {
  return Value::tuple({"no", "street", "city", "zip"},
                      {Value::integer(2), Value::string("Main Road"), Value::string("New York"),
                       Value::integer(10026)});
}

}  // namespace

TEST_SUITE("values") {
  TEST_CASE("identifiers fold case") {
    CHECK(normalize_identifier("Zip") == "zip");
    CHECK(normalize_identifier("x") == "x");
    // each character folded on its own
    std::string raw = "Loop_Counter1", folded;
    for (char c : raw) folded += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    CHECK(normalize_identifier(raw) == folded);
    CHECK(kind_of([] { normalize_identifier(""); }) == ErrorKind::MalformedIdentifier);
    CHECK(kind_of([] { normalize_identifier("1abc"); }) == ErrorKind::MalformedIdentifier);
    CHECK(kind_of([] { normalize_identifier("a-b"); }) == ErrorKind::MalformedIdentifier);
  }

  TEST_CASE("compatibility lattice") {
    CHECK(compatible(PatchType::integer(), PatchType::real()));
    CHECK(compatible(PatchType::boolean(), PatchType::boolean()));
    CHECK_FALSE(compatible(PatchType::list(PatchType::integer()), PatchType::list(PatchType::real())));
    CHECK_FALSE(compatible(PatchType::string(), PatchType::integer()));
  }

  TEST_CASE("assignment coercion") {
    CHECK(assign_coerce(Value::real(5.57), PatchType::integer()) == Value::integer(5));
    const Value widened = assign_coerce(Value::integer(48), PatchType::real());
    CHECK(widened.is_real());
    CHECK(render_value(widened) == "48.0");
    // truncation oracle: sign * floor(|x|)
    for (double x : {-2.9, -0.5, 0.0, 0.5, 7.999, -1e6 - 0.25}) {
      const auto expect = static_cast<std::int64_t>((x < 0 ? -1 : 1) * std::floor(std::fabs(x)));
      CHECK(assign_coerce(Value::real(x), PatchType::integer()).as_int() == expect);
    }
    CHECK(kind_of([] { assign_coerce(Value::string("a"), PatchType::integer()); }) ==
          ErrorKind::IncompatibleAssignment);
    // widening round-trip within the mantissa
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{1} << 53), std::int64_t{1} << 53);
    for (int k = 0; k < 1000; ++k) {
      const auto i = d(rng);
      const Value back = assign_coerce(assign_coerce(Value::integer(i), PatchType::real()), PatchType::integer());
      REQUIRE(back.as_int() == i);
    }
  }

  TEST_CASE("indexing is one-based") {
    const Value x = strings({"Moscow", "Java", "Pea"});
    CHECK(index(x, Value::integer(3)) == Value::string("Pea"));
    CHECK(index(address(), Value::integer(4)) == Value::integer(10026));
    CHECK(kind_of([&] { index(x, Value::integer(0)); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([&] { index(x, Value::integer(4)); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_of([] { index(Value::set({Value::integer(1)}), Value::integer(1)); }) == ErrorKind::NotIndexable);
    CHECK(kind_of([] { index(Value::integer(5), Value::integer(1)); }) == ErrorKind::NotIndexable);
  }

  TEST_CASE("index succeeds exactly inside the bounds") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
      const auto n = static_cast<std::int64_t>(rng() % 8);
      std::vector<Value> items;
      for (std::int64_t i = 0; i < n; ++i) items.push_back(Value::integer(i * 10));
      const Value list = Value::list(items);
      for (std::int64_t i = -1; i <= n + 1; ++i) {
        if (i >= 1 && i <= n) {
          CHECK(index(list, Value::integer(i)) == items[static_cast<std::size_t>(i - 1)]);
        } else {
          CHECK(kind_of([&] { index(list, Value::integer(i)); }) == ErrorKind::IndexOutOfRange);
        }
      }
    }
  }

  TEST_CASE("fields by name") {
    CHECK(field(address(), "zip") == Value::integer(10026));
    CHECK(field(address(), "ZIP") == Value::integer(10026));
    const Value t = Value::tuple({"a"}, {Value::integer(1)});
    CHECK(kind_of([&] { field(t, "city"); }) == ErrorKind::NoSuchField);
    // field/index agreement
    const auto& names = address().as_tuple().names;
    for (std::size_t i = 0; i < names.size(); ++i) {
      CHECK(field(address(), names[i]) == index(address(), Value::integer(static_cast<std::int64_t>(i + 1))));
    }
  }

  TEST_CASE("arithmetic") {
    const Value sum = apply_binary(Op::Add, Value::integer(2), Value::real(3.57));
    CHECK(sum.is_real());
    CHECK(sum.as_real() == doctest::Approx(5.57).epsilon(1e-15));
    CHECK(apply_binary(Op::Add, Value::integer(45), Value::integer(3)) == Value::integer(48));
    CHECK(apply_binary(Op::Div, Value::integer(1), Value::integer(2)) == Value::real(0.5));
    CHECK(apply_binary(Op::Pow, Value::integer(2), Value::integer(3)) == Value::real(8.0));
    CHECK(kind_of([] { apply_binary(Op::Div, Value::integer(1), Value::integer(0)); }) == ErrorKind::DivisionByZero);
    CHECK(kind_of([] {
            apply_binary(Op::Add, Value::integer(std::numeric_limits<std::int64_t>::max()), Value::integer(1));
          }) == ErrorKind::ArithOverflow);
    CHECK(kind_of([] { apply_binary(Op::Add, Value::string("a"), Value::integer(1)); }) == ErrorKind::TypeMismatch);
  }

  TEST_CASE("set operators") {
    const Value a = Value::set({Value::real(87.2)});
    const Value b = Value::set({Value::real(2.87)});
    CHECK(apply_binary(Op::Union, a, b) == Value::set({Value::real(87.2), Value::real(2.87)}));
    CHECK(render_value(apply_binary(Op::Union, a, b)) == "{2.87, 87.2}");
    const Value both = apply_binary(Op::Union, a, b);
    CHECK(apply_binary(Op::In, Value::real(2.0), both) == Value::boolean(false));
    CHECK(apply_binary(Op::In, Value::real(2.87), both) == Value::boolean(true));
    const Value cross = apply_binary(Op::Cross, Value::set({Value::integer(1)}), Value::set({Value::string("x")}));
    CHECK(render_value(cross) == "{<first: 1, second: \"x\">}");
  }

  TEST_CASE("set laws on random sets") {
    std::mt19937_64 rng(5);
    auto random_set = [&] {
      std::vector<Value> items;
      const auto n = rng() % 6;
      for (std::size_t i = 0; i < n; ++i) items.push_back(Value::integer(static_cast<std::int64_t>(rng() % 8)));
      return Value::set(items);
    };
    for (int k = 0; k < 300; ++k) {
      const Value a = random_set(), b = random_set();
      CHECK(apply_binary(Op::Union, a, b) == apply_binary(Op::Union, b, a));
      const Value inter = apply_binary(Op::Inter, a, b);
      for (const auto& x : inter.as_set().items) CHECK(apply_binary(Op::In, x, a).as_bool());
      const Value diff = apply_binary(Op::Diff, a, b);
      for (const auto& x : diff.as_set().items) CHECK_FALSE(apply_binary(Op::In, x, b).as_bool());
      CHECK(apply_binary(Op::Cross, a, b).as_set().items.size() == a.as_set().items.size() * b.as_set().items.size());
    }
  }

  TEST_CASE("comparators are total on scalars") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int k = 0; k < 500; ++k) {
      const Value a = k % 2 ? Value::integer(static_cast<std::int64_t>(rng() % 5)) : Value::real(std::round(d(rng)));
      const Value b = Value::real(std::round(d(rng)));
      const int hits = apply_binary(Op::Lt, a, b).as_bool() + apply_binary(Op::Eq, a, b).as_bool() +
                       apply_binary(Op::Gt, a, b).as_bool();
      CHECK(hits == 1);
    }
    CHECK(apply_binary(Op::Lt, Value::string("Java"), Value::string("Moscow")).as_bool());
    CHECK(apply_binary(Op::Le, Value::string("a"), Value::string("a")).as_bool());
  }

  TEST_CASE("types of values") {
    CHECK(type_of(Value::list({Value::integer(20), Value::integer(9), Value::integer(34)})) ==
          PatchType::list(PatchType::integer()));
    CHECK(type_of(Value::boolean(true)) == PatchType::boolean());
    CHECK(type_of(address()) ==
          PatchType::tuple({"no", "street", "city", "zip"},
                           {PatchType::integer(), PatchType::string(), PatchType::string(), PatchType::integer()}));
    CHECK(type_of(Value::list({})).element().kind() == PatchType::Kind::Unknown);
  }

  TEST_CASE("literal syntax") {
    CHECK(render_value(Value::list({Value::integer(20), Value::integer(9), Value::integer(34)})) == "[20, 9, 34]");
    CHECK(read_value("[20, 9, 34]", parse_type("list(integer)")) ==
          Value::list({Value::integer(20), Value::integer(9), Value::integer(34)}));
    const Value langs = Value::set({Value::string("Patch"), Value::string("Java"), Value::string("C")});
    CHECK(render_value(langs) == "{\"C\", \"Java\", \"Patch\"}");
    CHECK(parse_literal("{\"C\", \"Java\", \"Patch\"}") == langs);
    CHECK(render_value(Value::boolean(true)) == "TRUE");
    CHECK(parse_literal("TRUE") == Value::boolean(true));
    CHECK(render_value(address()) == "<no: 2, street: \"Main Road\", city: \"New York\", zip: 10026>");
    CHECK(read_value("<2, \"Main Road\", \"New York\", 10026>", type_of(address())) == address());
    CHECK(kind_of([] { parse_literal("[1, "); }) == ErrorKind::LiteralSyntaxError);
    CHECK(kind_of([] { read_value("\"x\"", PatchType::integer()); }) == ErrorKind::LiteralSyntaxError);
  }
}
