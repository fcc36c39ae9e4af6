#include <doctest.h>

#include <fstream>
#include <random>

#include "../support.hpp"
#include "patch/error.hpp"

using namespace patch;
using namespace patch::test;

namespace {

ErrorKind parse_error(std::string_view text, std::string* message = nullptr) {
  try {
    parse_document(text);
  } catch (const PatchError& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("document") {
  TEST_CASE("reference document") {
    const PatchDocument doc = bubble_sort();
    REQUIRE(doc.program.modules.size() == 1);
    CHECK(doc.program.modules.front().steps.size() == 8);
    CHECK(doc.program.entry == "BubbleSort");
  }

  TEST_CASE("malformed text") {
    CHECK(parse_error("") == ErrorKind::ParseError);
    std::string message;
    CHECK(parse_error("{\n  \"formatVersion\": 1,\n  oops\n}", &message) == ErrorKind::ParseError);
    CHECK(message.find("line 3") != std::string::npos);
    CHECK(parse_error(R"({"formatVersion": 2, "entry": "M", "modules": []})") == ErrorKind::VersionUnsupported);
    CHECK(parse_error(R"({"formatVersion": 1, "entry": "M", "modules": [{"name": "M"}]})", &message) ==
          ErrorKind::ParseError);
    CHECK(message.find("modules[0]") != std::string::npos);
  }

  TEST_CASE("unknown members survive") {
    std::string text = serialize_document(bubble_sort());
    text.insert(text.find('{') + 1, "\n  \"color-theme\": {\"accent\": \"teal\"},");
    const PatchDocument doc = parse_document(text);
    CHECK(doc.extra["color-theme"]["accent"] == "teal");
    const std::string again = serialize_document(doc);
    CHECK(again.find("\"color-theme\"") != std::string::npos);
    CHECK(parse_document(again) == doc);
  }

  TEST_CASE("canonical text") {
    const std::string text = serialize_document(bubble_sort());
    CHECK(text.back() == '\n');
    CHECK(serialize_document(parse_document(text)) == text);
    // the stored sample is already canonical
    std::ifstream in(source_path("samples/bubble_sort.patch.json"));
    std::string stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(stored == text);
  }

  TEST_CASE("structurally equal programs serialize identically") {
    PatchDocument a = bubble_sort();
    PatchDocument b = a;
    std::reverse(b.program.modules.front().steps.begin(), b.program.modules.front().steps.end());
    CHECK(a.program == b.program);
    CHECK(serialize_document(a) == serialize_document(b));
  }

  TEST_CASE("steps are written in pre-order") {
    const PatchDocument doc = bubble_sort();
    std::vector<std::string> ids;
    for (const Step* s : canonical_step_order(doc.program.modules.front())) ids.push_back(s->id);
    CHECK(ids == std::vector<std::string>{"1", "2", "3", "4", "5", "6", "7", "8"});
  }

  TEST_CASE("round trip over generated documents") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 100; ++k) {
      const PatchDocument doc = random_document(rng);
      const std::string text = serialize_document(doc);
      const PatchDocument back = parse_document(text);
      REQUIRE(back == doc);
      CHECK(serialize_document(back) == text);
    }
  }

  TEST_CASE("real literals round trip") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> mantissa(-10, 10);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int k = 0; k < 2000; ++k) {
      const double x = std::ldexp(mantissa(rng), exponent(rng));
      const Value back = parse_literal(render_value(Value::real(x)));
      REQUIRE(back.is_real());
      CHECK(std::fabs(back.as_real() - x) <= 1e-12 * std::fabs(x));
    }
  }

  TEST_CASE("files") {
    const auto path = std::filesystem::temp_directory_path() / "patch-doc-test.patch.json";
    save_document(bubble_sort(), path.string());
    CHECK(load_document(path.string()) == bubble_sort());
    std::filesystem::remove(path);
    try {
      load_document("/nonexistent/x.patch.json");
      FAIL("expected io-error");
    } catch (const PatchError& e) {
      CHECK(e.kind() == ErrorKind::Io);
    }
  }
}
