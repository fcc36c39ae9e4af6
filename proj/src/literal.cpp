#include "patch/literal.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>

#include "patch/error.hpp"
#include "patch/identifier.hpp"

namespace patch {

std::string render_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string render_string(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          out += "\\u00";
          out += kHex[(c >> 4) & 0xF];
          out += kHex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string render_value(const Value& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_real()) return render_real(v.as_real());
  if (v.is_bool()) return v.as_bool() ? "TRUE" : "FALSE";
  if (v.is_string()) return render_string(v.as_string());
  auto join = [](const std::vector<Value>& items, char open, char close) {
    std::string out(1, open);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += render_value(items[i]);
    }
    out += close;
    return out;
  };
  if (v.is_list()) return join(v.as_list().items, '[', ']');
  if (v.is_set()) return join(v.as_set().items, '{', '}');
  const auto& t = v.as_tuple();
  std::string out = "<";
  for (std::size_t i = 0; i < t.items.size(); ++i) {
    if (i) out += ", ";
    out += t.names[i] + ": " + render_value(t.items[i]);
  }
  out += '>';
  return out;
}

namespace {

class LiteralReader {
 public:
  LiteralReader(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw PatchError(ErrorKind::LiteralSyntaxError,
                     msg + " at column " + std::to_string(pos_ + 1));
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  // Untyped: the syntax decides the type.
  Value read_any() {
    char c = peek();
    if (c == '[') return read_collection(']', nullptr, false);
    if (c == '{') return read_collection('}', nullptr, true);
    if (c == '<') return read_tuple(nullptr);
    if (c == '"') return Value::string(read_string());
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return read_number(false);
    if (std::isalpha(static_cast<unsigned char>(c))) return Value::boolean(read_bool());
    fail("expected a literal");
  }

  Value read_typed(const PatchType& t) {
    using K = PatchType::Kind;
    switch (t.kind()) {
      case K::Integer: {
        Value v = read_number(false);
        if (!v.is_int()) fail("expected an integer literal");
        return v;
      }
      case K::Real: return read_number(true);
      case K::Boolean: return Value::boolean(read_bool());
      case K::String: return Value::string(read_string());
      case K::List: return read_collection(']', &t.element(), false);
      case K::Set: return read_collection('}', &t.element(), true);
      case K::Tuple: return read_tuple(&t);
      case K::Unknown: return read_any();
    }
    fail("unreadable type");
  }

 private:
  bool read_bool() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string word(text_.substr(start, pos_ - start));
    for (auto& ch : word) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (word == "TRUE") return true;
    if (word == "FALSE") return false;
    pos_ = start;
    fail("expected TRUE or FALSE");
  }

  Value read_number(bool as_real) {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    if (digits() == 0) {
      pos_ = start;
      fail("expected a number");
    }
    bool is_real = false;
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      digits();
      is_real = true;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
      } else {
        is_real = true;
      }
    }
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    if (!is_real && !as_real) {
      std::int64_t v = 0;
      auto r = std::from_chars(first, last, v);
      if (r.ec != std::errc() || r.ptr != last) fail("integer literal out of range");
      return Value::integer(v);
    }
    double d = 0;
    auto r = std::from_chars(first, last, d);
    if (r.ec != std::errc() || r.ptr != last) fail("real literal out of range");
    return Value::real(d);
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("unterminated escape");
      char e = text_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'u': {
          if (pos_ + 4 > text_.size()) fail("short \\u escape");
          unsigned code = 0;
          auto r = std::from_chars(text_.data() + pos_, text_.data() + pos_ + 4, code, 16);
          if (r.ptr != text_.data() + pos_ + 4) fail("bad \\u escape");
          pos_ += 4;
          append_utf8(out, code);
          break;
        }
        default: fail("unknown escape");
      }
    }
    return out;
  }

  static void append_utf8(std::string& out, unsigned code) {
    if (code < 0x80) {
      out += static_cast<char>(code);
    } else if (code < 0x800) {
      out += static_cast<char>(0xC0 | (code >> 6));
      out += static_cast<char>(0x80 | (code & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (code >> 12));
      out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (code & 0x3F));
    }
  }

  Value read_collection(char close, const PatchType* element, bool is_set) {
    ++pos_;  // opening bracket, already peeked
    std::vector<Value> items;
    if (!accept(close)) {
      do {
        items.push_back(element ? read_typed(*element) : read_any());
      } while (accept(','));
      expect(close);
    }
    try {
      return is_set ? Value::set(std::move(items)) : Value::list(std::move(items));
    } catch (const PatchError& e) {
      fail(e.what());
    }
  }

  std::optional<std::string> maybe_member_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ > start && std::isalpha(static_cast<unsigned char>(text_[start]))) {
      std::size_t after = pos_;
      if (accept(':')) return std::string(text_.substr(start, after - start));
    }
    pos_ = start;
    return std::nullopt;
  }

  Value read_tuple(const PatchType* type) {
    ++pos_;  // '<'
    std::vector<std::string> names;
    std::vector<Value> items;
    if (!accept('>')) {
      do {
        auto name = maybe_member_name();
        const std::size_t k = items.size();
        if (type) {
          if (k >= type->field_types().size()) fail("too many tuple members");
          if (name && !is_valid_identifier(*name)) fail("bad member name");
          if (name && normalize_identifier(*name) != type->field_names()[k]) {
            fail("member '" + *name + "' does not match field '" + type->field_names()[k] + "'");
          }
          names.push_back(type->field_names()[k]);
          items.push_back(read_typed(type->field_types()[k]));
        } else {
          if (!name) fail("tuple members need names when no type is given");
          if (!is_valid_identifier(*name)) fail("bad member name");
          names.push_back(*name);
          items.push_back(read_any());
        }
      } while (accept(','));
      expect('>');
    }
    if (type && items.size() != type->field_types().size()) fail("too few tuple members");
    try {
      return Value::tuple(std::move(names), std::move(items));
    } catch (const PatchError& e) {
      fail(e.what());
    }
  }

  std::string_view text_;
  std::size_t pos_;
};

}  // namespace

Value read_value(std::string_view text, const PatchType& t) {
  LiteralReader r(text, 0);
  Value v = r.read_typed(t);
  if (!r.at_end()) r.fail("trailing text after literal");
  return v;
}

Value parse_literal(std::string_view text) {
  LiteralReader r(text, 0);
  Value v = r.read_any();
  if (!r.at_end()) r.fail("trailing text after literal");
  return v;
}

Value parse_literal_at(std::string_view text, std::size_t& pos) {
  LiteralReader r(text, pos);
  Value v = r.read_any();
  pos = r.pos();
  return v;
}

bool starts_literal(std::string_view text, std::size_t pos) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos >= text.size()) return false;
  char c = text[pos];
  return c == '[' || c == '{' || c == '"' || std::isdigit(static_cast<unsigned char>(c));
}

// ---------------------------------------------------------------------------
// Types

std::string render_type(const PatchType& t) {
  using K = PatchType::Kind;
  switch (t.kind()) {
    case K::Unknown: return "unknown";
    case K::Integer: return "integer";
    case K::Real: return "real";
    case K::Boolean: return "boolean";
    case K::String: return "string";
    case K::List: return "list(" + render_type(t.element()) + ")";
    case K::Set: return "set(" + render_type(t.element()) + ")";
    case K::Tuple: {
      std::string out = "tuple(";
      for (std::size_t i = 0; i < t.field_names().size(); ++i) {
        if (i) out += ", ";
        out += t.field_names()[i] + ": " + render_type(t.field_types()[i]);
      }
      return out + ")";
    }
  }
  return "unknown";
}

namespace {

class TypeReader {
 public:
  explicit TypeReader(std::string_view text) : text_(text) {}

  PatchType read() {
    std::string word = identifier();
    if (word == "integer") return PatchType::integer();
    if (word == "real") return PatchType::real();
    if (word == "boolean") return PatchType::boolean();
    if (word == "string") return PatchType::string();
    if (word == "list" || word == "set") {
      expect('(');
      PatchType e = read();
      expect(')');
      return word == "list" ? PatchType::list(e) : PatchType::set(e);
    }
    if (word == "tuple") {
      expect('(');
      std::vector<std::string> names;
      std::vector<PatchType> types;
      do {
        names.push_back(identifier());
        expect(':');
        types.push_back(read());
      } while (accept(','));
      expect(')');
      try {
        return PatchType::tuple(std::move(names), std::move(types));
      } catch (const PatchError& e) {
        fail(e.what());
      }
    }
    fail("unknown type '" + word + "'");
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing text after type");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw PatchError(ErrorKind::ParseError,
                     "type: " + msg + " at column " + std::to_string(pos_ + 1));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view raw = text_.substr(start, pos_ - start);
    if (raw.empty()) fail("expected a name");
    std::string out;
    for (char c : raw) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PatchType parse_type(std::string_view text) {
  TypeReader r(text);
  PatchType t = r.read();
  r.finish();
  return t;
}

}  // namespace patch
