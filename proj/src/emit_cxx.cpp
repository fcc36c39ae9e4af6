#include <cstdlib>
#include <fstream>

#include "emit_common.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"
#include "process.hpp"

namespace patch {

namespace {

using emitter::Lines;
using emitter::ModuleFacts;
using emitter::TupleTable;
using emitter::unsupported;
using K = PatchType::Kind;

constexpr const char* kPrelude = R"(// Runtime support for programs emitted from Patch.
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace rt {

struct Fault {
  const char* kind;
};

[[noreturn]] inline void fault(const char* kind) { throw Fault{kind}; }

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fault("arith-overflow");
  return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) fault("arith-overflow");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fault("arith-overflow");
  return r;
}

inline std::int64_t neg(std::int64_t a) {
  if (a == INT64_MIN) fault("arith-overflow");
  return -a;
}

inline double real(double x) {
  if (std::isnan(x)) fault("domain-error");
  if (std::isinf(x)) fault("arith-overflow");
  return x;
}

inline double div(double a, double b) {
  if (b == 0.0) fault("division-by-zero");
  return real(a / b);
}

inline double pow(double a, double b) {
  if (a == 0.0 && b < 0.0) fault("domain-error");
  return real(std::pow(a, b));
}

inline std::int64_t trunc(double x) {
  const double t = std::trunc(x);
  if (!(t >= -9223372036854775808.0 && t < 9223372036854775808.0)) fault("arith-overflow");
  return static_cast<std::int64_t>(t);
}

// Patch positions start at 1.
template <class C>
std::size_t ix(const C& c, std::int64_t i) {
  if (i < 1 || i > static_cast<std::int64_t>(c.size())) fault("index-out-of-range");
  return static_cast<std::size_t>(i - 1);
}

template <class T>
T at(const std::vector<T>& c, std::int64_t i) {
  return c[ix(c, i)];
}

template <class C>
std::int64_t size(const C& c) {
  return static_cast<std::int64_t>(c.size());
}

template <class T>
bool member(const std::type_identity_t<T>& x, const std::set<T>& s) {
  return s.count(x) > 0;
}

template <class T>
std::set<T> unite(std::set<T> a, const std::set<T>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

template <class T>
std::set<T> intersect(const std::set<T>& a, const std::set<T>& b) {
  std::set<T> r;
  for (const auto& x : a) {
    if (b.count(x)) r.insert(x);
  }
  return r;
}

template <class T>
std::set<T> minus(const std::set<T>& a, const std::set<T>& b) {
  std::set<T> r;
  for (const auto& x : a) {
    if (!b.count(x)) r.insert(x);
  }
  return r;
}

template <class P, class A, class B>
std::set<P> cross(const std::set<A>& a, const std::set<B>& b) {
  std::set<P> r;
  for (const auto& x : a) {
    for (const auto& y : b) r.insert(P{x, y});
  }
  return r;
}

inline std::uint64_t ticks = 0;
inline void tick() {
  if (++ticks > 1000000) fault("budget-exceeded");
}

inline int depth = 0;
struct Frame {
  Frame() {
    if (++depth > 256) fault("call-depth-exceeded");
  }
  ~Frame() { --depth; }
  Frame(const Frame&) = delete;
  Frame& operator=(const Frame&) = delete;
};

inline std::string render(std::int64_t v) { return std::to_string(v); }

inline std::string render(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline std::string render(bool v) { return v ? "TRUE" : "FALSE"; }

inline std::string render(const std::string& s) {
  static constexpr char hex[] = "0123456789abcdef";
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
          out += hex[(c >> 4) & 0xF];
          out += hex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

template <class T>
std::string render(const std::vector<T>& v);
template <class T>
std::string render(const std::set<T>& v);

template <class C>
std::string join(const C& items, char open, char close) {
  std::string out(1, open);
  bool first = true;
  for (const auto& x : items) {
    if (!first) out += ", ";
    first = false;
    out += render(x);
  }
  return out + close;
}

template <class T>
std::string render(const std::vector<T>& v) {
  return join(v, '[', ']');
}

template <class T>
std::string render(const std::set<T>& v) {
  return join(v, '{', '}');
}

// Literal reader for harness input and console reads.
class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  [[noreturn]] void bad() const { fault("read-failed"); }

  void ws() {
    while (p_ < s_.size() && (s_[p_] == ' ' || s_[p_] == '\t' || s_[p_] == '\n' || s_[p_] == '\r' ||
                              s_[p_] == '\f' || s_[p_] == '\v')) {
      ++p_;
    }
  }
  bool accept(char c) {
    ws();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) bad();
  }
  void finish() {
    ws();
    if (p_ != s_.size()) bad();
  }

  // Number token; sets is_real when it has a fraction or exponent.
  std::string_view number(bool& is_real) {
    ws();
    const std::size_t start = p_;
    auto digit = [&](std::size_t i) { return i < s_.size() && s_[i] >= '0' && s_[i] <= '9'; };
    if (p_ < s_.size() && s_[p_] == '-') ++p_;
    if (!digit(p_)) bad();
    while (digit(p_)) ++p_;
    is_real = false;
    if (p_ + 1 < s_.size() && s_[p_] == '.' && digit(p_ + 1)) {
      ++p_;
      while (digit(p_)) ++p_;
      is_real = true;
    }
    if (p_ < s_.size() && (s_[p_] == 'e' || s_[p_] == 'E')) {
      std::size_t q = p_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (digit(q)) {
        while (digit(q)) ++q;
        p_ = q;
        is_real = true;
      }
    }
    return s_.substr(start, p_ - start);
  }

  std::string word() {
    ws();
    std::string out;
    while (p_ < s_.size() && ((s_[p_] >= 'a' && s_[p_] <= 'z') || (s_[p_] >= 'A' && s_[p_] <= 'Z'))) {
      out += static_cast<char>(s_[p_] >= 'a' ? s_[p_] - 'a' + 'A' : s_[p_]);
      ++p_;
    }
    return out;
  }

  std::string text() {
    expect('"');
    std::string out;
    while (true) {
      if (p_ >= s_.size()) bad();
      char c = s_[p_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (p_ >= s_.size()) bad();
      char e = s_[p_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'u': {
          if (p_ + 4 > s_.size()) bad();
          unsigned code = 0;
          auto r = std::from_chars(s_.data() + p_, s_.data() + p_ + 4, code, 16);
          if (r.ptr != s_.data() + p_ + 4) bad();
          p_ += 4;
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
          break;
        }
        default: bad();
      }
    }
  }

  // Optional "name:" before a tuple member.
  void member(std::string_view name) {
    ws();
    const std::size_t start = p_;
    std::string id;
    while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) {
      id += static_cast<char>(std::tolower(static_cast<unsigned char>(s_[p_])));
      ++p_;
    }
    if (!id.empty() && std::isalpha(static_cast<unsigned char>(id[0])) && accept(':')) {
      if (id != name) bad();
      return;
    }
    p_ = start;
  }

 private:
  std::string_view s_;
  std::size_t p_ = 0;
};

inline void get(Reader& r, std::int64_t& v) {
  bool is_real = false;
  auto tok = r.number(is_real);
  if (is_real) r.bad();
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) r.bad();
}

inline void get(Reader& r, double& v) {
  bool is_real = false;
  auto tok = r.number(is_real);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) r.bad();
}

inline void get(Reader& r, bool& v) {
  const std::string w = r.word();
  if (w == "TRUE") {
    v = true;
  } else if (w == "FALSE") {
    v = false;
  } else {
    r.bad();
  }
}

inline void get(Reader& r, std::string& v) { v = r.text(); }

template <class T>
void get(Reader& r, std::vector<T>& v);
template <class T>
void get(Reader& r, std::set<T>& v);

template <class T>
void get(Reader& r, std::vector<T>& v) {
  r.expect('[');
  if (r.accept(']')) return;
  do {
    T x{};
    get(r, x);
    v.push_back(std::move(x));
  } while (r.accept(','));
  r.expect(']');
}

template <class T>
void get(Reader& r, std::set<T>& v) {
  r.expect('{');
  if (r.accept('}')) return;
  do {
    T x{};
    get(r, x);
    v.insert(std::move(x));
  } while (r.accept(','));
  r.expect('}');
}

template <class T>
T read(const std::string& line) {
  Reader r(line);
  T v{};
  get(r, v);
  r.finish();
  return v;
}

inline std::string next_line() {
  std::string line;
  if (!std::getline(std::cin, line)) fault("read-failed");
  return line;
}

inline void display(const std::string& text) { std::cout << "D " << text << '\n'; }

inline void output(const char* name, const std::string& text) {
  std::cout << "O " << name << ' ' << text << '\n';
}

}  // namespace rt
)";

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool", "break",
      "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class", "co_await", "co_return",
      "co_yield", "compl", "concept", "const", "consteval", "constexpr", "constinit", "const_cast",
      "continue", "decltype", "default", "delete", "do", "double", "dynamic_cast", "else", "enum",
      "explicit", "export", "extern", "false", "float", "for", "friend", "goto", "if", "inline",
      "int", "long", "mutable", "namespace", "new", "noexcept", "not", "not_eq", "nullptr",
      "operator", "or", "or_eq", "private", "protected", "public", "register",
      "reinterpret_cast", "requires", "return", "short", "signed", "sizeof", "static",
      "static_assert", "static_cast", "struct", "switch", "template", "this", "thread_local",
      "throw", "true", "try", "typedef", "typeid", "typename", "union", "unsigned", "using",
      "virtual", "void", "volatile", "wchar_t", "while", "xor", "xor_eq", "main", "rt", "std",
      "INT64_MIN", "assert", "errno", "NULL", "EOF"};
  return words;
}

bool has_list(const PatchType& t) {
  if (t.kind() == K::List) return true;
  if (t.kind() == K::Set) return has_list(t.element());
  if (t.kind() == K::Tuple) {
    for (const auto& f : t.field_types()) {
      if (has_list(f)) return true;
    }
  }
  return false;
}

std::string cxx_string(std::string_view s) {
  std::string out = "std::string(\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\%03o", static_cast<unsigned char>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  // `"??x` trigraph sequences are gone since C++17; nothing else to escape.
  return out + "\")";
}

class CxxEmitter {
 public:
  CxxEmitter(const PatchProgram& program, const ModuleDef& entry) : program_(program), entry_(entry) {}

  SourceText emit() {
    std::set<std::string> reserved = reserved_words();
    modules_ = emitter::reachable_modules(program_, entry_);
    for (const ModuleDef* m : modules_) {
      std::string name = emitter::module_symbol(*m);
      while (reserved.count(name)) name += "_";
      symbols_[m] = name;
      reserved.insert(name);
    }
    for (const ModuleDef* m : modules_) {
      reserved.insert(sym(*m));
      reserved.insert(result_name(*m));
    }
    for (const ModuleDef* m : modules_) facts_.emplace_back(program_, *m, reserved);
    for (const auto& f : facts_) f.collect_tuples(tuples_);

    Lines out;
    for (const char* p = kPrelude; *p;) {
      const char* e = p;
      while (*e && *e != '\n') ++e;
      out.line(std::string(p, e));
      p = *e ? e + 1 : e;
    }
    emit_tuples(out);
    // Declarations first so modules may call each other in any order.
    out.blank();
    for (std::size_t i = 0; i < modules_.size(); ++i) emit_result_struct(out, *modules_[i]);
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      out.line(signature(facts_[i]) + ";");
    }
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      out.blank();
      emit_function(out, facts_[i]);
    }

    SourceText src;
    src.dialect = "cxx";
    src.module = entry_.name;
    src.entry_symbol = sym(entry_);
    src.file_name = src.entry_symbol + ".cpp";
    src.harness_file_name = src.entry_symbol + "_main.cpp";
    src.text = out.str();
    src.harness = harness(src.file_name);
    return src;
  }

 private:
  std::string result_name(const ModuleDef& m) const { return sym(m) + "_result"; }

  std::string type(const PatchType& t) const {
    switch (t.kind()) {
      case K::Unknown:
      case K::Integer: return "std::int64_t";
      case K::Real: return "double";
      case K::Boolean: return "bool";
      case K::String: return "std::string";
      case K::List: return "std::vector<" + type(t.element()) + ">";
      case K::Set: return "std::set<" + type(t.element()) + ">";
      case K::Tuple: return "rt::" + tuples_.name(t);
    }
    return "void";
  }

  static std::string member(const std::string& field) {
    return reserved_words().count(field) ? field + "_" : field;
  }

  void emit_tuples(Lines& out) {
    if (tuples_.all().empty()) return;
    out.blank();
    out.line("namespace rt {");
    for (const auto& [t, name] : tuples_.all()) {
      out.blank();
      out.line("struct " + name + " {");
      out.indent();
      for (std::size_t i = 0; i < t.field_names().size(); ++i) {
        out.line(type(t.field_types()[i]) + " " + member(t.field_names()[i]) + "{};");
      }
      out.line("friend auto operator<=>(const " + name + "&, const " + name + "&) = default;");
      out.line("friend bool operator==(const " + name + "&, const " + name + "&) = default;");
      out.dedent();
      out.line("};");
      out.blank();
      out.line("inline std::string render(const " + name + "& t) {");
      out.indent();
      std::string expr = "\"<\"";
      for (std::size_t i = 0; i < t.field_names().size(); ++i) {
        expr += " + std::string(\"" + std::string(i ? ", " : "") + t.field_names()[i] +
                ": \") + render(t." + member(t.field_names()[i]) + ")";
      }
      out.line("return " + expr + " + \">\";");
      out.dedent();
      out.line("}");
      out.blank();
      out.line("inline void get(Reader& r, " + name + "& t) {");
      out.indent();
      out.line("r.expect('<');");
      for (std::size_t i = 0; i < t.field_names().size(); ++i) {
        if (i) out.line("r.expect(',');");
        out.line("r.member(\"" + t.field_names()[i] + "\");");
        out.line("get(r, t." + member(t.field_names()[i]) + ");");
      }
      out.line("r.expect('>');");
      out.dedent();
      out.line("}");
    }
    out.blank();
    out.line("}  // namespace rt");
  }

  void emit_result_struct(Lines& out, const ModuleDef& m) {
    out.line("struct " + result_name(m) + " {");
    out.indent();
    for (const auto& d : m.outputs) out.line(type(d.type) + " " + member(d.name) + ";");
    out.dedent();
    out.line("};");
    out.blank();
  }

  std::string signature(const ModuleFacts& f) const {
    const ModuleDef& m = f.module();
    std::string params;
    for (const auto& d : m.inputs) {
      if (d.binding != Binding::Caller) continue;
      if (!params.empty()) params += ", ";
      params += type(d.type) + " " + f.local(d.name);
    }
    return result_name(m) + " " + sym(m) + "(" + params + ")";
  }

  // -------------------------------------------------------------------------
  // Expressions

  std::string literal(const Value& v, const PatchType& t) const {
    if (t.kind() == K::Real && v.is_numeric()) return render_real(v.as_number());
    if (v.is_int()) {
      if (v.as_int() == INT64_MIN) return "(-9223372036854775807 - 1)";
      return std::to_string(v.as_int());
    }
    if (v.is_real()) return render_real(v.as_real());
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_string()) return cxx_string(v.as_string());
    auto items = [&](const std::vector<Value>& xs, const PatchType& elem) {
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += literal(xs[i], elem);
      }
      return out;
    };
    if (v.is_list()) return type(t) + "{" + items(v.as_list().items, t.element()) + "}";
    if (v.is_set()) return type(t) + "{" + items(v.as_set().items, t.element()) + "}";
    const auto& tv = v.as_tuple();
    std::string out = type(t) + "{";
    for (std::size_t i = 0; i < tv.items.size(); ++i) {
      if (i) out += ", ";
      out += literal(tv.items[i], t.field_types()[i]);
    }
    return out + "}";
  }

  // Type an expression, letting `expected` fill unknown placeholders of
  // empty literals.
  PatchType typed(const ModuleFacts& f, const Expr& e, const PatchType* expected) const {
    PatchType raw = f.raw_type(e);
    if (expected && raw.has_unknown()) {
      if (auto u = unify(raw, *expected)) return resolve_unknown(*u);
    }
    return resolve_unknown(raw);
  }

  static std::string as_real(const std::string& code, const PatchType& t) {
    return t.kind() == K::Integer ? "static_cast<double>(" + code + ")" : code;
  }

  // Applies fmt to both operands, forcing left-to-right evaluation when
  // both can fault.
  template <class F>
  std::string ordered(ModuleFacts& f, const std::string& a, const std::string& b, bool both,
                      const PatchType& ta, F fmt) {
    if (!both) return fmt(a, b);
    const std::string l = f.temp("lhs");
    return "[&] { const " + type(ta) + " " + l + " = " + a + "; return " + fmt(l, b) + "; }()";
  }

  std::string expr(ModuleFacts& f, const Expr& e, const PatchType* expected = nullptr) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return literal(e.literal, typed(f, e, expected));
      case Expr::Kind::Var:
        return f.local(e.name);
      case Expr::Kind::Index: {
        const PatchType ct = f.type(e.args[0]);
        if (ct.kind() == K::Tuple) {
          const auto k = static_cast<std::size_t>(e.args[1].literal.as_int() - 1);
          return expr(f, e.args[0]) + "." + member(ct.field_names()[k]);
        }
        const std::string c = expr(f, e.args[0]);
        const std::string i = expr(f, e.args[1]);
        if (e.args[0].kind == Expr::Kind::Var) return c + "[rt::ix(" + c + ", " + i + ")]";
        return ordered(f, c, i, f.order_matters(e.args[0], e.args[1]), ct,
                       [](const std::string& a, const std::string& b) {
                         return "rt::at(" + a + ", " + b + ")";
                       });
      }
      case Expr::Kind::Field:
        return expr(f, e.args[0]) + "." + member(e.name);
      case Expr::Kind::Unary: {
        const PatchType t = f.type(e.args[0]);
        const std::string a = expr(f, e.args[0]);
        switch (e.op) {
          case Op::Not: return "!" + a;
          case Op::Neg:
            if (t.kind() == K::Integer) return "rt::neg(" + bare(a) + ")";
            return a.front() == '-' ? "(-(" + a + "))" : "(-" + a + ")";
          case Op::Size: return "rt::size(" + a + ")";
          default: unsupported("unary operator");
        }
      }
      case Expr::Kind::Binary:
        return binary(f, e);
    }
    unsupported("expression");
  }

  std::string binary(ModuleFacts& f, const Expr& e) {
    const Expr& l = e.args[0];
    const Expr& r = e.args[1];
    PatchType tl = f.raw_type(l);
    PatchType tr = f.raw_type(r);
    // Empty literals take their type from the other side.
    const PatchType ctx_l = resolve_unknown(tr.has_unknown() ? tl : tr);
    const PatchType ctx_r = e.op == Op::In ? PatchType::set(resolve_unknown(tl))
                                           : resolve_unknown(tl.has_unknown() ? tr : tl);
    if (e.op == Op::In || e.op == Op::Cross) {
      // Operands type on their own; an empty literal defaults to integer.
      tl = typed(f, l, nullptr);
      tr = typed(f, r, e.op == Op::In ? &ctx_r : nullptr);
    } else {
      tl = typed(f, l, &ctx_l);
      tr = typed(f, r, &ctx_r);
    }
    const bool own = e.op == Op::In || e.op == Op::Cross;
    std::string a = expr(f, l, own ? nullptr : &ctx_l);
    std::string b = expr(f, r, e.op == Op::Cross ? nullptr : &ctx_r);
    const bool both = f.order_matters(l, r);
    const bool ints = tl.kind() == K::Integer && tr.kind() == K::Integer;
    const bool numeric = tl.is_numeric() && tr.is_numeric();
    auto infix = [&](const std::string& op) {
      return [op](const std::string& x, const std::string& y) { return "(" + x + " " + op + " " + y + ")"; };
    };
    auto call = [&](const std::string& fn) {
      return [fn](const std::string& x, const std::string& y) { return fn + "(" + x + ", " + y + ")"; };
    };
    if (numeric && !ints && e.op != Op::Div && e.op != Op::Pow) {
      a = as_real(a, tl);
      b = as_real(b, tr);
    }
    const PatchType lhs_type = numeric && !ints ? PatchType::real() : tl;
    switch (e.op) {
      case Op::Add:
        if (ints) return ordered(f, a, b, both, lhs_type, call("rt::add"));
        return "rt::real(" + bare(ordered(f, a, b, both, lhs_type, infix("+"))) + ")";
      case Op::Sub:
        if (ints) return ordered(f, a, b, both, lhs_type, call("rt::sub"));
        return "rt::real(" + bare(ordered(f, a, b, both, lhs_type, infix("-"))) + ")";
      case Op::Mul:
        if (ints) return ordered(f, a, b, both, lhs_type, call("rt::mul"));
        return "rt::real(" + bare(ordered(f, a, b, both, lhs_type, infix("*"))) + ")";
      case Op::Div:
        return ordered(f, as_real(a, tl), as_real(b, tr), both, PatchType::real(), call("rt::div"));
      case Op::Pow:
        return ordered(f, as_real(a, tl), as_real(b, tr), both, PatchType::real(), call("rt::pow"));
      case Op::Lt: return ordered(f, a, b, both, lhs_type, infix("<"));
      case Op::Gt: return ordered(f, a, b, both, lhs_type, infix(">"));
      case Op::Le: return ordered(f, a, b, both, lhs_type, infix("<="));
      case Op::Ge: return ordered(f, a, b, both, lhs_type, infix(">="));
      case Op::Eq: return ordered(f, a, b, both, lhs_type, infix("=="));
      case Op::And: return "(" + a + " && " + b + ")";
      case Op::Or: return "(" + a + " || " + b + ")";
      case Op::In: {
        const PatchType elem = tr.element();
        std::string x = expr(f, l);
        if (elem.kind() == K::Real) x = as_real(x, tl);
        return ordered(f, x, b, both, elem.kind() == K::Real ? PatchType::real() : tl,
                       call("rt::member"));
      }
      case Op::Union: return ordered(f, a, b, both, tl, call("rt::unite"));
      case Op::Inter: return ordered(f, a, b, both, tl, call("rt::intersect"));
      case Op::Diff: return ordered(f, a, b, both, tl, call("rt::minus"));
      case Op::Cross: {
        const std::string pair = type(f.type(e).element());
        return ordered(f, a, b, both, tl, call("rt::cross<" + pair + ">"));
      }
      default:
        unsupported("binary operator");
    }
  }

  static std::string bare(std::string code) {
    if (code.size() < 2 || code.front() != '(' || code.back() != ')') return code;
    int depth = 0;
    for (std::size_t i = 0; i < code.size(); ++i) {
      if (code[i] == '(') ++depth;
      if (code[i] == ')') --depth;
      if (depth == 0 && i + 1 < code.size()) return code;
    }
    return code.substr(1, code.size() - 2);
  }

  std::string coerce(const std::string& code, const PatchType& from, const PatchType& to) const {
    if (from.kind() == K::Integer && to.kind() == K::Real) return "static_cast<double>(" + code + ")";
    if (from.kind() == K::Real && to.kind() == K::Integer) return "rt::trunc(" + code + ")";
    return code;
  }

  std::string value_for(ModuleFacts& f, const Expr& source, const PatchType& slot) {
    const PatchType st = typed(f, source, &slot);
    return coerce(bare(expr(f, source, &slot)), st, slot);
  }

  std::string lvalue(ModuleFacts& f, const Expr& target) {
    switch (target.kind) {
      case Expr::Kind::Var:
        return f.local(target.name);
      case Expr::Kind::Index: {
        const PatchType ct = f.type(target.args[0]);
        const std::string c = lvalue(f, target.args[0]);
        if (ct.kind() == K::Tuple) {
          const auto k = static_cast<std::size_t>(target.args[1].literal.as_int() - 1);
          return c + "." + member(ct.field_names()[k]);
        }
        return c + "[rt::ix(" + c + ", " + bare(expr(f, target.args[1])) + ")]";
      }
      case Expr::Kind::Field:
        return lvalue(f, target.args[0]) + "." + member(target.name);
      default:
        unsupported("assignment target '" + print_expr(target) + "'");
    }
  }

  // -------------------------------------------------------------------------
  // Statements

  void emit_function(Lines& out, ModuleFacts& f) {
    const ModuleDef& m = f.module();
    out.line(signature(f) + " {");
    out.indent();
    out.line("rt::Frame " + f.temp("frame") + ";");
    std::set<std::string> params;
    for (const auto& d : m.inputs) {
      if (d.binding == Binding::Caller) params.insert(d.name);
    }
    for (const auto& [name, t] : f.vars()) {
      if (!params.count(name)) out.line(type(resolve_unknown(t)) + " " + f.local(name) + "{};");
    }
    for (const auto& d : m.inputs) {
      if (d.binding == Binding::Console) {
        out.line(f.local(d.name) + " = rt::read<" + type(d.type) + ">(rt::next_line());");
      } else if (d.binding == Binding::Repository) {
        unsupported("repository-bound input '" + d.name + "'");
      }
    }
    const Step* root = m.root();
    if (!root) unsupported("module without a root step");
    for (const auto& c : root->children) sequence(out, f, c.step);
    epilogue(out, f);
    out.dedent();
    out.line("}");
  }

  void epilogue(Lines& out, ModuleFacts& f) {
    const ModuleDef& m = f.module();
    std::string values;
    for (const auto& d : m.outputs) {
      if (d.binding == Binding::Console) {
        out.line("rt::display(rt::render(" + f.local(d.name) + "));");
      } else if (d.binding == Binding::Repository) {
        unsupported("repository-bound output '" + d.name + "'");
      }
      if (!values.empty()) values += ", ";
      values += f.local(d.name);
    }
    out.line("return {" + values + "};");
  }

  void sequence(Lines& out, ModuleFacts& f, const std::string& head) {
    for (const Step* s : patch::sequence(f.module(), head)) step(out, f, *s);
  }

  void children(Lines& out, ModuleFacts& f, const Step& s, ChildGroup g) {
    for (const auto& c : s.children) {
      if (c.group == g) sequence(out, f, c.step);
    }
  }

  void block(Lines& out, const std::string& head, const std::function<void()>& body) {
    out.line(head + " {");
    out.indent();
    body();
    out.dedent();
  }

  void step(Lines& out, ModuleFacts& f, const Step& s) {
    const bool wrap = is_branch(s.kind) && emitter::holds_direct_exit(f.module(), s);
    if (wrap) {
      out.line("do {");
      out.indent();
    }
    lower(out, f, s);
    if (wrap) {
      out.dedent();
      out.line("} while (false);");
    }
  }

  void lower(Lines& out, ModuleFacts& f, const Step& s) {
    switch (s.kind) {
      case StepKind::Exit:
        out.line("break;");
        return;
      case StepKind::Stop:
        epilogue(out, f);
        return;
      case StepKind::Module:
        unsupported("nested module step");
      default:
        break;
    }
    if (const auto* p = std::get_if<AssignPayload>(&s.payload)) {
      const PatchType slot = f.slot(p->target);
      const std::string v = value_for(f, p->source, slot);
      out.line(lvalue(f, p->target) + " = " + v + ";");
    } else if (const auto* p = std::get_if<SwapPayload>(&s.payload)) {
      const std::string a = f.temp("a");
      const std::string b = f.temp("b");
      const std::string t = f.temp("temp");
      const PatchType ct = f.type(p->container);
      const std::string c = lvalue(f, p->container);
      out.line("{");
      out.indent();
      out.line("const std::int64_t " + a + " = " + bare(expr(f, p->first)) + ";");
      out.line("const std::int64_t " + b + " = " + bare(expr(f, p->second)) + ";");
      out.line(type(ct.element()) + " " + t + " = " + c + "[rt::ix(" + c + ", " + a + ")];");
      out.line(c + "[rt::ix(" + c + ", " + a + ")] = " + c + "[rt::ix(" + c + ", " + b + ")];");
      out.line(c + "[rt::ix(" + c + ", " + b + ")] = " + t + ";");
      out.dedent();
      out.line("}");
    } else if (const auto* p = std::get_if<ReadPayload>(&s.payload)) {
      if (p->source != Binding::Console) unsupported("repository read");
      const PatchType slot = f.slot(p->target);
      out.line(lvalue(f, p->target) + " = rt::read<" + type(slot) + ">(rt::next_line());");
    } else if (const auto* p = std::get_if<DisplayPayload>(&s.payload)) {
      const PatchType t = f.type(p->value);
      std::string v = bare(expr(f, p->value));
      if (p->value.kind == Expr::Kind::Literal) v = type(t) + "(" + v + ")";
      out.line("rt::display(rt::render(" + v + "));");
    } else if (const auto* p = std::get_if<ConditionPayload>(&s.payload)) {
      const std::string cond = bare(expr(f, p->condition));
      if (s.kind == StepKind::ByPass) {
        out.line("if (" + cond + ") {");
        out.indent();
        children(out, f, s, ChildGroup::Body);
        out.dedent();
        out.line("}");
      } else if (s.kind == StepKind::EitherOr) {
        out.line("if (" + cond + ") {");
        out.indent();
        children(out, f, s, ChildGroup::Then);
        out.dedent();
        out.line("} else {");
        out.indent();
        children(out, f, s, ChildGroup::Else);
        out.dedent();
        out.line("}");
      } else {
        out.line("while (" + cond + ") {");
        out.indent();
        out.line("rt::tick();");
        children(out, f, s, ChildGroup::Body);
        out.dedent();
        out.line("}");
      }
    } else if (const auto* p = std::get_if<LabeledPayload>(&s.payload)) {
      labeled(out, f, s, *p);
    } else if (const auto* p = std::get_if<CounterPayload>(&s.payload)) {
      const std::string from = f.temp("from");
      const std::string to = f.temp("to");
      const std::string dir = f.temp("step");
      const std::string i = f.local(p->variable);
      out.line("{");
      out.indent();
      out.line("const std::int64_t " + from + " = " + bare(expr(f, p->start)) + ";");
      out.line("const std::int64_t " + to + " = " + bare(expr(f, p->end)) + ";");
      out.line("const std::int64_t " + dir + " = " + from + " <= " + to + " ? 1 : -1;");
      out.line("for (" + i + " = " + from + ";; " + i + " += " + dir + ") {");
      out.indent();
      out.line("rt::tick();");
      children(out, f, s, ChildGroup::Body);
      out.line("if (" + i + " == " + to + ") break;");
      out.dedent();
      out.line("}");
      out.dedent();
      out.line("}");
    } else if (const auto* p = std::get_if<SentinelPayload>(&s.payload)) {
      const PatchType ct = f.type(p->collection);
      const PatchType et = ct.element();
      const std::string items = f.temp("items");
      const std::string item = f.temp("item");
      out.line("{");
      out.indent();
      out.line("const " + type(ct) + " " + items + " = " + bare(expr(f, p->collection)) + ";");
      std::string mark;
      PatchType mt = et;
      if (p->marker) {
        mark = f.temp("marker");
        mt = typed(f, *p->marker, &et);
        out.line("const " + type(mt) + " " + mark + " = " + bare(expr(f, *p->marker, &et)) + ";");
      }
      out.line("for (const " + type(et) + "& " + item + " : " + items + ") {");
      out.indent();
      if (p->marker) {
        const bool mixed = et.is_numeric() && mt.is_numeric() && !(et == mt);
        out.line("if (" + (mixed ? as_real(item, et) : item) + " == " +
                 (mixed ? as_real(mark, mt) : mark) + ") break;");
      }
      out.line("rt::tick();");
      const PatchType vt = f.slot(Expr::var(p->variable));
      out.line(f.local(p->variable) + " = " + coerce(item, et, vt) + ";");
      children(out, f, s, ChildGroup::Body);
      out.dedent();
      out.line("}");
      out.dedent();
      out.line("}");
    } else if (const auto* p = std::get_if<CallPayload>(&s.payload)) {
      call(out, f, *p);
    } else {
      unsupported(std::string(to_string(s.kind)) + " step without a payload");
    }
  }

  void labeled(Lines& out, ModuleFacts& f, const Step& s, const LabeledPayload& p) {
    const PatchType st = f.type(p.scrutinee);
    const std::string v = f.temp("label");
    out.line("{");
    out.indent();
    out.line("const " + type(st) + " " + v + " = " + bare(expr(f, p.scrutinee)) + ";");
    bool first = true;
    for (const auto& c : s.children) {
      if (c.group != ChildGroup::Case || !c.label) continue;
      const PatchType lt = type_of(*c.label);
      if (!compatible(lt, st)) continue;
      std::string test;
      if (st.is_numeric() && !(lt == st)) {
        test = as_real(v, st) + " == " + literal(*c.label, PatchType::real());
      } else {
        test = v + " == " + literal(*c.label, resolve_unknown(unify(lt, st).value_or(st)));
      }
      out.line(std::string(first ? "if (" : "} else if (") + test + ") {");
      first = false;
      out.indent();
      sequence(out, f, c.step);
      out.dedent();
    }
    bool has_default = false;
    for (const auto& c : s.children) has_default = has_default || c.group == ChildGroup::Default;
    if (has_default) {
      if (first) {
        out.line("{");
      } else {
        out.line("} else {");
      }
      out.indent();
      children(out, f, s, ChildGroup::Default);
      out.dedent();
      out.line("}");
    } else if (!first) {
      out.line("}");
    }
    out.dedent();
    out.line("}");
  }

  void call(Lines& out, ModuleFacts& f, const CallPayload& p) {
    auto [callee, mapping] = f.resolve(p);
    std::size_t index = 0;
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i] == callee) index = i;
    }
    const ModuleFacts& cf = facts_[index];
    out.line("{");
    out.indent();
    std::map<std::string, std::string> by_formal;
    for (std::size_t k = 0; k < p.actuals.size(); ++k) {
      const std::string a = f.temp("arg");
      const PatchType at = f.type(p.actuals[k].value);
      const DataObjectDecl* formal = nullptr;
      for (const auto& d : callee->inputs) {
        if (d.name == mapping.formal_of_actual[k]) formal = &d;
      }
      const PatchType ft = formal ? formal->type : at;
      const PatchType t = typed(f, p.actuals[k].value, &ft);
      out.line("const " + type(t) + " " + a + " = " + bare(expr(f, p.actuals[k].value, &ft)) + ";");
      by_formal[mapping.formal_of_actual[k]] = coerce(a, t, ft);
    }
    std::string args;
    for (const auto& d : callee->inputs) {
      if (d.binding != Binding::Caller) continue;
      if (!args.empty()) args += ", ";
      args += by_formal.at(d.name);
    }
    const std::string r = f.temp("result");
    out.line("const auto " + r + " = " + sym(*callee) + "(" + args + ");");
    for (const auto& res : p.results) {
      const std::string key = normalize_identifier(res.output);
      const DataObjectDecl* out_decl = nullptr;
      for (const auto& d : callee->outputs) {
        if (d.name == key) out_decl = &d;
      }
      if (!out_decl) unsupported("module " + callee->name + " has no output '" + res.output + "'");
      const PatchType slot = f.slot(res.target);
      out.line(lvalue(f, res.target) + " = " + coerce(r + "." + member(key), out_decl->type, slot) + ";");
    }
    (void)cf;
    out.dedent();
    out.line("}");
  }

  std::string harness(const std::string& file) const {
    Lines out;
    out.line("#include \"" + file + "\"");
    out.blank();
    out.line("int main() {");
    out.indent();
    out.line("try {");
    out.indent();
    std::string args;
    int k = 0;
    for (const auto& d : entry_.inputs) {
      if (d.binding != Binding::Caller) continue;
      const std::string name = "in" + std::to_string(++k);
      out.line("const auto " + name + " = rt::read<" + type(d.type) + ">(rt::next_line());");
      if (!args.empty()) args += ", ";
      args += name;
    }
    out.line("const auto result = " + sym(entry_) + "(" + args + ");");
    for (const auto& d : entry_.outputs) {
      if (d.binding != Binding::Caller) continue;
      out.line("rt::output(\"" + d.name + "\", rt::render(result." + member(d.name) + "));");
    }
    out.line("return 0;");
    out.dedent();
    out.line("} catch (const rt::Fault& f) {");
    out.indent();
    out.line("std::cout << \"E \" << f.kind << '\\n';");
    out.line("return 3;");
    out.dedent();
    out.line("}");
    out.dedent();
    out.line("}");
    return out.str();
  }

  const std::string& sym(const ModuleDef& m) const { return symbols_.at(&m); }

  const PatchProgram& program_;
  const ModuleDef& entry_;
  std::map<const ModuleDef*, std::string> symbols_;
  std::vector<const ModuleDef*> modules_;
  std::vector<ModuleFacts> facts_;
  TupleTable tuples_;
};

class CxxDialect : public Dialect {
 public:
  CxxDialect() {
    traits_.id = "cxx";
    traits_.block_style = "braces";
    traits_.index_base = 0;
    traits_.int_division = "widen";
    traits_.extension = ".cpp";
  }

  const DialectTraits& traits() const override { return traits_; }

  SourceText emit(const PatchProgram& program, const ModuleDef& m) const override {
    return CxxEmitter(program, m).emit();
  }

  std::optional<std::string> toolchain() const override {
    if (const char* env = std::getenv("PATCH_CXX"); env && *env) {
      return process::find_program(env);
    }
    for (const char* c : {"g++", "c++", "clang++"}) {
      if (auto p = process::find_program(c)) return p;
    }
    return std::nullopt;
  }

  std::vector<std::string> build(const SourceText& source, const Scratch& scratch) const override {
    auto cxx = toolchain();
    if (!cxx) throw PatchError(ErrorKind::ToolchainMissing, "no C++ compiler found (set PATCH_CXX)");
    process::write_file(scratch.src() / source.file_name, source.text);
    process::write_file(scratch.src() / source.harness_file_name, source.harness);
    const auto exe = scratch.bin() / "program";
    const auto log = scratch.out() / "build.log";
    auto result = process::run({*cxx, "-std=c++20", "-O0", "-w", "-o", exe.string(),
                                (scratch.src() / source.harness_file_name).string()},
                               "", log, 300);
    if (result.exit_code != 0) {
      throw PatchError(ErrorKind::InvalidProgram,
                       "emitted C++ failed to compile:\n" + process::read_file(log.string() + ".err"));
    }
    return {exe.string()};
  }

 private:
  DialectTraits traits_;
};

}  // namespace

std::unique_ptr<Dialect> make_cxx_dialect() { return std::make_unique<CxxDialect>(); }

}  // namespace patch
