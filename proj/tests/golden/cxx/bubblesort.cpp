// Runtime support for programs emitted from Patch.
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

struct bubblesort_result {
  std::vector<std::int64_t> list;
};

bubblesort_result bubblesort(std::vector<std::int64_t> list);

bubblesort_result bubblesort(std::vector<std::int64_t> list) {
  rt::Frame frame1_;
  std::int64_t i{};
  bool sorted{};
  sorted = rt::size(list) < 2;
  while (!sorted) {
    rt::tick();
    sorted = true;
    {
      const std::int64_t from2_ = 1;
      const std::int64_t to3_ = rt::sub(rt::size(list), 1);
      const std::int64_t step4_ = from2_ <= to3_ ? 1 : -1;
      for (i = from2_;; i += step4_) {
        rt::tick();
        if ([&] { const std::int64_t lhs5_ = list[rt::ix(list, i)]; return (lhs5_ > list[rt::ix(list, rt::add(i, 1))]); }()) {
          {
            const std::int64_t a6_ = i;
            const std::int64_t b7_ = rt::add(i, 1);
            std::int64_t temp8_ = list[rt::ix(list, a6_)];
            list[rt::ix(list, a6_)] = list[rt::ix(list, b7_)];
            list[rt::ix(list, b7_)] = temp8_;
          }
          sorted = false;
        }
        if (i == to3_) break;
      }
    }
  }
  return {list};
}
