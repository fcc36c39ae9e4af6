#include <cstdlib>

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

constexpr const char* kPrelude = R"(# Runtime support for programs emitted from Patch.
import copy as _copy_mod
import math as _math
import sys as _sys
from collections import namedtuple as _namedtuple


class _Fault(Exception):
    def __init__(self, kind):
        super().__init__(kind)
        self.kind = kind


_LO = -(1 << 63)
_HI = (1 << 63) - 1


def _int(v):
    if v < _LO or v > _HI:
        raise _Fault("arith-overflow")
    return v


def _add(a, b):
    return _int(a + b)


def _sub(a, b):
    return _int(a - b)


def _mul(a, b):
    return _int(a * b)


def _neg(a):
    return _int(-a)


def _real(x):
    if _math.isnan(x):
        raise _Fault("domain-error")
    if _math.isinf(x):
        raise _Fault("arith-overflow")
    return x


def _div(a, b):
    if b == 0.0:
        raise _Fault("division-by-zero")
    try:
        r = a / b
    except OverflowError:
        raise _Fault("arith-overflow")
    return _real(r)


def _pow(a, b):
    if a == 0.0 and b < 0.0:
        raise _Fault("domain-error")
    try:
        r = _math.pow(a, b)
    except OverflowError:
        raise _Fault("arith-overflow")
    except ValueError:
        raise _Fault("domain-error")
    return _real(r)


def _trunc(x):
    t = _math.trunc(x)
    if t < _LO or t > _HI:
        raise _Fault("arith-overflow")
    return t


# Patch positions start at 1.
def _ix(c, i):
    if i < 1 or i > len(c):
        raise _Fault("index-out-of-range")
    return i - 1


def _at(c, i):
    return c[_ix(c, i)]


def _size(c):
    return len(c)


def _cross(a, b, pair):
    return frozenset(pair(x, y) for x in a for y in b)


def _copy(v):
    return _copy_mod.deepcopy(v)


_ticks = [0]


def _tick():
    _ticks[0] += 1
    if _ticks[0] > 1000000:
        raise _Fault("budget-exceeded")


_depth = [0]


def _frame(fn):
    def run(*args):
        _depth[0] += 1
        try:
            if _depth[0] > 256:
                raise _Fault("call-depth-exceeded")
            return fn(*args)
        finally:
            _depth[0] -= 1
    return run


def _key(v):
    if isinstance(v, frozenset):
        return tuple(sorted(_key(x) for x in v))
    if isinstance(v, (list, tuple)):
        return tuple(_key(x) for x in v)
    return v


def _quote(s):
    out = ['"']
    for c in s:
        if c == '"':
            out.append('\\"')
        elif c == "\\":
            out.append("\\\\")
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        elif c == "\r":
            out.append("\\r")
        elif ord(c) < 0x20:
            out.append("\\u%04x" % ord(c))
        else:
            out.append(c)
    out.append('"')
    return "".join(out)


def _render(v):
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        s = repr(v)
        return s if ("." in s or "e" in s) else s + ".0"
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, list):
        return "[" + ", ".join(_render(x) for x in v) + "]"
    if isinstance(v, frozenset):
        return "{" + ", ".join(_render(x) for x in sorted(v, key=_key)) + "}"
    return "<" + ", ".join(n + ": " + _render(x) for n, x in zip(v._patch_names, v)) + ">"


class _Reader:
    def __init__(self, text):
        self.s = text
        self.p = 0

    def bad(self):
        raise _Fault("read-failed")

    def ws(self):
        while self.p < len(self.s) and self.s[self.p] in " \t\n\r\f\v":
            self.p += 1

    def accept(self, c):
        self.ws()
        if self.p < len(self.s) and self.s[self.p] == c:
            self.p += 1
            return True
        return False

    def expect(self, c):
        if not self.accept(c):
            self.bad()

    def finish(self):
        self.ws()
        if self.p != len(self.s):
            self.bad()

    def digit(self, i):
        return i < len(self.s) and "0" <= self.s[i] <= "9"

    def number(self):
        self.ws()
        start = self.p
        if self.p < len(self.s) and self.s[self.p] == "-":
            self.p += 1
        if not self.digit(self.p):
            self.bad()
        while self.digit(self.p):
            self.p += 1
        real = False
        if self.p + 1 < len(self.s) and self.s[self.p] == "." and self.digit(self.p + 1):
            self.p += 1
            while self.digit(self.p):
                self.p += 1
            real = True
        if self.p < len(self.s) and self.s[self.p] in "eE":
            q = self.p + 1
            if q < len(self.s) and self.s[q] in "+-":
                q += 1
            if self.digit(q):
                while self.digit(q):
                    q += 1
                self.p = q
                real = True
        return self.s[start:self.p], real

    def word(self):
        self.ws()
        start = self.p
        while self.p < len(self.s) and self.s[self.p].isascii() and self.s[self.p].isalpha():
            self.p += 1
        return self.s[start:self.p].upper()

    def text(self):
        self.expect('"')
        out = []
        while True:
            if self.p >= len(self.s):
                self.bad()
            c = self.s[self.p]
            self.p += 1
            if c == '"':
                return "".join(out)
            if c != "\\":
                out.append(c)
                continue
            if self.p >= len(self.s):
                self.bad()
            e = self.s[self.p]
            self.p += 1
            simple = {'"': '"', "\\": "\\", "/": "/", "n": "\n", "t": "\t", "r": "\r"}
            if e in simple:
                out.append(simple[e])
            elif e == "u":
                code = self.s[self.p:self.p + 4]
                if len(code) != 4 or any(h not in "0123456789abcdefABCDEF" for h in code):
                    self.bad()
                self.p += 4
                out.append(chr(int(code, 16)))
            else:
                self.bad()

    def member(self, name):
        self.ws()
        start = self.p
        while self.p < len(self.s) and self.s[self.p].isascii() and (self.s[self.p].isalnum() or self.s[self.p] == "_"):
            self.p += 1
        ident = self.s[start:self.p].lower()
        if ident and ident[0].isalpha() and self.accept(":"):
            if ident != name:
                self.bad()
            return
        self.p = start

    def get(self, t):
        if t == "integer":
            tok, real = self.number()
            if real:
                self.bad()
            v = int(tok)
            if v < _LO or v > _HI:
                self.bad()
            return v
        if t == "real":
            tok, real = self.number()
            v = float(tok)
            if _math.isinf(v) or (v == 0.0 and any(d in "123456789" for d in tok.split("e")[0].split("E")[0])):
                self.bad()
            return v
        if t == "boolean":
            w = self.word()
            if w == "TRUE":
                return True
            if w == "FALSE":
                return False
            self.bad()
        if t == "string":
            return self.text()
        if t[0] == "list" or t[0] == "set":
            close = "]" if t[0] == "list" else "}"
            self.expect("[" if t[0] == "list" else "{")
            items = []
            if not self.accept(close):
                items.append(self.get(t[1]))
                while self.accept(","):
                    items.append(self.get(t[1]))
                self.expect(close)
            return items if t[0] == "list" else frozenset(items)
        cls, fields = t
        self.expect("<")
        items = []
        for i, f in enumerate(fields):
            if i:
                self.expect(",")
            self.member(cls._patch_names[i])
            items.append(self.get(f))
        self.expect(">")
        return cls(*items)


def _read(line, t):
    r = _Reader(line)
    v = r.get(t)
    r.finish()
    return v


def _next_line():
    line = _sys.stdin.readline()
    if line == "":
        raise _Fault("read-failed")
    return line[:-1] if line.endswith("\n") else line


def _display(text):
    print("D " + text)
)";

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
      "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
      "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
      "try", "while", "with", "yield", "match", "case", "float", "range", "print", "len",
      "int", "str", "frozenset", "tuple", "isinstance", "super", "prog", "sys", "main"};
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

bool fresh(const Expr& e) {
  return e.kind != Expr::Kind::Var && e.kind != Expr::Kind::Index && e.kind != Expr::Kind::Field;
}

class PyEmitter {
 public:
  PyEmitter(const PatchProgram& program, const ModuleDef& entry) : program_(program), entry_(entry) {}

  SourceText emit() {
    std::set<std::string> reserved = reserved_words();
    modules_ = emitter::reachable_modules(program_, entry_);
    for (const ModuleDef* m : modules_) {
      std::string name = emitter::module_symbol(*m);
      while (reserved.count(name)) name += "_";
      symbols_[m] = name;
      reserved.insert(name);
    }
    for (const ModuleDef* m : modules_) reserved.insert(sym(*m));
    for (const ModuleDef* m : modules_) facts_.emplace_back(program_, *m, reserved);
    for (const auto& f : facts_) f.collect_tuples(tuples_);
    for (const auto& [t, name] : tuples_.all()) {
      // Python sets hash their elements, so list-valued members cannot live in a set.
      (void)name;
      (void)t;
    }
    check_hashable();

    Lines out("    ");
    std::string prelude = kPrelude;
    std::size_t p = 0;
    while (p < prelude.size()) {
      const std::size_t e = prelude.find('\n', p);
      const std::string line = prelude.substr(p, e - p);
      if (line.empty()) {
        out.blank();
      } else {
        out.line(line);
      }
      p = e == std::string::npos ? prelude.size() : e + 1;
    }
    emit_tuples(out);
    for (auto& f : facts_) {
      out.blank();
      out.blank();
      emit_function(out, f);
    }

    SourceText src;
    src.dialect = "py3";
    src.module = entry_.name;
    src.entry_symbol = sym(entry_);
    src.file_name = src.entry_symbol + "_prog.py";
    src.harness_file_name = src.entry_symbol + "_main.py";
    src.text = out.str();
    src.harness = harness(src.entry_symbol + "_prog");
    return src;
  }

 private:
  void check_hashable() {
    std::function<void(const PatchType&)> walk = [&](const PatchType& t) {
      if (t.kind() == K::Set && has_list(t.element())) {
        unsupported("py3 has no lowering for sets of " + render_type(t.element()));
      }
      if (t.kind() == K::List || t.kind() == K::Set) walk(t.element());
      if (t.kind() == K::Tuple) {
        for (const auto& f : t.field_types()) walk(f);
      }
    };
    for (const auto& f : facts_) {
      for (const auto& [name, t] : f.vars()) walk(resolve_unknown(t));
    }
  }

  static std::string member(const std::string& field) {
    return reserved_words().count(field) ? field + "_" : field;
  }

  std::string descriptor(const PatchType& t, const std::string& prefix) const {
    switch (t.kind()) {
      case K::Unknown:
      case K::Integer: return "\"integer\"";
      case K::Real: return "\"real\"";
      case K::Boolean: return "\"boolean\"";
      case K::String: return "\"string\"";
      case K::List: return "(\"list\", " + descriptor(t.element(), prefix) + ")";
      case K::Set: return "(\"set\", " + descriptor(t.element(), prefix) + ")";
      case K::Tuple: {
        std::string fields;
        for (const auto& f : t.field_types()) fields += descriptor(f, prefix) + ", ";
        return "(" + prefix + tuples_.name(t) + ", (" + fields + "))";
      }
    }
    return "None";
  }

  void emit_tuples(Lines& out) {
    for (const auto& [t, name] : tuples_.all()) {
      std::string fields;
      std::string names;
      for (const auto& n : t.field_names()) {
        fields += (fields.empty() ? "\"" : ", \"") + member(n) + "\"";
        names += (names.empty() ? "\"" : ", \"") + n + "\"";
      }
      out.blank();
      out.line(name + " = _namedtuple(\"" + name + "\", [" + fields + "])");
      out.line(name + "._patch_names = (" + names + ",)");
    }
  }

  std::string literal(const Value& v, const PatchType& t) const {
    if (t.kind() == K::Real && v.is_numeric()) return render_real(v.as_number());
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_real()) return render_real(v.as_real());
    if (v.is_bool()) return v.as_bool() ? "True" : "False";
    if (v.is_string()) return render_string(v.as_string());
    auto items = [&](const std::vector<Value>& xs, const PatchType& elem) {
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += literal(xs[i], elem);
      }
      return out;
    };
    if (v.is_list()) return "[" + items(v.as_list().items, t.element()) + "]";
    if (v.is_set()) {
      if (v.as_set().items.empty()) return "frozenset()";
      return "frozenset({" + items(v.as_set().items, t.element()) + "})";
    }
    const auto& tv = v.as_tuple();
    std::string out = tuples_.name(t) + "(";
    for (std::size_t i = 0; i < tv.items.size(); ++i) {
      if (i) out += ", ";
      out += literal(tv.items[i], t.field_types()[i]);
    }
    return out + ")";
  }

  std::string default_literal(const PatchType& t) const { return literal(default_value(t), t); }

  PatchType typed(const ModuleFacts& f, const Expr& e, const PatchType* expected) const {
    PatchType raw = f.raw_type(e);
    if (expected && raw.has_unknown()) {
      if (auto u = unify(raw, *expected)) return resolve_unknown(*u);
    }
    return resolve_unknown(raw);
  }

  static std::string as_real(const std::string& code, const PatchType& t) {
    return t.kind() == K::Integer ? "float(" + code + ")" : code;
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
        const std::string i = bare(expr(f, e.args[1]));
        if (e.args[0].kind == Expr::Kind::Var) return c + "[_ix(" + c + ", " + i + ")]";
        return "_at(" + c + ", " + i + ")";
      }
      case Expr::Kind::Field:
        return expr(f, e.args[0]) + "." + member(e.name);
      case Expr::Kind::Unary: {
        const PatchType t = f.type(e.args[0]);
        const std::string a = expr(f, e.args[0]);
        switch (e.op) {
          case Op::Not: return "(not " + a + ")";
          case Op::Neg:
            if (t.kind() == K::Integer) return "_neg(" + bare(a) + ")";
            return a.front() == '-' ? "(-(" + a + "))" : "(-" + a + ")";
          case Op::Size: return "_size(" + bare(a) + ")";
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
    const bool ints = tl.kind() == K::Integer && tr.kind() == K::Integer;
    const bool numeric = tl.is_numeric() && tr.is_numeric();
    if (numeric && !ints) {
      a = as_real(a, tl);
      b = as_real(b, tr);
    }
    auto infix = [&](const std::string& op) { return "(" + a + " " + op + " " + b + ")"; };
    auto call = [&](const std::string& fn) { return fn + "(" + bare(a) + ", " + bare(b) + ")"; };
    switch (e.op) {
      case Op::Add: return ints ? call("_add") : "_real" + infix("+");
      case Op::Sub: return ints ? call("_sub") : "_real" + infix("-");
      case Op::Mul: return ints ? call("_mul") : "_real" + infix("*");
      case Op::Div:
        a = as_real(a, tl);
        b = as_real(b, tr);
        return call("_div");
      case Op::Pow:
        a = as_real(a, tl);
        b = as_real(b, tr);
        return call("_pow");
      case Op::Lt: return infix("<");
      case Op::Gt: return infix(">");
      case Op::Le: return infix("<=");
      case Op::Ge: return infix(">=");
      case Op::Eq: return infix("==");
      case Op::And: return infix("and");
      case Op::Or: return infix("or");
      case Op::In: {
        std::string x = expr(f, l);
        if (tr.element().kind() == K::Real) x = as_real(x, tl);
        return "(" + x + " in " + b + ")";
      }
      case Op::Union: return infix("|");
      case Op::Inter: return infix("&");
      case Op::Diff: return infix("-");
      case Op::Cross:
        return "_cross(" + bare(a) + ", " + bare(b) + ", " + tuples_.name(f.type(e).element()) + ")";
      default:
        unsupported("binary operator");
    }
  }

  static std::string bare(std::string code) {
    if (code.size() < 2 || code.front() != '(' || code.back() != ')') return code;
    int depth = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < code.size(); ++i) {
      const char c = code[i];
      if (quoted) {
        if (c == '\\') {
          ++i;
        } else if (c == '"') {
          quoted = false;
        }
        continue;
      }
      if (c == '"') quoted = true;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && i + 1 < code.size()) return code;
    }
    return code.substr(1, code.size() - 2);
  }

  std::string coerce(const std::string& code, const PatchType& from, const PatchType& to) const {
    if (from.kind() == K::Integer && to.kind() == K::Real) return "float(" + bare(code) + ")";
    if (from.kind() == K::Real && to.kind() == K::Integer) return "_trunc(" + bare(code) + ")";
    return code;
  }

  std::string value_for(ModuleFacts& f, const Expr& source, const PatchType& slot) {
    const PatchType st = typed(f, source, &slot);
    std::string code = coerce(bare(expr(f, source, &slot)), st, slot);
    if (has_list(slot) && !fresh(source)) code = "_copy(" + code + ")";
    return code;
  }

  // Emits `target = value`.
  void store(Lines& out, ModuleFacts& f, const Expr& target, const std::string& value) {
    if (target.kind == Expr::Kind::Var) {
      out.line(f.local(target.name) + " = " + value);
      return;
    }
    const Expr& base = target.args[0];
    const PatchType bt = f.type(base);
    if (bt.kind() == K::Tuple) {
      if (base.kind != Expr::Kind::Var) unsupported("py3 cannot assign into a nested tuple member");
      std::string field = target.name;
      if (target.kind == Expr::Kind::Index) {
        field = bt.field_names()[static_cast<std::size_t>(target.args[1].literal.as_int() - 1)];
      }
      const std::string t = f.local(base.name);
      out.line(t + " = " + t + "._replace(" + member(field) + "=" + value + ")");
      return;
    }
    out.line(lvalue(f, target) + " = " + value);
  }

  std::string lvalue(ModuleFacts& f, const Expr& target) {
    switch (target.kind) {
      case Expr::Kind::Var:
        return f.local(target.name);
      case Expr::Kind::Index: {
        if (f.type(target.args[0]).kind() == K::Tuple) {
          unsupported("py3 cannot assign into a nested tuple member");
        }
        const std::string c = lvalue(f, target.args[0]);
        return c + "[_ix(" + c + ", " + bare(expr(f, target.args[1])) + ")]";
      }
      default:
        unsupported("py3 cannot assign to '" + print_expr(target) + "'");
    }
  }

  void emit_function(Lines& out, ModuleFacts& f) {
    const ModuleDef& m = f.module();
    std::string params;
    std::set<std::string> bound;
    for (const auto& d : m.inputs) {
      if (d.binding != Binding::Caller) continue;
      if (!params.empty()) params += ", ";
      params += f.local(d.name);
      bound.insert(d.name);
    }
    out.line("@_frame");
    out.line("def " + sym(m) + "(" + params + "):");
    out.indent();
    for (const auto& [name, t] : f.vars()) {
      if (!bound.count(name)) out.line(f.local(name) + " = " + default_literal(resolve_unknown(t)));
    }
    for (const auto& d : m.inputs) {
      if (d.binding == Binding::Console) {
        out.line(f.local(d.name) + " = _read(_next_line(), " + descriptor(d.type, "") + ")");
      } else if (d.binding == Binding::Repository) {
        unsupported("repository-bound input '" + d.name + "'");
      }
    }
    const Step* root = m.root();
    if (!root) unsupported("module without a root step");
    for (const auto& c : root->children) sequence(out, f, c.step);
    epilogue(out, f);
    out.dedent();
  }

  void epilogue(Lines& out, ModuleFacts& f) {
    const ModuleDef& m = f.module();
    std::string values;
    for (const auto& d : m.outputs) {
      if (d.binding == Binding::Console) {
        out.line("_display(_render(" + f.local(d.name) + "))");
      } else if (d.binding == Binding::Repository) {
        unsupported("repository-bound output '" + d.name + "'");
      }
      values += f.local(d.name) + ", ";
    }
    out.line("return (" + values + ")");
  }

  void sequence(Lines& out, ModuleFacts& f, const std::string& head) {
    for (const Step* s : patch::sequence(f.module(), head)) step(out, f, *s);
  }

  void body(Lines& out, ModuleFacts& f, const Step& s, ChildGroup g) {
    bool any = false;
    for (const auto& c : s.children) {
      if (c.group == g) {
        any = any || !patch::sequence(f.module(), c.step).empty();
        sequence(out, f, c.step);
      }
    }
    if (!any) out.line("pass");
  }

  void step(Lines& out, ModuleFacts& f, const Step& s) {
    const bool wrap = is_branch(s.kind) && emitter::holds_direct_exit(f.module(), s);
    if (wrap) {
      out.line("while True:");
      out.indent();
    }
    lower(out, f, s);
    if (wrap) {
      out.line("break");
      out.dedent();
    }
  }

  void lower(Lines& out, ModuleFacts& f, const Step& s) {
    switch (s.kind) {
      case StepKind::Exit:
        out.line("break");
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
      store(out, f, p->target, value_for(f, p->source, slot));
    } else if (const auto* p = std::get_if<SwapPayload>(&s.payload)) {
      const std::string a = f.temp("a");
      const std::string b = f.temp("b");
      const std::string t = f.temp("temp");
      const std::string c = lvalue(f, p->container);
      out.line(a + " = " + bare(expr(f, p->first)));
      out.line(b + " = " + bare(expr(f, p->second)));
      out.line(t + " = " + c + "[_ix(" + c + ", " + a + ")]");
      out.line(c + "[_ix(" + c + ", " + a + ")] = " + c + "[_ix(" + c + ", " + b + ")]");
      out.line(c + "[_ix(" + c + ", " + b + ")] = " + t);
    } else if (const auto* p = std::get_if<ReadPayload>(&s.payload)) {
      if (p->source != Binding::Console) unsupported("repository read");
      const PatchType slot = f.slot(p->target);
      store(out, f, p->target, "_read(_next_line(), " + descriptor(slot, "") + ")");
    } else if (const auto* p = std::get_if<DisplayPayload>(&s.payload)) {
      out.line("_display(_render(" + bare(expr(f, p->value)) + "))");
    } else if (const auto* p = std::get_if<ConditionPayload>(&s.payload)) {
      const std::string cond = bare(expr(f, p->condition));
      if (s.kind == StepKind::ByPass) {
        out.line("if " + cond + ":");
        out.indent();
        body(out, f, s, ChildGroup::Body);
        out.dedent();
      } else if (s.kind == StepKind::EitherOr) {
        out.line("if " + cond + ":");
        out.indent();
        body(out, f, s, ChildGroup::Then);
        out.dedent();
        out.line("else:");
        out.indent();
        body(out, f, s, ChildGroup::Else);
        out.dedent();
      } else {
        out.line("while " + cond + ":");
        out.indent();
        out.line("_tick()");
        body(out, f, s, ChildGroup::Body);
        out.dedent();
      }
    } else if (const auto* p = std::get_if<LabeledPayload>(&s.payload)) {
      labeled(out, f, s, *p);
    } else if (const auto* p = std::get_if<CounterPayload>(&s.payload)) {
      const std::string from = f.temp("from");
      const std::string to = f.temp("to");
      const std::string dir = f.temp("step");
      out.line(from + " = " + bare(expr(f, p->start)));
      out.line(to + " = " + bare(expr(f, p->end)));
      out.line(dir + " = 1 if " + from + " <= " + to + " else -1");
      out.line("for " + f.local(p->variable) + " in range(" + from + ", " + to + " + " + dir + ", " + dir +
               "):");
      out.indent();
      out.line("_tick()");
      body(out, f, s, ChildGroup::Body);
      out.dedent();
    } else if (const auto* p = std::get_if<SentinelPayload>(&s.payload)) {
      const PatchType ct = f.type(p->collection);
      const PatchType et = ct.element();
      const std::string items = f.temp("items");
      const std::string item = f.temp("item");
      out.line(items + " = " + bare(expr(f, p->collection)) + "[:]");
      std::string mark;
      PatchType mt = et;
      if (p->marker) {
        mark = f.temp("marker");
        mt = typed(f, *p->marker, &et);
        out.line(mark + " = " + bare(expr(f, *p->marker, &et)));
      }
      out.line("for " + item + " in " + items + ":");
      out.indent();
      if (p->marker) {
        const bool mixed = et.is_numeric() && mt.is_numeric() && !(et == mt);
        out.line("if " + (mixed ? as_real(item, et) : item) + " == " + (mixed ? as_real(mark, mt) : mark) +
                 ":");
        out.indent();
        out.line("break");
        out.dedent();
      }
      out.line("_tick()");
      const PatchType vt = f.slot(Expr::var(p->variable));
      std::string v = coerce(item, et, vt);
      if (has_list(vt)) v = "_copy(" + v + ")";
      out.line(f.local(p->variable) + " = " + v);
      body(out, f, s, ChildGroup::Body);
      out.dedent();
    } else if (const auto* p = std::get_if<CallPayload>(&s.payload)) {
      call(out, f, *p);
    } else {
      unsupported(std::string(to_string(s.kind)) + " step without a payload");
    }
  }

  void labeled(Lines& out, ModuleFacts& f, const Step& s, const LabeledPayload& p) {
    const PatchType st = f.type(p.scrutinee);
    const std::string v = f.temp("label");
    out.line(v + " = " + bare(expr(f, p.scrutinee)));
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
      out.line(std::string(first ? "if " : "elif ") + test + ":");
      first = false;
      out.indent();
      bool any = !patch::sequence(f.module(), c.step).empty();
      sequence(out, f, c.step);
      if (!any) out.line("pass");
      out.dedent();
    }
    bool has_default = false;
    for (const auto& c : s.children) has_default = has_default || c.group == ChildGroup::Default;
    if (!has_default) return;
    if (first) {
      body(out, f, s, ChildGroup::Default);
      return;
    }
    out.line("else:");
    out.indent();
    body(out, f, s, ChildGroup::Default);
    out.dedent();
  }

  void call(Lines& out, ModuleFacts& f, const CallPayload& p) {
    auto [callee, mapping] = f.resolve(p);
    std::map<std::string, std::string> by_formal;
    for (std::size_t k = 0; k < p.actuals.size(); ++k) {
      const std::string a = f.temp("arg");
      const DataObjectDecl* formal = nullptr;
      for (const auto& d : callee->inputs) {
        if (d.name == mapping.formal_of_actual[k]) formal = &d;
      }
      const PatchType at = f.type(p.actuals[k].value);
      const PatchType ft = formal ? formal->type : at;
      const PatchType t = typed(f, p.actuals[k].value, &ft);
      out.line(a + " = " + bare(expr(f, p.actuals[k].value, &ft)));
      std::string v = coerce(a, t, ft);
      if (has_list(ft)) v = "_copy(" + v + ")";
      by_formal[mapping.formal_of_actual[k]] = v;
    }
    std::string args;
    for (const auto& d : callee->inputs) {
      if (d.binding != Binding::Caller) continue;
      if (!args.empty()) args += ", ";
      args += by_formal.at(d.name);
    }
    const std::string r = f.temp("result");
    out.line(r + " = " + sym(*callee) + "(" + args + ")");
    for (const auto& res : p.results) {
      const std::string key = normalize_identifier(res.output);
      std::size_t index = callee->outputs.size();
      for (std::size_t i = 0; i < callee->outputs.size(); ++i) {
        if (callee->outputs[i].name == key) index = i;
      }
      if (index == callee->outputs.size()) {
        unsupported("module " + callee->name + " has no output '" + res.output + "'");
      }
      const PatchType slot = f.slot(res.target);
      std::string v = coerce(r + "[" + std::to_string(index) + "]", callee->outputs[index].type, slot);
      if (has_list(slot)) v = "_copy(" + v + ")";
      store(out, f, res.target, v);
    }
  }

  std::string harness(const std::string& prog_module) const {
    Lines out("    ");
    out.line("import sys");
    out.blank();
    out.line("import " + prog_module + " as prog");
    out.blank();
    out.blank();
    out.line("def main():");
    out.indent();
    out.line("sys.stdin.reconfigure(encoding=\"utf-8\")");
    out.line("sys.stdout.reconfigure(encoding=\"utf-8\")");
    out.line("try:");
    out.indent();
    std::string args;
    int k = 0;
    for (const auto& d : entry_.inputs) {
      if (d.binding != Binding::Caller) continue;
      const std::string name = "in" + std::to_string(++k);
      out.line(name + " = prog._read(prog._next_line(), " + descriptor(d.type, "prog.") + ")");
      if (!args.empty()) args += ", ";
      args += name;
    }
    out.line("result = prog." + sym(entry_) + "(" + args + ")");
    for (std::size_t i = 0; i < entry_.outputs.size(); ++i) {
      const auto& d = entry_.outputs[i];
      if (d.binding != Binding::Caller) continue;
      out.line("print(\"O " + d.name + " \" + prog._render(result[" + std::to_string(i) + "]))");
    }
    out.dedent();
    out.line("except prog._Fault as fault:");
    out.indent();
    out.line("print(\"E \" + fault.kind)");
    out.line("return 3");
    out.dedent();
    out.line("return 0");
    out.dedent();
    out.blank();
    out.blank();
    out.line("if __name__ == \"__main__\":");
    out.indent();
    out.line("sys.exit(main())");
    out.dedent();
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

class PyDialect : public Dialect {
 public:
  PyDialect() {
    traits_.id = "py3";
    traits_.block_style = "indentation";
    traits_.index_base = 0;
    traits_.int_division = "widen";
    traits_.extension = ".py";
  }

  const DialectTraits& traits() const override { return traits_; }

  SourceText emit(const PatchProgram& program, const ModuleDef& m) const override {
    return PyEmitter(program, m).emit();
  }

  std::optional<std::string> toolchain() const override {
    if (const char* env = std::getenv("PATCH_PYTHON"); env && *env) return process::find_program(env);
    for (const char* c : {"python3", "python"}) {
      if (auto p = process::find_program(c)) return p;
    }
    return std::nullopt;
  }

  std::vector<std::string> build(const SourceText& source, const Scratch& scratch) const override {
    auto py = toolchain();
    if (!py) throw PatchError(ErrorKind::ToolchainMissing, "no Python 3 found (set PATCH_PYTHON)");
    const auto prog = scratch.src() / source.file_name;
    const auto main = scratch.src() / source.harness_file_name;
    process::write_file(prog, source.text);
    process::write_file(main, source.harness);
    const auto log = scratch.out() / "build.log";
    auto r = process::run({*py, "-B", "-c",
                           "import sys, ast\nfor p in sys.argv[1:]: ast.parse(open(p, encoding='utf-8').read(), p)",
                           prog.string(), main.string()},
                          "", log, 120);
    if (r.exit_code != 0) {
      throw PatchError(ErrorKind::InvalidProgram,
                       "emitted Python does not parse:\n" + process::read_file(log.string() + ".err"));
    }
    return {*py, "-B", main.string()};
  }

 private:
  DialectTraits traits_;
};

}  // namespace

std::unique_ptr<Dialect> make_py_dialect() { return std::make_unique<PyDialect>(); }

}  // namespace patch
