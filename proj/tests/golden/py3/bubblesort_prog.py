# Runtime support for programs emitted from Patch.
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


@_frame
def bubblesort(list):
    i = 0
    sorted = False
    sorted = _size(list) < 2
    while not sorted:
        _tick()
        sorted = True
        from1_ = 1
        to2_ = _sub(_size(list), 1)
        step3_ = 1 if from1_ <= to2_ else -1
        for i in range(from1_, to2_ + step3_, step3_):
            _tick()
            if list[_ix(list, i)] > list[_ix(list, _add(i, 1))]:
                a4_ = i
                b5_ = _add(i, 1)
                temp6_ = list[_ix(list, a4_)]
                list[_ix(list, a4_)] = list[_ix(list, b5_)]
                list[_ix(list, b5_)] = temp6_
                sorted = False
    return (list, )
