"""Concrete syntax for process terms.

Grammar (loosest first)::

    par     := choice ('|' par)?              right-nested
    choice  := unary ('+' unary)*             operands must be guarded
    unary   := guard ('.' unary)?
             | 'new' name (',' name)* 'in' unary
             | 'rep' unary | '0' | 'ok' | '(' par ')'
    guard   := chan '!' name? | chan '?' ('(' name ')')? | 'tau'
    chan    := name | '()'

Names are identifiers or single-quoted tokens such as ``'1'``.  ``x!`` sends
the unit name; ``x?`` receives into a binder that is never used.  A received unit can
sit in channel position, written ``()``.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    NIL,
    OK,
    UNIT,
    In,
    Out,
    Par,
    Process,
    Rep,
    Res,
    Success,
    Sum,
    Tau,
    check_wellformed,
    choice,
)

__all__ = ["ParseError", "parse", "format_process", "format_name"]

KEYWORDS = frozenset({"new", "in", "rep", "tau", "ok"})
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_′″‴]*\Z")
_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<quoted>'[^'\n]*')
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_′″‴]*)
  | (?P<sym>[!?().+|,])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass
class _Tok:
    kind: str  # "name", "kw", "sym", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        kind = m.lastgroup
        value = m.group()
        if kind == "quoted":
            toks.append(_Tok("name", value[1:-1], line, col))
        elif kind == "ident":
            if value in KEYWORDS or value == "0":
                toks.append(_Tok("kw", value, line, col))
            else:
                toks.append(_Tok("name", value, line, col))
        elif kind == "sym":
            toks.append(_Tok("sym", value, line, col))
        for i, ch in enumerate(value):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self._taken = {t.text for t in self.toks if t.kind == "name"}
        self._dummies: list[str] = []
        self._depth = 0

    def _dummy(self) -> str:
        # named by nesting depth, so equal shapes get equal binders
        k = len(self._dummies) and int(self._dummies[-1][2:]) + 1
        while len(self._dummies) <= self._depth:
            while f"_u{k}" in self._taken:
                k += 1
            self._dummies.append(f"_u{k}")
            k += 1
        return self._dummies[self._depth]

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col)

    def accept(self, kind: str, text: str | None = None) -> _Tok | None:
        tok = self.tok
        if tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> _Tok:
        tok = self.accept(kind, text)
        if tok is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what or text or kind}, found {found!r}")
        return tok

    def process(self) -> Process:
        p = self.par()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return p

    def par(self) -> Process:
        left = self.choice()
        if self.accept("sym", "|"):
            return Par(left, self.par())
        return left

    def choice(self) -> Process:
        start = self.tok
        terms = [self.unary()]
        while self.accept("sym", "+"):
            terms.append(self.unary())
        if len(terms) == 1:
            return terms[0]
        for t in terms:
            if not isinstance(t, Sum):
                raise self.error("operands of '+' must be guarded", start)
        return choice(*terms)

    def unary(self) -> Process:
        tok = self.tok
        if self.accept("kw", "0"):
            return NIL
        if self.accept("kw", "ok"):
            return OK
        if self.accept("kw", "rep"):
            return Rep(self.unary())
        if self.accept("kw", "new"):
            names = [self.expect("name", what="a name").text]
            while self.accept("sym", ","):
                names.append(self.expect("name", what="a name").text)
            self.expect("kw", "in")
            body = self.unary()
            for name in reversed(names):
                body = Res(name, body)
            return body
        if self.accept("sym", "("):
            if self.accept("sym", ")"):
                # the unit can end up in channel position after it is received
                return self.prefix(UNIT)
            p = self.par()
            self.expect("sym", ")")
            return p
        if self.accept("kw", "tau"):
            return self.continuation(Tau())
        if tok.kind == "name":
            self.i += 1
            return self.prefix(tok.text)
        found = tok.text or "end of input"
        raise self.error(f"expected a process, found {found!r}")

    def prefix(self, channel: str) -> Sum:
        if self.accept("sym", "!"):
            obj = self.accept("name")
            return self.continuation(Out(channel, obj.text if obj else UNIT))
        if self.accept("sym", "?"):
            if self.accept("sym", "("):
                binder = self.expect("name", what="a binder name").text
                self.expect("sym", ")", what="')' closing the binder")
                return self.continuation(In(channel, binder))
            binder = self._dummy()
            self._depth += 1
            try:
                return self.continuation(In(channel, binder))
            finally:
                self._depth -= 1
        raise self.error("expected '!' or '?' after channel name")

    def continuation(self, guard) -> Sum:
        cont = self.unary() if self.accept("sym", ".") else NIL
        return Sum(((guard, cont),))


def parse(text: str) -> Process:
    """Parse ``text`` into a wellformed process.

    Raises :class:`ParseError` on malformed input and
    :class:`~pisym.syntax.WellformednessError` when a name is both bound and free.
    """
    p = _Parser(text).process()
    check_wellformed(p)
    return p


# ---------------------------------------------------------------- printing

_PAR, _SUM, _UNARY = 0, 1, 2


def format_name(name: str) -> str:
    if name == UNIT:
        return "()"
    if _BARE.match(name) and name not in KEYWORDS:
        return name
    return f"'{name}'"


def format_process(p: Process, explicit: bool = False) -> str:
    """Concrete syntax of ``p``; ``explicit`` prints every input binder, so parsing gives ``p`` back literally."""
    return _fmt(p, _PAR, explicit)


def _fmt(p: Process, level: int, explicit: bool = False) -> str:
    if isinstance(p, Par):
        text = f"{_fmt(p.left, _SUM, explicit)} | {_fmt(p.right, _PAR, explicit)}"
        return f"({text})" if level > _PAR else text
    if isinstance(p, Sum):
        if not p.branches:
            return "0"
        if len(p.branches) == 1:
            return _branch(*p.branches[0], explicit)
        text = " + ".join(_branch(g, c, explicit) for g, c in p.branches)
        return f"({text})" if level > _SUM else text
    if isinstance(p, Res):
        names = []
        while isinstance(p, Res):
            names.append(format_name(p.name))
            p = p.body
        return f"new {','.join(names)} in {_fmt(p, _UNARY, explicit)}"
    if isinstance(p, Rep):
        return f"rep {_fmt(p.body, _UNARY, explicit)}"
    if isinstance(p, Success):
        return "ok"
    raise TypeError(f"not a process: {p!r}")


def _branch(guard, cont: Process, explicit: bool = False) -> str:
    if isinstance(guard, Out):
        head = format_name(guard.channel) + "!"
        if guard.obj != UNIT:
            head += format_name(guard.obj)
    elif isinstance(guard, In):
        head = format_name(guard.channel) + "?"
        if explicit or guard.binder in cont.fn:
            head += f"({format_name(guard.binder)})"
    else:
        head = "tau"
    if cont == NIL:
        return head
    return f"{head}.{_fmt(cont, _UNARY, explicit)}"
