"""Parser for the task description language.

The grammar is line-agnostic (whitespace and ``#`` comments are skipped):

    script   := stmt*
    stmt     := setdecl | taskdecl | rundecl
    setdecl  := "set" NAME "=" family
    family   := "bell_basis" "(" INT ")" | "ges_basis" "(" INT ")"
              | "ghz3_basis" | "ghz4_basis"
              | "states" "[" NAME ("," NAME)* "]"
    taskdecl := "task" NAME "=" "subset" "(" NAME "," "k" "=" INT ")"
    rundecl  := "simulate" NAME "protocol" NAME
              | "certify" NAME "cut" (PARTYLIST ":" PARTYLIST | "auto" | "all")

A PARTYLIST is a bare name whose characters are single-letter party labels,
so ``cut AB:CD`` splits parties A, B from C, D. Parsing performs scope
checking (names must be declared before use, never rebound, and a task must
be built from a set), while domain-level validation, e.g. whether a state
name or protocol exists, happens at execution where the richer context
lives. Every diagnostic carries a line and column and, where useful, the
set of tokens that would have been accepted.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

from .errors import ScriptError

KEYWORDS = frozenset(
    {
        "set", "task", "simulate", "certify", "protocol", "cut", "subset", "k",
        "auto", "all", "bell_basis", "ges_basis", "ghz3_basis", "ghz4_basis",
        "states",
    }
)

_NAME_START = set(string.ascii_letters + "_")
_NAME_BODY = set(string.ascii_letters + string.digits + "_")
_SYMBOLS = set("()[],:=")


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "int", one of the symbol characters, or "end"
    value: str
    line: int
    column: int


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, column = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
        elif ch in " \t\r":
            column += 1
            i += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in string.digits:
            start, startcol = i, column
            while i < len(text) and text[i] in string.digits:
                i += 1
                column += 1
            tokens.append(Token("int", text[start:i], line, startcol))
        elif ch in _NAME_START:
            start, startcol = i, column
            while i < len(text) and text[i] in _NAME_BODY:
                i += 1
                column += 1
            tokens.append(Token("name", text[start:i], line, startcol))
        elif ch in _SYMBOLS:
            tokens.append(Token(ch, ch, line, column))
            column += 1
            i += 1
        else:
            raise ScriptError(f"unexpected character {ch!r}", line, column)
    tokens.append(Token("end", "", line, column))
    return tokens


# --- abstract syntax ---


@dataclass(frozen=True)
class BasisFamily:
    kind: str  # bell_basis | ges_basis | ghz3_basis | ghz4_basis
    dim: int | None = None


@dataclass(frozen=True)
class StatesFamily:
    names: tuple[str, ...]


@dataclass(frozen=True)
class CutSpec:
    left: str
    right: str


@dataclass(frozen=True)
class SetDecl:
    name: str
    family: BasisFamily | StatesFamily
    line: int = field(compare=False, default=0)
    column: int = field(compare=False, default=0)


@dataclass(frozen=True)
class TaskDecl:
    name: str
    set_name: str
    k: int
    line: int = field(compare=False, default=0)
    column: int = field(compare=False, default=0)


@dataclass(frozen=True)
class SimulateDecl:
    task_name: str
    protocol: str
    line: int = field(compare=False, default=0)
    column: int = field(compare=False, default=0)


@dataclass(frozen=True)
class CertifyDecl:
    task_name: str
    cut: CutSpec | str  # CutSpec, "auto", or "all"
    line: int = field(compare=False, default=0)
    column: int = field(compare=False, default=0)


Statement = SetDecl | TaskDecl | SimulateDecl | CertifyDecl


@dataclass(frozen=True)
class Script:
    statements: tuple[Statement, ...]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.scope: dict[str, str] = {}  # name -> "set" | "task"

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, token: Token, expected: tuple[str, ...] = ()):
        raise ScriptError(message, token.line, token.column, expected)

    def expect(self, kind: str, expected: tuple[str, ...]) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            shown = tok.value if tok.kind != "end" else "end of input"
            self.fail(f"unexpected {shown!r}", tok, expected)
        return self.take()

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "name" or tok.value != word:
            shown = tok.value if tok.kind != "end" else "end of input"
            self.fail(f"unexpected {shown!r}", tok, (word,))
        return self.take()

    def fresh_name(self) -> Token:
        tok = self.expect("name", ("a new name",))
        if tok.value in KEYWORDS:
            self.fail(f"{tok.value!r} is a keyword and cannot be used as a name", tok)
        if tok.value in self.scope:
            self.fail(f"name {tok.value!r} is already bound", tok)
        return tok

    def bound_name(self, want_kind: str) -> Token:
        tok = self.expect("name", (f"a {want_kind} name",))
        if tok.value not in self.scope:
            self.fail(f"unknown name {tok.value!r}", tok)
        if self.scope[tok.value] != want_kind:
            self.fail(
                f"{tok.value!r} names a {self.scope[tok.value]}, expected a {want_kind}",
                tok,
            )
        return tok

    def int_value(self) -> int:
        return int(self.expect("int", ("an integer",)).value)

    # --- productions ---

    def script(self) -> Script:
        stmts: list[Statement] = []
        while True:
            tok = self.peek()
            if tok.kind == "end":
                return Script(tuple(stmts))
            if tok.kind != "name" or tok.value not in ("set", "task", "simulate", "certify"):
                shown = tok.value if tok.kind != "end" else "end of input"
                self.fail(
                    f"unexpected {shown!r}", tok, ("set", "task", "simulate", "certify")
                )
            stmts.append(getattr(self, tok.value)())

    def set(self) -> SetDecl:
        kw = self.take()
        name = self.fresh_name()
        self.expect("=", ("=",))
        family = self.family()
        self.scope[name.value] = "set"
        return SetDecl(name.value, family, kw.line, kw.column)

    def family(self) -> BasisFamily | StatesFamily:
        tok = self.peek()
        kinds = ("bell_basis", "ges_basis", "ghz3_basis", "ghz4_basis", "states")
        if tok.kind != "name" or tok.value not in kinds:
            shown = tok.value if tok.kind != "end" else "end of input"
            self.fail(f"unexpected {shown!r}", tok, kinds)
        self.take()
        if tok.value in ("bell_basis", "ges_basis"):
            self.expect("(", ("(",))
            dim = self.int_value()
            self.expect(")", (")",))
            return BasisFamily(tok.value, dim)
        if tok.value in ("ghz3_basis", "ghz4_basis"):
            return BasisFamily(tok.value)
        self.expect("[", ("[",))
        names = [self.expect("name", ("a state name",)).value]
        while self.peek().kind == ",":
            self.take()
            names.append(self.expect("name", ("a state name",)).value)
        self.expect("]", ("]", ","))
        return StatesFamily(tuple(names))

    def task(self) -> TaskDecl:
        kw = self.take()
        name = self.fresh_name()
        self.expect("=", ("=",))
        self.expect_word("subset")
        self.expect("(", ("(",))
        set_name = self.bound_name("set")
        self.expect(",", (",",))
        self.expect_word("k")
        self.expect("=", ("=",))
        k = self.int_value()
        self.expect(")", (")",))
        self.scope[name.value] = "task"
        return TaskDecl(name.value, set_name.value, k, kw.line, kw.column)

    def simulate(self) -> SimulateDecl:
        kw = self.take()
        task = self.bound_name("task")
        self.expect_word("protocol")
        proto = self.expect("name", ("a protocol name",))
        return SimulateDecl(task.value, proto.value, kw.line, kw.column)

    def certify(self) -> CertifyDecl:
        kw = self.take()
        task = self.bound_name("task")
        self.expect_word("cut")
        tok = self.expect("name", ("a party list", "auto", "all"))
        if tok.value in ("auto", "all"):
            return CertifyDecl(task.value, tok.value, kw.line, kw.column)
        self.expect(":", (":",))
        right = self.expect("name", ("a party list",))
        return CertifyDecl(task.value, CutSpec(tok.value, right.value), kw.line, kw.column)


def parse(text: str) -> Script:
    """Parse and scope-check a script; raise ScriptError with location otherwise."""
    return _Parser(_lex(text)).script()


def serialize(script: Script) -> str:
    """Canonical text form, one statement per line; parse(serialize(s)) == s."""
    lines = []
    for stmt in script.statements:
        if isinstance(stmt, SetDecl):
            fam = stmt.family
            if isinstance(fam, StatesFamily):
                family = "states[" + ",".join(fam.names) + "]"
            elif fam.dim is not None:
                family = f"{fam.kind}({fam.dim})"
            else:
                family = fam.kind
            lines.append(f"set {stmt.name} = {family}")
        elif isinstance(stmt, TaskDecl):
            lines.append(f"task {stmt.name} = subset({stmt.set_name}, k={stmt.k})")
        elif isinstance(stmt, SimulateDecl):
            lines.append(f"simulate {stmt.task_name} protocol {stmt.protocol}")
        elif isinstance(stmt, CertifyDecl):
            cut = stmt.cut if isinstance(stmt.cut, str) else f"{stmt.cut.left}:{stmt.cut.right}"
            lines.append(f"certify {stmt.task_name} cut {cut}")
        else:
            raise TypeError(f"unknown statement type {type(stmt).__name__}")
    return "\n".join(lines) + ("\n" if lines else "")
