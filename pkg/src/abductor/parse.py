"""Parsers for the rule-file and task-file formats.

The rule grammar is a strict subset of ASP:

    program  := (rule)* ;
    rule     := atom ":-" literal ("," literal)* "." ;
    literal  := ["not"] atom ;
    atom     := ident | ident "(" term ("," term)* ")" ;
    term     := ident | VARIABLE ;

with ``%`` line comments.  A comment of the form ``% #id: k`` overrides the
id of the rule it trails (same line) or of the next rule otherwise.

The task file is JSON; see ``parse_task``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .model import (
    EXT_VAR,
    RESERVED_PREDICATES,
    Atom,
    BlockPattern,
    Constant,
    Literal,
    ModelConstraint,
    Placeholder,
    Query,
    Rule,
    RuleSet,
    SkolemTerm,
    TaskSpec,
    Term,
    Variable,
    validate_ruleset,
    validate_task,
)

_IDENT_RE = re.compile(r"[a-z][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"\d+")
_ID_COMMENT_RE = re.compile(r"^%\s*#id:\s*(\d+)\s*$")
_SKOLEM_NAME_RE = re.compile(r"^skolemFn_r(\d+)_(\w+)$")
_PLACEHOLDER_NAME_RE = re.compile(r"^v(\d+)$")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def render(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def render(self) -> str:
        return f"{self.span.render()}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised internally to abort on the first unrecoverable syntax error."""

    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


@dataclass
class _Token:
    kind: str  # ident, var, int, punct, comment, eof
    text: str
    line: int
    column: int


def _tokenize(text: str, file: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            j = text.find("\n", i)
            j = n if j < 0 else j
            tokens.append(_Token("comment", text[i:j], line, col))
            col += j - i
            i = j
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _VAR_RE.match(text, i)
        if m:
            tokens.append(_Token("var", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _INT_RE.match(text, i)
        if m:
            tokens.append(_Token("int", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        if text.startswith(":-", i):
            tokens.append(_Token("punct", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in "(),.":
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(
            ParseDiagnostic("error", f"unexpected character {ch!r}", SourceSpan(file, line, col))
        )
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _RuleParser:
    def __init__(self, tokens: list[_Token], file: str):
        self.tokens = [t for t in tokens if t.kind != "comment"]
        self.comments = [t for t in tokens if t.kind == "comment"]
        self.file = file
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def span(self, tok: _Token) -> SourceSpan:
        return SourceSpan(self.file, tok.line, tok.column)

    def fail(self, tok: _Token, message: str) -> ParseError:
        return ParseError(ParseDiagnostic("error", message, self.span(tok)))

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.kind == "eof" or tok.text != text:
            raise self.fail(tok, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.kind == "var":
            if tok.text.startswith("_"):
                raise self.fail(tok, "wildcard variables are only allowed in block patterns")
            if tok.text.startswith("V_"):
                raise self.fail(tok, f"variable {tok.text} collides with the generated V_ namespace")
            return Variable(tok.text)
        if tok.kind == "int":
            raise self.fail(tok, "integer terms are not part of the rule language")
        if tok.kind == "ident":
            if self.peek().text == "(":
                raise self.fail(tok, f"function symbol {tok.text!r} is not part of the rule language")
            if _SKOLEM_NAME_RE.match(tok.text):
                raise self.fail(tok, f"{tok.text} belongs to the generated skolem namespace")
            if tok.text == "extVar":
                raise self.fail(tok, "extVar is reserved for the semi-res encoding")
            m = _PLACEHOLDER_NAME_RE.match(tok.text)
            if m:
                return Placeholder(int(m.group(1)))
            return Constant(tok.text)
        raise self.fail(tok, f"expected a term, found {tok.text or 'end of input'!r}")

    def parse_atom(self) -> Atom:
        tok = self.next()
        if tok.kind == "var":
            raise self.fail(tok, f"predicate names must start lowercase, found {tok.text!r}")
        if tok.kind != "ident":
            raise self.fail(tok, f"expected an atom, found {tok.text or 'end of input'!r}")
        name_tok = tok
        args: list[Term] = []
        if self.peek().text == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek().text == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        if name_tok.text in RESERVED_PREDICATES:
            raise self.fail(name_tok, f"predicate {name_tok.text!r} is reserved by the encoding")
        return Atom(name_tok.text, tuple(args))

    def parse_literal(self) -> Literal:
        if self.peek().kind == "ident" and self.peek().text == "not":
            self.next()
            return Literal(self.parse_atom(), negated=True)
        return Literal(self.parse_atom())

    def parse_rule_body(self) -> tuple[Literal, ...]:
        body = [self.parse_literal()]
        while self.peek().text == ",":
            self.next()
            body.append(self.parse_literal())
        return tuple(body)

    def parse_program(self) -> RuleSet:
        parsed: list[tuple[Atom, tuple[Literal, ...], _Token, _Token]] = []
        while self.peek().kind != "eof":
            head_tok = self.peek()
            head = self.parse_atom()
            if self.peek().text == ".":
                raise self.fail(
                    self.peek(), "a rule needs a nonempty body; facts belong in the task file"
                )
            self.expect(":-")
            body = self.parse_rule_body()
            period_tok = self.expect(".")
            parsed.append((head, body, head_tok, period_tok))

        # An id comment names the rule it trails on the same line, otherwise
        # the next rule below it.
        overrides: dict[int, int] = {}
        for c in self.comments:
            m = _ID_COMMENT_RE.match(c.text)
            if not m:
                continue
            target = None
            for i, (_, _, head_tok, period_tok) in enumerate(parsed):
                if c.line == period_tok.line and c.column > period_tok.column:
                    target = i  # trailing; a later rule on the same line wins
                    continue
                if (c.line, c.column) < (head_tok.line, head_tok.column):
                    if target is None:
                        target = i
                    break
            if target is not None:
                overrides[target] = int(m.group(1))
        rules = [
            Rule(id=overrides.get(i, i + 1), head=head, body=body)
            for i, (head, body, _, _) in enumerate(parsed)
        ]
        return RuleSet(tuple(rules))


@dataclass
class ParseResult:
    """Outcome of a parse; ``value`` is None only on unrecoverable failure."""

    value: object | None
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    @property
    def ok(self) -> bool:
        return self.value is not None and not self.errors


def parse_rules(text: str, file: str = "<rules>") -> ParseResult:
    """Parse a rule file; assumption violations surface as error diagnostics."""
    try:
        tokens = _tokenize(text, file)
        ruleset = _RuleParser(tokens, file).parse_program()
    except ParseError as exc:
        return ParseResult(None, [exc.diagnostic])
    diagnostics = [
        ParseDiagnostic("error", v.render(), SourceSpan(file, 1, 1)) for v in validate_ruleset(ruleset)
    ]
    return ParseResult(ruleset, diagnostics)


# ---------------------------------------------------------------------------
# Stand-alone atom grammars (task fields and solver output)

_WILDCARD_NAMES = ("X", "Y", "Z", "W", "V", "U", "T", "S")


class _AtomTextParser:
    """Parses one atom from task text; data mode admits the generated terms."""

    def __init__(
        self, text: str, file: str, allow_wildcards: bool = False, allow_reserved: bool = False
    ):
        self.text = text.strip()
        self.file = file
        self.pos = 0
        self.allow_wildcards = allow_wildcards
        self.allow_reserved = allow_reserved
        self.wildcards_used: list[str] = []
        self.named_vars: set[str] = set()

    def error(self, message: str) -> ParseError:
        return ParseError(ParseDiagnostic("error", message, SourceSpan(self.file, 1, self.pos + 1)))

    def eat_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def match(self, pattern: re.Pattern) -> str | None:
        self.eat_ws()
        m = pattern.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return m.group()
        return None

    def expect_char(self, ch: str) -> None:
        self.eat_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise self.error(f"expected {ch!r} in atom {self.text!r}")
        self.pos += 1

    def fresh_wildcard(self) -> Variable:
        taken = self.named_vars | set(self.wildcards_used)
        for base in _WILDCARD_NAMES:
            if base not in taken:
                self.wildcards_used.append(base)
                return Variable(base)
        i = 1
        while f"X{i}" in taken:
            i += 1
        self.wildcards_used.append(f"X{i}")
        return Variable(f"X{i}")

    def collect_named_vars(self) -> None:
        for m in _VAR_RE.finditer(self.text):
            if not m.group().startswith("_"):
                self.named_vars.add(m.group())

    def parse_term(self) -> Term:
        self.eat_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "_":
            tail = _VAR_RE.match(self.text, self.pos)
            self.pos = tail.end() if tail else self.pos + 1
            if not self.allow_wildcards:
                raise self.error("wildcard variables are only allowed in block patterns")
            return self.fresh_wildcard()
        word = self.match(_VAR_RE)
        if word:
            if word.startswith("V_"):
                raise self.error(f"variable {word} collides with the generated V_ namespace")
            return Variable(word)
        word = self.match(_INT_RE)
        if word:
            from .model import IntTerm

            return IntTerm(int(word))
        word = self.match(_IDENT_RE)
        if word is None:
            raise self.error(f"expected a term in atom {self.text!r}")
        args: tuple[Term, ...] = ()
        self.eat_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            self.pos += 1
            collected = [self.parse_term()]
            self.eat_ws()
            while self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1
                collected.append(self.parse_term())
                self.eat_ws()
            self.expect_char(")")
            args = tuple(collected)
        return make_data_term(word, args)

    def parse_atom(self) -> Atom:
        self.collect_named_vars()
        word = self.match(_IDENT_RE)
        if word is None:
            raise self.error(f"expected a predicate name in {self.text!r}")
        if word in RESERVED_PREDICATES and not self.allow_reserved:
            raise self.error(f"predicate {word!r} is reserved by the encoding")
        args: list[Term] = []
        self.eat_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            self.pos += 1
            args.append(self.parse_term())
            self.eat_ws()
            while self.pos < len(self.text) and self.text[self.pos] == ",":
                self.pos += 1
                args.append(self.parse_term())
                self.eat_ws()
            self.expect_char(")")
        self.eat_ws()
        if self.pos != len(self.text):
            raise self.error(f"trailing input after atom: {self.text[self.pos:]!r}")
        return Atom(word, tuple(args))


def make_data_term(name: str, args: tuple[Term, ...]) -> Term:
    """Classify an identifier from a data context into the term family."""
    m = _SKOLEM_NAME_RE.match(name)
    if m:
        return SkolemTerm(int(m.group(1)), m.group(2), args)
    if args:
        from .model import FuncTerm

        return FuncTerm(name, args)
    if name == "extVar":
        return EXT_VAR
    m = _PLACEHOLDER_NAME_RE.match(name)
    if m:
        return Placeholder(int(m.group(1)))
    return Constant(name)


def parse_atom_text(
    text: str, file: str = "<atom>", allow_wildcards: bool = False, allow_reserved: bool = False
) -> Atom:
    """Parse one atom in data syntax; raises ParseError on bad input."""
    return _AtomTextParser(
        text, file, allow_wildcards=allow_wildcards, allow_reserved=allow_reserved
    ).parse_atom()


def parse_query_text(text: str, file: str = "<query>") -> Query:
    stripped = text.strip()
    if stripped.startswith("not "):
        atom = parse_atom_text(stripped[4:], file)
        return Query(atom, negated=True)
    return Query(parse_atom_text(stripped, file))


def parse_constraint_text(text: str, file: str = "<constraint>") -> ModelConstraint:
    stripped = text.strip()
    if not stripped.startswith(":-"):
        raise ParseError(
            ParseDiagnostic("error", f"constraint must start with ':-': {text!r}", SourceSpan(file, 1, 1))
        )
    body_text = stripped[2:].rstrip()
    if body_text.endswith("."):
        body_text = body_text[:-1]
    literals: list[Literal] = []
    for part in _split_literals(body_text):
        part = part.strip()
        if part.startswith("not "):
            literals.append(Literal(parse_atom_text(part[4:], file), negated=True))
        else:
            literals.append(Literal(parse_atom_text(part, file)))
    if not literals:
        raise ParseError(
            ParseDiagnostic("error", "constraint body must be nonempty", SourceSpan(file, 1, 1))
        )
    return ModelConstraint(tuple(literals))


def _split_literals(text: str) -> list[str]:
    """Split on commas at parenthesis depth zero."""
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    tail = text[start:].strip()
    if tail:
        parts.append(text[start:])
    return parts


# ---------------------------------------------------------------------------
# Task file

_TASK_KEYS = {"query", "facts", "block", "deny_model", "depth", "variant", "graph_depth"}


def parse_task(text: str, rules: RuleSet, file: str = "<task>") -> ParseResult:
    """Parse the JSON task file against an already parsed rule set."""
    diagnostics: list[ParseDiagnostic] = []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        return ParseResult(
            None,
            [ParseDiagnostic("error", f"invalid JSON: {exc.msg}", SourceSpan(file, exc.lineno, exc.colno))],
        )
    if not isinstance(raw, dict):
        return ParseResult(None, [ParseDiagnostic("error", "task file must be a JSON object", SourceSpan(file, 1, 1))])

    top = SourceSpan(file, 1, 1)
    for key in raw:
        if key not in _TASK_KEYS:
            diagnostics.append(ParseDiagnostic("error", f"unknown field {key!r}", top))

    def bail() -> ParseResult:
        return ParseResult(None, diagnostics)

    if "query" not in raw:
        diagnostics.append(ParseDiagnostic("error", "missing required field 'query'", top))
    if "depth" not in raw:
        diagnostics.append(ParseDiagnostic("error", "missing required field 'depth'", top))
    if diagnostics:
        return bail()

    try:
        query = parse_query_text(str(raw["query"]), file)
    except ParseError as exc:
        diagnostics.append(exc.diagnostic)
        return bail()

    depth = raw["depth"]
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
        diagnostics.append(ParseDiagnostic("error", "'depth' must be a non-negative integer", top))
        return bail()

    facts: list[Atom] = []
    for entry in raw.get("facts", []):
        try:
            atom = parse_atom_text(str(entry), file)
        except ParseError as exc:
            diagnostics.append(exc.diagnostic)
            continue
        if not atom.is_ground():
            diagnostics.append(ParseDiagnostic("error", f"fact {entry!r} is not ground", top))
            continue
        if atom in facts:
            diagnostics.append(ParseDiagnostic("warning", f"duplicate fact {entry!r} ignored", top))
            continue
        facts.append(atom)

    blocklist: list[BlockPattern] = []
    for entry in raw.get("block", []):
        try:
            blocklist.append(BlockPattern(parse_atom_text(str(entry), file, allow_wildcards=True)))
        except ParseError as exc:
            diagnostics.append(exc.diagnostic)

    constraints: list[ModelConstraint] = []
    for entry in raw.get("deny_model", []):
        try:
            constraints.append(parse_constraint_text(str(entry), file))
        except ParseError as exc:
            diagnostics.append(exc.diagnostic)

    variant = raw.get("variant", "res")
    if variant not in ("res", "exp", "semi-res"):
        diagnostics.append(ParseDiagnostic("error", f"unknown variant {variant!r}", top))

    graph_depth = raw.get("graph_depth", depth + 1)
    if not isinstance(graph_depth, int) or isinstance(graph_depth, bool) or graph_depth < 1:
        diagnostics.append(ParseDiagnostic("error", "'graph_depth' must be a positive integer", top))

    if any(d.severity == "error" for d in diagnostics):
        return bail()

    task = TaskSpec(
        rules=rules,
        query=query,
        user_facts=tuple(facts),
        blocklist=tuple(blocklist),
        constraints=tuple(constraints),
        depth=depth,
        variant=variant,
        graph_depth=graph_depth,
    )
    diagnostics.extend(
        ParseDiagnostic("error", v.render(), top) for v in validate_task(task)
    )
    if any(d.severity == "error" for d in diagnostics):
        return ParseResult(None, diagnostics)
    return ParseResult(task, diagnostics)
