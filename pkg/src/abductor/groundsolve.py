"""Self-contained ground-and-solve engine with a Clingo-compatible CLI.

Supports the program fragment the encoder emits: normal rules with negation
as failure, integrity constraints, choice rules, integer guards with ``+``/
``-`` arithmetic, and count-style weak constraints.  Input arrives on stdin
(or from file arguments), answer sets leave on stdout in the conventional
textual form (``Answer: k`` / atom line / ``Optimization: c`` /
``OPTIMUM FOUND``), and the exit code is 30 for an exhausted satisfiable
search, 20 for unsatisfiable, 65 for errors.

Intended for desk-scale programs; a real clingo binary can be substituted
anywhere this engine is used since both sides of the protocol match.
"""

from __future__ import annotations

import itertools
import re
import sys
from dataclasses import dataclass

VERSION = "0.1.0"
MAX_GROUND_ATOMS = 500_000
MAX_SUBSET_CHECKS = 2_000_000


class ProgramError(Exception):
    pass


# ---------------------------------------------------------------------------
# Terms: ground terms are int | str | tuple(name, args); patterns add
# ("$", varname) and ("#", op, left, right) arithmetic nodes.


def render_term(t) -> str:
    if isinstance(t, tuple) and t and t[0] == "@":
        name, args = t[1], t[2]
        if not args:
            return name
        return f"{name}({','.join(render_term(a) for a in args)})"
    return str(t)


def render_atom(atom) -> str:
    pred, args = atom
    if not args:
        return pred
    return f"{pred}({','.join(render_term(a) for a in args)})"


def _is_ground(t) -> bool:
    if isinstance(t, tuple):
        if t[0] == "@":
            return all(_is_ground(a) for a in t[2])
        return False
    return True


def _subst(t, binding):
    if isinstance(t, (int, str)):
        return t
    tag = t[0]
    if tag == "$":
        return binding.get(t[1], t)
    if tag == "@":
        return ("@", t[1], tuple(_subst(a, binding) for a in t[2]))
    if tag == "#":
        left = _subst(t[2], binding)
        right = _subst(t[3], binding)
        if isinstance(left, int) and isinstance(right, int):
            return left + right if t[1] == "+" else left - right
        return ("#", t[1], left, right)
    raise ProgramError(f"cannot substitute into {t!r}")


def _match(pattern, value, binding) -> bool:
    if isinstance(pattern, tuple):
        tag = pattern[0]
        if tag == "$":
            bound = binding.get(pattern[1])
            if bound is None:
                binding[pattern[1]] = value
                return True
            return bound == value
        if tag == "@":
            return (
                isinstance(value, tuple)
                and value[0] == "@"
                and value[1] == pattern[1]
                and len(value[2]) == len(pattern[2])
                and all(_match(p, v, binding) for p, v in zip(pattern[2], value[2]))
            )
        if tag == "#":
            evaluated = _subst(pattern, binding)
            return isinstance(evaluated, int) and evaluated == value
    return pattern == value


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<arrow>:-)
  | (?P<weak>:~)
  | (?P<cmp><=|>=|!=|=|<|>)
  | (?P<int>\d+)
  | (?P<name>[a-zA-Z_][A-Za-z0-9_]*)
  | (?P<punct>[(){}\[\],.@+\-])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ProgramError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        tokens.append((kind, m.group()))
    tokens.append(("eof", ""))
    return tokens


@dataclass
class ParsedRule:
    head: tuple | None  # (pred, args) or None for constraints
    choice: bool
    pos: list
    naf: list
    cmps: list  # (op, left, right)


@dataclass
class WeakConstraint:
    pred: str
    arity: int


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        kind, value = self.next()
        if value != text:
            raise ProgramError(f"expected {text!r}, found {value!r}")

    def parse_term(self):
        term = self.parse_primary()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            right = self.parse_primary()
            if isinstance(term, int) and isinstance(right, int):
                term = term + right if op == "+" else term - right
            else:
                term = ("#", op, term, right)
        return term

    def parse_primary(self):
        kind, value = self.next()
        if kind == "int":
            return int(value)
        if kind != "name":
            raise ProgramError(f"expected a term, found {value!r}")
        if value[0].isupper() or value[0] == "_":
            return ("$", value)
        if self.peek()[1] == "(":
            self.next()
            args = [self.parse_term()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
            return ("@", value, tuple(args))
        return value

    def parse_atom(self):
        kind, value = self.next()
        if kind != "name" or value[0].isupper():
            raise ProgramError(f"expected a predicate, found {value!r}")
        args = ()
        if self.peek()[1] == "(":
            self.next()
            collected = [self.parse_term()]
            while self.peek()[1] == ",":
                self.next()
                collected.append(self.parse_term())
            self.expect(")")
            args = tuple(collected)
        return (value, args)

    def parse_body(self, rule: ParsedRule):
        while True:
            if self.peek()[1] == "not":
                self.next()
                rule.naf.append(self.parse_atom())
            else:
                start = self.pos
                term = self.parse_term()
                if self.peek()[0] == "cmp":
                    op = self.next()[1]
                    rule.cmps.append((op, term, self.parse_term()))
                else:
                    self.pos = start
                    rule.pos.append(self.parse_atom())
            if self.peek()[1] == ",":
                self.next()
                continue
            break

    def parse_program(self):
        rules: list[ParsedRule] = []
        weak: list[WeakConstraint] = []
        while self.peek()[0] != "eof":
            kind, value = self.peek()
            if value == ":~":
                self.next()
                atom = self.parse_atom()
                self.expect(".")
                self.expect("[")
                depth = 1
                while depth:
                    tok = self.next()
                    if tok[0] == "eof":
                        raise ProgramError("unterminated weak constraint annotation")
                    if tok[1] == "[":
                        depth += 1
                    elif tok[1] == "]":
                        depth -= 1
                weak.append(WeakConstraint(atom[0], len(atom[1])))
                continue
            rule = ParsedRule(head=None, choice=False, pos=[], naf=[], cmps=[])
            if value == ":-":
                self.next()
                self.parse_body(rule)
                self.expect(".")
            elif value == "{":
                self.next()
                rule.head = self.parse_atom()
                rule.choice = True
                self.expect("}")
                if self.peek()[1] == ":-":
                    self.next()
                    self.parse_body(rule)
                self.expect(".")
            else:
                rule.head = self.parse_atom()
                if self.peek()[1] == ":-":
                    self.next()
                    self.parse_body(rule)
                self.expect(".")
            rules.append(rule)
        return rules, weak


# ---------------------------------------------------------------------------
# Grounding


def _eval_cmp(op, left, right) -> bool:
    if not isinstance(left, int) or not isinstance(right, int):
        raise ProgramError(f"comparison over non-integers: {left!r} {op} {right!r}")
    return {
        "<": left < right,
        ">": left > right,
        "<=": left <= right,
        ">=": left >= right,
        "=": left == right,
        "!=": left != right,
    }[op]


class GroundProgram:
    def __init__(self):
        self.atoms: set = set()
        self.by_pred: dict = {}
        self.facts: list = []
        self.normal: list = []  # (head, pos, naf)
        self.choice: list = []  # (head, pos, naf)
        self.constraints: list = []  # (pos, naf)
        self.seen_rules: set = set()


def ground(rules: list[ParsedRule]) -> GroundProgram:
    gp = GroundProgram()

    def add_atom(atom) -> bool:
        if atom in gp.atoms:
            return False
        if len(gp.atoms) >= MAX_GROUND_ATOMS:
            raise ProgramError("ground atom budget exceeded")
        gp.atoms.add(atom)
        gp.by_pred.setdefault(atom[0], []).append(atom)
        return True

    def finish(rule: ParsedRule, binding) -> bool:
        """Instantiate guards, naf and head; returns True if a new atom appeared."""
        for op, l, r in rule.cmps:
            if not _eval_cmp(op, _subst(l, binding), _subst(r, binding)):
                return False
        naf_ground = []
        for atom in rule.naf:
            pred, args = atom
            g = (pred, tuple(_subst(a, binding) for a in args))
            if not all(_is_ground(a) for a in g[1]):
                raise ProgramError(f"unsafe negative literal {render_atom(g)}")
            naf_ground.append(g)
        pos_ground = tuple(
            (p, tuple(_subst(a, binding) for a in args)) for p, args in rule.pos
        )
        head_ground = None
        if rule.head is not None:
            pred, args = rule.head
            head_ground = (pred, tuple(_subst(a, binding) for a in args))
            if not all(_is_ground(a) for a in head_ground[1]):
                raise ProgramError(f"unsafe head {render_atom(head_ground)}")
        key = (head_ground, rule.choice, pos_ground, tuple(naf_ground))
        if key in gp.seen_rules:
            return False
        gp.seen_rules.add(key)
        changed = False
        if rule.head is None:
            gp.constraints.append((pos_ground, tuple(naf_ground)))
        elif rule.choice:
            gp.choice.append((head_ground, pos_ground, tuple(naf_ground)))
            changed = add_atom(head_ground) or changed
        elif not pos_ground and not naf_ground:
            gp.facts.append(head_ground)
            changed = add_atom(head_ground) or changed
        else:
            gp.normal.append((head_ground, pos_ground, tuple(naf_ground)))
            changed = add_atom(head_ground) or changed
        return changed

    def instantiate(rule: ParsedRule, delta: set | None) -> bool:
        """Backtracking join over positive body literals."""
        changed = False
        lits = rule.pos

        def rec(i: int, binding, used_delta: bool) -> None:
            nonlocal changed
            if i == len(lits):
                if delta is None or used_delta:
                    if finish(rule, dict(binding)):
                        changed = True
                return
            pred, args = lits[i]
            for candidate in gp.by_pred.get(pred, ()):
                if len(candidate[1]) != len(args):
                    continue
                trial = dict(binding)
                if all(_match(p, v, trial) for p, v in zip(args, candidate[1])):
                    rec(i + 1, trial, used_delta or (delta is not None and candidate in delta))

        if not lits:
            if delta is None:
                if finish(rule, {}):
                    changed = True
            return changed
        rec(0, {}, False)
        return changed

    for rule in rules:
        instantiate(rule, None)
    while True:
        before_atoms = len(gp.atoms)
        before_rules = len(gp.seen_rules)
        for rule in rules:
            if rule.pos:
                instantiate(rule, None)
        if len(gp.atoms) == before_atoms and len(gp.seen_rules) == before_rules:
            break
    return gp


# ---------------------------------------------------------------------------
# Solving


class Solver:
    def __init__(self, gp: GroundProgram):
        self.gp = gp
        self.atom_ids: dict = {}
        self.names: list = []
        for atom in sorted(gp.atoms, key=render_atom):
            self.atom_ids[atom] = len(self.names)
            self.names.append(atom)

        def aid(atom) -> int:
            if atom not in self.atom_ids:
                self.atom_ids[atom] = len(self.names)
                self.names.append(atom)
            return self.atom_ids[atom]

        self.fact_ids = [aid(a) for a in gp.facts]
        # Rule arrays shared by every closure run.  Choice instances sit after
        # the normal ones; they fire only when their head is in the candidate
        # assumption set.
        self.rule_head: list[int] = []
        self.rule_pos: list[tuple[int, ...]] = []
        self.rule_naf: list[tuple[int, ...]] = []
        self.rule_choice_head: list[int | None] = []
        for head, pos, naf in gp.normal:
            self.rule_head.append(aid(head))
            self.rule_pos.append(tuple(aid(a) for a in pos))
            self.rule_naf.append(tuple(aid(a) for a in naf))
            self.rule_choice_head.append(None)
        for head, pos, naf in gp.choice:
            hid = aid(head)
            self.rule_head.append(hid)
            self.rule_pos.append(tuple(aid(a) for a in pos))
            self.rule_naf.append(tuple(aid(a) for a in naf))
            self.rule_choice_head.append(hid)
        self.watchers: dict[int, list[int]] = {}
        for rid, pos in enumerate(self.rule_pos):
            for a in pos:
                self.watchers.setdefault(a, []).append(rid)
        self.constraints = [
            (tuple(aid(a) for a in pos), tuple(aid(a) for a in naf))
            for pos, naf in gp.constraints
        ]
        self.naf_atom_ids = sorted(
            {a for naf in self.rule_naf for a in naf} | {a for _, naf in self.constraints for a in naf}
        )
        self.choice_ids = sorted({h for h in self.rule_choice_head if h is not None})

    def closure(self, chosen: set[int], sigma_true: set[int], drop_naf_rules: bool) -> set[int]:
        """Least model of the reduct; ``drop_naf_rules`` ignores naf instead."""
        counts = [len(p) for p in self.rule_pos]
        enabled = []
        for rid in range(len(self.rule_head)):
            ch = self.rule_choice_head[rid]
            if ch is not None and ch not in chosen:
                enabled.append(False)
                continue
            naf = self.rule_naf[rid]
            if naf and not drop_naf_rules and any(a in sigma_true for a in naf):
                enabled.append(False)
                continue
            enabled.append(True)
        derived: set[int] = set()
        stack = list(self.fact_ids)
        for rid, c in enumerate(counts):
            if c == 0 and enabled[rid]:
                stack.append(self.rule_head[rid])
        while stack:
            a = stack.pop()
            if a in derived:
                continue
            derived.add(a)
            for rid in self.watchers.get(a, ()):
                counts[rid] -= 1
                if counts[rid] == 0 and enabled[rid]:
                    head = self.rule_head[rid]
                    if head not in derived:
                        stack.append(head)
        return derived

    def stable_models(self, chosen: set[int]):
        """All stable models of the program restricted to the chosen atoms."""
        upper = self.closure(chosen, set(), drop_naf_rules=True)
        lower = self.closure(chosen, set(self.naf_atom_ids), drop_naf_rules=False)
        forced_true = [a for a in self.naf_atom_ids if a in lower]
        band = [a for a in self.naf_atom_ids if a in upper and a not in lower]
        models = []
        for picks in itertools.product((False, True), repeat=len(band)):
            sigma_true = set(forced_true)
            sigma_true.update(a for a, keep in zip(band, picks) if keep)
            model = self.closure(chosen, sigma_true, drop_naf_rules=False)
            if any((a in model) != (a in sigma_true) for a in self.naf_atom_ids):
                continue
            violated = any(
                all(p in model for p in pos) and not any(n in model for n in naf)
                for pos, naf in self.constraints
            )
            if violated:
                continue
            models.append(frozenset(model))
        return models


def solve_program(text: str):
    """Returns (status, list of (atom_id_set, cost), solver) for rendering."""
    rules, weak = _Parser(text).parse_program()
    gp = ground(rules)
    solver = Solver(gp)

    # Choice atoms ruled out by a single-positive ground constraint can never
    # appear in any model, so they leave the search space up front.
    forbidden = {
        pos[0]
        for pos, naf in solver.constraints
        if len(pos) == 1 and not naf and pos[0] in set(solver.choice_ids)
    }
    candidates = [c for c in solver.choice_ids if c not in forbidden]
    wc = weak[0] if weak else None

    def cost_of(model: frozenset) -> int | None:
        if wc is None:
            return None
        return sum(
            1 for a in model if solver.names[a][0] == wc.pred and len(solver.names[a][1]) == wc.arity
        )

    def abduced_of(model: frozenset) -> set[int]:
        return {a for a in model if a in choice_set}

    choice_set = set(solver.choice_ids)

    # Fast unsatisfiability test for the fully positive fragment: with no
    # negation anywhere except "not goal"-style constraints, derivability is
    # monotone in the chosen set, so the full candidate set decides existence.
    rule_naf_free = all(not naf for naf in solver.rule_naf)
    only_naf_constraints = all(not pos for pos, naf in solver.constraints if naf)
    pos_constraint_free = all(
        naf or (len(pos) == 1 and pos[0] in forbidden) for pos, naf in solver.constraints
    )
    if rule_naf_free and only_naf_constraints and pos_constraint_free:
        if not solver.stable_models(set(candidates)):
            return "UNSATISFIABLE", [], solver

    budget = MAX_SUBSET_CHECKS
    results: list[tuple[frozenset, int | None]] = []
    if wc is None:
        seen = set()
        for k in range(len(candidates) + 1):
            for combo in itertools.combinations(candidates, k):
                budget -= 1
                if budget <= 0:
                    raise ProgramError("search budget exceeded")
                chosen = set(combo)
                for model in solver.stable_models(chosen):
                    if abduced_of(model) == chosen and model not in seen:
                        seen.add(model)
                        results.append((model, None))
        return ("SATISFIABLE" if results else "UNSATISFIABLE"), results, solver

    for k in range(len(candidates) + 1):
        found: list[tuple[frozenset, int | None]] = []
        seen = set()
        for combo in itertools.combinations(candidates, k):
            budget -= 1
            if budget <= 0:
                raise ProgramError("search budget exceeded")
            chosen = set(combo)
            for model in solver.stable_models(chosen):
                if abduced_of(model) == chosen and model not in seen:
                    seen.add(model)
                    found.append((model, cost_of(model)))
        if found:
            return "OPTIMUM FOUND", found, solver
    return "UNSATISFIABLE", [], solver


# ---------------------------------------------------------------------------
# CLI


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    files: list[str] = []
    max_models = 0
    for arg in args:
        if arg == "-":
            files.append(arg)
        elif arg.startswith("--"):
            continue  # flag compatibility: optimization mode is always optN-like
        elif arg.lstrip("-").isdigit():
            max_models = int(arg)
        else:
            files.append(arg)

    chunks = []
    if not files or "-" in files:
        chunks.append(sys.stdin.read())
    for f in files:
        if f != "-":
            with open(f) as handle:
                chunks.append(handle.read())
    text = "\n".join(chunks)

    print(f"abduce-asp version {VERSION}")
    print("Reading from stdin" if "-" in files or not files else f"Reading from {files[0]}")
    print("Solving...")
    try:
        status, results, solver = solve_program(text)
    except ProgramError as exc:
        print(f"*** ERROR: {exc}", file=sys.stderr)
        return 65
    except RecursionError:
        print("*** ERROR: grounding recursion limit", file=sys.stderr)
        return 65

    shown = results if max_models == 0 else results[:max_models]
    for i, (model, cost) in enumerate(shown, start=1):
        print(f"Answer: {i}")
        print(" ".join(sorted(render_atom(solver.names[a]) for a in model)))
        if cost is not None:
            print(f"Optimization: {cost}")
    print(status)
    print()
    print(f"Models       : {len(shown)}")
    if status == "OPTIMUM FOUND":
        print("  Optimum    : yes")
        if shown:
            print(f"Optimization : {shown[0][1]}")
    return 20 if status == "UNSATISFIABLE" else 30


if __name__ == "__main__":
    sys.exit(main())
