"""External solver process management and answer-set output parsing.

The derived program is piped to a Clingo-compatible executable on stdin;
the textual output (``Answer: k`` blocks, ``Optimization:`` lines and the
terminal ``OPTIMUM FOUND``/``SATISFIABLE``/``UNSATISFIABLE`` marker) is
parsed back into structured models.  The executable is chosen from the
``ABDUCTOR_SOLVER`` environment variable, then a real ``clingo`` on PATH,
then the bundled ``abduce-asp`` engine.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import sys
from dataclasses import dataclass, field

from .model import Atom, FuncTerm, Term
from .parse import ParseError, parse_atom_text

# Flag table per executable family; keyed so an alternate solver can be
# swapped in without touching call sites.
FLAG_TABLE: dict[str, list[str]] = {
    "all_optimal": ["--opt-mode=optN", "0"],
    "single": [],
}

SAT_EXIT_CODES = frozenset({10, 30})
UNSAT_EXIT_CODES = frozenset({20})


def default_solver_path() -> str:
    env = os.environ.get("ABDUCTOR_SOLVER")
    if env:
        return env
    for name in ("clingo", "abduce-asp"):
        found = shutil.which(name)
        if found:
            return found
    # Last resort: run the bundled engine through the current interpreter.
    return f"{sys.executable} -m abductor.groundsolve"


@dataclass(frozen=True)
class SolverConfig:
    executable: str = field(default_factory=default_solver_path)
    extra_flags: tuple[str, ...] = ()
    timeout_seconds: float = 60.0
    enumerate_all_optimal: bool = True

    def __post_init__(self) -> None:
        if self.timeout_seconds <= 0:
            raise ValueError("timeout must be positive")

    def command(self) -> list[str]:
        base = self.executable.split() if " " in self.executable else [self.executable]
        flags = FLAG_TABLE["all_optimal" if self.enumerate_all_optimal else "single"]
        return base + list(self.extra_flags) + flags + ["-"]


@dataclass(frozen=True)
class Model:
    atoms: frozenset[Atom]
    cost: int | None = None

    def rendered(self) -> list[str]:
        return sorted(a.render() for a in self.atoms)


@dataclass(frozen=True)
class SolveResult:
    status: str  # optimumFound | satisfiable | unsatisfiable | timeout | solverError
    models: tuple[Model, ...]
    raw_output: str
    exit_code: int | None = None

    def optimal_models(self) -> list[Model]:
        """Distinct models carrying the best cost, in output order."""
        if not self.models:
            return []
        costs = [m.cost for m in self.models if m.cost is not None]
        best = min(costs) if costs else None
        out: list[Model] = []
        seen: set[frozenset[Atom]] = set()
        for m in self.models:
            if (best is None or m.cost == best) and m.atoms not in seen:
                seen.add(m.atoms)
                out.append(m)
        return out

    def best_model(self) -> Model | None:
        opt = self.optimal_models()
        return opt[0] if opt else None


def parse_model_atom(token: str) -> Atom:
    """One atom token from a model line, parsed through the term grammar."""
    try:
        return parse_atom_text(token, allow_reserved=True)
    except ParseError as exc:
        raise ValueError(f"malformed atom {token!r}: {exc}") from exc


def parse_solver_output(text: str, exit_code: int | None = None) -> SolveResult:
    models: list[Model] = []
    status: str | None = None
    lines = text.splitlines()
    i = 0
    try:
        while i < len(lines):
            line = lines[i].strip()
            if line.startswith("Answer:"):
                atom_line = lines[i + 1] if i + 1 < len(lines) else ""
                atoms = frozenset(parse_model_atom(tok) for tok in atom_line.split())
                cost: int | None = None
                j = i + 2
                if j < len(lines) and lines[j].strip().startswith("Optimization:"):
                    cost = int(lines[j].split(":", 1)[1].split()[0])
                    j += 1
                models.append(Model(atoms=atoms, cost=cost))
                i = j
                continue
            if line == "OPTIMUM FOUND":
                status = "optimumFound"
            elif line == "SATISFIABLE":
                status = status or "satisfiable"
            elif line == "UNSATISFIABLE":
                status = "unsatisfiable"
            i += 1
    except (ValueError, IndexError) as exc:
        return SolveResult("solverError", tuple(models), text, exit_code)

    if status is None:
        return SolveResult("solverError", tuple(models), text, exit_code)
    if status == "unsatisfiable" and models:
        return SolveResult("solverError", tuple(models), text, exit_code)
    if status in ("optimumFound", "satisfiable") and not models:
        return SolveResult("solverError", tuple(models), text, exit_code)
    if exit_code is not None:
        if exit_code in SAT_EXIT_CODES and not models:
            return SolveResult("solverError", tuple(models), text, exit_code)
        if exit_code in UNSAT_EXIT_CODES and models:
            return SolveResult("solverError", tuple(models), text, exit_code)
    return SolveResult(status, tuple(models), text, exit_code)


def solve_text(program_text: str, cfg: SolverConfig | None = None) -> SolveResult:
    """Run the solver over raw program text delivered on stdin."""
    cfg = cfg or SolverConfig()
    if not program_text.strip():
        return SolveResult("solverError", (), "empty program", None)
    try:
        proc = subprocess.run(
            cfg.command(),
            input=program_text,
            capture_output=True,
            text=True,
            timeout=cfg.timeout_seconds,
        )
    except subprocess.TimeoutExpired as exc:
        partial = exc.stdout if isinstance(exc.stdout, str) else (exc.stdout or b"").decode(errors="replace")
        return SolveResult("timeout", (), partial or "", None)
    except (FileNotFoundError, PermissionError) as exc:
        return SolveResult("solverError", (), f"failed to launch solver: {exc}", None)

    output = proc.stdout + (("\n" + proc.stderr) if proc.stderr.strip() else "")
    if proc.returncode not in SAT_EXIT_CODES | UNSAT_EXIT_CODES:
        return SolveResult("solverError", (), output, proc.returncode)
    return parse_solver_output(proc.stdout, proc.returncode)


def solve(program, cfg: SolverConfig | None = None) -> SolveResult:
    """Run the solver over a DerivedProgram (see ``encode.compile_task``)."""
    return solve_text(program.text, cfg)
