"""Abductive proof generation workbench for answer set programs."""

from .model import (
    Atom,
    BlockPattern,
    Constant,
    EXT_VAR,
    ExtVarTerm,
    FuncTerm,
    IntTerm,
    Literal,
    ModelConstraint,
    Placeholder,
    Query,
    Rule,
    RuleSet,
    SimpleTaskReport,
    SkolemTerm,
    TaskSpec,
    Variable,
    classify_simple,
    validate_ruleset,
    validate_task,
)
from .parse import parse_atom_text, parse_rules, parse_task
from .encode import DerivedProgram, compile_task, skolemize
from .solver import Model, SolveResult, SolverConfig, parse_solver_output, solve, solve_text
from .extract import (
    AbductiveSolution,
    JustificationGraph,
    extract_graph,
    extract_solution,
    to_dot,
    to_json,
)
from .oracle import (
    TermUniverse,
    brute_force_abduce,
    build_universe,
    check_general_solution,
    depth_map,
    depth_of,
    least_model,
)
from .graphs import (
    AbstractProofGraph,
    InstanceSet,
    QueryNode,
    apply_subst,
    build_abstract,
    check_theorem_termsub,
    derived_subst,
    minimize,
    preimages,
)
from .generalize import GeneralizedSolution, generalize_task

__version__ = "0.1.0"
