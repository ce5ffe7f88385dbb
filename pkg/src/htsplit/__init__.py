"""Stable models of many-sorted theories refined by intensionality
statements: satisfaction checking, model enumeration, dependency graphs, and
splitting-theorem verification over finite domains."""

from .depgraph import (
    ApproximatorResult,
    DependencyGraph,
    EdgeWitness,
    NegativityResult,
    SatVerdict,
    SeparabilityResult,
    bounded_sat,
    graph_to_dot,
    graph_to_json,
    grounded_dep_graph,
    is_approximator,
    is_negative_program,
    is_psi_negative,
    is_separable,
    program_dep_graph,
    theory_dep_graph,
)
from .engine import ResourceCapExceeded
from .intensionality import (
    IntensionalityStatement,
    Partition,
    equivalent,
    is_purely_extensional,
    is_purely_intensional,
    is_valid_partition,
    join,
    lambda_bot,
    lambda_top,
    meet,
)
from .interpretations import (
    FiniteInterpretation,
    GroundAtom,
    HTInterpretation,
    all_interpretations,
    atom_universe,
    atoms_of,
    eval_term,
    format_atom,
    format_atom_set,
    ht_satisfies,
    satisfies,
)
from .occurrences import (
    Polarity,
    PolarityError,
    classify,
    nnn_atoms,
    nnn_formula,
    pnn_atoms,
    pnn_formula,
    pos_atoms,
    pos_formula,
    restrict_formula,
)
from .parser import ParseError, ProblemFile, parse_problem, print_problem
from .semantics import (
    StrongEquivalenceResult,
    atoms_of_lambda,
    check_strong_equivalence,
    em_atoms,
    em_theory,
    enumerate_lambda_stable_models,
    enumerate_stable_models,
    is_a_stable,
    is_lambda_stable,
    is_stable,
)
from .splitting import (
    SplitReport,
    VerificationResult,
    check_one_direction,
    check_split_program,
    check_split_theory,
    verify_split,
)
from .syntax import (
    And,
    Atom,
    atom_occurrences,
    BOT,
    Bottom,
    DomainName,
    Equality,
    Exists,
    Forall,
    Formula,
    Func,
    Implies,
    INT_SORT,
    Literal,
    OccurrencePath,
    Or,
    Rule,
    Signature,
    TOP,
    Term,
    Variable,
    conj,
    disj,
    fold_constants,
    format_formula,
    format_rule,
    free_variables,
    iff,
    int_name,
    neg,
    rule_to_sentence,
    rules_of,
    substitute,
    theory_sentences,
)

__version__ = "0.1.0"
