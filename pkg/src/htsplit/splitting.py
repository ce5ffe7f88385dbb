"""Hypothesis checks and brute-force verification for the two splitting
results: one for disjunctive programs, one for arbitrary theories under an
approximating context."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import engine
from .depgraph import (
    ApproximatorResult,
    DependencyGraph,
    Domains,
    NegativityResult,
    SeparabilityResult,
    is_approximator,
    is_negative_program,
    is_psi_negative,
    is_separable,
    program_dep_graph,
    theory_dep_graph,
)
from .intensionality import Partition, partition_problems
from .interpretations import (
    FiniteInterpretation,
    GroundAtom,
    atom_sort_key,
    format_atom,
)
from .semantics import em_theory, is_lambda_stable
from .syntax import DomainName, Rule, Statement, theory_sentences


@dataclass(frozen=True)
class NegativityCell:
    part_index: int
    part_name: str
    member_index: int
    member_name: str
    result: NegativityResult


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of exhaustively comparing the two sides of a split."""

    status: str  # "verified" | "mismatch" | "not-run" | "inconclusive"
    mismatch: Optional[FiniteInterpretation] = None
    side: Optional[str] = None  # "union-only" | "parts-only"

    @property
    def verified(self) -> bool:
        return self.status == "verified"


@dataclass(frozen=True)
class SplitReport:
    """Verdicts for every hypothesis of a split, three-valued so inconclusive
    bounds are never reported as passes."""

    kind: str  # "program" | "theory"
    partition_valid: bool
    partition_issues: tuple[str, ...]
    graph: DependencyGraph
    separability: SeparabilityResult
    negativity: tuple[NegativityCell, ...]
    approximator_verdict: str  # "pass" | "fail" | "unknown" | "not-applicable"
    approximator: Optional[ApproximatorResult]
    verification: VerificationResult

    @property
    def hypotheses_pass(self) -> bool:
        return (
            self.partition_valid
            and self.separability.separable
            and all(cell.result.holds for cell in self.negativity)
            and self.approximator_verdict in ("pass", "not-applicable")
        )

    @property
    def inconclusive(self) -> bool:
        return (
            any(cell.result.verdict == "unknown" for cell in self.negativity)
            or self.approximator_verdict == "unknown"
            or self.verification.status == "inconclusive"
        )

    def to_json(self) -> dict:
        cycles = []
        if self.separability.mixed_cycle:
            cycles.append([self.graph.label(v) for v in self.separability.mixed_cycle])
        verification: dict = {"status": self.verification.status}
        if self.verification.mismatch is not None:
            verification["mismatch"] = {
                "side": self.verification.side,
                "atoms": sorted(
                    format_atom(a) for a in self.verification.mismatch.true_atoms
                ),
            }
        return {
            "partition_valid": self.partition_valid,
            "partition_issues": list(self.partition_issues),
            "separable": self.separability.separable,
            "cycles": cycles,
            "negativity": [
                {
                    "part": cell.part_name,
                    "lambda": cell.member_name,
                    "verdict": cell.result.verdict,
                    "witness": None
                    if cell.result.witness is None
                    else cell.result.witness.rule_text,
                }
                for cell in self.negativity
            ],
            "approximator": self.approximator_verdict,
            "verification": verification,
        }


def _part_name(i: int, given: Optional[Sequence[str]]) -> str:
    return given[i] if given and i < len(given) else f"part{i + 1}"


def check_split_program(
    parts: Sequence[Sequence[Rule]],
    partition: Partition,
    domains: Domains,
    part_names: Optional[Sequence[str]] = None,
    node_cap: int = engine.DEFAULT_NODE_CAP,
) -> SplitReport:
    """Both hypotheses of the program splitting result: separability of the
    dependency graph of the union, and pairwise negativity of each part on
    every other member.  Does not enumerate models."""
    if len(parts) != len(partition.members):
        raise ValueError("one program part per partition member is required")
    issues = tuple(partition_problems(partition, domains))
    union: list[Rule] = [r for part in parts for r in part]
    graph = program_dep_graph(
        union, partition, domains, node_cap=node_cap, check_partition=False
    )
    separability = is_separable(graph)
    cells = []
    for i, part in enumerate(parts):
        for j, member in enumerate(partition.members):
            if i == j:
                continue
            result = is_negative_program(list(part), member, domains, node_cap)
            cells.append(
                NegativityCell(
                    i, _part_name(i, part_names), j, partition.member_name(j), result
                )
            )
    return SplitReport(
        "program",
        not issues,
        issues,
        graph,
        separability,
        tuple(cells),
        "not-applicable",
        None,
        VerificationResult("not-run"),
    )


def check_split_theory(
    parts: Sequence[Sequence[Statement]],
    partition: Partition,
    psi: Sequence[Statement],
    domains: Domains,
    part_names: Optional[Sequence[str]] = None,
    node_cap: int = engine.DEFAULT_NODE_CAP,
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> SplitReport:
    """The theory-level hypotheses: the context approximates the union,
    the partition is separable on the context-aware graph, and every part is
    context-negative on every other member."""
    if len(parts) != len(partition.members):
        raise ValueError("one theory part per partition member is required")
    issues = tuple(partition_problems(partition, domains))
    union: list[Statement] = [s for part in parts for s in part]
    graph = theory_dep_graph(
        union, partition, psi, domains, node_cap=node_cap, check_partition=False
    )
    separability = is_separable(graph)
    cells = []
    for i, part in enumerate(parts):
        for j, member in enumerate(partition.members):
            if i == j:
                continue
            result = is_psi_negative(list(part), member, psi, domains, node_cap)
            cells.append(
                NegativityCell(
                    i, _part_name(i, part_names), j, partition.member_name(j), result
                )
            )
    try:
        approx = is_approximator(psi, union, partition.target, domains, atom_cap)
        approx_verdict = "pass" if approx.holds else "fail"
    except engine.ResourceCapExceeded:
        approx = None
        approx_verdict = "unknown"
    return SplitReport(
        "theory",
        not issues,
        issues,
        graph,
        separability,
        tuple(cells),
        approx_verdict,
        approx,
        VerificationResult("not-run"),
    )


# ---------------------------------------------------------------------------
# exhaustive verification


@dataclass
class _GroundSide:
    """One stability problem, grounded once for pointwise rechecking."""

    gfs: list
    region_gf: dict[GroundAtom, object]
    atoms: frozenset[GroundAtom]

    def restrict(self, allowed: frozenset[GroundAtom]) -> "_GroundSide":
        return _GroundSide(
            [engine.restrict_false(g, allowed) for g in self.gfs],
            {a: engine.restrict_false(g, allowed) for a, g in self.region_gf.items()},
            self.atoms,
        )

    def removable(self, true_atoms: frozenset[GroundAtom]) -> frozenset[GroundAtom]:
        return frozenset(
            a for a in true_atoms if engine.eval_gf(self.region_gf[a], true_atoms)
        )

    def is_stable(self, true_atoms: frozenset[GroundAtom]) -> bool:
        # a reduct collapsing to false doubles as the classical-model check
        stable, _ = engine.is_stable_ground(self.gfs, true_atoms, self.removable(true_atoms))
        return stable


def _ground_side(
    structure: FiniteInterpretation,
    statements: Sequence[Statement],
    lam,
) -> _GroundSide:
    from .interpretations import atom_universe

    signature = structure.signature
    sentences = theory_sentences(statements) + em_theory(lam)
    gfs = engine.ground_theory(structure, sentences)
    region_gf: dict[GroundAtom, object] = {}
    for atom in atom_universe(signature, structure.domain_map()):
        pred, values = atom
        arg_sorts = signature.pred_arg_sorts(pred, len(values))
        names = tuple(DomainName(v, s) for v, s in zip(values, arg_sorts))
        region_gf[atom] = engine.ground_formula(
            structure, lam.condition((pred, len(values)), names)
        )
    return _GroundSide(gfs, region_gf, frozenset(engine.candidate_atoms(gfs)))


def verify_split(
    parts: Sequence[Sequence[Statement]],
    partition: Partition,
    psi: Sequence[Statement],
    domains: Domains,
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> VerificationResult:
    """Compare, interpretation by interpretation, the stable models of the
    union against the conjunction of context membership and per-part
    stability.

    The scan covers every interpretation that could belong to either side:
    an interpretation making an atom true that no side can support belongs to
    neither, so the two sides trivially agree on it.  Candidate survivors of
    the bit-parallel necessary-condition filters are rechecked exactly.
    """
    if len(parts) != len(partition.members):
        raise ValueError("one part per partition member is required")
    signature = partition.target.signature
    structure = FiniteInterpretation.make(signature, domains)
    union: list[Statement] = [s for part in parts for s in part]
    union_side = _ground_side(structure, union, partition.target)

    part_sides = [
        _ground_side(structure, list(part), member)
        for part, member in zip(parts, partition.members)
    ]
    parts_atoms: frozenset[GroundAtom] = part_sides[0].atoms
    for side in part_sides[1:]:
        parts_atoms &= side.atoms
    psi_sentences = theory_sentences(psi)
    psi_gfs = engine.ground_theory(structure, psi_sentences)

    space_atoms = sorted(union_side.atoms | parts_atoms, key=atom_sort_key)
    if len(space_atoms) > atom_cap:
        raise engine.ResourceCapExceeded(
            f"verification space has {len(space_atoms)} atoms, cap is {atom_cap}"
        )
    allowed = frozenset(space_atoms)
    space = engine.TableSpace(space_atoms)

    union_side = union_side.restrict(allowed)
    part_sides = [side.restrict(allowed) for side in part_sides]
    psi_restricted = [engine.restrict_false(g, allowed) for g in psi_gfs]

    table_a = engine.stable_candidate_table(
        space, union_side.gfs, union_side.region_gf, allowed - union_side.atoms
    )
    table_b = space.theory_table(psi_restricted)
    for side in part_sides:
        if not table_b:
            break
        table_b &= engine.stable_candidate_table(
            space, side.gfs, side.region_gf, allowed - side.atoms
        )

    def in_side_b(true_atoms: frozenset[GroundAtom]) -> bool:
        if any(not engine.eval_gf(g, true_atoms) for g in psi_restricted):
            return False
        return all(side.is_stable(true_atoms) for side in part_sides)

    for k in space.indices(table_a | table_b):
        true_atoms = space.atoms_at(int(k))
        a = union_side.is_stable(true_atoms)
        b = in_side_b(true_atoms)
        if a and not b:
            return VerificationResult("mismatch", structure.with_atoms(true_atoms), "union-only")
        if b and not a:
            return VerificationResult("mismatch", structure.with_atoms(true_atoms), "parts-only")
    return VerificationResult("verified")


def check_one_direction(
    parts: Sequence[Sequence[Statement]],
    partition: Partition,
    domains: Domains,
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
    scope: str = "union",
) -> bool:
    """The graph-free direction: every stable model of the union under the
    joined statement stays stable when the statement is restricted to one
    partition member.

    With ``scope="union"`` each member is checked against the whole theory;
    this holds for arbitrary parts and partitions.  ``scope="parts"`` checks
    each member against its own part only, which additionally needs the
    negativity hypotheses: support for an atom may come from another part
    through a doubly negated body, as in ``{b :- not b, b}`` joined with
    ``{c | b :- not not b}``, whose union has the stable model {b} even
    though the first part alone cannot support b.
    """
    from .semantics import enumerate_lambda_stable_models

    if scope not in ("union", "parts"):
        raise ValueError(f"unknown scope {scope!r}")
    union: list[Statement] = [s for part in parts for s in part]
    for model in enumerate_lambda_stable_models(
        union, partition.target, domains, atom_cap
    ):
        for part, member in zip(parts, partition.members):
            theory = union if scope == "union" else list(part)
            if not is_lambda_stable(model, theory, member):
                return False
    return True
