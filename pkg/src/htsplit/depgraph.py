"""Bounded satisfiability, the three dependency graphs, separability,
negativity, and approximator checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from . import engine
from .intensionality import IntensionalityStatement, Partition, partition_problems
from .interpretations import (
    Element,
    FiniteInterpretation,
    GroundAtom,
    atom_sort_key,
    format_atom,
    has_undefined_ground_term,
    satisfies_all,
)
from .occurrences import (
    TransformContext,
    atom_occurrences_with_polarity,
    fresh_variables,
    pnn_atoms,
    pos_atoms,
)
from .syntax import (
    Atom,
    DomainName,
    Exists,
    Formula,
    OccurrencePath,
    Rule,
    Signature,
    Statement,
    conj,
    format_formula,
    format_rule,
    free_variables,
    rule_body_formula,
    rules_of,
    subformula_at,
    theory_sentences,
    _substitute_by_name,
)

Domains = Mapping[str, tuple[Element, ...]]


# ---------------------------------------------------------------------------
# bounded satisfiability


@dataclass(frozen=True)
class SatVerdict:
    """Result of an exhaustive model search over the declared finite domains."""

    status: str  # "sat" | "unsat" | "unknown"
    witness: Optional[FiniteInterpretation] = None

    @property
    def satisfiable(self) -> bool:
        return self.status == "sat"

    @property
    def decisive(self) -> bool:
        return self.status != "unknown"


def bounded_sat(
    theory: Sequence[Statement],
    signature: Signature,
    domains: Domains,
    node_cap: int = engine.DEFAULT_NODE_CAP,
) -> SatVerdict:
    """Exhaustive search for a model over the declared domains.

    Decisive on closed domains unless the node cap is hit, in which case the
    verdict is unknown.
    """
    structure = FiniteInterpretation.make(signature, domains)
    gfs = engine.ground_theory(structure, theory_sentences(theory))
    status, atoms = engine.find_model(gfs, node_cap=node_cap)
    if status == "sat":
        return SatVerdict("sat", structure.with_atoms(atoms or frozenset()))
    return SatVerdict(status, None)


# ---------------------------------------------------------------------------
# graphs

Vertex = Hashable


@dataclass(frozen=True)
class EdgeWitness:
    """Why an edge exists: the inducing rule with the two occurrences, plus
    the satisfying interpretation found for the edge condition (None when the
    edge is only present because a search was inconclusive).  ``condition``
    holds the closed sentence the witness satisfies, so reports can be
    replayed."""

    rule_text: str
    head_occurrence: OccurrencePath
    body_occurrence: OccurrencePath
    witness: Optional[FiniteInterpretation]
    inconclusive: bool = False
    condition: Optional[Formula] = None


@dataclass(frozen=True)
class DependencyGraph:
    kind: str  # "program" | "theory" | "grounded"
    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[Vertex, Vertex], ...]
    provenance: tuple[tuple[tuple[Vertex, Vertex], tuple[EdgeWitness, ...]], ...] = ()
    labels: tuple[tuple[Vertex, str], ...] = ()

    def label(self, v: Vertex) -> str:
        for vertex, text in self.labels:
            if vertex == v:
                return text
        return str(v)

    def successors(self, v: Vertex) -> list[Vertex]:
        return [w for (u, w) in self.edges if u == v]

    def witnesses(self, edge: tuple[Vertex, Vertex]) -> tuple[EdgeWitness, ...]:
        for e, ws in self.provenance:
            if e == edge:
                return ws
        return ()


def _make_graph(
    kind: str,
    vertices: list[Vertex],
    edge_map: dict[tuple[Vertex, Vertex], list[EdgeWitness]],
    labels: dict[Vertex, str],
) -> DependencyGraph:
    vs = tuple(sorted(vertices, key=repr))
    es = tuple(sorted(edge_map, key=repr))
    return DependencyGraph(
        kind,
        vs,
        es,
        tuple((e, tuple(edge_map[e])) for e in es),
        tuple(sorted(labels.items(), key=repr)),
    )


def _predicates_in(statements: Sequence[Statement], signature: Signature) -> set:
    preds = set()
    for sentence in theory_sentences(statements):
        for _path, atom, _pol in atom_occurrences_with_polarity(sentence):
            key = (atom.pred, len(atom.args))
            if key in signature.predicates:
                preds.add(key)
    return preds


def _member_vertices(
    partition: Partition,
    signature: Signature,
    domains: Domains,
    psi: Sequence[Formula],
    predicates: Optional[set],
    node_cap: int,
) -> tuple[list[Vertex], dict[Vertex, str]]:
    """Pairs (p, i) whose member condition is satisfiable together with psi."""
    vertices: list[Vertex] = []
    labels: dict[Vertex, str] = {}
    keys = sorted(predicates if predicates is not None else signature.predicates)
    for key in keys:
        for i, member in enumerate(partition.members):
            variables, condition = member.entry(key)
            closed: Formula = condition
            for v in reversed(variables):
                closed = Exists(v, closed)
            verdict = bounded_sat(list(psi) + [closed], signature, domains, node_cap)
            if verdict.status != "unsat":
                vertex = (key, i)
                vertices.append(vertex)
                labels[vertex] = f"{key[0]}@{partition.member_name(i)}"
    return vertices, labels


def _check_partition(partition: Partition, domains: Domains) -> None:
    problems = partition_problems(partition, domains)
    if problems:
        raise ValueError("invalid partition: " + "; ".join(problems))


def program_dep_graph(
    program: Sequence[Rule],
    partition: Partition,
    domains: Domains,
    node_cap: int = engine.DEFAULT_NODE_CAP,
    check_partition: bool = True,
) -> DependencyGraph:
    """Dependencies between (predicate, member) pairs induced by the rules.

    An edge runs from a head atom's pair to the pair of a nonnegated body
    atom whenever the joint condition (body, head atom, both member
    conditions) is satisfiable; inconclusive searches keep the edge.
    """
    signature = partition.members[0].signature
    if check_partition:
        _check_partition(partition, domains)
    occurring = _predicates_in(list(program), signature)
    vertices, labels = _member_vertices(
        partition, signature, domains, (), occurring, node_cap
    )
    vertex_set = set(vertices)
    edge_map: dict[tuple[Vertex, Vertex], list[EdgeWitness]] = {}

    for rule in program:
        body = rule_body_formula(rule)
        head_atoms = [
            h for h in rule.head
            if isinstance(h, Atom) and (h.pred, len(h.args)) in signature.predicates
        ]
        body_atoms = [
            lit.atom
            for lit in rule.body
            if lit.negations == 0
            and isinstance(lit.atom, Atom)
            and (lit.atom.pred, len(lit.atom.args)) in signature.predicates
        ]
        for h_idx, head_atom in enumerate(head_atoms):
            hkey = (head_atom.pred, len(head_atom.args))
            for b_idx, body_atom in enumerate(body_atoms):
                bkey = (body_atom.pred, len(body_atom.args))
                for i, member_i in enumerate(partition.members):
                    if ((hkey, i)) not in vertex_set:
                        continue
                    for j, member_j in enumerate(partition.members):
                        if ((bkey, j)) not in vertex_set:
                            continue
                        condition = conj(
                            [body, head_atom]
                            + [member_i.condition(hkey, head_atom.args)]
                            + [member_j.condition(bkey, body_atom.args)]
                        )
                        closed: Formula = condition
                        for v in reversed(free_variables(condition)):
                            closed = Exists(v, closed)
                        verdict = bounded_sat([closed], signature, domains, node_cap)
                        if verdict.status == "unsat":
                            continue
                        edge = ((hkey, i), (bkey, j))
                        edge_map.setdefault(edge, []).append(
                            EdgeWitness(
                                format_rule(rule),
                                (h_idx,),
                                (b_idx,),
                                verdict.witness,
                                inconclusive=not verdict.decisive,
                                condition=closed,
                            )
                        )
    return _make_graph("program", vertices, edge_map, labels)


def theory_dep_graph(
    theory: Sequence[Statement],
    partition: Partition,
    psi: Sequence[Statement],
    domains: Domains,
    node_cap: int = engine.DEFAULT_NODE_CAP,
    check_partition: bool = True,
) -> DependencyGraph:
    """Positive dependencies of an arbitrary theory under a context.

    Rules are the strictly positive implication occurrences; the edge
    condition conjoins the two occurrence transforms with both member
    conditions over fresh argument tuples, under the context.
    """
    signature = partition.members[0].signature
    if check_partition:
        _check_partition(partition, domains)
    psi_sentences = theory_sentences(psi)
    vertices, labels = _member_vertices(
        partition, signature, domains, psi_sentences, None, node_cap
    )
    vertex_set = set(vertices)
    ctx = TransformContext(signature, domains, psi_sentences, node_cap)
    edge_map: dict[tuple[Vertex, Vertex], list[EdgeWitness]] = {}

    for occ_rule in rules_of(theory_sentences(theory)):
        head, body = occ_rule.consequent, occ_rule.antecedent
        head_occs = [
            (path, atom)
            for path, atom, pol in atom_occurrences_with_polarity(head)
            if pol.strictly_positive
        ]
        body_occs = [
            (path, atom)
            for path, atom, pol in atom_occurrences_with_polarity(body)
            if pol.positive and pol.nonnegated
        ]
        for h_path, head_atom in head_occs:
            hkey = (head_atom.pred, len(head_atom.args))
            fresh_z = fresh_variables("$z", head_atom)
            pos_h = ctx.transform(head, h_path, "pos", fresh_z)
            for b_path, body_atom in body_occs:
                bkey = (body_atom.pred, len(body_atom.args))
                fresh_y = fresh_variables("$y", body_atom)
                pnn_b = ctx.transform(body, b_path, "pnn", fresh_y)
                for i, member_i in enumerate(partition.members):
                    if (hkey, i) not in vertex_set:
                        continue
                    for j, member_j in enumerate(partition.members):
                        if (bkey, j) not in vertex_set:
                            continue
                        condition = conj(
                            [
                                pnn_b,
                                pos_h,
                                member_j.condition(bkey, fresh_y),
                                member_i.condition(hkey, fresh_z),
                            ]
                        )
                        closed: Formula = condition
                        for v in reversed(free_variables(condition)):
                            closed = Exists(v, closed)
                        verdict = bounded_sat(
                            list(psi_sentences) + [closed], signature, domains, node_cap
                        )
                        if verdict.status == "unsat":
                            continue
                        edge = ((hkey, i), (bkey, j))
                        edge_map.setdefault(edge, []).append(
                            EdgeWitness(
                                format_formula(occ_rule.sentence),
                                h_path,
                                b_path,
                                verdict.witness,
                                inconclusive=not verdict.decisive,
                                condition=closed,
                            )
                        )
    return _make_graph("theory", vertices, edge_map, labels)


def grounded_dep_graph(
    interp: FiniteInterpretation,
    kept: Iterable[GroundAtom],
    theory: Sequence[Statement],
) -> DependencyGraph:
    """Positive dependencies between ground atoms, relative to one
    interpretation; vertices are the kept atoms."""
    kept_set = frozenset(kept)
    vertices = sorted(kept_set, key=atom_sort_key)
    labels = {a: format_atom(a) for a in vertices}
    edge_map: dict[tuple[Vertex, Vertex], list[EdgeWitness]] = {}

    for occ_rule in rules_of(theory_sentences(theory)):
        matrix = subformula_at(occ_rule.sentence, occ_rule.path)
        variables = free_variables(matrix)
        pools = [interp.domain(v.sort) for v in variables]
        for values in itertools.product(*pools):
            binding = {
                v.name: DomainName(d, v.sort) for v, d in zip(variables, values)
            }
            instance = _substitute_by_name(matrix, binding)
            if has_undefined_ground_term(interp, instance):
                continue
            antecedent = _substitute_by_name(occ_rule.antecedent, binding)
            consequent = _substitute_by_name(occ_rule.consequent, binding)
            heads = pos_atoms(interp, consequent) & kept_set
            if not heads:
                continue
            bodies = pnn_atoms(interp, antecedent) & kept_set
            for v in heads:
                for w in bodies:
                    edge_map.setdefault((v, w), []).append(
                        EdgeWitness(format_formula(instance), (), (), None)
                    )
    return _make_graph("grounded", list(vertices), edge_map, labels)


# ---------------------------------------------------------------------------
# separability


@dataclass(frozen=True)
class SeparabilityResult:
    separable: bool
    mixed_cycle: Optional[tuple[Vertex, ...]] = None

    def __bool__(self) -> bool:
        return self.separable


def _strongly_connected_components(
    vertices: Sequence[Vertex], edges: Sequence[tuple[Vertex, Vertex]]
) -> list[list[Vertex]]:
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in vertices}
    for u, w in edges:
        succ[u].append(w)
    index: dict[Vertex, int] = {}
    low: dict[Vertex, int] = {}
    on_stack: set[Vertex] = set()
    stack: list[Vertex] = []
    counter = [0]
    out: list[list[Vertex]] = []

    def strongconnect(root: Vertex) -> None:
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                out.append(component)

    for v in vertices:
        if v not in index:
            strongconnect(v)
    return out


def _path_within(
    start: Vertex, goal: Vertex, allowed: set, succ: dict
) -> Optional[list[Vertex]]:
    frontier = [[start]]
    seen = {start}
    while frontier:
        path = frontier.pop(0)
        for w in succ.get(path[-1], ()):
            if w not in allowed:
                continue
            if w == goal:
                return path + [w]
            if w not in seen:
                seen.add(w)
                frontier.append(path + [w])
    return None


def is_separable(
    graph: DependencyGraph,
    member_of: Optional[Callable[[Vertex], Hashable]] = None,
) -> SeparabilityResult:
    """Every cycle stays inside one partition member.

    With a finite graph this is equivalent to the walk condition: condense to
    strongly connected components and require each component with an internal
    edge to be single-member.  On failure a concrete mixed cycle is returned.
    """
    if member_of is None:
        member_of = lambda v: v[1]  # (predicate, member-index) vertices
    edge_set = set(graph.edges)
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in graph.vertices}
    for u, w in graph.edges:
        succ[u].append(w)
    for component in _strongly_connected_components(graph.vertices, graph.edges):
        members = {member_of(v) for v in component}
        if len(members) <= 1:
            continue
        has_internal = len(component) > 1 or (component[0], component[0]) in edge_set
        if not has_internal:
            continue
        allowed = set(component)
        a = component[0]
        b = next(v for v in component if member_of(v) != member_of(a))
        forward = _path_within(a, b, allowed, succ)
        backward = _path_within(b, a, allowed, succ)
        assert forward is not None and backward is not None
        return SeparabilityResult(False, tuple(forward + backward[1:]))
    return SeparabilityResult(True, None)


# ---------------------------------------------------------------------------
# negativity


@dataclass(frozen=True)
class NegativityResult:
    """Outcome of a negativity check: pass, fail, or inconclusive-by-bound.

    On failure ``witness`` carries the offending rule and satisfying
    interpretation."""

    verdict: str  # "pass" | "fail" | "unknown"
    witness: Optional[EdgeWitness] = None

    @property
    def holds(self) -> bool:
        return self.verdict == "pass"

    def __bool__(self) -> bool:
        return self.holds


def is_negative_program(
    program: Sequence[Rule],
    lam: IntensionalityStatement,
    domains: Domains,
    node_cap: int = engine.DEFAULT_NODE_CAP,
) -> NegativityResult:
    """No rule can derive an atom inside the statement's region: for every
    head atom, body plus head atom plus its condition is unsatisfiable."""
    signature = lam.signature
    outcome = "pass"
    for rule in program:
        body = rule_body_formula(rule)
        for h_idx, head_atom in enumerate(rule.head):
            if not isinstance(head_atom, Atom):
                continue
            key = (head_atom.pred, len(head_atom.args))
            if key not in signature.predicates:
                continue
            condition = conj([body, head_atom, lam.condition(key, head_atom.args)])
            closed: Formula = condition
            for v in reversed(free_variables(condition)):
                closed = Exists(v, closed)
            verdict = bounded_sat([closed], signature, domains, node_cap)
            if verdict.status == "sat":
                return NegativityResult(
                    "fail",
                    EdgeWitness(
                        format_rule(rule), (h_idx,), (), verdict.witness, condition=closed
                    ),
                )
            if verdict.status == "unknown":
                outcome = "unknown"
    return NegativityResult(outcome)


def is_psi_negative(
    theory: Sequence[Statement],
    lam: IntensionalityStatement,
    psi: Sequence[Statement],
    domains: Domains,
    node_cap: int = engine.DEFAULT_NODE_CAP,
) -> NegativityResult:
    """Theory-level negativity under a context.

    The check runs over every strictly positive atom occurrence of every
    sentence, not only the ones inside rule consequents: a choice-style
    disjunction such as ``u(X) | not u(X)`` has a strictly positive
    occurrence outside any rule, and it can make an atom of the statement's
    region true.  On disjunctive programs this coincides with the rule-head
    condition, since there every strictly positive occurrence is a head atom
    with the body folded in by the transform.
    """
    signature = lam.signature
    psi_sentences = theory_sentences(psi)
    ctx = TransformContext(signature, domains, psi_sentences, node_cap)
    outcome = "pass"
    for sentence in theory_sentences(theory):
        for path, atom, pol in atom_occurrences_with_polarity(sentence):
            if not pol.strictly_positive:
                continue
            key = (atom.pred, len(atom.args))
            fresh_y = fresh_variables("$y", atom)
            pos_f = ctx.transform(sentence, path, "pos", fresh_y)
            condition = conj([pos_f, lam.condition(key, fresh_y)])
            closed: Formula = condition
            for v in reversed(free_variables(condition)):
                closed = Exists(v, closed)
            verdict = bounded_sat(
                list(psi_sentences) + [closed], signature, domains, node_cap
            )
            if verdict.status == "sat":
                return NegativityResult(
                    "fail",
                    EdgeWitness(
                        format_formula(sentence),
                        path,
                        (),
                        verdict.witness,
                        condition=closed,
                    ),
                )
            if verdict.status == "unknown":
                outcome = "unknown"
    return NegativityResult(outcome)


# ---------------------------------------------------------------------------
# approximators


@dataclass(frozen=True)
class ApproximatorResult:
    holds: bool
    counterexample: Optional[FiniteInterpretation] = None

    def __bool__(self) -> bool:
        return self.holds


def is_approximator(
    psi: Sequence[Statement],
    theory: Sequence[Statement],
    lam: IntensionalityStatement,
    domains: Domains,
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> ApproximatorResult:
    """Every stable model of the theory under the statement satisfies psi."""
    from .semantics import enumerate_lambda_stable_models

    psi_sentences = theory_sentences(psi)
    for model in enumerate_lambda_stable_models(theory, lam, domains, atom_cap):
        if not satisfies_all(model, psi_sentences):
            return ApproximatorResult(False, model)
    return ApproximatorResult(True)


# ---------------------------------------------------------------------------
# exports


def graph_to_dot(graph: DependencyGraph) -> str:
    lines = ["digraph dependencies {"]
    for v in graph.vertices:
        lines.append(f'  "{graph.label(v)}";')
    for u, w in graph.edges:
        lines.append(f'  "{graph.label(u)}" -> "{graph.label(w)}";')
    lines.append("}")
    return "\n".join(lines)


def graph_to_json(graph: DependencyGraph) -> dict:
    def witness_json(w: EdgeWitness) -> dict:
        out = {
            "rule": w.rule_text,
            "head_occurrence": list(w.head_occurrence),
            "body_occurrence": list(w.body_occurrence),
            "inconclusive": w.inconclusive,
        }
        if w.witness is not None:
            out["witness"] = sorted(format_atom(a) for a in w.witness.true_atoms)
        return out

    return {
        "kind": graph.kind,
        "vertices": [graph.label(v) for v in graph.vertices],
        "edges": [
            {
                "from": graph.label(u),
                "to": graph.label(w),
                "provenance": [witness_json(x) for x in graph.witnesses((u, w))],
            }
            for u, w in graph.edges
        ],
    }
