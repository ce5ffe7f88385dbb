"""Stable models refined by intensionality statements.

The public checks come in two flavours: direct implementations that follow
the definitions literally (subset search over here-worlds), and a fast path
that grounds the theory once and works with reducts and candidate-restricted
enumeration.  The property suite cross-checks the two on small instances;
callers pick with the ``method`` argument.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Literal as LiteralType, Mapping, Optional, Sequence

from . import engine
from .intensionality import IntensionalityStatement, lambda_top
from .interpretations import (
    Element,
    FiniteInterpretation,
    GroundAtom,
    HTInterpretation,
    atom_sort_key,
    atom_universe,
    atoms_of,
    ground_atom_formula,
    satisfies,
    satisfies_all,
    ht_satisfies_all,
)
from .syntax import (
    Atom,
    DomainName,
    Forall,
    Formula,
    Implies,
    Or,
    Signature,
    Statement,
    neg,
    theory_sentences,
)

Method = LiteralType["reduct", "direct-restricted", "direct-full"]


def atoms_of_lambda(
    interp: FiniteInterpretation, lam: IntensionalityStatement
) -> frozenset[GroundAtom]:
    """True atoms whose intensionality condition holds on their arguments."""
    out = set()
    for atom in interp.true_atoms:
        pred, values = atom
        arg_sorts = interp.signature.pred_arg_sorts(pred, len(values))
        names = tuple(DomainName(v, s) for v, s in zip(values, arg_sorts))
        if satisfies(interp, lam.condition((pred, len(values)), names)):
            out.add(atom)
    return frozenset(out)


# ---------------------------------------------------------------------------
# excluded-middle theories


def em_theory(lam: IntensionalityStatement) -> list[Formula]:
    """One sentence per predicate symbol: where the intensionality condition
    fails, the predicate obeys excluded middle."""
    out = []
    for key in sorted(lam.signature.predicates):
        variables, condition = lam.entry(key)
        atom = Atom(key[0], variables)
        matrix = Implies(neg(condition), Or(atom, neg(atom)))
        out.append(_forall(variables, matrix))
    return out


def _forall(variables: Sequence, f: Formula) -> Formula:
    for v in reversed(variables):
        f = Forall(v, f)
    return f


def em_atoms(
    interp: FiniteInterpretation, kept: Iterable[GroundAtom]
) -> list[Formula]:
    """Excluded-middle disjunctions for every true atom outside ``kept``."""
    kept_set = frozenset(kept)
    out = []
    for atom in sorted(atoms_of(interp) - kept_set, key=atom_sort_key):
        f = ground_atom_formula(atom, interp.signature)
        out.append(Or(f, neg(f)))
    return out


# ---------------------------------------------------------------------------
# stability of a single interpretation


def is_stable(
    interp: FiniteInterpretation,
    theory: Sequence[Statement],
    method: Method = "reduct",
) -> bool:
    """No proper subset of the true atoms HT-satisfies the theory."""
    sentences = theory_sentences(theory)
    return _stable(interp, sentences, removable=atoms_of(interp), method=method)


def is_lambda_stable(
    interp: FiniteInterpretation,
    theory: Sequence[Statement],
    lam: IntensionalityStatement,
    method: Method = "reduct",
) -> bool:
    sentences = theory_sentences(theory) + em_theory(lam)
    return _stable(interp, sentences, removable=atoms_of_lambda(interp, lam), method=method)


def is_a_stable(
    interp: FiniteInterpretation,
    theory: Sequence[Statement],
    kept: Iterable[GroundAtom],
    method: Method = "reduct",
) -> bool:
    """Stability relative to an explicit set of droppable ground atoms."""
    kept_set = frozenset(kept) & atoms_of(interp)
    sentences = theory_sentences(theory) + em_atoms(interp, kept_set)
    return _stable(interp, sentences, removable=kept_set, method=method)


def _stable(
    interp: FiniteInterpretation,
    sentences: list[Formula],
    removable: frozenset[GroundAtom],
    method: Method,
) -> bool:
    if method == "reduct":
        gfs = engine.ground_theory(interp, sentences)
        if any(not engine.eval_gf(g, interp.true_atoms) for g in gfs):
            return False
        stable, _ = engine.is_stable_ground(gfs, interp.true_atoms, removable)
        return stable
    if not satisfies_all(interp, sentences):
        return False
    true_atoms = atoms_of(interp)
    if method == "direct-restricted":
        region = sorted(removable & true_atoms, key=atom_sort_key)
        fixed = true_atoms - frozenset(region)
    elif method == "direct-full":
        region = sorted(true_atoms, key=atom_sort_key)
        fixed = frozenset()
    else:
        raise ValueError(f"unknown method {method!r}")
    for r in range(len(region) + 1):
        for chosen in itertools.combinations(region, r):
            here = fixed | frozenset(chosen)
            if here == true_atoms:
                continue
            if ht_satisfies_all(HTInterpretation(here, interp), sentences):
                return False
    return True


# ---------------------------------------------------------------------------
# enumeration


def enumerate_lambda_stable_models(
    theory: Sequence[Statement],
    lam: IntensionalityStatement,
    domains: Mapping[str, tuple[Element, ...]],
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> list[FiniteInterpretation]:
    """Every interpretation over the declared domains that is a stable model
    of the theory extended with the statement's excluded-middle sentences.

    The search space is restricted to atoms with a strictly positive
    occurrence in the ground theory; anything else is false in every such
    model.  Raises :class:`engine.ResourceCapExceeded` beyond ``atom_cap``
    candidate atoms.
    """
    signature = lam.signature
    structure = FiniteInterpretation.make(signature, domains)
    sentences = theory_sentences(theory) + em_theory(lam)
    gfs = engine.ground_theory(structure, sentences)

    region_gf: dict[GroundAtom, engine.GF] = {}
    for atom in atom_universe(signature, structure.domain_map()):
        pred, values = atom
        arg_sorts = signature.pred_arg_sorts(pred, len(values))
        names = tuple(DomainName(v, s) for v, s in zip(values, arg_sorts))
        condition = lam.condition((pred, len(values)), names)
        region_gf[atom] = engine.ground_formula(structure, condition)

    def region_of(atom: GroundAtom, true_atoms: frozenset[GroundAtom]) -> bool:
        return engine.eval_gf(region_gf[atom], true_atoms)

    models = engine.stable_models_ground(gfs, region_of, region_gf, atom_cap=atom_cap)
    return [structure.with_atoms(m) for m in models]


def enumerate_stable_models(
    theory: Sequence[Statement],
    signature: Signature,
    domains: Mapping[str, tuple[Element, ...]],
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> list[FiniteInterpretation]:
    """Stable models with every predicate intensional."""
    return enumerate_lambda_stable_models(theory, lambda_top(signature), domains, atom_cap)


# ---------------------------------------------------------------------------
# strong equivalence


@dataclass(frozen=True)
class StrongEquivalenceResult:
    """Bounded verdict: ``equivalent`` certifies agreement of the HT-models of
    the two extended theories over the checked domains only."""

    equivalent: bool
    counterexample: Optional[HTInterpretation]
    checked_domains: tuple[tuple[str, tuple[Element, ...]], ...]


def check_strong_equivalence(
    theory1: Sequence[Statement],
    theory2: Sequence[Statement],
    lam: IntensionalityStatement,
    domains: Mapping[str, tuple[Element, ...]],
    atom_cap: int = engine.DEFAULT_ATOM_CAP,
) -> StrongEquivalenceResult:
    """Compare the HT-models of the two theories extended with the
    excluded-middle sentences of the statement, over the declared domains."""
    signature = lam.signature
    structure = FiniteInterpretation.make(signature, domains)
    universe = atom_universe(signature, structure.domain_map())
    if len(universe) > atom_cap:
        raise engine.ResourceCapExceeded(
            f"strong-equivalence space has {len(universe)} atoms, cap is {atom_cap}"
        )
    em = em_theory(lam)
    gfs1 = engine.ground_theory(structure, theory_sentences(theory1) + em)
    gfs2 = engine.ground_theory(structure, theory_sentences(theory2) + em)

    space = engine.TableSpace(universe)
    t1 = space.theory_table(gfs1)
    t2 = space.theory_table(gfs2)
    domains_key = structure.domains

    diff = t1 ^ t2
    if diff:
        k = space.lowest_index(diff)
        there = structure.with_atoms(space.atoms_at(k))
        counter = HTInterpretation(atoms_of(there), there)
        return StrongEquivalenceResult(False, counter, domains_key)

    for k in space.indices(t1 & t2):
        true_atoms = space.atoms_at(int(k))
        r1 = [engine.reduct(g, true_atoms) for g in gfs1]
        r2 = [engine.reduct(g, true_atoms) for g in gfs2]
        mentioned: set[GroundAtom] = set()
        for r in r1 + r2:
            mentioned |= engine.gf_atoms(r)
        sub = engine.TableSpace(sorted(mentioned, key=atom_sort_key))
        s1 = sub.theory_table(r1)
        s2 = sub.theory_table(r2)
        if s1 != s2:
            j = sub.lowest_index(s1 ^ s2)
            here = sub.atoms_at(j) | (true_atoms - mentioned)
            there = structure.with_atoms(true_atoms)
            return StrongEquivalenceResult(
                False, HTInterpretation(frozenset(here), there), domains_key
            )
    return StrongEquivalenceResult(True, None, domains_key)
