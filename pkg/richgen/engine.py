"""
Bounded exhaustive checks of the axioms of an amalgamation class.
"""
from collections import Counter
from enum import Enum, unique

from . import ModelException
from .base import AmalgamationError, ClassSpec
from .morphisms import (
    PartialMorphism,
    empty_map,
    extends_embedding,
    identity,
    inclusion,
    is_partial_embedding,
    invert,
    morphism_to_json,
    restrict,
)
from .structures import StructureError, structure_to_json
from .utils import audited, partial_injections, subsets


class AxiomViolation(ModelException):
    """ A class specification is inconsistent with finite character. """

    pass


@unique
class Axiom(Enum):
    K2 = "K2"
    R = "R"
    Ap = "Ap"
    Jep = "Jep"
    FC = "FC"


@unique
class Verdict(Enum):
    Pass = "pass"
    Fail = "fail"


class Counterexample:
    """
    Instance on which an axiom fails.

    Parameters
    ----------
    structures : tuple of FinStructure
    maps : tuple of PartialMorphism
    reason : str
    """

    def __init__(self, structures, maps, reason):
        self.structures = tuple(structures)
        self.maps = tuple(maps)
        self.reason = reason

    def to_json(self):
        return {
            "reason": self.reason,
            "structures": [structure_to_json(M) for M in self.structures],
            "maps": [morphism_to_json(f) for f in self.maps],
        }

    def __repr__(self):
        return "<Counterexample: {}>".format(self.reason)


class AxiomReport:
    """
    Verdict of a bounded axiom check.

    Parameters
    ----------
    axiom : Axiom
    verdict : Verdict
    bound : int
        Size bound of the check.
    counterexample : Counterexample or None
        Present if and only if the verdict is a failure.
    checked : int, optional
        Number of instances examined.
    cases : dict, optional
        Number of instances examined per amalgamation construction.

    Raises
    ------
    ValueError : if the counterexample is inconsistent with the verdict.
    """

    def __init__(self, axiom, verdict, bound, counterexample=None, checked=0, cases=None):
        self.axiom = Axiom(axiom)
        self.verdict = Verdict(verdict)
        self.bound = bound
        self.counterexample = counterexample
        self.checked = checked
        self.cases = dict(cases or {})

        if (self.verdict is Verdict.Fail) != (counterexample is not None):
            raise ValueError("A counterexample must be given if and only if the verdict is a failure")

    @property
    def passed(self):
        return self.verdict is Verdict.Pass

    def to_json(self):
        return {
            "axiom": self.axiom.value,
            "verdict": self.verdict.value,
            "bound": self.bound,
            "checked": self.checked,
            "cases": dict(self.cases),
            "counterexample": None if self.counterexample is None else self.counterexample.to_json(),
        }

    def __repr__(self):
        return "<AxiomReport {}: {} at bound {}>".format(self.axiom.value, self.verdict.value, self.bound)


def _verify_amalgam(result, spec, f1, f2):
    N, h1, h2 = result
    problems = list()
    if not spec.is_member(N):
        problems.append("amalgam is not a member of {}".format(spec.name))
    for leg, h in (("first", h1), ("second", h2)):
        if not h.is_total():
            problems.append("{} leg is not total".format(leg))
        elif not spec.is_morphism(h):
            problems.append("{} leg is not a class morphism".format(leg))
    for x in f1.domain & f2.domain:
        if h1.get(f1(x)) != h2.get(f2(x)):
            problems.append("square does not commute at {}".format(x))
            break
    return problems


@audited(_verify_amalgam, exception=AmalgamationError)
def amalgamate(spec, f1, f2):
    """
    Amalgamate the class morphisms ``f1: M -> N1`` and ``f2: M -> N2``.

    Returns
    -------
    N : FinStructure
        Amalgam. It keeps the element ids of ``N1``; fresh elements take the least unused ids.
    h1, h2 : PartialMorphism
        Total class morphisms ``N1 -> N`` and ``N2 -> N`` with ``h1 f1`` and ``h2 f2``
        agreeing on the common domain of ``f1`` and ``f2``.

    Raises
    ------
    AmalgamationError : if the class cannot amalgamate this instance.
    """
    return spec.amalgamate(f1, f2)


def amalgam_failure(spec, f1, f2):
    """ Reason why amalgamating ``f1`` and ``f2`` fails or yields an unsound amalgam, or None. """
    try:
        result = spec.amalgamate(f1, f2)
    except AmalgamationError as e:
        return str(e)
    problems = _verify_amalgam(result, spec, f1, f2)
    return "; ".join(problems) if problems else None


def extend_to_strong_embedding(spec, f):
    """
    Extend the class morphism ``f: M -> N`` to a total class morphism into an
    extension of ``N``.

    Returns
    -------
    N2 : FinStructure
        Extension of ``N``.
    i : PartialMorphism
        Inclusion of ``N`` into ``N2``.
    h : PartialMorphism
        Total class morphism ``M -> N2`` extending ``i f``.
    """
    return amalgamate(spec, f, identity(f.source))


def is_strong_submodel(spec, M, N):
    """ Whether ``M`` is a substructure of ``N`` whose inclusion is a class morphism. """
    if not set(M.universe).issubset(N.universe):
        return False
    return spec.is_morphism(inclusion(M, N))


def is_chain_of_models(spec, chain):
    """ Whether every model of ``chain`` is a strong submodel of every later one. """
    chain = list(chain)
    return all(spec.is_member(M) for M in chain) and all(
        is_strong_submodel(spec, chain[i], chain[j]) for i in range(len(chain)) for j in range(i + 1, len(chain))
    )


def class_morphisms(spec, M, N, max_size=None):
    """
    Class morphisms ``M -> N``.

    Constants are pinned: every map sends each constant interpreted in ``M`` to the same
    constant of ``N``, and ``max_size`` bounds the number of other pairs. Maps are
    produced by increasing size, then in lexicographic order of their sorted graph.
    """
    pinned = dict()
    for name, x in M.const_interp.items():
        y = N.constant(name)
        if y is None:
            return
        pinned[x] = y
    if len(set(pinned.values())) != len(pinned):
        return

    start = PartialMorphism(M, N, pinned)
    if not is_partial_embedding(start):
        return

    sources = [x for x in M.universe if x not in pinned]
    targets = [y for y in N.universe if y not in start.image]
    max_size = len(sources) if max_size is None else max_size

    def grow(g, lowest, remaining):
        if remaining == 0:
            if spec.is_morphism(g):
                yield g
            return
        for i in range(lowest, len(sources)):
            x = sources[i]
            for y in targets:
                if y in g.image or not extends_embedding(g, x, y):
                    continue
                yield from grow(g.extended(x, y), i + 1, remaining - 1)

    for size in range(min(max_size, len(sources)) + 1):
        yield from grow(start, 0, size)


def _restrictions(f):
    """ Restrictions of ``f`` to every subset of its domain, constants included. """
    for part in subsets(sorted(f.domain)):
        yield restrict(f, part)


def check_closure_axioms(spec, k):
    """
    Bounded check of closure of class morphisms under inverses (K2) and restrictions (R).

    Every class morphism of size at most ``k`` between members of size at most ``k`` is examined.

    Returns
    -------
    k2, r : AxiomReport
    """
    if k < 1:
        raise ValueError("Bound must be at least 1, not {}".format(k))

    members = spec.members(k)
    instances = ((M, N, f) for M in members for N in members for f in class_morphisms(spec, M, N, k))
    k2 = r = None
    checked = 0
    for M, N, f in instances:
        checked += 1
        if k2 is None and not spec.is_morphism(invert(f)):
            k2 = Counterexample((M, N), (f,), "inverse of a class morphism is not a class morphism")
        if r is None:
            g = next((g for g in _restrictions(f) if not spec.is_morphism(g)), None)
            if g is not None:
                r = Counterexample((M, N), (f, g), "restriction of a class morphism is not a class morphism")
        if k2 is not None and r is not None:
            break

    return (
        AxiomReport(Axiom.K2, Verdict.Fail if k2 else Verdict.Pass, k, k2, checked),
        AxiomReport(Axiom.R, Verdict.Fail if r else Verdict.Pass, k, r, checked),
    )


def _ap_instances(spec, k, legs):
    members = spec.members(k)
    if legs == 1:
        for N1 in members:
            for N2 in members:
                for g in class_morphisms(spec, N1, N2, k):
                    yield (N1, N2), g, identity(N1)
        return
    for M in members:
        arrows = [f for N in members for f in class_morphisms(spec, M, N, k)]
        for f1 in arrows:
            for f2 in arrows:
                yield (M, f1.target, f2.target), f1, f2


def check_ap_bounded(spec, k, legs=2):
    """
    Bounded amalgamation audit.

    With two legs, every pair of class morphisms ``f1: M -> N1`` and ``f2: M -> N2`` of size
    at most ``k`` between members of size at most ``k`` is amalgamated. With one leg, every
    class morphism ``g: N1 -> N2`` is amalgamated with the identity of ``N1``, which reaches
    larger bounds at the same cost. The amalgam must be a member, both legs total class
    morphisms, and the square must commute.

    Parameters
    ----------
    spec : ClassSpec
    k : int
        Size bound.
    legs : {1, 2}, optional
        Number of partial legs of each instance.

    Returns
    -------
    report : AxiomReport
        Its ``cases`` count the instances by the construction ``spec.amalgam_case`` names.
    """
    if k < 1:
        raise ValueError("Bound must be at least 1, not {}".format(k))
    if legs not in (1, 2):
        raise ValueError("Number of legs must be 1 or 2, not {}".format(legs))

    checked = 0
    cases = Counter()
    for structures, f1, f2 in _ap_instances(spec, k, legs):
        checked += 1
        cases[spec.amalgam_case(f1, f2)] += 1
        reason = amalgam_failure(spec, f1, f2)
        if reason is not None:
            maps = (f1,) if legs == 1 else (f1, f2)
            example = Counterexample(structures, maps, reason)
            return AxiomReport(Axiom.Ap, Verdict.Fail, k, example, checked, cases)
    return AxiomReport(Axiom.Ap, Verdict.Pass, k, None, checked, cases)


def _joint_embedding_failure(spec, M1, M2, k):
    if spec.component_label(M1) == spec.component_label(M2):
        return amalgam_failure(spec, empty_map(M1, M2), identity(M1)), None
    for f in class_morphisms(spec, M1, M2, k):
        return "class morphism between different components", f
    return None, None


def check_jep_bounded(spec, k):
    """
    Bounded joint embedding audit. Members of size at most ``k`` with equal component labels
    must amalgamate over the empty map; members with different labels must admit no class
    morphism of size at most ``k``.
    """
    if k < 1:
        raise ValueError("Bound must be at least 1, not {}".format(k))

    members = spec.members(k)
    checked = 0
    for i, M1 in enumerate(members):
        for M2 in members[i:]:
            checked += 1
            reason, witness = _joint_embedding_failure(spec, M1, M2, k)
            if reason is not None:
                maps = (witness,) if witness is not None else tuple()
                return AxiomReport(Axiom.Jep, Verdict.Fail, k, Counterexample((M1, M2), maps, reason), checked)
    return AxiomReport(Axiom.Jep, Verdict.Pass, k, None, checked)


def finite_character_check(spec, f, M=None, N=None):
    """
    Whether ``f`` is a class morphism, asserting that this agrees with the conjunction of
    the verdicts on all restrictions of ``f``.

    Raises
    ------
    AxiomViolation : if the two verdicts differ.
    """
    verdict = spec.is_morphism(f, M, N)
    restrictions = all(spec.is_morphism(restrict(f, part)) for part in subsets(f.domain))
    if verdict != restrictions:
        raise AxiomViolation(
            "{} is {}a class morphism, but its restrictions {}".format(
                f, "" if verdict else "not ", "are not all morphisms" if verdict else "all are"
            )
        )
    return verdict


def check_fc_bounded(spec, k):
    """ Bounded finite character audit over all injective maps of size at most ``k`` between members. """
    if k < 1:
        raise ValueError("Bound must be at least 1, not {}".format(k))

    members = spec.members(k)
    checked = 0
    for M in members:
        for N in members:
            for mapping in partial_injections(M.free_elements, N.free_elements, k):
                f = PartialMorphism(M, N, mapping)
                checked += 1
                try:
                    finite_character_check(spec, f)
                except AxiomViolation as e:
                    return AxiomReport(Axiom.FC, Verdict.Fail, k, Counterexample((M, N), (f,), str(e)), checked)
    return AxiomReport(Axiom.FC, Verdict.Pass, k, None, checked)


def connected_component(spec, M):
    """
    Component label of the member ``M``.

    Raises
    ------
    StructureError : if ``M`` is not a member.
    """
    if not spec.is_member(M):
        raise StructureError("Structure must be a member of {}".format(spec.name))
    return spec.component_label(M)


class RestrictionClosure(ClassSpec):
    """
    Class with the members of ``spec`` whose morphisms are the restrictions of
    morphisms of ``spec``. This repairs a class whose morphisms are not closed
    under restriction.
    """

    def __init__(self, spec):
        super().__init__(spec.sig)
        self.spec = spec
        self.name = "restrictions-of-{}".format(spec.name)
        self.hereditary = spec.hereditary

    def is_member(self, M):
        return self.spec.is_member(M)

    def is_morphism(self, f, M=None, N=None):
        if self.spec.is_morphism(f, M, N):
            return True
        sources = [x for x in f.source.universe if x not in f]
        targets = [y for y in f.target.universe if y not in f.image]

        def grow(g, lowest):
            for i in range(lowest, len(sources)):
                for y in targets:
                    if y in g.image:
                        continue
                    h = g.extended(sources[i], y)
                    if self.spec.is_morphism(h) or grow(h, i + 1):
                        return True
            return False

        return grow(f, 0)

    def amalgamate(self, f1, f2):
        return self.spec.amalgamate(f1, f2)

    def amalgam_case(self, f1, f2):
        return self.spec.amalgam_case(f1, f2)

    def component_label(self, M):
        return self.spec.component_label(M)

    def size(self, M):
        return self.spec.size(M)

    def base_members(self):
        return self.spec.base_members()

    def one_point_extensions(self, M):
        return self.spec.one_point_extensions(M)


def replay_counterexample(spec, report):
    """
    Re-evaluate the counterexample of a failed report.

    Returns
    -------
    fails : bool
        True if the recorded instance still violates the axiom.
    """
    if report.passed:
        return False
    example = report.counterexample
    if report.axiom is Axiom.K2:
        (f,) = example.maps
        return spec.is_morphism(f) and not spec.is_morphism(invert(f))
    if report.axiom is Axiom.R:
        f, g = example.maps
        return spec.is_morphism(f) and g.source == f.source and f.extends(g) and not spec.is_morphism(g)
    if report.axiom is Axiom.Ap:
        if len(example.maps) == 1:
            (g,) = example.maps
            return amalgam_failure(spec, g, identity(g.source)) is not None
        f1, f2 = example.maps
        return amalgam_failure(spec, f1, f2) is not None
    if report.axiom is Axiom.Jep:
        M1, M2 = example.structures
        if example.maps:
            return spec.is_morphism(example.maps[0]) and spec.component_label(M1) != spec.component_label(M2)
        return amalgam_failure(spec, empty_map(M1, M2), identity(M1)) is not None
    (f,) = example.maps
    try:
        finite_character_check(spec, f)
    except AxiomViolation:
        return True
    return False
