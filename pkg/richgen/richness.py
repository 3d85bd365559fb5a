"""
Bounded checks of richness, back-and-forth extension, homogeneity and elementary
equivalence up to a number of rounds.
"""
from .builder import enumerate_tasks
from .canonical import refine
from .engine import class_morphisms
from .morphisms import MorphismError, PartialMorphism, find_total_extension, local_type
from .structures import induced_substructure


class RichnessReport:
    """
    Coverage of the extension tasks of a structure.

    Attributes
    ----------
    total : int
        Number of tasks examined.
    covered : int
        Number of tasks realized by a total class morphism.
    first_uncovered : ExtensionTask or None
        Least task that is not realized.
    """

    def __init__(self, total, covered, first_uncovered, src_bound, anchor_set):
        self.total = total
        self.covered = covered
        self.first_uncovered = first_uncovered
        self.src_bound = src_bound
        self.anchor_set = tuple(anchor_set)

    @property
    def coverage(self):
        return 1.0 if self.total == 0 else self.covered / self.total

    @property
    def passed(self):
        return self.covered == self.total

    def to_json(self):
        first = self.first_uncovered
        return {
            "coverage": self.coverage,
            "total": self.total,
            "covered": self.covered,
            "src_bound": self.src_bound,
            "anchor_set": list(self.anchor_set),
            "first_uncovered": None
            if first is None
            else {"size": first.size, "anchor": [list(pair) for pair in first.anchor.graph]},
        }

    def __repr__(self):
        return "<RichnessReport: coverage {:.3f} of {} tasks>".format(self.coverage, self.total)


def richness_check(spec, U, src_bound, anchor_set=None):
    """
    Search, for every extension task ``(M, f)`` into ``U`` with ``M`` of size at most
    ``src_bound`` and ``f`` anchored in ``anchor_set``, a total class morphism ``h: M -> U``
    extending ``f``.

    Parameters
    ----------
    spec : ClassSpec
    U : FinStructure
        Member of the class.
    src_bound : int
        Largest size of task sources.
    anchor_set : iterable of int or None, optional
        Elements on which anchors may be defined, besides the constants. Default is every
        element that interprets no constant.

    Returns
    -------
    report : RichnessReport
    """
    anchor_set = U.free_elements if anchor_set is None else tuple(sorted(anchor_set))
    tasks = enumerate_tasks(spec, U, src_bound, src_bound - 1, anchor_set=anchor_set)
    covered = 0
    first_uncovered = None
    for task in tasks:
        if find_total_extension(spec, task.anchor) is not None:
            covered += 1
        elif first_uncovered is None:
            first_uncovered = task
    return RichnessReport(len(tasks), covered, first_uncovered, src_bound, anchor_set)


class BackAndForthResult:
    """
    Outcome of a back-and-forth extension.

    Attributes
    ----------
    morphism : PartialMorphism
        Extended map.
    failure : int or None
        Element that could not be matched, if any.
    side : str or None
        ``"forth"`` if ``failure`` is in the source, ``"back"`` if it is in the target.
    """

    def __init__(self, morphism, failure=None, side=None):
        self.morphism = morphism
        self.failure = failure
        self.side = side

    @property
    def succeeded(self):
        return self.failure is None

    def __repr__(self):
        if self.succeeded:
            return "<BackAndForthResult: {} pairs>".format(len(self.morphism))
        return "<BackAndForthResult: {} unmatched ({})>".format(self.failure, self.side)


def _joint_colours(f):
    U, V = f.source, f.target
    index = {x: i for i, (x, _) in enumerate(f.graph)}
    back = {y: index[x] for x, y in f.graph}
    cu, cv = refine(
        (U, {x: (index.get(x, -1), U.constants_at(x)) for x in U.universe}),
        (V, {y: (back.get(y, -1), V.constants_at(y)) for y in V.universe}),
    )
    return cu, cv


def back_and_forth_extend(spec, U, V, f, rounds=None, region=None):
    """
    Extend the class morphism ``f: U -> V`` by back-and-forth.

    Each round matches the least unmatched element of ``U`` (forth), then the least
    unmatched element of ``V`` (back). A witness must extend the map to a class morphism.
    Without a ``region``, witnesses whose colour in a joint colour refinement of ``U`` and
    ``V`` (matched pairs individualized) equals that of the element being matched are
    preferred; ties go to the least id. This deliberately departs from choosing the least
    admissible id. With a ``region``, witnesses inside the region are preferred, then the
    least id.

    Parameters
    ----------
    spec : ClassSpec
    U, V : FinStructure
    f : PartialMorphism
        Class morphism from ``U`` to ``V``.
    rounds : int or None, optional
        Number of rounds. Default is as many as needed.
    region : iterable of int or None, optional
        If given, only elements of ``region`` are pursued on both sides.

    Returns
    -------
    result : BackAndForthResult

    Raises
    ------
    MorphismError : if ``f`` is not a map from ``U`` to ``V``.
    ValueError : if ``rounds`` is negative.
    """
    if f.source != U or f.target != V:
        raise MorphismError("Map must go from the first structure to the second")
    if rounds is not None and rounds < 0:
        raise ValueError("Number of rounds must be non-negative, not {}".format(rounds))

    region = None if region is None else frozenset(region)
    left = [x for x in U.universe if region is None or x in region]
    right = [y for y in V.universe if region is None or y in region]

    def rank(candidates, colour, colours):
        if region is not None:
            return min(candidates, key=lambda z: (z not in region, z))
        if len(candidates) == 1:
            return candidates[0]
        return min(candidates, key=lambda z: (colours[z] != colour, z))

    done = 0
    while rounds is None or done < rounds:
        progressed = False

        x = next((x for x in left if x not in f), None)
        if x is not None:
            candidates = [y for y in V.universe if y not in f.image and spec.admits(f, x, y)]
            if not candidates:
                return BackAndForthResult(f, x, "forth")
            cu, cv = _joint_colours(f) if region is None and len(candidates) > 1 else ({}, {})
            f = f.extended(x, rank(candidates, cu.get(x), cv))
            progressed = True

        y = next((y for y in right if y not in f.image), None)
        if y is not None:
            candidates = [x for x in U.universe if x not in f and spec.admits(f, x, y)]
            if not candidates:
                return BackAndForthResult(f, y, "back")
            cu, cv = _joint_colours(f) if region is None and len(candidates) > 1 else ({}, {})
            f = f.extended(rank(candidates, cv.get(y), cu), y)
            progressed = True

        if not progressed:
            break
        done += 1

    return BackAndForthResult(f)


class HomogeneityReport:
    """
    Fraction of small class morphisms supported in a core region that extend to
    maps total and onto the core.
    """

    def __init__(self, total, extendable, first_failure, core, map_size):
        self.total = total
        self.extendable = extendable
        self.first_failure = first_failure
        self.core = tuple(core)
        self.map_size = map_size

    @property
    def fraction(self):
        return 1.0 if self.total == 0 else self.extendable / self.total

    @property
    def passed(self):
        return self.extendable == self.total

    def to_json(self):
        return {
            "fraction": self.fraction,
            "total": self.total,
            "extendable": self.extendable,
            "core": list(self.core),
            "map_size": self.map_size,
            "first_failure": None if self.first_failure is None else [list(p) for p in self.first_failure.graph],
        }

    def __repr__(self):
        return "<HomogeneityReport: {:.3f} of {} maps>".format(self.fraction, self.total)


def homogeneity_check(spec, U, map_size=1, rounds=None, core=None):
    """
    For every class morphism ``f: U -> U`` with at most ``map_size`` pairs outside the
    constants and support in the ``core``, extend ``f`` by back-and-forth within the core.

    Parameters
    ----------
    spec : ClassSpec
    U : FinStructure
    map_size : int, optional
    rounds : int or None, optional
        Rounds of back-and-forth. Default is as many as needed.
    core : iterable of int or None, optional
        Core region. Default is the eight least elements that interpret no constant.

    Returns
    -------
    report : HomogeneityReport
    """
    if map_size >= len(U):
        raise ValueError("Map size must be smaller than the structure, not {}".format(map_size))
    core = U.free_elements[:8] if core is None else tuple(sorted(core))
    region = set(core)
    C = induced_substructure(U, region | U.constant_elements)

    total = extendable = 0
    first_failure = None
    for g in class_morphisms(spec, C, C, map_size):
        f = PartialMorphism(U, U, g.mapping)
        if not spec.is_morphism(f):
            continue
        total += 1
        result = back_and_forth_extend(spec, U, U, f, rounds, region=region)
        h = result.morphism
        if region.issubset(h.domain) and region.issubset(h.image):
            extendable += 1
        elif first_failure is None:
            first_failure = f
    return HomogeneityReport(total, extendable, first_failure, core, map_size)


def ef_equivalence(U, V, rounds):
    """
    Whether the duplicator survives ``rounds`` rounds of the back-and-forth game between
    ``U`` and ``V``. Constants are pebbled before the game starts. The game tree is searched
    exhaustively, with positions memoized as sets of pebbled pairs.

    Raises
    ------
    ValueError : if ``rounds`` is negative.
    """
    if rounds < 0:
        raise ValueError("Number of rounds must be non-negative, not {}".format(rounds))
    if U.sig != V.sig:
        return False

    names = U.sig.constants
    if any((U.constant(c) is None) != (V.constant(c) is None) for c in names):
        return False
    start_u = tuple(U.constant(c) for c in names if U.constant(c) is not None)
    start_v = tuple(V.constant(c) for c in names if V.constant(c) is not None)
    for i in range(len(start_u)):
        if local_type(U, start_u[:i], start_u[i]) != local_type(V, start_v[:i], start_v[i]):
            return False

    realized = dict()
    memo = dict()

    def types(M, side, pebbles):
        key = (side, pebbles)
        if key not in realized:
            table = dict()
            for z in M.universe:
                table.setdefault(local_type(M, pebbles, z), list()).append(z)
            realized[key] = table
        return realized[key]

    def duplicator_wins(pa, pb, remaining):
        if remaining == 0:
            return True
        pairs = sorted(set(zip(pa, pb)))
        pa, pb = tuple(a for a, _ in pairs), tuple(b for _, b in pairs)
        key = (pa, pb, remaining)
        if key in memo:
            return memo[key]

        ta, tb = types(U, 0, pa), types(V, 1, pb)
        if remaining == 1:
            outcome = set(ta) == set(tb)
        else:
            outcome = True
            for mine, theirs, forth in ((ta, tb, True), (tb, ta, False)):
                for tp, elements in mine.items():
                    answers = theirs.get(tp, ())
                    for z in elements:
                        if forth:
                            ok = any(duplicator_wins(pa + (z,), pb + (w,), remaining - 1) for w in answers)
                        else:
                            ok = any(duplicator_wins(pa + (w,), pb + (z,), remaining - 1) for w in answers)
                        if not ok:
                            outcome = False
                            break
                    if not outcome:
                        break
                if not outcome:
                    break
        memo[key] = outcome
        return outcome

    return duplicator_wins(start_u, start_v, rounds)
