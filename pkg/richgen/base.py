from abc import ABCMeta, abstractmethod
from functools import lru_cache, wraps
from itertools import combinations, product
from types import FunctionType

from . import ModelException
from .canonical import canonical_form
from .morphisms import MorphismError, PartialMorphism, extends_embedding, is_partial_embedding
from .structures import FinStructure, StructureError
from .utils import least_unused


class AmalgamationError(ModelException):
    """ A class-specific amalgamation failure. Checkers report it as a failed verdict. """

    pass


def amalgamation_guard(func):
    """ Wraps ``func`` so that structure or map errors surface as ``AmalgamationError``. """

    @wraps(func)
    def new_func(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (StructureError, MorphismError) as e:
            raise AmalgamationError("Amalgam could not be assembled: {}".format(e)) from e

    return new_func


class MetaClassSpec(ABCMeta):
    """
    Metaclass that wraps ``amalgamate`` so that StructureError and MorphismError
    are raised as AmalgamationError. Classes that override ``is_morphism`` are
    flagged as having morphisms other than plain partial embeddings.
    """

    def __init__(self, clsname, bases, clsdict):
        super().__init__(clsname, bases, clsdict)

        value = clsdict.get("amalgamate")
        if isinstance(value, FunctionType):
            setattr(self, "amalgamate", amalgamation_guard(value))

        if "is_morphism" in clsdict and "morphisms_are_embeddings" not in clsdict:
            self.morphisms_are_embeddings = False


class ComponentLabel:
    """
    Discrete invariant of a connected component.

    Labels compare by ``value`` only; ``kind`` records which condition produced the label.
    """

    __slots__ = ("value", "kind")

    def __init__(self, value, kind="connected"):
        self.value = value
        self.kind = kind

    def __eq__(self, other):
        if not isinstance(other, ComponentLabel):
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return "{} ({})".format(self.value, self.kind)

    def __repr__(self):
        return "ComponentLabel({!r}, {!r})".format(self.value, self.kind)


class ClassSpec(metaclass=MetaClassSpec):
    """
    Abstract inductive amalgamation class, represented by its finite members.

    Subclasses must implement ``is_member``. The default morphisms are the partial
    embeddings, the default amalgamation is the free amalgam, and the class is
    connected.

    Parameters
    ----------
    sig : Signature
        Signature of the members.
    """

    name = "abstract"

    # Substructures of members are members; enumeration prunes non-members early.
    hereditary = True

    # Class morphisms are exactly the partial embeddings.
    morphisms_are_embeddings = True

    def __init__(self, sig):
        self.sig = sig
        self._members = dict()

    def __repr__(self):
        return "<{} {}>".format(type(self).__name__, self.name)

    @abstractmethod
    def is_member(self, M):
        """ Whether ``M`` is a legal stage approximation of a model. """
        pass

    def is_morphism(self, f, M=None, N=None):
        """ Whether ``f`` is a class morphism. Defaults to partial embeddings. """
        return is_partial_embedding(f, M, N)

    def admits(self, f, x, y):
        """
        Whether the class morphism ``f`` extended by ``x -> y`` is a class morphism.
        Used to prune searches.
        """
        if not extends_embedding(f, x, y):
            return False
        return self.morphisms_are_embeddings or self.is_morphism(f.extended(x, y))

    def amalgamate(self, f1, f2):
        """
        Amalgamate ``f1: M -> N1`` and ``f2: M -> N2``.

        Returns
        -------
        N : FinStructure
            Amalgam, which keeps the element ids of ``N1``.
        h1, h2 : PartialMorphism
            Total maps ``N1 -> N`` (the inclusion) and ``N2 -> N``.

        Raises
        ------
        AmalgamationError : if the instance cannot be amalgamated.
        """
        return free_amalgam(f1, f2)

    def amalgam_case(self, f1, f2):
        """ Name of the construction that ``amalgamate`` applies to ``f1`` and ``f2``. """
        return "free"

    def component_label(self, M):
        return ComponentLabel(self.name, "connected")

    def size(self, M):
        """ Number of elements that interpret no constant. """
        return len(M) - len(M.constant_elements)

    def base_members(self):
        """ Structures consisting of the constants only, from which members are grown. """
        consts = self.sig.constants
        return [FinStructure(self.sig, range(len(consts)), constants={c: i for i, c in enumerate(consts)})]

    def one_point_extensions(self, M):
        """
        Every structure obtained from ``M`` by adding one element, with the least
        unused id, together with any combination of new atoms that mention it.
        """
        (new,) = least_unused(M.universe, 1)
        elements = M.universe + (new,)

        relation_options = list()
        for name, arity in self.sig.relations:
            fresh = [t for t in product(elements, repeat=arity) if new in t]
            relation_options.append(
                [(name, combo) for size in range(len(fresh) + 1) for combo in combinations(fresh, size)]
            )

        bijection_options = list()
        for name in self.sig.bijections:
            graph = dict(M.bij_interp[name])
            free_images = [y for y in M.universe if y not in graph.values()]
            free_sources = [x for x in M.universe if x not in graph]
            options = [(name, dict())]
            options.append((name, {new: new}))
            options.extend((name, {new: y}) for y in free_images)
            options.extend((name, {x: new}) for x in free_sources)
            options.extend((name, {new: y, x: new}) for y in free_images for x in free_sources)
            bijection_options.append(options)

        for rels in product(*relation_options):
            relations = {name: set(tuples) for name, tuples in M.rel_interp.items()}
            for name, combo in rels:
                relations[name] |= set(combo)
            for bijs in product(*bijection_options):
                bijections = {name: dict(g) for name, g in M.bij_interp.items()}
                for name, extra in bijs:
                    bijections[name].update(extra)
                yield FinStructure(self.sig, elements, relations, dict(M.const_interp), bijections)

    def extensions(self, base, fresh):
        """
        Structures extending ``base`` by ``fresh`` new elements, up to isomorphism over ``base``.
        When the class is hereditary, intermediate non-members are pruned.
        """
        fixed = base.universe
        level = [base]
        for _ in range(fresh):
            seen = dict()
            for M in level:
                for N in self.one_point_extensions(M):
                    if self.hereditary and not self.is_member(N):
                        continue
                    seen.setdefault(canonical_form(N, fixed), N)
            level = [seen[label] for label in sorted(seen)]
        return level

    @lru_cache(maxsize=4096)
    def extension_types(self, base, fresh):
        """
        Members extending ``base`` by exactly ``fresh`` new elements, up to isomorphism
        over ``base``, as ``(label, structure)`` pairs sorted by label.
        """
        fixed = base.universe
        found = list()
        for N in self.extensions(base, fresh):
            if self.is_member(N):
                found.append((canonical_form(N, fixed), N))
        return tuple(sorted(found, key=lambda pair: pair[0]))

    def members(self, bound):
        """
        Members of size at most ``bound``, up to isomorphism, sorted by size then canonical label.
        """
        if bound not in self._members:
            found = list()
            for base in self.base_members():
                for fresh in range(bound + 1):
                    found.extend((fresh, label, N) for label, N in self.extension_types(base, fresh))
            found.sort(key=lambda item: item[:2])
            self._members[bound] = [N for _, _, N in found]
        return list(self._members[bound])

    def random_seed(self, rng, size=2):
        """
        Member of size ``size`` drawn uniformly among isomorphism types.

        Parameters
        ----------
        rng : `~numpy.random.Generator`
        size : int, optional
        """
        candidates = [M for M in self.members(size) if self.size(M) == size]
        if not candidates:
            raise ValueError("{} has no member of size {}".format(self.name, size))
        return candidates[int(rng.integers(len(candidates)))]

    def default_seed(self):
        """ Seed of builds when none is given: the smallest member. """
        return self.members(0)[0] if self.members(0) else self.members(1)[0]


def _closure(pairs, N1, N2):
    """
    Close the identification ``pairs`` (N2 element -> N1 element) under every
    bijection and its inverse, wherever both sides define them.
    """
    pairs = dict(pairs)
    queue = list(pairs.items())
    while queue:
        b, a = queue.pop()
        for name in N1.sig.bijections:
            for step2, step1 in ((N2.apply, N1.apply), (N2.preimage, N1.preimage)):
                bb, aa = step2(name, b), step1(name, a)
                if bb is None or aa is None:
                    continue
                if bb in pairs:
                    if pairs[bb] != aa:
                        raise AmalgamationError("Identification of {} is ambiguous".format(bb))
                    continue
                pairs[bb] = aa
                queue.append((bb, aa))
    if len(set(pairs.values())) != len(pairs):
        raise AmalgamationError("Identification is not injective")
    return pairs


def free_amalgam(f1, f2):
    """
    Free amalgam of ``f1: M -> N1`` and ``f2: M -> N2``: the union of ``N1`` and ``N2``
    where ``f2(x)`` is identified with ``f1(x)`` for ``x`` in both domains, constants
    are identified by name, and the identification is closed under bijections.
    No relation tuple is added beyond those of the two sides.

    The amalgam keeps the element ids of ``N1``; other elements of ``N2`` take the
    least unused ids, in increasing order.

    Raises
    ------
    MorphismError : if ``f1`` and ``f2`` do not share their source.
    AmalgamationError : if the identification or the union of bijections is not injective.
    """
    if f1.source != f2.source:
        raise MorphismError("Maps to amalgamate must have a common source")
    N1, N2 = f1.target, f2.target

    pairs = {f2(x): f1(x) for x in f1.domain & f2.domain}
    for name, a in N1.const_interp.items():
        b = N2.constant(name)
        if b is not None:
            if pairs.get(b, a) != a:
                raise AmalgamationError("Constant {} is identified with two elements".format(name))
            pairs[b] = a
    pairs = _closure(pairs, N1, N2)

    others = [b for b in N2.universe if b not in pairs]
    h2 = dict(pairs)
    h2.update(zip(others, least_unused(N1.universe, len(others))))

    relations = {name: set(tuples) for name, tuples in N1.rel_interp.items()}
    for name, tuples in N2.rel_interp.items():
        relations[name] |= {tuple(h2[x] for x in t) for t in tuples}

    constants = dict(N1.const_interp)
    for name, b in N2.const_interp.items():
        constants.setdefault(name, h2[b])

    bijections = dict()
    for name in N1.sig.bijections:
        graph = dict(N1.bij_interp[name])
        for x, y in N2.bij_interp[name].items():
            x, y = h2[x], h2[y]
            if graph.get(x, y) != y:
                raise AmalgamationError("{} is defined twice at {}".format(name, x))
            graph[x] = y
        if len(set(graph.values())) != len(graph):
            raise AmalgamationError("Union of {} is not injective".format(name))
        bijections[name] = graph

    N = FinStructure(N1.sig, list(N1.universe) + list(h2[b] for b in others), relations, constants, bijections)
    h1 = PartialMorphism._trusted(N1, N, {x: x for x in N1.universe})
    return N, h1, PartialMorphism._trusted(N2, N, h2)
