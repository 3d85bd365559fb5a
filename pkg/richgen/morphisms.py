"""
Partial maps between finite structures, and the quantifier-free checks on them.
"""
from enum import Enum, unique
from types import MappingProxyType

from . import ModelException
from .structures import structure_from_json, structure_to_json


class MorphismError(ModelException, ValueError):
    """ Map inconsistent with the structures it is used with. """

    pass


@unique
class AtomKind(Enum):
    Relation = "relation"
    Equality = "equality"
    Constant = "constant"
    BijectionEdge = "bijection-edge"


class QfAtom:
    """
    Atomic fact about elements of a structure.

    Parameters
    ----------
    kind : AtomKind
    symbol : str or None
        Relation, constant or bijection name. None for equality.
    terms : tuple
        Arguments of the atom; their number must match the symbol.
    """

    __slots__ = ("kind", "symbol", "terms")

    def __init__(self, kind, symbol, terms):
        self.kind = AtomKind(kind)
        self.symbol = symbol
        self.terms = tuple(terms)

        expected = {AtomKind.Equality: 2, AtomKind.Constant: 1, AtomKind.BijectionEdge: 2}
        if self.kind in expected and len(self.terms) != expected[self.kind]:
            raise ValueError(
                "{} atom must have {} terms, not {}".format(self.kind.value, expected[self.kind], len(self.terms))
            )

    def mapped(self, mapping):
        """ Image of the atom under ``mapping``. """
        return QfAtom(self.kind, self.symbol, (mapping[t] for t in self.terms))

    def _key(self):
        return (self.kind.value, self.symbol or "", self.terms)

    def __eq__(self, other):
        if not isinstance(other, QfAtom):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "QfAtom({}, {}, {})".format(self.kind.value, self.symbol, self.terms)


def atoms(M, elements, involving=None):
    """
    True relation, constant and bijection-edge atoms of ``M`` whose terms all lie in ``elements``.

    Parameters
    ----------
    M : FinStructure
    elements : set of int
    involving : int or None, optional
        If given, only atoms mentioning this element are returned.

    Returns
    -------
    facts : set of QfAtom
    """
    elements = elements if isinstance(elements, (set, frozenset)) else set(elements)
    sources = elements if involving is None else (involving,)
    facts = set()
    for x in sources:
        if x not in elements:
            continue
        for name, t in M.incident(x):
            if elements.issuperset(t):
                facts.add(QfAtom(AtomKind.Relation, name, t))
        for name in M.constants_at(x):
            facts.add(QfAtom(AtomKind.Constant, name, (x,)))
        for name in M.sig.bijections:
            y = M.apply(name, x)
            if y is not None and y in elements:
                facts.add(QfAtom(AtomKind.BijectionEdge, name, (x, y)))
            w = M.preimage(name, x)
            if w is not None and w in elements:
                facts.add(QfAtom(AtomKind.BijectionEdge, name, (w, x)))
    return facts


class PartialMorphism:
    """
    Map as a triple: a source structure, a target structure, and an injective partial
    function between their universes.

    Parameters
    ----------
    source : FinStructure
    target : FinStructure
    mapping : dict or iterable of pairs
        Injective partial function from the universe of ``source`` to the universe of ``target``.

    Raises
    ------
    MorphismError : if the function is not injective, or mentions elements outside the structures.
    """

    def __init__(self, source, target, mapping=None):
        mapping = dict(mapping or dict())
        mapping = {int(x): int(y) for x, y in mapping.items()}
        if len(set(mapping.values())) != len(mapping):
            raise MorphismError("Maps must be injective, not {}".format(sorted(mapping.items())))
        for x, y in mapping.items():
            if x not in source:
                raise MorphismError("{} is not an element of the source structure".format(x))
            if y not in target:
                raise MorphismError("{} is not an element of the target structure".format(y))
        self._init(source, target, mapping)

    def _init(self, source, target, mapping):
        self._source = source
        self._target = target
        self._map = mapping
        self._graph = None

    @classmethod
    def _trusted(cls, source, target, mapping):
        """ Build a map without validation. ``mapping`` must be an injective dict owned by the map. """
        f = cls.__new__(cls)
        f._init(source, target, mapping)
        return f

    @property
    def source(self):
        return self._source

    @property
    def target(self):
        return self._target

    @property
    def mapping(self):
        return MappingProxyType(self._map)

    @property
    def domain(self):
        """ Domain of definition. """
        return frozenset(self._map)

    @property
    def image(self):
        """ Range of the map. """
        return frozenset(self._map.values())

    @property
    def graph(self):
        """ Pairs ``(x, f(x))`` sorted by source element. """
        if self._graph is None:
            self._graph = tuple(sorted(self._map.items()))
        return self._graph

    def get(self, x, default=None):
        return self._map.get(x, default)

    def __call__(self, x):
        return self._map[x]

    def __contains__(self, x):
        return x in self._map

    def __len__(self):
        return len(self._map)

    def is_total(self):
        return len(self._map) == len(self._source)

    def is_surjective(self):
        return len(self._map) == len(self._target)

    def extended(self, x, y):
        """ The map extended by ``x -> y``. """
        if x in self._map:
            if self._map[x] == y:
                return self
            raise MorphismError("{} is already mapped to {}".format(x, self._map[x]))
        if y in self.image:
            raise MorphismError("{} is already in the image".format(y))
        if x not in self._source or y not in self._target:
            raise MorphismError("Pair {} -> {} is not over the structures".format(x, y))
        mapping = dict(self._map)
        mapping[x] = y
        return PartialMorphism._trusted(self._source, self._target, mapping)

    def retarget(self, target):
        """ Same function, with a new target structure that contains its image. """
        return PartialMorphism(self._source, target, self._map)

    def extends(self, other):
        """ Whether the graph of ``other`` is contained in the graph of this map. """
        return all(self._map.get(x) == y for x, y in other._map.items())

    def __eq__(self, other):
        if not isinstance(other, PartialMorphism):
            return NotImplemented
        return self._map == other._map and self._source == other._source and self._target == other._target

    def __hash__(self):
        return hash((self.graph, self._source, self._target))

    def __repr__(self):
        return "<PartialMorphism {}>".format(
            "{" + ", ".join("{}->{}".format(x, y) for x, y in self.graph) + "}"
        )


def identity(M):
    """ Identity map on ``M``. """
    return PartialMorphism._trusted(M, M, {x: x for x in M.universe})


def inclusion(M, N):
    """ Inclusion of ``M`` into a structure ``N`` whose universe contains that of ``M``. """
    return PartialMorphism(M, N, {x: x for x in M.universe})


def empty_map(M, N):
    return PartialMorphism._trusted(M, N, dict())


def _check_references(f, M, N):
    if M is not None and M != f.source:
        raise MorphismError("Map does not have the supplied source structure")
    if N is not None and N != f.target:
        raise MorphismError("Map does not have the supplied target structure")


def is_partial_embedding(f, M=None, N=None):
    """
    Whether ``f`` preserves and reflects every atomic fact over its domain of definition:
    relation tuples, constant assignments and bijection edges. Equality is
    handled by injectivity.

    Parameters
    ----------
    f : PartialMorphism
    M, N : FinStructure, optional
        Source and target structures. If given, they must be those of ``f``.

    Raises
    ------
    MorphismError : if ``M`` or ``N`` are not the structures of ``f``.
    """
    _check_references(f, M, N)
    mapped = {atom.mapped(f.mapping) for atom in atoms(f.source, f.domain)}
    return mapped == atoms(f.target, f.image)


def extends_embedding(f, x, y):
    """
    Whether ``f`` extended by ``x -> y`` is a partial embedding, given that ``f`` is one.
    Only atoms that mention ``x`` (resp. ``y``) are compared.
    """
    if x in f or y in f.image:
        return f.get(x) == y
    mapping = dict(f.mapping)
    mapping[x] = y
    left = {atom.mapped(mapping) for atom in atoms(f.source, set(mapping), involving=x)}
    right = atoms(f.target, set(mapping.values()), involving=y)
    return left == right


def is_isomorphism(f, M=None, N=None):
    """ Whether ``f`` is total, surjective and a partial embedding. """
    _check_references(f, M, N)
    return f.is_total() and f.is_surjective() and is_partial_embedding(f)


def compose(g, f):
    """
    The map ``x -> g(f(x))``, defined wherever both legs are.

    Raises
    ------
    MorphismError : if the target of ``f`` is not the source of ``g``.
    """
    if f.target != g.source:
        raise MorphismError("Cannot compose: target of the first map is not the source of the second")
    mapping = {x: g(y) for x, y in f.mapping.items() if y in g}
    return PartialMorphism._trusted(f.source, g.target, mapping)


def invert(f):
    """ Inverse of ``f``, from its target to its source. """
    return PartialMorphism._trusted(f.target, f.source, {y: x for x, y in f.mapping.items()})


def restrict(f, elements):
    """ Restriction of ``f`` to ``elements`` (intersected with the domain of definition). """
    elements = set(elements)
    return PartialMorphism._trusted(
        f.source, f.target, {x: y for x, y in f.mapping.items() if x in elements}
    )


def union_of_chain(fs):
    """
    Union of a chain of maps, each extending the previous one.

    Raises
    ------
    MorphismError : if the chain is empty, the structures differ, or a map does not extend its predecessor.
    """
    fs = list(fs)
    if not fs:
        raise MorphismError("Chain of maps must not be empty")
    for previous, current in zip(fs, fs[1:]):
        if current.source != previous.source or current.target != previous.target:
            raise MorphismError("Maps of a chain must share their source and target structures")
        if not current.extends(previous):
            raise MorphismError("{} does not extend {}".format(current, previous))
    mapping = dict()
    for f in fs:
        mapping.update(f.mapping)
    return PartialMorphism._trusted(fs[0].source, fs[0].target, mapping)


def find_total_extension(spec, f, M=None, N=None):
    """
    Least total class morphism extending ``f``, or None if there is none.

    Unmapped elements of the source are assigned in increasing order, and candidate
    images are tried in increasing order, so the witness returned is the least one
    in the lexicographic order of graphs.

    Parameters
    ----------
    spec : ClassSpec
    f : PartialMorphism
    M, N : FinStructure, optional
        Source and target of ``f``, checked if given.
    """
    _check_references(f, M, N)
    todo = [x for x in f.source.universe if x not in f]
    targets = [y for y in f.target.universe if y not in f.image]

    def search(g, i):
        if i == len(todo):
            return g if spec.is_morphism(g) else None
        x = todo[i]
        used = g.image
        for y in targets:
            if y in used or not extends_embedding(g, x, y):
                continue
            found = search(g.extended(x, y), i + 1)
            if found is not None:
                return found
        return None

    if not spec.is_morphism(f):
        return None
    return search(f, 0)


def local_type(M, pebbles, x):
    """
    Quantifier-free type of ``x`` over the tuple ``pebbles``: equalities with pebbles,
    constants at ``x``, and every relation or bijection fact that mentions ``x`` and
    otherwise only pebbled elements. Terms are encoded positionally, so types of
    different structures can be compared.

    Returns
    -------
    tp : tuple
        Hashable description of the type.
    """
    positions = dict()
    for i, p in enumerate(pebbles):
        positions.setdefault(p, list()).append(i)
    me = len(pebbles)

    def term(y):
        return tuple(positions.get(y, ())) + ((me,) if y == x else ())

    support = set(positions) | {x}
    facts = sorted(
        (atom.kind.value, atom.symbol, tuple(term(t) for t in atom.terms))
        for atom in atoms(M, support, involving=x)
    )
    return (term(x), tuple(facts))


def morphism_to_json(f):
    return {
        "source": structure_to_json(f.source),
        "target": structure_to_json(f.target),
        "map": [[x, y] for x, y in f.graph],
    }


def morphism_from_json(doc):
    """
    Raises
    ------
    StructureError : if a structure document is malformed.
    MorphismError : if the map is inconsistent with its structures.
    """
    try:
        pairs = [(x, y) for x, y in doc["map"]]
    except (KeyError, TypeError, ValueError) as e:
        raise MorphismError("Malformed map document: {}".format(e))
    return PartialMorphism(structure_from_json(doc.get("source")), structure_from_json(doc.get("target")), pairs)
