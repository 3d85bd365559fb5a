"""
Finite relational structures with constants and partial bijections.
"""
import json
from types import MappingProxyType

import networkx as nx
import numpy as np

from . import ModelException


class StructureError(ModelException, ValueError):
    """ Malformed signature, structure or structure document. """

    pass


class Signature:
    """
    First-order signature: relation symbols with arities, constant symbols,
    and symbols for injective partial functions (paired with their inverse).

    Parameters
    ----------
    relations : iterable of (str, int)
        Relation names and arities.
    constants : iterable of str, optional
        Constant names.
    bijections : iterable of str, optional
        Names of unary injective partial functions.

    Raises
    ------
    StructureError : if names collide or an arity is not positive.
    """

    def __init__(self, relations=tuple(), constants=tuple(), bijections=tuple()):
        self._relations = tuple((str(name), arity) for name, arity in relations)
        self._constants = tuple(str(name) for name in constants)
        self._bijections = tuple(str(name) for name in bijections)

        for name, arity in self._relations:
            if not isinstance(arity, int) or arity < 1:
                raise StructureError(
                    "Arity of {} must be a positive integer, not {}".format(name, arity)
                )

        names = [name for name, _ in self._relations] + list(self._constants) + list(self._bijections)
        if len(set(names)) != len(names):
            raise StructureError("Symbol names must be distinct, not {}".format(names))

        self._arities = dict(self._relations)

    @property
    def relations(self):
        return self._relations

    @property
    def constants(self):
        return self._constants

    @property
    def bijections(self):
        return self._bijections

    def arity(self, name):
        """ Arity of relation ``name``. """
        try:
            return self._arities[name]
        except KeyError:
            raise StructureError("Unknown relation symbol {}".format(name))

    def token(self):
        """ Hashable, orderable description of the signature. """
        return (self._relations, self._constants, self._bijections)

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self.token() == other.token()

    def __hash__(self):
        return hash(self.token())

    def __repr__(self):
        return "Signature(relations={}, constants={}, bijections={})".format(
            list(self._relations), list(self._constants), list(self._bijections)
        )


class FinStructure:
    """
    Immutable finite structure. Element ids are natural numbers, stored in
    increasing order.

    Parameters
    ----------
    sig : Signature
        Signature of the structure.
    universe : iterable of int
        Element ids.
    relations : dict, optional
        Relation name to iterable of tuples over ``universe``.
    constants : dict, optional
        Constant name to element. Constants absent from this dictionary are uninterpreted,
        which only happens in non-strict substructures.
    bijections : dict, optional
        Bijection name to dictionary (or iterable of pairs) describing an injective
        partial function on ``universe``.

    Raises
    ------
    StructureError : if an interpretation mentions elements outside the universe,
        has the wrong arity, uses unknown symbols, or a bijection is not injective.
    """

    def __init__(self, sig, universe, relations=None, constants=None, bijections=None):
        self._sig = sig
        universe = list(universe)
        for x in universe:
            if not isinstance(x, (int, np.integer)) or isinstance(x, bool) or x < 0:
                raise StructureError("Element ids must be natural numbers, not {}".format(x))
        self._universe = tuple(sorted(int(x) for x in universe))
        if len(set(self._universe)) != len(self._universe):
            raise StructureError("Element ids must be distinct, not {}".format(universe))
        members = frozenset(self._universe)
        self._members = members

        relations = relations or dict()
        unknown = set(relations) - {name for name, _ in sig.relations}
        if unknown:
            raise StructureError("Unknown relation symbols {}".format(sorted(unknown)))
        interp = dict()
        for name, arity in sig.relations:
            tuples = frozenset(tuple(int(x) for x in t) for t in relations.get(name, ()))
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(
                        "Tuple {} of {} must have length {}, not {}".format(t, name, arity, len(t))
                    )
                if not members.issuperset(t):
                    raise StructureError("Tuple {} of {} is not over the universe".format(t, name))
            interp[name] = tuples
        self._rel = interp

        constants = constants or dict()
        unknown = set(constants) - set(sig.constants)
        if unknown:
            raise StructureError("Unknown constant symbols {}".format(sorted(unknown)))
        consts = dict()
        for name in sig.constants:
            if name in constants:
                value = int(constants[name])
                if value not in members:
                    raise StructureError("Constant {} = {} is not in the universe".format(name, value))
                consts[name] = value
        self._const = consts

        bijections = bijections or dict()
        unknown = set(bijections) - set(sig.bijections)
        if unknown:
            raise StructureError("Unknown bijection symbols {}".format(sorted(unknown)))
        bij = dict()
        for name in sig.bijections:
            pairs = bijections.get(name, ())
            pairs = pairs.items() if isinstance(pairs, dict) else pairs
            graph = {int(x): int(y) for x, y in pairs}
            if not (members.issuperset(graph) and members.issuperset(graph.values())):
                raise StructureError("Bijection {} is not over the universe".format(name))
            if len(set(graph.values())) != len(graph):
                raise StructureError("Bijection {} must be injective".format(name))
            bij[name] = graph
        self._bij = bij
        self._inv = {name: {y: x for x, y in graph.items()} for name, graph in bij.items()}

        self._hash = None
        self._incidence = None

    @property
    def sig(self):
        return self._sig

    @property
    def universe(self):
        """ Element ids, in increasing order. """
        return self._universe

    @property
    def rel_interp(self):
        """ Read-only mapping from relation name to frozenset of tuples. """
        return MappingProxyType(self._rel)

    @property
    def const_interp(self):
        """ Read-only mapping from constant name to element. """
        return MappingProxyType(self._const)

    @property
    def bij_interp(self):
        """ Read-only mapping from bijection name to read-only graph of the function. """
        return MappingProxyType({name: MappingProxyType(g) for name, g in self._bij.items()})

    def relation(self, name):
        return self._rel[name]

    def holds(self, name, tup):
        """ Whether the relation ``name`` holds of ``tup``. """
        return tuple(tup) in self._rel[name]

    def constant(self, name):
        """ Interpretation of constant ``name``, or None if uninterpreted. """
        return self._const.get(name)

    def apply(self, name, x):
        """ Image of ``x`` under bijection ``name``, or None where undefined. """
        return self._bij[name].get(x)

    def preimage(self, name, x):
        """ Image of ``x`` under the inverse of bijection ``name``, or None where undefined. """
        return self._inv[name].get(x)

    @property
    def constant_elements(self):
        """ Elements interpreting at least one constant. """
        return frozenset(self._const.values())

    @property
    def free_elements(self):
        """ Elements interpreting no constant, in increasing order. """
        consts = self.constant_elements
        return tuple(x for x in self._universe if x not in consts)

    def constants_at(self, x):
        """ Sorted names of the constants interpreted by ``x``. """
        return tuple(sorted(name for name, value in self._const.items() if value == x))

    def incident(self, x):
        """ Relation facts ``(name, tuple)`` in which ``x`` occurs. """
        if self._incidence is None:
            index = {y: list() for y in self._universe}
            for name, tuples in self._rel.items():
                for t in tuples:
                    for y in set(t):
                        index[y].append((name, t))
            self._incidence = {y: tuple(sorted(facts)) for y, facts in index.items()}
        return self._incidence.get(x, tuple())

    def neighbours(self, x, relation="r"):
        """ Elements ``y`` such that ``relation(x, y)`` holds. """
        return frozenset(t[1] for name, t in self.incident(x) if name == relation and t[0] == x)

    def _key(self):
        return (
            self._sig.token(),
            self._universe,
            tuple((name, tuple(sorted(self._rel[name]))) for name, _ in self._sig.relations),
            tuple(sorted(self._const.items())),
            tuple((name, tuple(sorted(self._bij[name].items()))) for name in self._sig.bijections),
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinStructure):
            return NotImplemented
        return (
            self._sig == other._sig
            and self._universe == other._universe
            and self._rel == other._rel
            and self._const == other._const
            and self._bij == other._bij
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __len__(self):
        return len(self._universe)

    def __contains__(self, x):
        return x in self._members

    def __iter__(self):
        return iter(self._universe)

    def __repr__(self):
        return "<FinStructure: {} elements, {}>".format(
            len(self), ", ".join("{}: {}".format(n, len(t)) for n, t in self._rel.items())
        )


def induced_substructure(M, elements, strict=False):
    """
    Substructure of ``M`` induced on ``elements``.

    Parameters
    ----------
    M : FinStructure
    elements : iterable of int
        Subset of the universe of ``M``.
    strict : bool, optional
        If True, every constant of ``M`` must be interpreted inside ``elements``.
        If False (default), constants outside ``elements`` become uninterpreted.

    Raises
    ------
    StructureError : if ``elements`` is not a subset of the universe, or
        a constant would be dropped in strict mode.
    """
    elements = frozenset(elements)
    if not elements.issubset(M.universe):
        raise StructureError("{} is not a subset of the universe".format(sorted(elements - set(M.universe))))

    dropped = [name for name, value in M.const_interp.items() if value not in elements]
    if strict and dropped:
        raise StructureError("Constants {} would be dropped".format(dropped))

    return FinStructure(
        M.sig,
        elements,
        relations={
            name: [t for t in tuples if elements.issuperset(t)] for name, tuples in M.rel_interp.items()
        },
        constants={name: x for name, x in M.const_interp.items() if x in elements},
        bijections={
            name: {x: y for x, y in g.items() if x in elements and y in elements}
            for name, g in M.bij_interp.items()
        },
    )


def is_substructure(A, B):
    """ Whether ``A`` is the substructure of ``B`` induced on the universe of ``A``. """
    if A.sig != B.sig or not set(A.universe).issubset(B.universe):
        return False
    return induced_substructure(B, A.universe) == A


def relabel(M, mapping):
    """
    Isomorphic copy of ``M`` along the injective id map ``mapping``.

    Raises
    ------
    StructureError : if ``mapping`` is not injective or not total on the universe.
    """
    mapping = {int(x): int(y) for x, y in dict(mapping).items()}
    if not set(M.universe).issubset(mapping):
        raise StructureError("Relabeling must be total on the universe")
    if len({mapping[x] for x in M.universe}) != len(M):
        raise StructureError("Relabeling must be injective")

    return FinStructure(
        M.sig,
        (mapping[x] for x in M.universe),
        relations={
            name: [tuple(mapping[x] for x in t) for t in tuples] for name, tuples in M.rel_interp.items()
        },
        constants={name: mapping[x] for name, x in M.const_interp.items()},
        bijections={
            name: {mapping[x]: mapping[y] for x, y in g.items()} for name, g in M.bij_interp.items()
        },
    )


def signature_to_json(sig):
    return {
        "relations": [[name, arity] for name, arity in sig.relations],
        "constants": list(sig.constants),
        "bijections": list(sig.bijections),
    }


def signature_from_json(doc):
    try:
        return Signature(
            relations=[(name, arity) for name, arity in doc.get("relations", [])],
            constants=doc.get("constants", []),
            bijections=doc.get("bijections", []),
        )
    except (AttributeError, TypeError, ValueError) as e:
        if isinstance(e, StructureError):
            raise
        raise StructureError("Malformed signature: {}".format(e))


def structure_to_json(M):
    """ JSON-compatible dictionary describing ``M``. Relation tuples are listed in sorted order. """
    return {
        "signature": signature_to_json(M.sig),
        "universe": list(M.universe),
        "relations": {name: [list(t) for t in sorted(tuples)] for name, tuples in M.rel_interp.items()},
        "constants": dict(sorted(M.const_interp.items())),
        "bijections": {name: [[x, y] for x, y in sorted(g.items())] for name, g in M.bij_interp.items()},
    }


def structure_from_json(doc):
    """
    Build a structure from its JSON description.

    Raises
    ------
    StructureError : if the document does not follow the structure schema.
    """
    if not isinstance(doc, dict):
        raise StructureError("Structure document must be an object, not {}".format(type(doc).__name__))
    for field in ("signature", "universe"):
        if field not in doc:
            raise StructureError("Structure document is missing field {}".format(field))

    sig = signature_from_json(doc["signature"])
    try:
        return FinStructure(
            sig,
            doc["universe"],
            relations={name: [tuple(t) for t in tuples] for name, tuples in doc.get("relations", {}).items()},
            constants=doc.get("constants", {}),
            bijections={name: [tuple(p) for p in pairs] for name, pairs in doc.get("bijections", {}).items()},
        )
    except StructureError:
        raise
    except (AttributeError, TypeError, ValueError) as e:
        raise StructureError("Malformed structure document: {}".format(e))


def dump_structure(M, path):
    """ Write ``M`` to ``path`` as JSON. """
    with open(path, "w") as f:
        json.dump(structure_to_json(M), f, indent=2, sort_keys=True)


def load_structure(path):
    """
    Read a structure from a JSON file.

    Raises
    ------
    StructureError : if the file is not valid JSON or violates the schema.
    """
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise StructureError("Invalid JSON in {}: {}".format(path, e))
    return structure_from_json(doc)


def adjacency_matrix(M, relation="r"):
    """
    Adjacency matrix of the binary relation ``relation``, with rows and columns
    in the order of ``M.universe``.

    Returns
    -------
    A : `~numpy.ndarray`, shape (N, N), dtype int
    """
    if M.sig.arity(relation) != 2:
        raise StructureError("{} is not a binary relation".format(relation))
    index = {x: i for i, x in enumerate(M.universe)}
    A = np.zeros((len(M), len(M)), dtype=np.int64)
    for x, y in M.relation(relation):
        A[index[x], index[y]] = 1
    return A


def to_networkx(M):
    """
    Multi-digraph view of ``M``: binary relation tuples and bijection pairs become
    edges keyed by symbol name; constants become node labels.
    """
    G = nx.MultiDiGraph()
    for x in M.universe:
        names = M.constants_at(x)
        G.add_node(x, label=",".join(names) if names else str(x))
    for name, arity in M.sig.relations:
        if arity == 2:
            for x, y in sorted(M.relation(name)):
                G.add_edge(x, y, key=name, label=name)
    for name in M.sig.bijections:
        for x, y in sorted(M.bij_interp[name].items()):
            G.add_edge(x, y, key=name, label=name, style="dashed")
    return G


def write_dot(M, path):
    """ Export ``M`` to a DOT file through networkx's pydot backend. """
    nx.drawing.nx_pydot.write_dot(to_networkx(M), path)
