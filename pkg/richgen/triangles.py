"""
Graphs with constants, split into components by which constant has a neighbour,
or else by the number of triangles.

Members satisfy four axioms: constants are distinct, the edge relation is irreflexive
and symmetric, and at most one constant has a neighbour. A member lies in component ``n``
if the constant ``cn`` has a neighbour, or if every constant is isolated and there are
exactly ``n`` triangles. The component ``OMEGA`` holds members where ``comega`` has a
neighbour, or where every constant is isolated and there are many triangles, at
least ``triangle_floor`` of them.
"""
import numpy as np

from .base import AmalgamationError, ClassSpec, ComponentLabel, free_amalgam
from .builder import build_generic
from .graphs import GraphClassSpec, graph, is_graph, vertex_extensions
from .morphisms import PartialMorphism, inclusion, is_partial_embedding
from .richness import ef_equivalence
from .structures import FinStructure, Signature, StructureError, adjacency_matrix, induced_substructure
from .utils import least_unused, subsets

OMEGA = "omega"


def constant_names(constants):
    """ Names ``c0, ..., cK`` followed by ``comega``. """
    return tuple("c{}".format(i) for i in range(constants + 1)) + ("comega",)


def triangle_count(M, relation="r"):
    """ Number of 3-element sets pairwise joined by ``relation``. """
    A = adjacency_matrix(M, relation)
    A = np.maximum(A, A.T)
    np.fill_diagonal(A, 0)
    return int(round(np.trace(A @ A @ A) / 6))


def active_constants(M):
    """ Sorted names of the constants that have a neighbour. """
    return sorted(name for name, x in M.const_interp.items() if M.neighbours(x))


class ConstantsTrianglesSpec(ClassSpec):
    """
    Class of graphs with constants ``c0, ..., cK, comega``.

    Parameters
    ----------
    component : int, OMEGA or None, optional
        Component of the class. If None (default), the whole class, whose morphisms
        are the partial embeddings between members of the same component.
    constants : int, optional
        Index ``K`` of the last numbered constant.
    triangle_floor : int, optional
        Number of triangles that stands in for infinitely many.

    Raises
    ------
    ValueError : if the component is not an integer between 0 and ``constants``, ``OMEGA`` or None.
    """

    hereditary = False

    def __init__(self, component=None, constants=8, triangle_floor=3):
        if constants < 0:
            raise ValueError("Number of constants must be non-negative, not {}".format(constants))
        if not (component is None or component == OMEGA or (isinstance(component, int) and 0 <= component <= constants)):
            raise ValueError("Component must be an integer between 0 and {}, or omega, not {}".format(constants, component))
        if triangle_floor < 1:
            raise ValueError("Triangle floor must be positive, not {}".format(triangle_floor))

        super().__init__(Signature(relations=[("r", 2)], constants=constant_names(constants)))
        self.component = component
        self.constants = constants
        self.triangle_floor = triangle_floor
        self.name = "ct" if component is None else "ct:{}".format(component)
        self.morphisms_are_embeddings = component is not None

    @staticmethod
    def constant_name(n):
        return "comega" if n == OMEGA else "c{}".format(n)

    def satisfies_axioms(self, M):
        """ Distinct constants, irreflexive symmetric edges, at most one constant with a neighbour. """
        if M.sig != self.sig or len(M.const_interp) != len(self.sig.constants):
            return False
        if len(M.constant_elements) != len(self.sig.constants):
            return False
        return is_graph(M) and len(active_constants(M)) <= 1

    def component_of(self, M):
        """ Component label of ``M``, or None if it lies in no component of this class. """
        active = active_constants(M)
        if active:
            name = active[0]
            return ComponentLabel(OMEGA if name == "comega" else int(name[1:]), "constant-active")
        count = triangle_count(M)
        if self.component == OMEGA and count >= self.triangle_floor:
            return ComponentLabel(OMEGA, "triangle-count")
        if count <= self.constants:
            return ComponentLabel(count, "triangle-count")
        return None

    def is_member(self, M):
        if not self.satisfies_axioms(M):
            return False
        label = self.component_of(M)
        if label is None:
            return False
        return self.component is None or label.value == self.component

    def is_morphism(self, f, M=None, N=None):
        if not is_partial_embedding(f, M, N):
            return False
        if self.component is not None:
            return True
        return self.component_of(f.source) == self.component_of(f.target)

    def component_label(self, M):
        label = self.component_of(M)
        if label is None:
            raise StructureError("Structure lies in no component of {}".format(self.name))
        return label

    def amalgamate(self, f1, f2):
        return ct_amalgamate(self.component, f1, f2, spec=self)

    def amalgam_case(self, f1, f2):
        if active_constants(f1.target) or active_constants(f2.target):
            return "free"
        return "fresh-neighbour"

    def one_point_extensions(self, M):
        active = active_constants(M)
        if active:
            allowed = active
        elif self.component is None:
            allowed = list(self.sig.constants)
        else:
            allowed = [self.constant_name(self.component)]
        choices = [tuple()] + [(M.constant(name),) for name in allowed]

        neighbour_sets = (free + const for free in subsets(M.free_elements) for const in choices)
        for new, relations in vertex_extensions(M, neighbour_sets):
            yield FinStructure(self.sig, M.universe + (new,), relations, dict(M.const_interp))

    def default_seed(self):
        """ The constants, plus one vertex adjacent to the constant of the component. """
        base = self.base_members()[0]
        c = base.constant(self.constant_name(0 if self.component is None else self.component))
        (a,) = least_unused(base.universe, 1)
        return graph(base.universe + (a,), [(c, a)], sig=self.sig, constants=dict(base.const_interp))


def ct_amalgamate(n, f1, f2, spec=None):
    """
    Amalgamate ``f1: M -> N1`` and ``f2: M -> N2`` within the component ``n``.

    If a constant has a neighbour on either side, this is the free amalgam. If every
    constant is isolated on both sides, the free amalgam is extended by one fresh vertex
    adjacent to the constant of the component, and to nothing else.

    Parameters
    ----------
    n : int, OMEGA or None
        Component. If None, the component of ``N1`` is used.
    f1, f2 : PartialMorphism
    spec : ConstantsTrianglesSpec or None, optional
        Class used to compute components. Default is built from the signature of ``N1``.

    Raises
    ------
    AmalgamationError : if the two sides lie in different components.
    """
    N1, N2 = f1.target, f2.target
    if spec is None:
        spec = ConstantsTrianglesSpec(n, constants=len(N1.sig.constants) - 2)
    l1, l2 = spec.component_of(N1), spec.component_of(N2)
    if l1 is None or l2 is None or l1 != l2:
        raise AmalgamationError("Sides lie in different components: {} and {}".format(l1, l2))

    N, h1, h2 = free_amalgam(f1, f2)
    if active_constants(N1) or active_constants(N2):
        return N, h1, h2

    c = N.constant(spec.constant_name(l1.value if n is None else n))
    (a,) = least_unused(N.universe, 1)
    relations = {"r": set(N.relation("r")) | {(c, a), (a, c)}}
    N = FinStructure(N.sig, N.universe + (a,), relations, dict(N.const_interp))
    return N, PartialMorphism._trusted(N1, N, dict(h1.mapping)), PartialMorphism._trusted(N2, N, dict(h2.mapping))


def build_rich_K(spec, n=None, stages=150, size_cap=None, src_bound=3, padding=2):
    """
    Stage approximation of the rich model of component ``n``: a random graph
    containing the constant ``cn``, disjoint from isolated vertices that carry every other
    constant. The random part is built from an edge whose first vertex becomes ``cn``,
    so ``cn`` always has a neighbour. For ``OMEGA``, ``triangle_floor`` disjoint triangles
    are added to the random part, away from ``comega``.

    Parameters
    ----------
    spec : ConstantsTrianglesSpec
    n : int, OMEGA or None, optional
        Component. Default is the component of ``spec``.
    stages : int, optional
        Stages of the random-graph build.
    size_cap : int or None, optional
        Size cap of the random-graph build.
    src_bound : int, optional
        Largest size of the tasks anchored in the constants that the result should realize.
        The random-graph build uses sources one larger, since ``cn`` is one of its vertices.
    padding : int, optional
        Number of isolated vertices besides the constants.

    Returns
    -------
    U : FinStructure
    """
    n = spec.component if n is None else n
    if n is None:
        raise ValueError("A component must be given for the whole class")

    R, _ = build_generic(GraphClassSpec(), graph([0, 1], [(0, 1)]), stages, src_bound + 1, size_cap)
    edges = {tuple(t) for t in R.relation("r")}
    vertices = list(R.universe)
    if n == OMEGA:
        for _ in range(spec.triangle_floor):
            a, b, c = least_unused(vertices, 3)
            vertices.extend((a, b, c))
            edges.update({(a, b), (b, a), (b, c), (c, b), (a, c), (c, a)})

    names = spec.sig.constants
    constants = {name: i for i, name in enumerate(names)}
    mapping = {0: constants[spec.constant_name(n)]}
    others = [v for v in sorted(vertices) if v != 0]
    mapping.update(zip(others, range(len(names), len(names) + len(others))))
    extra = range(len(names) + len(others), len(names) + len(others) + padding)

    universe = list(range(len(names))) + [mapping[v] for v in others] + list(extra)
    relations = {"r": {(mapping[x], mapping[y]) for x, y in edges}}
    return FinStructure(spec.sig, universe, relations, constants)


class FullnessReport:
    """
    Outcome of the fullness counterexample: a rich model ``U`` of the component ``OMEGA``
    and a substructure ``M`` in which ``comega`` has no neighbour.
    """

    def __init__(self, U, M, clauses):
        self.U = U
        self.M = M
        self.clauses = dict(clauses)

    @property
    def passed(self):
        return all(self.clauses.values())

    def to_json(self):
        return {
            "clauses": dict(self.clauses),
            "passed": self.passed,
            "sizes": {"U": len(self.U), "M": len(self.M)},
        }

    def __repr__(self):
        return "<FullnessReport: {}>".format(", ".join("{}={}".format(k, v) for k, v in self.clauses.items()))


def fullness_witness(spec=None, stages=150, size_cap=None, src_bound=3):
    """
    Show that "``comega`` has a neighbour" is not preserved under substructures.

    A rich model ``U`` of the component ``OMEGA`` is built, and ``M`` is the substructure
    of ``U`` without the neighbours of ``comega``. The clauses checked are

    * ``inclusion-embedding``: the inclusion of ``M`` into ``U`` is an embedding;
    * ``U-has-neighbour``: ``comega`` has a neighbour in ``U``;
    * ``M-isolated``: ``comega`` has no neighbour in ``M``;
    * ``M-member``: ``M`` is a member of the component;
    * ``one-round-separation``: a single round of the back-and-forth game separates ``U`` from ``M``.

    Returns
    -------
    report : FullnessReport
    """
    spec = ConstantsTrianglesSpec(OMEGA) if spec is None else spec
    U = build_rich_K(spec, OMEGA, stages, size_cap, src_bound)
    c = U.constant("comega")
    M = induced_substructure(U, set(U.universe) - U.neighbours(c), strict=True)

    clauses = [
        ("inclusion-embedding", is_partial_embedding(inclusion(M, U))),
        ("U-has-neighbour", bool(U.neighbours(c))),
        ("M-isolated", not M.neighbours(c)),
        ("M-member", spec.is_member(M)),
        ("one-round-separation", not ef_equivalence(U, M, 1)),
    ]
    return FullnessReport(U, M, clauses)
