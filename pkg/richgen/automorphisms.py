"""
Graphs with a partial automorphism ``sigma``. Stage approximations of a graph with
an automorphism are finite, so ``sigma`` is an injective partial function that
preserves edges and non-edges on its domain.
"""
from .base import ClassSpec
from .graphs import is_graph, vertex_extensions
from .morphisms import PartialMorphism, is_partial_embedding
from .structures import FinStructure, Signature
from .utils import subsets

SIGMA = "sigma"

AUTOGRAPH_SIGNATURE = Signature(relations=[("r", 2)], bijections=[SIGMA])


def is_partial_automorphism(M, relation="r", bijection=SIGMA):
    """ Whether ``bijection`` preserves ``relation`` in both directions on its domain. """
    graph = M.bij_interp[bijection]
    domain = sorted(graph)
    for x in domain:
        for y in domain:
            if M.holds(relation, (x, y)) != M.holds(relation, (graph[x], graph[y])):
                return False
    return True


def cycle_audit(M, L, bijection=SIGMA):
    """
    Whether no element of ``M`` returns to itself under at most ``L`` applications
    of ``bijection``, where defined.
    """
    for x in M.universe:
        y = x
        for _ in range(L):
            y = M.apply(bijection, y)
            if y is None:
                break
            if y == x:
                return False
    return True


def sigma_closure(f, bijection=SIGMA):
    """
    Close the map ``f`` under ``bijection`` and its inverse on both sides in lockstep.

    Returns
    -------
    mapping : dict or None
        Graph of the closure, or None if ``bijection`` is defined on one side and not
        the other, or the closure is not an injective function.
    """
    M, N = f.source, f.target
    mapping = dict(f.mapping)
    queue = list(mapping.items())
    while queue:
        x, y = queue.pop()
        for step_m, step_n in ((M.apply, N.apply), (M.preimage, N.preimage)):
            sx, sy = step_m(bijection, x), step_n(bijection, y)
            if (sx is None) != (sy is None):
                return None
            if sx is None:
                continue
            if sx in mapping:
                if mapping[sx] != sy:
                    return None
                continue
            mapping[sx] = sy
            queue.append((sx, sy))
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def auto_morphism_pred(f, M=None, N=None):
    """
    Whether ``f`` is a morphism of graphs with a partial automorphism: its closure under
    ``sigma`` and the inverse of ``sigma``, taken on both sides in lockstep, is well-defined
    and is a partial embedding. Such maps commute with ``sigma`` wherever both sides are defined.

    Raises
    ------
    MorphismError : if ``M`` or ``N`` are given and differ from the source or target of ``f``.
    """
    if not is_partial_embedding(f, M, N):
        return False
    closure = sigma_closure(f)
    if closure is None:
        return False
    return is_partial_embedding(PartialMorphism._trusted(f.source, f.target, closure))


class AutomorphismGraphSpec(ClassSpec):
    """
    Class of graphs with a partial automorphism ``sigma``.

    Parameters
    ----------
    cycle_free : int or None, optional
        If given, members have no ``sigma``-cycle of length at most ``cycle_free``.

    Raises
    ------
    ValueError : if ``cycle_free`` is not a positive integer.
    """

    def __init__(self, cycle_free=None):
        if cycle_free is not None and (not isinstance(cycle_free, int) or cycle_free < 1):
            raise ValueError("Cycle bound must be a positive integer, not {}".format(cycle_free))
        super().__init__(AUTOGRAPH_SIGNATURE)
        self.cycle_free = cycle_free
        self.name = "autograph" if cycle_free is None else "autograph-cyclefree:{}".format(cycle_free)

    def is_member(self, M):
        if M.sig != self.sig or not is_graph(M) or not is_partial_automorphism(M):
            return False
        return self.cycle_free is None or cycle_audit(M, self.cycle_free)

    def is_morphism(self, f, M=None, N=None):
        return auto_morphism_pred(f, M, N)

    def one_point_extensions(self, M):
        sigma = dict(M.bij_interp[SIGMA])
        free_images = [y for y in M.universe if y not in sigma.values()]
        free_sources = [x for x in M.universe if x not in sigma]

        for new, relations in vertex_extensions(M, subsets(M.universe)):
            options = [dict(), {new: new}]
            options.extend({new: y} for y in free_images)
            options.extend({x: new} for x in free_sources)
            options.extend({new: y, x: new} for y in free_images for x in free_sources)
            for extra in options:
                graph = dict(sigma)
                graph.update(extra)
                yield FinStructure(self.sig, M.universe + (new,), relations, bijections={SIGMA: graph})
