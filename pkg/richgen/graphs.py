from .base import ClassSpec
from .structures import FinStructure, Signature
from .utils import least_unused, subsets

GRAPH_SIGNATURE = Signature(relations=[("r", 2)])


def is_graph(M, relation="r"):
    """ Whether ``relation`` is irreflexive and symmetric in ``M``. """
    tuples = M.relation(relation)
    return all(x != y and (y, x) in tuples for x, y in tuples)


def graph(vertices, edges, sig=GRAPH_SIGNATURE, **kwargs):
    """ Structure of signature ``sig`` whose relation ``r`` is the symmetric closure of ``edges``. """
    symmetric = set()
    for x, y in edges:
        symmetric.update({(x, y), (y, x)})
    return FinStructure(sig, vertices, relations={"r": symmetric}, **kwargs)


def vertex_extensions(M, neighbour_sets):
    """ Add one vertex with the least unused id, adjacent to each of ``neighbour_sets`` in turn. """
    (new,) = least_unused(M.universe, 1)
    for neighbours in neighbour_sets:
        relations = {name: set(t) for name, t in M.rel_interp.items()}
        relations["r"] |= {(new, y) for y in neighbours} | {(y, new) for y in neighbours}
        yield new, relations


class GraphClassSpec(ClassSpec):
    """
    Class of all graphs with all partial embeddings as morphisms. Its rich
    model is the random graph.
    """

    name = "graphs"

    def __init__(self):
        super().__init__(GRAPH_SIGNATURE)

    def is_member(self, M):
        return M.sig == self.sig and is_graph(M)

    def one_point_extensions(self, M):
        for new, relations in vertex_extensions(M, subsets(M.universe)):
            yield FinStructure(self.sig, M.universe + (new,), relations)

    def default_seed(self):
        return graph([0, 1], [])
