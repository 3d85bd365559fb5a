import json
import os
import tempfile
import unittest
from itertools import combinations

import networkx as nx
import numpy as np

from .. import (
    FinStructure,
    Signature,
    StructureError,
    adjacency_matrix,
    dump_structure,
    induced_substructure,
    is_substructure,
    load_structure,
    relabel,
    structure_from_json,
    structure_to_json,
    to_networkx,
)
from ..graphs import graph

SIG = Signature(relations=[("r", 2)], constants=["c"], bijections=["s"])


def path_with_constant():
    """ Path 0 - 1 - 2 with c = 0 and s: 1 -> 2. """
    return FinStructure(
        SIG,
        [0, 1, 2],
        relations={"r": [(0, 1), (1, 0), (1, 2), (2, 1)]},
        constants={"c": 0},
        bijections={"s": {1: 2}},
    )


class TestSignature(unittest.TestCase):
    def test_equality(self):
        """ Test that signatures compare and hash by their symbols """
        other = Signature(relations=[("r", 2)], constants=["c"], bijections=["s"])
        self.assertEqual(SIG, other)
        self.assertEqual(hash(SIG), hash(other))
        self.assertNotEqual(SIG, Signature(relations=[("r", 2)]))

    def test_arity(self):
        """ Test arity lookups """
        self.assertEqual(SIG.arity("r"), 2)
        with self.assertRaises(StructureError):
            SIG.arity("q")

    def test_value_guards(self):
        """ Test that malformed signatures raise StructureError """
        with self.subTest("Non-positive arity"):
            with self.assertRaises(StructureError):
                Signature(relations=[("r", 0)])

        with self.subTest("Name collision"):
            with self.assertRaises(StructureError):
                Signature(relations=[("r", 2)], constants=["r"])


class TestFinStructure(unittest.TestCase):
    def test_accessors(self):
        """ Test the read-only views of a structure """
        M = path_with_constant()
        self.assertEqual(M.universe, (0, 1, 2))
        self.assertEqual(M.constant("c"), 0)
        self.assertEqual(M.apply("s", 1), 2)
        self.assertEqual(M.preimage("s", 2), 1)
        self.assertIsNone(M.apply("s", 2))
        self.assertEqual(M.free_elements, (1, 2))
        self.assertEqual(M.constant_elements, frozenset({0}))
        self.assertEqual(M.constants_at(0), ("c",))
        self.assertEqual(M.neighbours(1), frozenset({0, 2}))
        self.assertTrue(M.holds("r", (2, 1)))
        self.assertIn(2, M)
        self.assertNotIn(3, M)
        self.assertEqual(len(M), 3)

    def test_value_equality(self):
        """ Test that structures compare by value, regardless of input order """
        M = path_with_constant()
        N = FinStructure(
            SIG,
            [2, 0, 1],
            relations={"r": [(2, 1), (1, 2), (1, 0), (0, 1)]},
            constants={"c": 0},
            bijections={"s": [(1, 2)]},
        )
        self.assertEqual(M, N)
        self.assertEqual(hash(M), hash(N))

    def test_malformed(self):
        """ Test that malformed structures raise StructureError """
        cases = {
            "negative id": dict(universe=[-1]),
            "repeated id": dict(universe=[0, 0]),
            "tuple outside universe": dict(universe=[0], relations={"r": [(0, 1)]}),
            "wrong arity": dict(universe=[0, 1], relations={"r": [(0, 1, 1)]}),
            "unknown relation": dict(universe=[0], relations={"q": [(0, 0)]}),
            "constant outside universe": dict(universe=[0], constants={"c": 3}),
            "non-injective bijection": dict(universe=[0, 1, 2], bijections={"s": {0: 2, 1: 2}}),
        }
        for name, kwargs in cases.items():
            with self.subTest(name):
                with self.assertRaises(StructureError):
                    FinStructure(SIG, **kwargs)


class TestSubstructures(unittest.TestCase):
    def test_induced(self):
        """ Test that induced substructures keep exactly the facts over the subset """
        M = path_with_constant()
        A = induced_substructure(M, [0, 1])
        self.assertEqual(A.relation("r"), frozenset({(0, 1), (1, 0)}))
        self.assertEqual(A.constant("c"), 0)
        self.assertEqual(dict(A.bij_interp["s"]), dict())
        self.assertTrue(is_substructure(A, M))

    def test_strict(self):
        """ Test that strict substructures refuse to drop constants """
        M = path_with_constant()
        self.assertIsNone(induced_substructure(M, [1, 2]).constant("c"))
        with self.assertRaises(StructureError):
            induced_substructure(M, [1, 2], strict=True)

    def test_not_subset(self):
        """ Test that elements outside the universe raise StructureError """
        with self.assertRaises(StructureError):
            induced_substructure(path_with_constant(), [0, 7])

    def test_not_substructure(self):
        """ Test that a structure with a missing edge is not a substructure """
        M = path_with_constant()
        A = FinStructure(SIG, [0, 1], constants={"c": 0})
        self.assertFalse(is_substructure(A, M))


class TestRelabel(unittest.TestCase):
    def test_relabel(self):
        """ Test that relabeling moves every fact along the map """
        M = relabel(path_with_constant(), {0: 10, 1: 11, 2: 12})
        self.assertEqual(M.universe, (10, 11, 12))
        self.assertEqual(M.constant("c"), 10)
        self.assertEqual(M.apply("s", 11), 12)
        self.assertTrue(M.holds("r", (11, 12)))

    def test_value_guards(self):
        """ Test that partial or non-injective relabelings raise StructureError """
        with self.assertRaises(StructureError):
            relabel(path_with_constant(), {0: 1, 1: 2})
        with self.assertRaises(StructureError):
            relabel(path_with_constant(), {0: 1, 1: 1, 2: 3})


class TestJSON(unittest.TestCase):
    def test_document(self):
        """ Test that the document lists tuples in sorted order """
        doc = structure_to_json(path_with_constant())
        self.assertEqual(doc["universe"], [0, 1, 2])
        self.assertEqual(doc["relations"]["r"], [[0, 1], [1, 0], [1, 2], [2, 1]])
        self.assertEqual(doc["constants"], {"c": 0})
        self.assertEqual(doc["bijections"], {"s": [[1, 2]]})

    def test_from_document(self):
        """ Test that a document survives a trip through JSON text """
        M = path_with_constant()
        self.assertEqual(structure_from_json(json.loads(json.dumps(structure_to_json(M)))), M)

    def test_malformed(self):
        """ Test that documents violating the schema raise StructureError """
        good = structure_to_json(path_with_constant())
        cases = {
            "not an object": [1, 2],
            "no universe": {"signature": good["signature"]},
            "bad universe": dict(good, universe="abc"),
            "bad tuple": dict(good, relations={"r": [[0]]}),
            "bad signature": dict(good, signature={"relations": [["r", "two"]]}),
        }
        for name, doc in cases.items():
            with self.subTest(name):
                with self.assertRaises(StructureError):
                    structure_from_json(doc)

    def test_files(self):
        """ Test dumping and loading structures, and loading invalid JSON """
        M = path_with_constant()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "structure.json")
            dump_structure(M, path)
            self.assertEqual(load_structure(path), M)

            with open(path, "w") as f:
                f.write("{not json")
            with self.assertRaises(StructureError):
                load_structure(path)


class TestExports(unittest.TestCase):
    def test_adjacency_matrix(self):
        """ Test that the adjacency matrix of a triangle has the expected entries """
        A = adjacency_matrix(graph([0, 1, 2], [(0, 1), (1, 2), (0, 2)]))
        self.assertTrue(np.array_equal(A, np.ones((3, 3), dtype=np.int64) - np.eye(3, dtype=np.int64)))

    def test_adjacency_matrix_arity(self):
        """ Test that only binary relations have an adjacency matrix """
        M = FinStructure(Signature(relations=[("p", 1)]), [0], relations={"p": [(0,)]})
        with self.assertRaises(StructureError):
            adjacency_matrix(M, "p")

    def test_networkx(self):
        """ Test that the networkx view has one edge per tuple and bijection pair """
        G = to_networkx(path_with_constant())
        self.assertIsInstance(G, nx.MultiDiGraph)
        self.assertEqual(G.number_of_nodes(), 3)
        self.assertEqual(G.number_of_edges(), 5)
        self.assertEqual(G.nodes[0]["label"], "c")

    def test_complete_graph_edges(self):
        """ Test the edge count of complete graphs against networkx """
        for n in range(1, 6):
            with self.subTest("K{}".format(n)):
                M = graph(range(n), combinations(range(n), 2))
                self.assertEqual(len(M.relation("r")) // 2, nx.complete_graph(n).number_of_edges())


if __name__ == "__main__":
    unittest.main()
