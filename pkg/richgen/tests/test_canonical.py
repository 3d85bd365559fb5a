import unittest
from itertools import permutations

from hypothesis import given, settings
from hypothesis import strategies as st

from .. import canonical_form, relabel
from ..canonical import initial_colouring, refine
from ..graphs import graph


@st.composite
def small_graphs(draw, max_size=6):
    n = draw(st.integers(min_value=1, max_value=max_size))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return graph(range(n), edges)


class TestColourRefinement(unittest.TestCase):
    def test_path(self):
        """ Test that refinement separates the ends of a path from its middle """
        M = graph([0, 1, 2], [(0, 1), (1, 2)])
        (colour,) = refine((M, initial_colouring(M)))
        self.assertEqual(colour[0], colour[2])
        self.assertNotEqual(colour[0], colour[1])

    def test_joint(self):
        """ Test that colours of a joint refinement are comparable across structures """
        P = graph([0, 1, 2], [(0, 1), (1, 2)])
        Q = graph([5, 6, 7], [(5, 7), (7, 6)])
        cp, cq = refine((P, initial_colouring(P)), (Q, initial_colouring(Q)))
        self.assertEqual(cp[1], cq[7])
        self.assertEqual(cp[0], cq[5])

    def test_regular(self):
        """ Test that refinement cannot split a vertex-transitive graph """
        M = graph(range(5), [(i, (i + 1) % 5) for i in range(5)])
        (colour,) = refine((M, initial_colouring(M)))
        self.assertEqual(len(set(colour.values())), 1)


class TestCanonicalForm(unittest.TestCase):
    def test_non_isomorphic(self):
        """ Test that a path and a triangle get different labels """
        path = graph([0, 1, 2], [(0, 1), (1, 2)])
        triangle = graph([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
        self.assertNotEqual(canonical_form(path), canonical_form(triangle))

    def test_fixed(self):
        """ Test that individualized elements are matched position by position """
        path = graph([0, 1, 2], [(0, 1), (1, 2)])
        self.assertEqual(canonical_form(path, (0,)), canonical_form(path, (2,)))
        self.assertNotEqual(canonical_form(path, (0,)), canonical_form(path, (1,)))

    def test_regular_graphs(self):
        """ Test that two 3-regular graphs on 6 vertices that refinement cannot tell apart are separated """
        prism = graph(range(6), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])
        bipartite = graph(range(6), [(i, j) for i in range(3) for j in range(3, 6)])
        self.assertNotEqual(canonical_form(prism), canonical_form(bipartite))

    @settings(max_examples=40, deadline=None)
    @given(small_graphs(), st.randoms(use_true_random=False))
    def test_relabel_invariance(self, M, random):
        """ Test that relabeled copies have the same canonical label """
        ids = list(range(10, 10 + len(M)))
        random.shuffle(ids)
        N = relabel(M, dict(zip(M.universe, ids)))
        self.assertEqual(canonical_form(M), canonical_form(N))

    def test_isomorphism_classes(self):
        """ Test that the 64 graphs on 4 labeled vertices fall into 11 isomorphism classes """
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        labels = set()
        for mask in range(2 ** len(pairs)):
            edges = [p for k, p in enumerate(pairs) if mask & (1 << k)]
            labels.add(canonical_form(graph(range(4), edges)))
        self.assertEqual(len(labels), 11)

    def test_fixed_pairs(self):
        """ Test that labels with two individualized elements agree exactly when an isomorphism matches them """
        M = graph(range(4), [(0, 1), (1, 2), (2, 3)])
        automorphisms = [
            p
            for p in permutations(range(4))
            if all(((p[x], p[y]) in M.relation("r")) for x, y in M.relation("r"))
        ]
        for a, b in [(0, 1), (1, 0), (0, 3), (1, 2)]:
            for c, d in [(3, 2), (2, 3), (3, 0), (2, 1)]:
                with self.subTest("({}, {}) vs ({}, {})".format(a, b, c, d)):
                    related = any(p[a] == c and p[b] == d for p in automorphisms)
                    self.assertEqual(canonical_form(M, (a, b)) == canonical_form(M, (c, d)), related)


if __name__ == "__main__":
    unittest.main()
