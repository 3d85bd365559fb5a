import os
import unittest

from .. import (
    AmalgamationError,
    Axiom,
    AxiomReport,
    AxiomViolation,
    AutomorphismGraphSpec,
    ComponentLabel,
    ConstantsTrianglesSpec,
    FinStructure,
    GraphClassSpec,
    PartialMorphism,
    RestrictionClosure,
    StructureError,
    Verdict,
    amalgamate,
    audit_mode,
    check_ap_bounded,
    check_closure_axioms,
    check_fc_bounded,
    check_jep_bounded,
    class_morphisms,
    connected_component,
    empty_map,
    extend_to_strong_embedding,
    finite_character_check,
    free_amalgam,
    identity,
    is_chain_of_models,
    is_partial_embedding,
    is_strong_submodel,
    replay_counterexample,
)
from ..graphs import GRAPH_SIGNATURE, graph

SLOW_TESTS = bool(os.environ.get("RICHGEN_SLOW_TESTS"))


class IncreasingMapsSpec(GraphClassSpec):
    """ Graphs whose morphisms only move elements up. Inverses of morphisms are not morphisms. """

    name = "increasing-maps"

    def is_morphism(self, f, M=None, N=None):
        return is_partial_embedding(f, M, N) and all(x <= y for x, y in f.graph)


class EdgeDroppingSpec(GraphClassSpec):
    """ Graphs whose amalgamation forgets every edge. """

    name = "edge-dropping"

    def amalgamate(self, f1, f2):
        N, h1, h2 = free_amalgam(f1, f2)
        empty = graph(N.universe, [])
        return empty, h1.retarget(empty), h2.retarget(empty)


class TotalMapsSpec(GraphClassSpec):
    """ Graphs whose morphisms are the total embeddings. Restrictions of morphisms are not morphisms. """

    name = "total-maps"

    def is_morphism(self, f, M=None, N=None):
        return is_partial_embedding(f, M, N) and f.is_total()


class PairedConstantsSpec(ConstantsTrianglesSpec):
    """ Graphs with constants whose morphisms keep all constants or none of them. """

    def is_morphism(self, f, M=None, N=None):
        kept = len(f.domain & f.source.constant_elements)
        return super().is_morphism(f, M, N) and kept in (0, len(f.source.constant_elements))


class TestClassSpec(unittest.TestCase):
    def test_members(self):
        """ Test that the graphs of size at most 3 come in 1 + 1 + 2 + 4 isomorphism types """
        members = GraphClassSpec().members(3)
        self.assertEqual(len(members), 8)
        self.assertEqual([len(M) for M in members], [0, 1, 2, 2, 3, 3, 3, 3])

    def test_metaclass_flags(self):
        """ Test that overriding is_morphism marks a class as having special morphisms """
        self.assertTrue(GraphClassSpec.morphisms_are_embeddings)
        self.assertFalse(IncreasingMapsSpec.morphisms_are_embeddings)
        self.assertTrue(ConstantsTrianglesSpec(0, constants=1).morphisms_are_embeddings)
        self.assertFalse(ConstantsTrianglesSpec(None, constants=1).morphisms_are_embeddings)

    def test_amalgamation_guard(self):
        """ Test that structure errors in amalgamate surface as AmalgamationError """

        class BrokenSpec(GraphClassSpec):
            def amalgamate(self, f1, f2):
                raise StructureError("broken")

        M = graph([0], [])
        with self.assertRaises(AmalgamationError):
            BrokenSpec().amalgamate(identity(M), identity(M))

    def test_component_label(self):
        """ Test that labels compare by value only """
        self.assertEqual(ComponentLabel(2, "constant-active"), ComponentLabel(2, "triangle-count"))
        self.assertEqual(str(ComponentLabel(2, "constant-active")), "2 (constant-active)")
        self.assertEqual(connected_component(GraphClassSpec(), graph([0], [])), ComponentLabel("graphs"))
        with self.assertRaises(StructureError):
            connected_component(GraphClassSpec(), FinStructure(GRAPH_SIGNATURE, [0], relations={"r": [(0, 0)]}))


class TestAmalgamation(unittest.TestCase):
    def test_free_amalgam(self):
        """ Test the free amalgam of two edges over a common vertex """
        M = graph([0], [])
        N1 = graph([0, 1], [(0, 1)])
        N2 = graph([5, 6], [(5, 6)])
        f1 = PartialMorphism(M, N1, {0: 0})
        f2 = PartialMorphism(M, N2, {0: 6})
        N, h1, h2 = amalgamate(GraphClassSpec(), f1, f2)
        self.assertEqual(N.universe, (0, 1, 2))
        self.assertEqual(h1.graph, ((0, 0), (1, 1)))
        self.assertEqual(h2.graph, ((5, 2), (6, 0)))
        self.assertEqual(len(N.relation("r")), 4)
        self.assertFalse(N.holds("r", (1, 2)))

    def test_strong_embedding(self):
        """ Test that a morphism extends to a total morphism into an extension """
        spec = GraphClassSpec()
        edge = graph([0, 1], [(0, 1)])
        point = graph([0], [])
        f = PartialMorphism(edge, point, {0: 0})
        N, i, h = extend_to_strong_embedding(spec, f)
        self.assertTrue(h.is_total())
        self.assertTrue(spec.is_morphism(h))
        self.assertTrue(is_strong_submodel(spec, point, N))
        self.assertEqual(h(0), 0)

    def test_audit_mode(self):
        """ Test that audit mode catches unsound amalgams """
        spec = EdgeDroppingSpec()
        edge = graph([0, 1], [(0, 1)])
        f = identity(edge)
        amalgamate(spec, f, f)
        with audit_mode():
            with self.assertRaises(AmalgamationError):
                amalgamate(spec, f, f)

    def test_chains(self):
        """ Test chains of models """
        spec = GraphClassSpec()
        chain = [graph([0], []), graph([0, 1], [(0, 1)]), graph([0, 1, 2], [(0, 1), (1, 2)])]
        self.assertTrue(is_chain_of_models(spec, chain))
        self.assertFalse(is_chain_of_models(spec, [chain[1], graph([0, 1], [])]))


class TestClassMorphisms(unittest.TestCase):
    def test_enumeration(self):
        """ Test the class morphisms from an edge into a path """
        spec = GraphClassSpec()
        edge = graph([0, 1], [(0, 1)])
        path = graph([0, 1, 2], [(0, 1), (1, 2)])
        maps = list(class_morphisms(spec, edge, path))
        self.assertEqual(len(maps), 1 + 6 + 4)
        self.assertEqual([len(f) for f in maps], sorted(len(f) for f in maps))
        self.assertEqual(maps[1].graph, ((0, 0),))

    def test_bound(self):
        """ Test that the size bound limits the number of pairs """
        spec = GraphClassSpec()
        edge = graph([0, 1], [(0, 1)])
        self.assertTrue(all(len(f) <= 1 for f in class_morphisms(spec, edge, edge, 1)))

    def test_pinned_constants(self):
        """ Test that constants are always mapped to the same constants """
        spec = ConstantsTrianglesSpec(0, constants=0)
        M = spec.default_seed()
        maps = list(class_morphisms(spec, M, M))
        self.assertTrue(all(f.get(M.constant(c)) == M.constant(c) for f in maps for c in M.sig.constants))


class TestBoundedChecks(unittest.TestCase):
    def test_graphs(self):
        """ Test that graphs pass every bounded check """
        spec = GraphClassSpec()
        for report in check_closure_axioms(spec, 3) + (
            check_ap_bounded(spec, 3),
            check_jep_bounded(spec, 3),
            check_fc_bounded(spec, 3),
        ):
            with self.subTest(report.axiom.value):
                self.assertTrue(report.passed)
                self.assertGreater(report.checked, 0)

    def test_inverse_defect(self):
        """ Test that maps that only move elements up fail K2 with a replayable counterexample """
        spec = IncreasingMapsSpec()
        k2, r = check_closure_axioms(spec, 2)
        self.assertFalse(k2.passed)
        self.assertTrue(r.passed)
        self.assertTrue(replay_counterexample(spec, k2))

    def test_amalgamation_defect(self):
        """ Test that dropping edges fails Ap with a replayable counterexample """
        spec = EdgeDroppingSpec()
        report = check_ap_bounded(spec, 2, legs=1)
        self.assertFalse(report.passed)
        self.assertIs(report.axiom, Axiom.Ap)
        self.assertEqual(len(report.counterexample.maps), 1)
        self.assertTrue(replay_counterexample(spec, report))
        self.assertIn("reason", report.to_json()["counterexample"])

    def test_partial_constants_defect(self):
        """ Test that R fails when a restriction keeping only some constants is not a morphism """
        spec = PairedConstantsSpec(0, constants=0)
        k2, r = check_closure_axioms(spec, 1)
        self.assertTrue(k2.passed)
        self.assertFalse(r.passed)
        f, g = r.counterexample.maps
        self.assertEqual(len(g.domain & f.source.constant_elements), 1)
        self.assertTrue(replay_counterexample(spec, r))

    def test_two_legs(self):
        """ Test that the amalgamation audit enumerates every pair of legs over a common source """
        spec = GraphClassSpec()
        expected = 0
        for M in spec.members(2):
            arrows = sum(1 for N in spec.members(2) for _ in class_morphisms(spec, M, N, 2))
            expected += arrows * arrows
        report = check_ap_bounded(spec, 2)
        self.assertTrue(report.passed)
        self.assertEqual(report.checked, expected)
        self.assertEqual(report.cases, {"free": expected})
        self.assertGreater(report.checked, check_ap_bounded(spec, 2, legs=1).checked)

    def test_two_legs_defect(self):
        """ Test that a failed two-leg instance is recorded with both legs and replays """
        spec = EdgeDroppingSpec()
        report = check_ap_bounded(spec, 2)
        self.assertFalse(report.passed)
        f1, f2 = report.counterexample.maps
        self.assertEqual(f1.source, f2.source)
        self.assertEqual(len(report.counterexample.structures), 3)
        self.assertTrue(replay_counterexample(spec, report))
        with self.assertRaises(ValueError):
            check_ap_bounded(spec, 2, legs=3)

    def test_restriction_defect(self):
        """ Test that total-only morphisms fail R, and that closing under restrictions repairs it """
        _, r = check_closure_axioms(TotalMapsSpec(), 2)
        self.assertFalse(r.passed)
        self.assertTrue(replay_counterexample(TotalMapsSpec(), r))

        _, r = check_closure_axioms(RestrictionClosure(TotalMapsSpec()), 2)
        self.assertTrue(r.passed)

    def test_finite_character(self):
        """ Test that a spec that is not closed under restriction violates finite character """
        spec = TotalMapsSpec()
        edge = graph([0, 1], [(0, 1)])
        with self.assertRaises(AxiomViolation):
            finite_character_check(spec, identity(edge))
        self.assertFalse(check_fc_bounded(spec, 2).passed)
        self.assertTrue(finite_character_check(GraphClassSpec(), identity(edge)))

    def test_automorphism_graphs(self):
        """ Test that graphs with a partial automorphism pass closure and amalgamation checks """
        spec = AutomorphismGraphSpec()
        k2, r = check_closure_axioms(spec, 2)
        self.assertTrue(k2.passed)
        self.assertTrue(r.passed)
        self.assertTrue(check_ap_bounded(spec, 2).passed)
        self.assertTrue(check_jep_bounded(spec, 2).passed)

    def test_constants_triangles(self):
        """ Test amalgamation and joint embedding in small components """
        for n in (0, 1):
            with self.subTest("ct:{}".format(n)):
                spec = ConstantsTrianglesSpec(n, constants=1)
                with audit_mode():
                    report = check_ap_bounded(spec, 2)
                self.assertTrue(report.passed)
                self.assertTrue(check_jep_bounded(spec, 2).passed)
                if n == 0:
                    self.assertGreater(report.cases["free"], 0)
                    self.assertGreater(report.cases["fresh-neighbour"], 0)

        with self.subTest("whole class"):
            self.assertTrue(check_jep_bounded(ConstantsTrianglesSpec(None, constants=1), 2).passed)

    @unittest.skipIf(not SLOW_TESTS, "Set RICHGEN_SLOW_TESTS to run exhaustive audits")
    def test_larger_bounds(self):
        """ Test amalgamation and joint embedding at larger bounds """
        self.assertTrue(check_ap_bounded(GraphClassSpec(), 4, legs=1).passed)
        self.assertTrue(check_jep_bounded(GraphClassSpec(), 4).passed)
        self.assertTrue(check_ap_bounded(AutomorphismGraphSpec(), 3, legs=1).passed)
        self.assertTrue(check_jep_bounded(AutomorphismGraphSpec(), 3).passed)

    @unittest.skipIf(not SLOW_TESTS, "Set RICHGEN_SLOW_TESTS to run exhaustive audits")
    def test_constants_triangles_larger_bounds(self):
        """ Test that components 0, 1 and 2 pass at bound 4 through both amalgamation constructions """
        for n in (0, 1, 2):
            with self.subTest("ct:{}".format(n)):
                spec = ConstantsTrianglesSpec(n, constants=2)
                report = check_ap_bounded(spec, 4, legs=1)
                self.assertTrue(report.passed)
                self.assertGreater(report.cases["free"], 0)
                self.assertGreater(report.cases["fresh-neighbour"], 0)
                self.assertEqual(sum(report.cases.values()), report.checked)
                self.assertTrue(check_jep_bounded(spec, 4).passed)


class TestAxiomReport(unittest.TestCase):
    def test_consistency(self):
        """ Test that a failed verdict needs a counterexample and a pass forbids one """
        with self.assertRaises(ValueError):
            AxiomReport(Axiom.Ap, Verdict.Fail, 2)
        report = AxiomReport("Ap", "pass", 2)
        self.assertTrue(report.passed)
        self.assertEqual(report.to_json()["verdict"], "pass")
        self.assertFalse(replay_counterexample(GraphClassSpec(), report))

    def test_value_guards(self):
        """ Test that bounds must be positive """
        for check in (check_ap_bounded, check_jep_bounded, check_fc_bounded):
            with self.subTest(check.__name__):
                with self.assertRaises(ValueError):
                    check(GraphClassSpec(), 0)

    def test_joint_embedding_of_empty(self):
        """ Test that the empty map joins two members """
        spec = GraphClassSpec()
        M1, M2 = graph([0], []), graph([0, 1], [(0, 1)])
        N, h1, h2 = amalgamate(spec, empty_map(M1, M2), identity(M1))
        self.assertEqual(len(N), 3)


if __name__ == "__main__":
    unittest.main()
