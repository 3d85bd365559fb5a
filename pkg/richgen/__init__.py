# -*- coding: utf-8 -*-
__author__ = "Laurent P. René de Cotret"
__email__ = "laurent.renedecotret@mail.mcgill.ca"
__license__ = "BSD"
__version__ = "0.1.0"


class ModelException(Exception):
    """ Base exception for structure-related errors. """

    pass


class ModelWarning(UserWarning):
    """ Base warning for structure-related warnings. """

    pass


from .structures import (
    Signature,
    FinStructure,
    StructureError,
    induced_substructure,
    is_substructure,
    relabel,
    structure_to_json,
    structure_from_json,
    load_structure,
    dump_structure,
    adjacency_matrix,
    to_networkx,
    write_dot,
)
from .canonical import canonical_form
from .morphisms import (
    PartialMorphism,
    MorphismError,
    QfAtom,
    AtomKind,
    identity,
    inclusion,
    empty_map,
    compose,
    invert,
    restrict,
    union_of_chain,
    is_partial_embedding,
    is_isomorphism,
    find_total_extension,
    local_type,
    morphism_to_json,
    morphism_from_json,
)
from .base import ClassSpec, ComponentLabel, AmalgamationError, free_amalgam
from .engine import (
    Axiom,
    Verdict,
    AxiomReport,
    AxiomViolation,
    RestrictionClosure,
    amalgamate,
    extend_to_strong_embedding,
    is_strong_submodel,
    is_chain_of_models,
    class_morphisms,
    check_closure_axioms,
    check_ap_bounded,
    check_jep_bounded,
    check_fc_bounded,
    finite_character_check,
    connected_component,
    replay_counterexample,
)
from .builder import (
    ExtensionTask,
    TaskQueue,
    BuildTrace,
    TraceError,
    SkippedTaskWarning,
    enumerate_tasks,
    build_generic,
    replay,
    trace_prefix,
)
from .richness import (
    RichnessReport,
    HomogeneityReport,
    BackAndForthResult,
    richness_check,
    back_and_forth_extend,
    homogeneity_check,
    ef_equivalence,
)
from .graphs import GraphClassSpec
from .triangles import (
    OMEGA,
    ConstantsTrianglesSpec,
    FullnessReport,
    triangle_count,
    ct_amalgamate,
    build_rich_K,
    fullness_witness,
)
from .automorphisms import AutomorphismGraphSpec, auto_morphism_pred, cycle_audit
from .registry import get_class, class_names
from .utils import audit_mode, AuditWarning
