"""Finite-scale workbench for twinship parameters, partial-automorphism orbits and twin constructions."""

from .errors import *  # noqa: F401,F403
from .poset import FinPoset, SeqTree, seq_tree, is_dense, is_directed, meet, maximal_antichains, directed_cone_antichain
from .twinship import (TwinshipParam, validate_param, solves, is_strong, derive_from_forcing,
                       wellfound_transform, ForcingExample)
from .words import PartialMap, MapFamily, eval_word, orbit, make_word
from .org import (OrgStructure, check_K0, check_K1, check_K2, build_block, generic_map, e_closure,
                  is_orbit_generated)
from .structures import Structure, graph, ordered_graph, linear_order, qf_type, search_isomorphism
from .pipeline import assemble, verify_solution_isomorphism, verify_twin_hypotheses

__version__ = "0.1.0"
