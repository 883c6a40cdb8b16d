"""Extremal uniform hypergraphs: property checkers, packing-based
constructions, exact small-case search and exact bound tables."""

__version__ = "0.1.0"

from .core import (Hypergraph, PackedCopy, PackingRecord, SubsetFamily, canonicalize, dumps_hypergraph,
                   loads_hypergraph, overlap_defect, read_hypergraph, write_hypergraph)
from .properties import (degree_spectrum, is_ell_minus_free, is_induced_packing, is_t_cancellative,
                         is_t_cover_free, is_t_union_free, is_ve_free, matching_number)
from .packing import audit_packing, greedy_conflict_free_packing
from .constructions import (ConstructionParams, build_cancellative, build_union_free, choose_m0, k_shadow,
                            lift_to_F, random_ell_minus_free)
from .search import SearchProblem, brute_force_oracle, erdos_matching_table, extremal_search
from .bounds import closed_form_bounds, density_ratio, upper_bound_certificate
from .rng import seed_substream

__all__ = [name for name in dir() if not name.startswith("_")]
