"""Chain-level homological structures: chain, mixed and parachain complexes,
C^♮ and periodicity, bicomplexes, triangular S-modules, spectral sequences."""
from .graded import GradedMap, GradedModule
from .chain import (ChainComplex, HomologyTable, MixedComplex, ParachainComplex, ParaSModule, as_mixed,
                    check_chain_map, check_parachain_map, cyclic_complex, cyclic_homology, homology,
                    homology_isomorphism_ranks, induced_homology_map, is_iso_report, lambda_complex, natural_map,
                    s_stabilization)
from .bicomplex import ParachainBicomplex, bicomplex_from_parts, totalize_bicomplex
from .triangular import TriangularSModule, compare_with_natural, tensor_smodule_mixed, triangularize
from .spectral import FilteredComplex, SSPage, SpectralSequence, spectral_sequence
