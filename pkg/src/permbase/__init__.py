"""Permutation groups, base sizes, fixed point ratios and Weyl-group
character sums."""

__version__ = "0.1.0"

from .errors import InputError, InternalError, PermbaseError, ResourceError, StateError
from .perm import Permutation
from .chain import StabilizerChain, build_chain
from .group import (CosetActionResult, GroupHandle, coset_action, load_group,
                    pointwise_stabilizer, save_group)
from .classes import (ClassInventory, ConjClassRecord, class_inventory, class_size,
                      count_elements_of_order, count_elements_of_prime_order, fpr_by_fixes,
                      fpr_by_fusion, fuse_classes)
from .basesize import (BaseCertificate, BoundLedger, IntersectionWitness, LowerBoundTranscript,
                       aggregate_bound, conjugate_intersection_witness, greedy_base, is_base,
                       minimal_base_size_exact, q_exact, q_montecarlo, qhat_from_inventory,
                       qhat_from_table)
from .weylchar import (IntPolynomial, ParabolicCharQuery, build_root_system, chi_semisimple,
                       parabolic_index_poly, relative_rank, split_centralizer_order_pprime,
                       torus_order_poly, WeylGroupData)
