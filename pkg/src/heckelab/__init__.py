"""Symplectic similitudes, Siegel and mixed uniformization, isogeny matrices and Hecke orbits."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .ratmat import RationalMatrix, SymplecticForm, gsp_multiplier, height, hermite_normal_form, trivial_isotypic
from .siegel import SiegelPoint, act, reduce_g1, reduce_siegel_approx, in_fundamental_domain_g1
from .mixeduni import GroupElement, LevelStructure, MixedPoint, mixed_act, reduce_to_F, torsion_order
from .isogmat import (PolarizedIsogenyMatrix, enumerate_isogenies_g1, four_squares, matrix_expression,
                      min_isogeny_degree_g1, quaternion_block)
from .hecke import (DecompositionRecord, OrbitPoint, complexity_nontorsion, complexity_torsion,
                    division_points, enumerate_orbit_g1, height_witness, lemma53_witness, orbit_point, verify_decomposition)
from .wspecial import WeaklySpecialFiberData, fiber_membership, torsion_section_test_g1
from .elliptic import (INFINITY, CurveQ, PointQ, add, canonical_height, isogeny_height_scaling_check,
                       naive_height, torsion_order_ec, two_isogeny)
