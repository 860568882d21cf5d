"""Existence of (self-dual) cuspidal Deligne-Lusztig and depth-zero supercuspidal
representations, decided by rule and checked by exhaustive torus-character search."""

from .classical import (ORTHOGONAL, UNITARY, ProductL, TorusShape, build_product_L,
                        construct_su8_12, construct_u_crude, construct_v_element,
                        enumerate_shapes, restrict_to_SU, su_quotient, sum_zero_subgroup,
                        sweep_levels)
from .errors import CuspError, OracleInfeasible, SpecError
from .existence import (DecisionReport, Verdict, center_coprimality, decide_finite,
                        hypothesis_status, transfer_rules, verify_decision, zsygmondy)
from .lattice import FinAbGroup, IntMatrix, cokernel, smith_normal_form
from .padic import PadicFactorSpec, PadicSpec, decide_padic, reductive_quotient_type
from .rootdata import Factor, GroupSpec, RootDatum, build_root_datum, twisted_coxeter_number
from .toruschar import (build_L, exists_dl, exists_sd_dl, find_character,
                        is_conjugate_self_dual, is_general_position, search_gp, search_sd_gp)
from .weyl import (char_poly, coxeter_class, cyclotomic_factor, elliptic_classes,
                   enumerate_weyl, twisted_centralizer, twisted_classes)

__version__ = "0.1.0"
