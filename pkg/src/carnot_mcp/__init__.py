"""Exact stratified Lie algebra tools for Martinet quotients and Goh-Legendre checks, plus
numerics for Martinet geodesics and the reduced Jacobian."""

from .algebra import (AlgebraError, GradedIdeal, GradedSubspace, QuotientError, StratifiedAlgebra,
                      ValidationReport, ad_matrix, bracket, is_engel_type, is_graded_ideal,
                      is_graded_subalgebra, quotient_algebra, validate)
from .catalog import (AlgebraFileError, AlgebraRecord, CatalogError, Verdict, catalog_get, catalog_list,
                      classify, parse_algebra_file, serialize_record)
from .elliptic import complete_E, complete_K, jacobi_E, jacobi_sn_cn_dn
from .families import engel, filiform, free_nilpotent, heisenberg, witt_dimension
from .goh import (GohLegendreReport, eval_goh_general_constant, eval_goh_legendre_step3, legendre_form,
                  search_goh_legendre_witness, search_goh_witness)
from .martinet import (GeodesicPoint, MartinetCovector, MCPRatioReport, OscParams, conjugate_time, cut_time,
                       expansion_jr, full_jacobian_density, geodesic_closed_form, geodesic_ode_oracle,
                       mcp_ratio, mcp_violation_search, params_from_covector, reduced_jacobian)
from .quotients import (EngelQuotientWitness, HyperplaneCertificate, TowerResult, build_engel_ideal, build_tower,
                        generic_dim_bound, h2_of_h3, h3_of_cert, search_martinet_certificate,
                        verify_martinet_certificate)

__version__ = "0.1.0"
