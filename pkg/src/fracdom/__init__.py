"""Numerical toolkit for fractional Sobolev seminorms on rough domains.

Building blocks: an implicit-domain catalog, Whitney cube covers with a
subordinate partition of unity, hierarchical panel quadrature for
Gagliardo seminorms, fractional Poincare inequalities with explicit
constants, boundary-measure estimators (Ahlfors regularity, Hausdorff
content), Whitney-average extension operators, and a config-driven
experiment runner with deterministic CSV/JSON/SVG artifacts.
"""
__version__ = "0.1.0"

from .domains import (Box, Ball, DomainError, ImplicitDomain, get_domain,
                      ball_domain, box_domain, CATALOG)
from .functions import AnalyticFunction, get_function
from .grid import GridFunction, ResolutionError, sample
from .whitney import (DyadicCube, PartitionOfUnity, WhitneyCover,
                      partition_of_unity, reflect_centers, stretched_cube,
                      whitney_cover)
from .seminorm import (ParameterError, SeminormEstimate, gagliardo,
                       gagliardo_line, lp_norm, w1p_seminorm)
from .norms import (BbmSweep, HajlaszBound, PoincareRecord, bbm_constant,
                    bbm_sweep, hajlasz_bbm_bound, hajlasz_gradient_violation,
                    poincare_check, scaled_energy_direct, slicing_seminorm)
from .measure import (ContentEstimate, ContentTrend, RegularityReport,
                      ahlfors_check, ball_measure, boundary_hypothesis_check,
                      hausdorff_content)
from .extension import (BoundReport, ExtendedFunction, ambient_cover,
                        ambient_grid, cube_average, extend_E, extend_E2,
                        fractional_bound_check, gradient_bound_check,
                        lp_bound_check)
from .experiments import (ConfigError, ExperimentConfig, ExperimentReport,
                          dichotomy_table, emit_csv, emit_svg, load_config,
                          run)
