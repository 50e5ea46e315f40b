"""Determinantal subspace processes over the reals, complexes and quaternions.

The package builds probability measures on the adapted Grassmannian of a
split inner product space from a self-adjoint contraction kernel, with exact
samplers, density evaluators, an exterior-algebra oracle, quantum spanning
forests on graphs, and a statistical verification harness.
"""

from .scalars import Field, Quaternion, complexify, qdet, realify, tau_det
from .linalg import (Frame, Operator, cos2, gram_schmidt, haar_frame,
                     hermitian_eig, intersection_dim, oblique_projector,
                     projection, schur_density, compress)
from .splitspace import (AdaptedSubspace, SplitSpace, Stratum, join_frame,
                         orthocomplement, restrict_scalars,
                         sample_uniform_adapted, split_dimension, strata)
from .dpp import (Kernel, density_table, incidence_prob, mobius_invert,
                  sample_enumerated, sample_recursive, subset_density)
from .process import (DlpModel, DlpSample, complement_model, dlp_density,
                      laplace_transform, matroid_support,
                      mean_projection_estimate, restrict, sample,
                      sample_via_mixture, scale_model, strata_masses)
from .extalg import (ExteriorOperator, ExteriorVector, adjugate,
                     density_operator, dlp_prob_trace, hodge_sign, plucker,
                     strata_projector, wedge_operator)
from .qsf import (Connection, WeightedGraph, grid_graph, render_svg,
                  sample_haar_connection, sample_qsf, star_space,
                  transfer_current, twisted_derivative)
from .harness import RngSpec, SuiteReport, chi_square, mean_band, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
