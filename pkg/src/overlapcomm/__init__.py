"""Planted overlapping communities and sampling-based detectors.

The main entry points are :func:`generate`, the detectors in
:mod:`overlapcomm.detector`, :func:`validate`, the brute-force references
in :mod:`overlapcomm.oracle`, and :func:`match_communities`.
"""
from .detector import (ALGORITHMS, CandidateSet, DetectionResult, DetectorParams,
                       any_size_clique_find, any_size_dense_find, certify_candidate,
                       clique_find, dense_find, gap_relaxed_clique_find, gap_relaxed_dense_find,
                       robust_dense_find, sparse_pipeline, square_transform)
from .errors import (BudgetExceededError, FormatError, GenerationInfeasibleError,
                     InvalidInputError, InvalidParamsError, OverlapCommError)
from .evaluation import InstanceSpec, match_communities, recovery_rate, relaxed_match
from .generator import AmbientSpec, GroundTruth, ModelParams, generate
from .graph import (Graph, RngStream, adjacency_fraction, bernoulli_subsample,
                    common_neighbor_count, induced_subgraph, is_alpha_epsilon_set, neighborhood,
                    neighborhood_of_set)
from .kernels import BACKEND
from .validator import validate

__version__ = "0.1.0"
