"""Sampling-based detectors for overlapping communities."""
from .anysize import any_size_clique_find, any_size_dense_find
from .base import CandidateSet, DetectionResult, DetectorParams
from .certify import Certificate, certify_candidate
from .clique import clique_find, gap_relaxed_clique_find
from .dense import dense_find, gap_relaxed_dense_find, robust_dense_find
from .sparse import sparse_pipeline, square_transform

ALGORITHMS = {
    "clique": clique_find,
    "dense": dense_find,
    "robust": robust_dense_find,
    "anysize-dense": any_size_dense_find,
    "anysize-clique": any_size_clique_find,
    "gap-clique": gap_relaxed_clique_find,
    "gap-dense": gap_relaxed_dense_find,
    "sparse": sparse_pipeline,
}


def run(algorithm: str, g, params: DetectorParams, seed: int = 0, workers: int = 1) -> DetectionResult:
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    return fn(g, params, seed, workers)


__all__ = [
    "ALGORITHMS", "CandidateSet", "Certificate", "DetectionResult", "DetectorParams",
    "any_size_clique_find", "any_size_dense_find", "certify_candidate", "clique_find",
    "dense_find", "gap_relaxed_clique_find", "gap_relaxed_dense_find", "robust_dense_find",
    "run", "sparse_pipeline", "square_transform",
]
