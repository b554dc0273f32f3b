"""Backend selection for the bitset kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation. ``OVERLAPCOMM_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("OVERLAPCOMM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _bitset as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _kernels_py

words_for = _impl.words_for
pack_rows = _impl.pack_rows
mask_from_nodes = _impl.mask_from_nodes
count_into = _impl.count_into
local_bits = _impl.local_bits
subset_scan = _impl.subset_scan
clique_scan = _impl.clique_scan
common_counts = _impl.common_counts
refine_dense = _impl.refine_dense
certify_sets = _impl.certify_sets


def backends():
    """Available kernel modules keyed by name (used by tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _bitset

        out["cython"] = _bitset
    except ImportError:  # pragma: no cover
        pass
    return out
