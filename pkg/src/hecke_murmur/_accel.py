"""Backend selection for the hot kernels.

Set ``HECKE_MURMUR_NO_NUMBA=1`` to force the pure-numpy path. The numba path
is used whenever numba imports cleanly and the flag is unset.
"""
import os
import warnings

ENV_FLAG = "HECKE_MURMUR_NO_NUMBA"


def numba_disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


# the system TBB is too old for numba; pick OpenMP up front instead of warning on first launch
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()
