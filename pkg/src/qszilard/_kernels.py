"""Backend selection for the summation kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. Set ``QSZILARD_PURE_PYTHON=1`` to force the fallback.
"""
import os

BACKEND = "python"

if not os.environ.get("QSZILARD_PURE_PYTHON"):
    try:
        from qszilard._ckernels import (  # noqa: F401
            scaled_complete_symmetric,
            scaled_elementary_symmetric,
            scaled_power_sums,
        )

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from qszilard._pykernels import (  # noqa: F401
        scaled_complete_symmetric,
        scaled_elementary_symmetric,
        scaled_power_sums,
    )
