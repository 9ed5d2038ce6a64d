"""Batch law evaluation over arrays of Lie data.

The compiled extension is used when it was built; otherwise the numpy
implementation is loaded. Set ``SAFESTAB_FORCE_PYTHON=1`` to force the
fallback; ``compiled_backend`` stays importable for comparisons. ``BACKEND``
names the active implementation.

>>> from safestab import kernels
>>> kernels.evaluate([-3.0], [1.0], [1.0], [-1.0], law="km")
array([2.])
"""

import os

from . import _kernels_py

__all__ = ["BACKEND", "evaluate", "phi", "compatible", "simulate_example", "python_backend", "compiled_backend"]

python_backend = _kernels_py
try:
    from . import _kernels as compiled_backend
except ImportError:
    compiled_backend = None

if compiled_backend is None or os.environ.get("SAFESTAB_FORCE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    _impl = compiled_backend

BACKEND = "compiled" if _impl is compiled_backend else "python"

evaluate = _impl.evaluate
phi = _impl.phi
compatible = _impl.compatible
simulate_example = _impl.simulate_example
