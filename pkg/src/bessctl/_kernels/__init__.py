"""Hot-loop kernels: one-slot dispatch dynamics, Q-network math, and the
exhaustive small-horizon search.

Two interchangeable backends exist. ``pyref`` is the pure-Python
reference built directly on the battery/billing module functions;
``_compiled`` is a Cython mirror of the same arithmetic used when the
extension is built. Selection happens at import, overridable with
BESSCTL_KERNEL=py|compiled. ``benchmarks/bench_kernels.py`` compares the
two.
"""

import os

from . import pyref

_FORCED = os.environ.get("BESSCTL_KERNEL", "").strip().lower()

KERNEL_API = ("make_slot_context", "slot_step", "nn_forward", "nn_forward_batch",
              "nn_train_step", "nn_gradients", "oracle_search")


def _load_compiled():
    from . import _compiled  # type: ignore[attr-defined]

    if not all(hasattr(_compiled, name) for name in KERNEL_API):
        raise ImportError("compiled kernel module is incomplete")
    return _compiled


if _FORCED in ("py", "python", "pure"):
    impl = pyref
    COMPILED = False
else:
    try:
        impl = _load_compiled()
        COMPILED = True
    except ImportError:
        if _FORCED in ("c", "cy", "compiled"):
            raise ImportError(
                "BESSCTL_KERNEL requested the compiled kernel but the extension "
                "is not built; run `pip install -e . --no-build-isolation`"
            ) from None
        impl = pyref
        COMPILED = False

BACKEND = "compiled" if COMPILED else "python"

make_slot_context = impl.make_slot_context
slot_step = impl.slot_step
nn_forward = impl.nn_forward
oracle_search = impl.oracle_search

# Batch network math stays on numpy/BLAS in both backends: measured on the
# shipped layer sizes, BLAS beats the plain compiled loops for batched
# matmuls while the compiled kernels win on the scalar-heavy paths above
# (see benchmarks/bench_kernels.py).
nn_forward_batch = pyref.nn_forward_batch
nn_train_step = pyref.nn_train_step
nn_gradients = pyref.nn_gradients
