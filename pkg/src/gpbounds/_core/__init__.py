"""Backend selection: compiled extension if available, pure NumPy otherwise.

Set GPBOUNDS_BACKEND=pure or =compiled to force a choice ("compiled" raises
if the extension was not built).  The selected module exposes ``bessel_k``,
``matern_profile`` and ``newton_greedy`` with identical contracts.
"""

import os

_choice = os.environ.get("GPBOUNDS_BACKEND", "auto")
if _choice not in ("auto", "compiled", "pure"):
    raise ImportError(f"GPBOUNDS_BACKEND must be auto|compiled|pure, got {_choice!r}")

impl = None
if _choice in ("auto", "compiled"):
    try:
        from . import _corex as impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise
if impl is None:
    from . import _purepy as impl

bessel_k = impl.bessel_k
matern_profile = impl.matern_profile
newton_greedy = impl.newton_greedy


def backend_name() -> str:
    return impl.BACKEND_NAME
