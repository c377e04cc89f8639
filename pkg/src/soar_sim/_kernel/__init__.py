"""Kernel backend selection.

Imports the compiled extension when it is built, otherwise falls back to
the pure-Python implementation. SOAR_SIM_KERNEL=pure|compiled forces a
backend; "compiled" raises if the extension is missing instead of
silently degrading.
"""

import os

_requested = os.environ.get("SOAR_SIM_KERNEL", "auto").strip().lower()

if _requested in ("pure", "python"):
    from soar_sim._kernel.pure import step_core, steer_core, wrap_angle
    BACKEND = "pure"
elif _requested in ("auto", "", "compiled", "fast"):
    try:
        from soar_sim._kernel.fast import step_core, steer_core, wrap_angle
        BACKEND = "compiled"
    except ImportError:
        if _requested in ("compiled", "fast"):
            raise ImportError(
                "SOAR_SIM_KERNEL=compiled but the extension is not built; "
                "reinstall without SOAR_SIM_NO_EXT or unset SOAR_SIM_KERNEL"
            )
        from soar_sim._kernel.pure import step_core, steer_core, wrap_angle
        BACKEND = "pure"
else:
    raise ValueError(
        f"unknown SOAR_SIM_KERNEL value {_requested!r}; "
        "expected 'auto', 'pure' or 'compiled'"
    )

__all__ = ["BACKEND", "steer_core", "step_core", "wrap_angle"]
