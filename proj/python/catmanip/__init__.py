"""Category-level manipulation: canonical coordinates, attention and scenario runs.

The heavy lifting lives in the compiled ``_core`` extension. Installed wheels
carry it inside this package; when working from a plain CMake build tree the
module sits on ``PYTHONPATH`` instead, so fall back to the top-level name.
"""

try:
    from ._core import (
        CatmanipError,
        attention,
        correspond,
        denormalize,
        nearest_neighbors,
        normalize,
        run_config,
        solve_pose9d,
        umeyama,
    )
except ImportError:  # CMake build tree: _core is a sibling on PYTHONPATH
    from _core import (
        CatmanipError,
        attention,
        correspond,
        denormalize,
        nearest_neighbors,
        normalize,
        run_config,
        solve_pose9d,
        umeyama,
    )

__all__ = [
    "CatmanipError",
    "attention",
    "correspond",
    "denormalize",
    "nearest_neighbors",
    "normalize",
    "run_config",
    "solve_pose9d",
    "umeyama",
]

__version__ = "0.1.0"
