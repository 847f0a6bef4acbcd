"""Python surface of the hardylab numerical laboratory."""

try:
    from ._hardylab import *  # noqa: F401,F403  (installed layout)
    from . import _hardylab as _impl
except ImportError:  # flat build-tree layout used by the in-repo tests
    from _hardylab import *  # noqa: F401,F403
    import _hardylab as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
