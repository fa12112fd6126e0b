"""Backend selection for the batch kernels.

The compiled extension is used when importable; otherwise the numpy twin.
``use_backend`` switches explicitly, which the tests and benchmark rely on.
"""
import contextlib

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _compiled or _fallback


def available():
    return sorted(_BACKENDS)


def backend_name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    global _active
    try:
        _active = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available()}") from None


@contextlib.contextmanager
def backend(name):
    prev = backend_name()
    use_backend(name)
    try:
        yield
    finally:
        use_backend(prev)


def ripple_add(a, b, a_offset, b_offset, width):
    return _active.ripple_add(a, b, a_offset, b_offset, width)


def gather(entries, selectors):
    return _active.gather(entries, selectors)


def popcount_xor_sum(z, values):
    return _active.popcount_xor_sum(z, values)
