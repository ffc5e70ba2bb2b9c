"""Backend selection for the residue kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over.  Both expose ``scan_zeros``, ``residue_tables`` and
``poly_roots_mod`` with identical results.
"""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_COMPILED_LIMIT = 1 << 32

_backend: ModuleType = _ckernels if _ckernels is not None else _pykernels


def compiled_available() -> bool:
    return _ckernels is not None


def backend_name() -> str:
    return "compiled" if _backend is _ckernels else "python"


def use_backend(name: str) -> str:
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _backend
    previous = backend_name()
    if name == "python":
        _backend = _pykernels
    elif name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _backend = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def _pick(modulus: int) -> ModuleType:
    # the compiled kernels work in 64-bit words
    if modulus >= _COMPILED_LIMIT:
        return _pykernels
    return _backend


def scan_zeros(forms, n, p, k, start, stop, max_hits):
    return _pick(p**k).scan_zeros(forms, n, p, k, start, stop, max_hits)


def residue_tables(exps, coeffs, n, p, k):
    return _pick(p**k).residue_tables(exps, coeffs, n, p, k)


def poly_roots_mod(coeffs, p, k, residue=-1):
    return _pick(p**k).poly_roots_mod(coeffs, p, k, residue)
