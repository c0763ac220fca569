"""Hot loops over multiplication tables, with two interchangeable backends.

The numba backend JIT-compiles the loops; the numpy backend expresses the
same computations with vectorized indexing. Backend selection:

* ``PGF_KERNEL=numba`` or ``PGF_KERNEL=numpy`` forces one backend and fails
  loudly if it is unavailable,
* ``PGF_KERNEL=auto`` (or unset) prefers numba when importable.

Both backends are pure functions of their arguments and must return
identical arrays; the test suite asserts this on real tables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

KERNEL_ENV = "PGF_KERNEL"


def _np_closure(table: np.ndarray, seed: np.ndarray) -> np.ndarray:
    """Membership mask of the subgroup generated by the seed element ids.

    Breadth-first closure under right multiplication by the seeds. Row 0 of
    the table must be the identity, which every subgroup contains.
    """
    n = table.shape[0]
    member = np.zeros(n, dtype=bool)
    member[0] = True
    if seed.size == 0:
        return member
    seed = np.unique(seed)
    member[seed] = True
    frontier = seed[seed != 0]
    while frontier.size:
        prods = np.unique(table[np.ix_(frontier, seed)])
        fresh = prods[~member[prods]]
        member[fresh] = True
        frontier = fresh
    return member


def _np_extension_candidates(
    table: np.ndarray,
    conj: np.ndarray,
    powl: np.ndarray,
    member: np.ndarray,
) -> np.ndarray:
    """Mask of elements g outside H with g**l in H that normalize H.

    H is given by its membership mask; ``conj[g, x]`` holds g^-1 x g and
    ``powl[g]`` holds g**l. Adjoining any such g to H yields a subgroup of
    index l over H, and every index-l overgroup arises this way.
    """
    h_ids = np.nonzero(member)[0]
    ok = member[powl] & ~member
    if h_ids.size:
        ok &= member[conj[:, h_ids]].all(axis=1)
    return ok


_BUILDERS: dict[str, Callable[[], "Kernels"]] = {}


@dataclass(frozen=True)
class Kernels:
    """A named pair of table kernels with a shared calling convention."""

    name: str
    closure: Callable[[np.ndarray, np.ndarray], np.ndarray]
    extension_candidates: Callable[
        [np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray
    ]


def _build_numpy() -> Kernels:
    return Kernels("numpy", _np_closure, _np_extension_candidates)


_BUILDERS["numpy"] = _build_numpy

try:  # pragma: no cover - exercised indirectly when numba is installed
    import numba

    @numba.njit(cache=True)
    def _nb_closure(table, seed):
        n = table.shape[0]
        member = np.zeros(n, dtype=np.bool_)
        member[0] = True
        stack = np.empty(n, dtype=np.int64)
        stack[0] = 0
        top = 1
        for i in range(seed.size):
            s = seed[i]
            if not member[s]:
                member[s] = True
                stack[top] = s
                top += 1
        while top > 0:
            top -= 1
            x = stack[top]
            for i in range(seed.size):
                y = table[x, seed[i]]
                if not member[y]:
                    member[y] = True
                    stack[top] = y
                    top += 1
        return member

    @numba.njit(cache=True)
    def _nb_extension_candidates(table, conj, powl, member):
        n = table.shape[0]
        h_ids = np.nonzero(member)[0]
        out = np.zeros(n, dtype=np.bool_)
        for g in range(n):
            if member[g] or not member[powl[g]]:
                continue
            good = True
            for t in range(h_ids.size):
                if not member[conj[g, h_ids[t]]]:
                    good = False
                    break
            out[g] = good
        return out

    def _build_numba() -> Kernels:
        return Kernels("numba", _nb_closure, _nb_extension_candidates)

    _BUILDERS["numba"] = _build_numba
except ImportError:  # pragma: no cover
    pass


_CACHE: dict[str, Kernels] = {}


def available() -> tuple[str, ...]:
    """Backend names usable in this environment, preferred first."""
    names = []
    if "numba" in _BUILDERS:
        names.append("numba")
    names.append("numpy")
    return tuple(names)


def get_kernels(name: str = "auto") -> Kernels:
    """Resolve a backend by name; ``auto`` prefers numba when present."""
    if name == "auto":
        name = available()[0]
    if name not in _BUILDERS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {', '.join(available())}"
        )
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


_active: Kernels | None = None


def active_kernels() -> Kernels:
    """The process-wide backend, chosen from PGF_KERNEL on first use."""
    global _active
    if _active is None:
        _active = get_kernels(os.environ.get(KERNEL_ENV, "auto"))
    return _active


def set_active_kernels(name: str) -> Kernels:
    """Override the process-wide backend (used by tests and benchmarks)."""
    global _active
    _active = get_kernels(name)
    return _active
