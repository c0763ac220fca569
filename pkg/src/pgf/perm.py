"""Permutations of the points 1..degree.

Two conventions hold everywhere in this package:

* points are 1-based in every public signature and printed form;
* composition applies the LEFT factor first: ``(a * b)(x) == b(a(x))``.

Internally images are kept 0-based in a read-only numpy array so that the
table and kernel layers can index with them directly.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np


class Perm:
    __slots__ = ("_img", "_hash")

    def __init__(self, images: Sequence[int]):
        arr = np.asarray(images, dtype=np.int32)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("images must be a non-empty sequence")
        arr = arr - 1
        n = arr.size
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError(f"images must use each of 1..{n} exactly once")
        seen = np.zeros(n, dtype=bool)
        seen[arr] = True
        if not seen.all():
            raise ValueError(f"images must use each of 1..{n} exactly once")
        arr.setflags(write=False)
        self._img = arr
        self._hash = None

    # trusted constructor for internal use: arr is a valid 0-based image array
    @classmethod
    def _from0(cls, arr: np.ndarray) -> "Perm":
        p = object.__new__(cls)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        p._img = arr
        p._hash = None
        return p

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        if degree < 1:
            raise ValueError("degree must be at least 1")
        return cls._from0(np.arange(degree, dtype=np.int32))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        """Build from disjoint cycles of 1-based points, e.g. [(1, 3), (2, 4)]."""
        img = np.arange(degree, dtype=np.int32)
        used = set()
        for cyc in cycles:
            cyc = list(cyc)
            for pt in cyc:
                if not 1 <= pt <= degree:
                    raise ValueError(f"point {pt} outside 1..{degree}")
                if pt in used:
                    raise ValueError(f"point {pt} appears in more than one cycle")
                used.add(pt)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b - 1
        return cls._from0(img)

    @property
    def degree(self) -> int:
        return self._img.size

    @property
    def images(self) -> tuple:
        """Images of 1..degree, 1-based."""
        return tuple(int(x) + 1 for x in self._img)

    @property
    def img0(self) -> np.ndarray:
        """Read-only 0-based image array (for the table/kernel layer)."""
        return self._img

    def __call__(self, point: int) -> int:
        if not 1 <= point <= self._img.size:
            raise ValueError(f"point {point} outside 1..{self._img.size}")
        return int(self._img[point - 1]) + 1

    def __mul__(self, other: "Perm") -> "Perm":
        if not isinstance(other, Perm):
            return NotImplemented
        if other._img.size != self._img.size:
            raise ValueError("degree mismatch in composition")
        return Perm._from0(other._img[self._img])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self._img)
        inv[self._img] = np.arange(self._img.size, dtype=np.int32)
        return Perm._from0(inv)

    def __pow__(self, k: int) -> "Perm":
        """k-th power by repeated squaring; negative k inverts first."""
        if not isinstance(k, int):
            return NotImplemented
        base = self.inverse() if k < 0 else self
        k = abs(k)
        cur = base._img
        out = np.arange(base._img.size, dtype=np.int32)
        while k:
            if k & 1:
                out = cur[out]
            cur = cur[cur]
            k >>= 1
        return Perm._from0(out)

    def is_identity(self) -> bool:
        return bool((self._img == np.arange(self._img.size, dtype=np.int32)).all())

    def first_moved(self):
        """Smallest 1-based moved point, or None for the identity."""
        diff = np.nonzero(self._img != np.arange(self._img.size, dtype=np.int32))[0]
        return int(diff[0]) + 1 if diff.size else None

    def cycles(self) -> list:
        """Disjoint cycles (1-based), fixed points omitted, each cycle
        starting at its smallest point, cycles sorted by first point."""
        out = []
        seen = np.zeros(self._img.size, dtype=bool)
        for start in range(self._img.size):
            if seen[start] or self._img[start] == start:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x + 1)
                x = int(self._img[x])
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        o = 1
        for cyc in self.cycles():
            o = math.lcm(o, len(cyc))
        return o

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "id"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        return self._img.size == other._img.size and bool(
            (self._img == other._img).all()
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._img.tobytes())
        return self._hash

    def __repr__(self) -> str:
        return f"Perm({self.cycle_string()}, degree={self.degree})"


def compose(a: Perm, b: Perm) -> Perm:
    """Left-to-right composition: compose(a, b)(x) == b(a(x))."""
    return a * b


def identity(degree: int) -> Perm:
    return Perm.identity(degree)


def inverse(p: Perm) -> Perm:
    return p.inverse()


def conjugate(a: Perm, g: Perm) -> Perm:
    """g^-1 * a * g (left-to-right convention)."""
    if a._img.size != g._img.size:
        raise ValueError("degree mismatch in conjugation")
    out = np.empty_like(a._img)
    out[g._img] = g._img[a._img]
    return Perm._from0(out)


def commutator(a: Perm, b: Perm) -> Perm:
    """a^-1 * b^-1 * a * b."""
    return (b * a).inverse() * (a * b)
