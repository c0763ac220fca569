"""Permutation groups backed by deterministic stabilizer chains.

The chain construction (Schreier-Sims) processes generators, orbit points and
Schreier generators in fixed orders, so identical generator lists always
produce the identical chain: same base, same cached order, same membership
answers. Groups and chains are immutable once built and safe to share
between threads.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded
from .perm import Perm

DEFAULT_ENUM_CAP = 2**20


class _Level:
    __slots__ = ("base", "gens", "gen_set", "transversal", "done")

    def __init__(self, base: int):
        self.base = base  # 0-based point
        # strong generators fixing all earlier bases (nested convention:
        # an element stored here is also stored at every shallower level
        # whose base it fixes, back to the level that discovered it)
        self.gens: list[Perm] = []
        self.gen_set: set[Perm] = set()
        # orbit point (0-based) -> (rep u with u(base) = point, inverse of u)
        self.transversal: dict[int, tuple[Perm, Perm]] = {}
        self.done: set[tuple[int, int]] = set()  # processed (point, gen index)


class StabilizerChain:
    """Base, transversals and strong generators of a permutation group."""

    def __init__(self, degree: int, order_hint: Optional[int] = None):
        self.degree = degree
        self.levels: list[_Level] = []
        self._identity = Perm.identity(degree)
        self._target = order_hint

    def order(self) -> int:
        n = 1
        for lvl in self.levels:
            n *= len(lvl.transversal)
        return n

    def base(self) -> tuple:
        return tuple(lvl.base + 1 for lvl in self.levels)

    def _sift(self, p: Perm, start: int) -> tuple[Perm, int]:
        """Strip p through levels from `start` on; returns (residue, level
        where sifting stopped). Identity residue means membership."""
        for i in range(start, len(self.levels)):
            lvl = self.levels[i]
            x = int(p.img0[lvl.base])
            if x == lvl.base:
                continue
            entry = lvl.transversal.get(x)
            if entry is None:
                return p, i
            p = p * entry[1]
        return p, len(self.levels)

    def contains(self, p: Perm) -> bool:
        residue, _ = self._sift(p, 0)
        return residue.is_identity()

    def _install(self, g: Perm, start: int) -> int:
        """Record g as a strong generator at levels start..m, where m is the
        first level (>= start) whose base g moves; creates a trailing level
        when g fixes every existing base. Returns m."""
        k = start
        while k < len(self.levels) and int(g.img0[self.levels[k].base]) == self.levels[k].base:
            k += 1
        if k == len(self.levels):
            lvl = _Level(g.first_moved() - 1)
            lvl.transversal[lvl.base] = (self._identity, self._identity)
            self.levels.append(lvl)
        for j in range(start, k + 1):
            lvl = self.levels[j]
            if g not in lvl.gen_set:
                lvl.gens.append(g)
                lvl.gen_set.add(g)
        return k

    def add_generator(self, g: Perm) -> None:
        """Extend the group by one generator and re-verify the chain."""
        if g.degree != self.degree:
            raise ValueError("generator degree mismatch")
        if g.is_identity():
            return
        residue, _ = self._sift(g, 0)
        if residue.is_identity():
            return
        m = self._install(g, 0)
        self._sweep(m)

    def _sweep(self, start: int) -> None:
        """Re-verify levels from `start` up to the top; a level is clean when
        its orbit is closed and every Schreier generator sifts to identity
        through the levels below it."""
        w = min(start, len(self.levels) - 1)
        while w >= 0:
            if self._target is not None and self.order() == self._target:
                return
            dirty = self._verify(w)
            w = w - 1 if dirty is None else dirty

    def _verify(self, w: int) -> Optional[int]:
        """Process pending (orbit point, generator) pairs at level w.
        Returns the deepest level that gained a generator, or None."""
        lvl = self.levels[w]
        deepest = None
        work = deque(
            (p, k)
            for p in list(lvl.transversal)
            for k in range(len(lvl.gens))
            if (p, k) not in lvl.done
        )
        while work:
            if self._target is not None and self.order() == self._target:
                return None
            p, k = work.popleft()
            if (p, k) in lvl.done:
                continue
            lvl.done.add((p, k))
            s = lvl.gens[k]
            u_p = lvl.transversal[p][0]
            x = int(s.img0[p])
            if x not in lvl.transversal:
                u_x = u_p * s
                lvl.transversal[x] = (u_x, u_x.inverse())
                work.extend((x, k2) for k2 in range(len(lvl.gens)))
            else:
                schreier = u_p * s * lvl.transversal[x][1]
                if schreier.is_identity():
                    continue
                residue, _ = self._sift(schreier, w + 1)
                if residue.is_identity():
                    continue
                m = self._install(residue, w + 1)
                if deepest is None or m > deepest:
                    deepest = m
        return deepest


class PermGroup:
    """Immutable permutation group with a cached stabilizer chain."""

    def __init__(
        self,
        generators: Iterable[Perm],
        degree: Optional[int] = None,
        order_hint: Optional[int] = None,
    ):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required when no generators given")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise ValueError("generators must share one degree")
        self.generators = tuple(g for g in gens if not g.is_identity())
        self.degree = degree
        chain = StabilizerChain(degree, order_hint=order_hint)
        for g in self.generators:
            chain.add_generator(g)
        if order_hint is not None and chain.order() != order_hint:
            raise ValueError(
                f"order hint {order_hint} does not match computed order {chain.order()}"
            )
        self._chain = chain
        self._order = chain.order()
        self._elements: Optional[tuple] = None
        self._index: Optional[dict] = None

    @property
    def order(self) -> int:
        return self._order

    @property
    def identity(self) -> Perm:
        return self._chain._identity

    def contains(self, p: Perm) -> bool:
        if p.degree != self.degree:
            raise ValueError("degree mismatch in membership test")
        return self._chain.contains(p)

    def base(self) -> tuple:
        return self._chain.base()

    def is_trivial(self) -> bool:
        return self._order == 1

    def elements(self, cap: int = DEFAULT_ENUM_CAP):
        """All elements, sorted by image tuple (identity first), cached.

        Raises CapExceeded when the order is larger than `cap`.
        """
        if self._order > cap:
            raise CapExceeded(
                f"group order {self._order} exceeds enumeration cap {cap}"
            )
        if self._elements is None:
            acc = [self.identity]
            for lvl in reversed(self._chain.levels):
                reps = [lvl.transversal[x][0] for x in sorted(lvl.transversal)]
                acc = [a * u for a in acc for u in reps]
            acc.sort(key=lambda p: p.images)
            self._elements = tuple(acc)
        return self._elements

    def element_index(self, cap: int = DEFAULT_ENUM_CAP) -> dict:
        """Map element -> position in elements(); identity gets index 0."""
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.elements(cap))}
        return self._index

    def random_element(self, rng) -> Perm:
        p = self.identity
        for lvl in self._chain.levels:
            reps = sorted(lvl.transversal)
            p = p * lvl.transversal[reps[rng.randrange(len(reps))]][0]
        return p

    def __repr__(self) -> str:
        return (
            f"PermGroup(degree={self.degree}, order={self._order}, "
            f"ngens={len(self.generators)})"
        )


def build_chain(gens: Sequence[Perm], degree: Optional[int] = None) -> PermGroup:
    """Deterministic stabilizer chain for the group generated by `gens`."""
    return PermGroup(gens, degree=degree)
