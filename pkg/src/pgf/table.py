"""Dense multiplication tables and subgroup lattices for small groups.

A CayleyTable reindexes a group of order n as ids 0..n-1 with the identity
at id 0 and table[a, b] = id of element(a) * element(b). All invariants here
are computed directly from the table, which makes them an independent route
from the permutation-level algorithms built on stabilizer chains.

The subgroup lattice is computed by cyclic extension, which is complete for
groups of prime-power order: every subgroup of order l**(k+1) contains a
normal subgroup of index l, so climbing one index-l layer at a time from the
trivial subgroup visits everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arith import exact_log, prime_power_root
from .errors import CapExceeded, PgfError
from .group import PermGroup
from .kernels import active_kernels
from .pc import PcPresentation, multiplication_table

DEFAULT_TABLE_CAP = 1024


@dataclass(frozen=True, eq=False)
class TSub:
    """A subgroup of the ambient table, as sorted element ids plus flags."""

    ids: tuple
    mask: np.ndarray = field(repr=False)
    order: int
    abelian: bool
    normal: bool
    class_rep: int  # index into Lattice.subgroups of the class representative
    conj_to_rep: int  # element id c with rep^c == this subgroup


class Lattice:
    """All subgroups of a prime-power CayleyTable, with conjugacy fusion."""

    def __init__(self, subgroups: Sequence[TSub]):
        self.subgroups = tuple(subgroups)
        self._by_key = {s.mask.tobytes(): i for i, s in enumerate(self.subgroups)}
        self._full_order = max(s.order for s in self.subgroups)

    def index_of(self, mask: np.ndarray) -> int:
        """Position of the subgroup with this membership mask."""
        return self._by_key[mask.tobytes()]

    def class_reps(self) -> tuple:
        return tuple(
            s for i, s in enumerate(self.subgroups) if s.class_rep == i
        )

    def maximal(self) -> tuple:
        # maximal subgroups of an l-group are exactly those of index l
        full = self._full_order
        if full == 1:
            return ()
        l = prime_power_root(full)
        return tuple(s for s in self.subgroups if s.order * l == full)

    def normal_abelian(self) -> tuple:
        return tuple(s for s in self.subgroups if s.normal and s.abelian)


class CayleyTable:
    """Multiplication table of a finite group with id 0 the identity."""

    __slots__ = (
        "table",
        "n",
        "elems",
        "gen_ids",
        "prime",
        "_inv",
        "_conj",
        "_pows",
        "_orders",
        "_frattini",
        "_lattice",
    )

    def __init__(self, table: np.ndarray, elems: tuple, gen_ids: tuple):
        self.table = np.ascontiguousarray(table, dtype=np.int32)
        self.n = table.shape[0]
        self.elems = elems
        self.gen_ids = tuple(gen_ids)
        self.prime = prime_power_root(self.n)
        self._inv = None
        self._conj = None
        self._pows = {}
        self._orders = None
        self._frattini = None
        self._lattice = None

    # ----- constructors ---------------------------------------------------

    @classmethod
    def from_perm_group(cls, g: PermGroup, cap: int = DEFAULT_TABLE_CAP):
        """Tabulate a permutation group of order at most `cap`.

        Element ids follow the sorted enumeration of the group (identity is
        id 0). Columns are filled by dynamic programming over the right
        Cayley graph: if y = x * gen then column(y) = column(gen)[column(x)].
        """
        if g.order > cap:
            raise CapExceeded(f"order {g.order} exceeds table cap {cap}")
        els = g.elements(cap)
        index = g.element_index(cap)
        n = len(els)
        gen_ids = tuple(index[p] for p in g.generators)
        gen_cols = {}
        for j, p in zip(gen_ids, g.generators):
            col = np.empty(n, dtype=np.int32)
            for x in range(n):
                col[x] = index[els[x] * p]
            gen_cols[j] = col
        table = np.empty((n, n), dtype=np.int32)
        table[:, 0] = np.arange(n, dtype=np.int32)
        done = {0}
        frontier = [0]
        while frontier:
            y = frontier.pop()
            for j, col in gen_cols.items():
                z = col[y]
                if z not in done:
                    table[:, z] = col[table[:, y]]
                    done.add(z)
                    frontier.append(z)
        if len(done) != n:
            raise PgfError("generator columns do not reach the whole group")
        return cls(table, els, gen_ids)

    @classmethod
    def from_pc(cls, pres: PcPresentation):
        """Tabulate a collected presentation via its collection table."""
        table = multiplication_table(pres)
        elems = tuple(pres.elements())
        gen_ids = []
        for i in range(pres.ngens):
            v = [0] * pres.ngens
            v[i] = 1
            gen_ids.append(pres.idx(v))
        ct = cls(table, elems, tuple(gen_ids))
        return ct

    # ----- elementary maps --------------------------------------------------

    def inv(self) -> np.ndarray:
        """inv[x] = id of the inverse of x."""
        if self._inv is None:
            rows, cols = np.nonzero(self.table == 0)
            inv = np.empty(self.n, dtype=np.int32)
            inv[rows] = cols
            inv.setflags(write=False)
            self._inv = inv
        return self._inv

    def conj(self) -> np.ndarray:
        """conj[g, x] = id of g^-1 * x * g."""
        if self._conj is None:
            t = self.table
            left = t[self.inv(), :]  # left[g, x] = inv(g) * x
            c = t[left, np.arange(self.n, dtype=np.int32)[:, None]]
            c = np.ascontiguousarray(c, dtype=np.int32)
            c.setflags(write=False)
            self._conj = c
        return self._conj

    def pow_map(self, k: int) -> np.ndarray:
        """powmap[x] = id of x**k, for k >= 0."""
        if k not in self._pows:
            ar = np.arange(self.n, dtype=np.int32)
            cur = np.zeros(self.n, dtype=np.int32)
            for _ in range(k):
                cur = self.table[cur, ar]
            cur = np.ascontiguousarray(cur)
            cur.setflags(write=False)
            self._pows[k] = cur
        return self._pows[k]

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            ar = np.arange(self.n, dtype=np.int32)
            cur = ar.copy()
            out = np.zeros(self.n, dtype=np.int64)
            out[0] = 1
            k = 1
            while (out == 0).any():
                hit = (cur == 0) & (out == 0)
                out[hit] = k
                cur = self.table[cur, ar]
                k += 1
            out.setflags(write=False)
            self._orders = out
        return self._orders

    def conjugate_ids(self, ids: Sequence[int], g: int) -> tuple:
        """Ids of the set {g^-1 x g : x in ids}, sorted."""
        arr = self.conj()[g, np.asarray(ids, dtype=np.int64)]
        return tuple(int(v) for v in np.sort(arr))

    # ----- subgroup primitives ----------------------------------------------

    def closure_mask(self, seed_ids: Sequence[int]) -> np.ndarray:
        seed = np.asarray(sorted(set(seed_ids)), dtype=np.int32)
        return active_kernels().closure(self.table, seed)

    def closure_ids(self, seed_ids: Sequence[int]) -> tuple:
        return tuple(int(v) for v in np.nonzero(self.closure_mask(seed_ids))[0])

    def is_abelian_ids(self, ids: Sequence[int]) -> bool:
        idx = np.asarray(ids, dtype=np.int64)
        block = self.table[np.ix_(idx, idx)]
        return bool((block == block.T).all())

    def center_ids(self) -> tuple:
        mask = (self.table == self.table.T).all(axis=1)
        return tuple(int(v) for v in np.nonzero(mask)[0])

    def _comm_ids(self, a_ids: np.ndarray, b_ids: np.ndarray) -> np.ndarray:
        """Unique ids of commutators [a, b] = a^-1 b^-1 a b with a in A, b in B."""
        t = self.table
        ab = t[np.ix_(a_ids, b_ids)]
        ba = t[np.ix_(b_ids, a_ids)].T
        return np.unique(t[self.inv()[ba], ab])

    def derived_ids(self, ids: Sequence[int]) -> tuple:
        """The commutator subgroup of the subgroup with these ids."""
        idx = np.asarray(ids, dtype=np.int64)
        seeds = self._comm_ids(idx, idx)
        return self.closure_ids(seeds)

    # ----- whole-group invariants --------------------------------------------

    def _require_prime(self) -> int:
        if self.n == 1:
            return 0
        if self.prime is None:
            raise PgfError(f"order {self.n} is not a prime power")
        return self.prime

    def frattini_ids(self) -> tuple:
        """Frattini subgroup: closure of all l-th powers and commutators.

        For an l-group, G/[G,G]G^l is the largest elementary abelian
        quotient, so the subgroup generated by powers and commutators is the
        Frattini subgroup. The lattice route (intersection of maximal
        subgroups) is used as an independent check in the tests.
        """
        if self._frattini is None:
            l = self._require_prime()
            if self.n == 1:
                self._frattini = (0,)
            else:
                all_ids = np.arange(self.n, dtype=np.int64)
                seeds = set(self.pow_map(l).tolist())
                seeds.update(self._comm_ids(all_ids, all_ids).tolist())
                self._frattini = self.closure_ids(seeds)
        return self._frattini

    def rank(self) -> int:
        """Minimal generator count: log_l of the Frattini quotient order."""
        if self.n == 1:
            return 0
        l = self._require_prime()
        quot = self.n // len(self.frattini_ids())
        try:
            return exact_log(quot, l)
        except ValueError as exc:
            raise PgfError("Frattini quotient is not a power of the prime") from exc

    def derived_length(self) -> int:
        cur = tuple(range(self.n))
        length = 0
        while len(cur) > 1:
            nxt = self.derived_ids(cur)
            if len(nxt) == len(cur):
                raise PgfError("derived series does not terminate")
            cur = nxt
            length += 1
        return max(length, 0 if self.n == 1 else 1)

    def lcs_orders(self) -> tuple:
        """Orders along the lower central series, ending at 1 for nilpotent groups."""
        all_ids = np.arange(self.n, dtype=np.int64)
        cur = tuple(range(self.n))
        orders = [self.n]
        while len(cur) > 1:
            seeds = self._comm_ids(all_ids, np.asarray(cur, dtype=np.int64))
            nxt = self.closure_ids(seeds)
            if len(nxt) == len(cur):
                orders.append(len(nxt))
                break
            cur = nxt
            orders.append(len(cur))
        return tuple(orders)

    def lower_exp_orders(self, l: Optional[int] = None) -> tuple:
        """Orders along the lower exponent-l central series.

        Step: F_{t+1} = <f**l, [g, f] : f in F_t, g in G>. The first step
        equals the Frattini subgroup for l-groups.
        """
        if l is None:
            l = self._require_prime()
        if self.n == 1:
            return (1,)
        all_ids = np.arange(self.n, dtype=np.int64)
        cur = tuple(range(self.n))
        orders = [self.n]
        while len(cur) > 1:
            idx = np.asarray(cur, dtype=np.int64)
            seeds = set(self.pow_map(l)[idx].tolist())
            seeds.update(self._comm_ids(all_ids, idx).tolist())
            nxt = self.closure_ids(seeds)
            if len(nxt) == len(cur):
                orders.append(len(nxt))
                break
            cur = nxt
            orders.append(len(cur))
        return tuple(orders)

    # ----- subgroup lattice ----------------------------------------------------

    def lattice(self) -> Lattice:
        """All subgroups, by cyclic extension one index-l layer at a time."""
        if self._lattice is not None:
            return self._lattice
        l = self._require_prime()
        kern = active_kernels()
        triv = np.zeros(self.n, dtype=bool)
        triv[0] = True
        by_key = {triv.tobytes(): triv}
        layer = [triv]
        if self.n > 1:
            conj = self.conj()
            powl = self.pow_map(l)
            while layer:
                nxt = {}
                for mask in layer:
                    cand = kern.extension_candidates(self.table, conj, powl, mask)
                    h_ids = np.nonzero(mask)[0]
                    for g in np.nonzero(cand)[0]:
                        cols = []
                        gp = int(g)
                        for _ in range(l - 1):
                            cols.append(gp)
                            gp = int(self.table[gp, g])
                        new = mask.copy()
                        new[self.table[np.ix_(h_ids, np.asarray(cols))]] = True
                        key = new.tobytes()
                        if key not in by_key:
                            by_key[key] = new
                            nxt[key] = new
                layer = list(nxt.values())
        self._lattice = self._fuse_lattice(list(by_key.values()))
        return self._lattice

    def _fuse_lattice(self, masks: list) -> Lattice:
        masks.sort(key=lambda m: (int(m.sum()), tuple(np.nonzero(m)[0])))
        key_to_pos = {m.tobytes(): i for i, m in enumerate(masks)}
        conj = self.conj()
        class_rep = [-1] * len(masks)
        conj_to_rep = [0] * len(masks)
        for start, mask in enumerate(masks):
            if class_rep[start] != -1:
                continue
            # breadth-first orbit under conjugation by the group generators,
            # tracking a conjugating element for each orbit member
            orbit = {mask.tobytes(): 0}
            queue = [(mask, 0)]
            while queue:
                m, c = queue.pop()
                ids = np.nonzero(m)[0]
                for g in self.gen_ids:
                    img = np.zeros(self.n, dtype=bool)
                    img[conj[g, ids]] = True
                    key = img.tobytes()
                    if key not in orbit:
                        cg = int(self.table[c, g])
                        orbit[key] = cg
                        queue.append((img, cg))
            # canonical representative: least position in the sorted list
            positions = sorted(key_to_pos[k] for k in orbit)
            rep_pos = positions[0]
            rep_key = masks[rep_pos].tobytes()
            a = orbit[rep_key]  # start^a == rep
            inv_a = int(self.inv()[a])
            for key, b in orbit.items():
                pos = key_to_pos[key]
                class_rep[pos] = rep_pos
                # start^b == this, so rep^(a^-1 b) == this
                conj_to_rep[pos] = int(self.table[inv_a, b])
        subs = []
        for i, mask in enumerate(masks):
            ids = tuple(int(v) for v in np.nonzero(mask)[0])
            mask.setflags(write=False)
            # stable under conjugation by every generator <=> normal
            ids_arr = np.asarray(ids, dtype=np.int64)
            normal = all(mask[conj[g, ids_arr]].all() for g in self.gen_ids)
            subs.append(
                TSub(
                    ids=ids,
                    mask=mask,
                    order=len(ids),
                    abelian=self.is_abelian_ids(ids),
                    normal=normal,
                    class_rep=class_rep[i],
                    conj_to_rep=conj_to_rep[i],
                )
            )
        return Lattice(subs)
