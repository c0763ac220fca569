"""Power-commutator presentations with prime exponent, and collection.

A presentation on generators g1..gn over the prime p consists of

* power relations   gi^p = w,   w a word in generators with index > i,
* commutator relations  [gj, gi] = gj^-1 gi^-1 gj gi = w,  j > i,
  w a word in generators with index > j,

with omitted relations meaning trivial right-hand sides. Elements are
exponent vectors (e1..en), 0 <= ei < p, standing for g1^e1 ... gn^en.
Multiplication is collection from the left with an explicit letter stack.

File format, '#' starts a comment:

    GROUP <order> <index>
    PRIME <p>
    NGENS <n>
    POWER <i> = <word>
    COMM <j> <i> = <word>
    END

where <word> is "1" or "g<a>^<e>" factors joined by "*", indices strictly
increasing, exponents in 1..p-1.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .arith import is_prime as _is_prime
from .errors import PcFileError, PgfError
from .group import PermGroup
from .perm import Perm

_COLLECT_STEP_CAP = 50_000_000


class PcPresentation:
    """Immutable collected presentation of a group of order prime**ngens."""

    __slots__ = (
        "prime",
        "ngens",
        "powers",
        "comms",
        "group_id",
        "provenance",
        "_pow_letters",
        "_comm_letters",
    )

    def __init__(
        self,
        prime: int,
        ngens: int,
        powers: Sequence[Optional[tuple]] = (),
        comms: Optional[dict] = None,
        group_id: Optional[tuple] = None,
        provenance: str = "",
    ):
        if not _is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        if ngens < 0:
            raise ValueError("ngens must be >= 0")
        self.prime = prime
        self.ngens = ngens
        pw = list(powers) + [None] * (ngens - len(powers))
        self.powers = tuple(
            None if (w is None or not any(w)) else tuple(w) for w in pw
        )
        self.comms = {
            k: tuple(v) for k, v in (comms or {}).items() if any(v)
        }  # keys are 1-based (j, i), j > i
        self.group_id = group_id
        self.provenance = provenance
        self._validate()
        # letter expansions (0-based generator indices) for the collector
        self._pow_letters = tuple(
            self._letters(w) if w else () for w in self.powers
        )
        self._comm_letters = {
            (j - 1, i - 1): self._letters(w) for (j, i), w in self.comms.items()
        }

    def _letters(self, vec: tuple) -> tuple:
        out = []
        for k, e in enumerate(vec):
            out.extend([k] * e)
        return tuple(out)

    def _validate(self) -> None:
        n, p = self.ngens, self.prime
        for i, w in enumerate(self.powers, start=1):
            if w is None:
                continue
            if len(w) != n:
                raise ValueError(f"power rhs for g{i} has wrong length")
            for k, e in enumerate(w, start=1):
                if e and k <= i:
                    raise ValueError(
                        f"power rhs for g{i} uses g{k}; only higher indices allowed"
                    )
                if not 0 <= e < p:
                    raise ValueError(f"exponent {e} out of range in power rhs")
        for (j, i), w in self.comms.items():
            if not 1 <= i < j <= n:
                raise ValueError(f"bad commutator pair ({j}, {i})")
            if len(w) != n:
                raise ValueError(f"commutator rhs for ({j}, {i}) has wrong length")
            for k, e in enumerate(w, start=1):
                if e and k <= j:
                    raise ValueError(
                        f"commutator rhs for ({j}, {i}) uses g{k}; "
                        "only indices above j allowed"
                    )
                if not 0 <= e < p:
                    raise ValueError("exponent out of range in commutator rhs")

    @property
    def order(self) -> int:
        return self.prime**self.ngens

    def identity(self) -> tuple:
        return (0,) * self.ngens

    def check_element(self, vec: Sequence[int]) -> tuple:
        v = tuple(int(x) for x in vec)
        if len(v) != self.ngens or any(not 0 <= x < self.prime for x in v):
            raise ValueError(f"{vec} is not an exponent vector for this group")
        return v

    def _collect(self, u: list, letters: Sequence[int]) -> list:
        p = self.prime
        n = self.ngens
        stack = list(letters)
        stack.reverse()
        steps = 0
        while stack:
            steps += 1
            if steps > _COLLECT_STEP_CAP:
                raise PgfError("collection did not terminate within the step cap")
            i = stack.pop()
            t = -1
            for j in range(n - 1, i, -1):
                if u[j]:
                    t = j
                    break
            if t < 0:
                u[i] += 1
                if u[i] == p:
                    u[i] = 0
                    w = self._pow_letters[i]
                    if w:
                        stack.extend(reversed(w))
            else:
                # u ends in g_t; swap it past g_i:  g_t g_i = g_i g_t [g_t, g_i]
                u[t] -= 1
                c = self._comm_letters.get((t, i), ())
                if c:
                    stack.extend(reversed(c))
                stack.append(t)
                stack.append(i)
        return u

    def multiply(self, a: Sequence[int], b: Sequence[int]) -> tuple:
        u = list(self.check_element(a))
        letters = self._letters(self.check_element(b))
        return tuple(self._collect(u, letters))

    def power(self, a: Sequence[int], k: int) -> tuple:
        if k < 0:
            return self.power(self.inverse(a), -k)
        out = self.identity()
        for _ in range(k):
            out = self.multiply(out, a)
        return out

    def inverse(self, a: Sequence[int]) -> tuple:
        # fix coordinates left to right; right factors in <g_i..g_n> cannot
        # disturb the coordinates below i
        b = self.identity()
        for i in range(self.ngens):
            k = self.multiply(a, b)[i]
            if k:
                unit = [0] * self.ngens
                unit[i] = self.prime - k
                b = self.multiply(b, tuple(unit))
        if self.multiply(a, b) != self.identity():
            raise PgfError("inverse computation failed; presentation broken")
        return b

    def elements(self) -> Iterator[tuple]:
        """All exponent vectors in lex order; the identity comes first."""
        return itertools.product(range(self.prime), repeat=self.ngens)

    def idx(self, vec: Sequence[int]) -> int:
        out = 0
        for x in vec:
            out = out * self.prime + int(x)
        return out

    def vec(self, idx: int) -> tuple:
        out = []
        for _ in range(self.ngens):
            idx, r = divmod(idx, self.prime)
            out.append(r)
        out.reverse()
        return tuple(out)

    def gen_columns(self) -> np.ndarray:
        """Right-multiplication maps: cols[j][x] = idx(element(x) * g_j)."""
        N = self.order
        cols = np.empty((self.ngens, N), dtype=np.int32)
        for j in range(self.ngens):
            for x, vec in enumerate(self.elements()):
                u = self._collect(list(vec), (j,))
                cols[j, x] = self.idx(u)
        return cols

    def __repr__(self) -> str:
        gid = f", id={self.group_id}" if self.group_id else ""
        return f"PcPresentation(prime={self.prime}, ngens={self.ngens}{gid})"


def multiplication_table(pres: PcPresentation) -> np.ndarray:
    """Full collection table: table[a, b] = idx(element(a) * element(b)).

    Columns are built by dynamic programming over normal forms: if b ends in
    g_t then column(b) = column(g_t) applied after column(b without g_t).
    """
    N = pres.order
    p = pres.prime
    n = pres.ngens
    table = np.empty((N, N), dtype=np.int32)
    table[:, 0] = np.arange(N, dtype=np.int32)
    if N == 1:
        return table
    cols = pres.gen_columns()
    for y in range(1, N):
        tmp, pos, step = y, n - 1, 1
        while tmp % p == 0:
            tmp //= p
            pos -= 1
            step *= p
        table[:, y] = cols[pos][table[:, y - step]]
    return table


@dataclass(frozen=True)
class ConsistencyResult:
    ok: bool
    reason: Optional[str] = None


def check_consistency(
    pres: PcPresentation, exhaustive_cap: int = 1024, samples: int = 2000
) -> ConsistencyResult:
    """Decide whether collection defines a group of order prime**ngens.

    Builds the collection table and checks that it is a cancellative
    associative operation with the identity in place; failure of any of
    these is exactly inconsistency of the presentation. Associativity is
    exhaustive up to `exhaustive_cap` elements and sampled above it.
    """
    N = pres.order
    table = multiplication_table(pres)
    ar = np.arange(N, dtype=np.int32)
    if not (table[0] == ar).all() or not (table[:, 0] == ar).all():
        return ConsistencyResult(False, "identity misbehaves")
    if not (np.sort(table, axis=1) == ar).all():
        return ConsistencyResult(False, "some row is not a permutation")
    if not (np.sort(table, axis=0) == ar[:, None]).all():
        return ConsistencyResult(False, "some column is not a permutation")
    if N <= exhaustive_cap:
        for a in range(N):
            lhs = table[table[a]]  # (a*b)*c for all b, c
            rhs = table[a][table]  # a*(b*c)
            if not (lhs == rhs).all():
                b, c = np.argwhere(lhs != rhs)[0]
                return ConsistencyResult(
                    False, f"associativity fails at ({a}, {int(b)}, {int(c)})"
                )
    else:
        rng = np.random.default_rng(0)
        for a, b, c in rng.integers(0, N, size=(samples, 3)):
            if table[table[a, b], c] != table[a, table[b, c]]:
                return ConsistencyResult(
                    False, f"associativity fails at ({int(a)}, {int(b)}, {int(c)})"
                )
    return ConsistencyResult(True)


def pc_to_perm(pres: PcPresentation) -> PermGroup:
    """Faithful right-regular permutation image on prime**ngens points.

    The chain is built without an order hint on purpose: its order being
    prime**ngens is one of the cross-checks between the two backends.
    """
    cols = pres.gen_columns()
    gens = [Perm._from0(cols[j].copy()) for j in range(pres.ngens)]
    return PermGroup(gens, degree=pres.order)


# ---------------------------------------------------------------------------
# file format


def _parse_word(tok: str, n: int, p: int, min_index: int, where: str):
    """Parse a relation rhs; returns an exponent vector or raises ValueError."""
    vec = [0] * n
    if tok == "1":
        return tuple(vec)
    last = 0
    for factor in tok.split("*"):
        factor = factor.strip()
        if not factor.startswith("g"):
            raise ValueError(f"bad factor {factor!r} in {where}")
        body = factor[1:]
        if "^" in body:
            idx_s, exp_s = body.split("^", 1)
        else:
            idx_s, exp_s = body, "1"
        try:
            k, e = int(idx_s), int(exp_s)
        except ValueError:
            raise ValueError(f"bad factor {factor!r} in {where}") from None
        if not 1 <= k <= n:
            raise ValueError(f"generator index {k} out of range in {where}")
        if k <= min_index:
            raise ValueError(
                f"index-order violation in {where}: g{k} not above g{min_index}"
            )
        if k <= last:
            raise ValueError(f"indices must strictly increase in {where}")
        if not 1 <= e <= p - 1:
            raise ValueError(f"exponent {e} out of range 1..{p - 1} in {where}")
        vec[k - 1] = e
        last = k
    return tuple(vec)


def parse_pc_text(text: str, source: str = "<text>") -> list:
    """Parse every GROUP block in `text`; raises PcFileError with a line
    number on the first problem."""
    groups: list[PcPresentation] = []
    seen_ids = set()
    state = None  # None or dict of the open block
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()

        def fail(msg, _ln=lineno):
            raise PcFileError(msg, path=source, line=_ln)

        if tok[0] == "GROUP":
            if state is not None:
                fail("GROUP inside an unfinished block (missing END?)")
            if len(tok) != 3:
                fail("GROUP needs: GROUP <order> <index>")
            try:
                order, index = int(tok[1]), int(tok[2])
            except ValueError:
                fail("GROUP order and index must be integers")
            if (order, index) in seen_ids:
                fail(f"duplicate group id ({order}, {index})")
            state = {
                "order": order,
                "index": index,
                "prime": None,
                "ngens": None,
                "powers": {},
                "comms": {},
                "line": lineno,
            }
            continue
        if state is None:
            fail(f"{tok[0]} outside a GROUP block")
        if tok[0] == "PRIME":
            if state["prime"] is not None or len(tok) != 2:
                fail("bad or repeated PRIME line")
            try:
                state["prime"] = int(tok[1])
            except ValueError:
                fail("PRIME must be an integer")
            if not _is_prime(state["prime"]):
                fail(f"{state['prime']} is not prime")
        elif tok[0] == "NGENS":
            if state["ngens"] is not None or len(tok) != 2:
                fail("bad or repeated NGENS line")
            try:
                state["ngens"] = int(tok[1])
            except ValueError:
                fail("NGENS must be an integer")
            if state["ngens"] < 0:
                fail("NGENS must be >= 0")
        elif tok[0] in ("POWER", "COMM"):
            if state["prime"] is None or state["ngens"] is None:
                fail(f"{tok[0]} before PRIME/NGENS")
            n, p = state["ngens"], state["prime"]
            if "=" not in tok:
                fail(f"{tok[0]} line needs '='")
            eq = tok.index("=")
            rhs_toks = tok[eq + 1 :]
            if len(rhs_toks) != 1:
                fail("relation rhs must be a single word token")
            if tok[0] == "POWER":
                if eq != 2:
                    fail("POWER needs: POWER <i> = <word>")
                try:
                    i = int(tok[1])
                except ValueError:
                    fail("POWER index must be an integer")
                if not 1 <= i <= n:
                    fail(f"POWER index {i} out of range 1..{n}")
                if i in state["powers"]:
                    fail(f"duplicate POWER {i}")
                try:
                    state["powers"][i] = _parse_word(
                        rhs_toks[0], n, p, i, f"POWER {i}"
                    )
                except ValueError as e:
                    fail(str(e))
            else:
                if eq != 3:
                    fail("COMM needs: COMM <j> <i> = <word>")
                try:
                    j, i = int(tok[1]), int(tok[2])
                except ValueError:
                    fail("COMM indices must be integers")
                if not 1 <= i < j <= n:
                    fail(f"COMM needs 1 <= i < j <= {n}, got j={j} i={i}")
                if (j, i) in state["comms"]:
                    fail(f"duplicate COMM {j} {i}")
                try:
                    state["comms"][(j, i)] = _parse_word(
                        rhs_toks[0], n, p, j, f"COMM {j} {i}"
                    )
                except ValueError as e:
                    fail(str(e))
        elif tok[0] == "END":
            if state["prime"] is None or state["ngens"] is None:
                fail("END before PRIME/NGENS")
            expect = state["prime"] ** state["ngens"]
            if state["order"] != expect:
                fail(
                    f"declared order {state['order']} is not "
                    f"prime**ngens = {expect}"
                )
            powers = [state["powers"].get(i) for i in range(1, state["ngens"] + 1)]
            try:
                pres = PcPresentation(
                    state["prime"],
                    state["ngens"],
                    powers,
                    state["comms"],
                    group_id=(state["order"], state["index"]),
                    provenance=source,
                )
            except ValueError as e:
                fail(str(e))
            groups.append(pres)
            seen_ids.add((state["order"], state["index"]))
            state = None
        else:
            fail(f"unknown directive {tok[0]!r}")
    if state is not None:
        raise PcFileError(
            "file ends inside a GROUP block (missing END)",
            path=source,
            line=state["line"],
        )
    return groups


def parse_pc_file(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_pc_text(text, source=os.path.basename(path))


def _word_str(vec: Optional[tuple]) -> str:
    if vec is None or not any(vec):
        return "1"
    return "*".join(f"g{k}^{e}" for k, e in enumerate(vec, start=1) if e)


def serialize_pc(pres: PcPresentation) -> str:
    """Canonical text block; parse(serialize(p)) reproduces p exactly."""
    order, index = pres.group_id if pres.group_id else (pres.order, 0)
    lines = [f"GROUP {order} {index}", f"PRIME {pres.prime}", f"NGENS {pres.ngens}"]
    for i, w in enumerate(pres.powers, start=1):
        if w is not None:
            lines.append(f"POWER {i} = {_word_str(w)}")
    for j, i in sorted(pres.comms):
        lines.append(f"COMM {j} {i} = {_word_str(pres.comms[(j, i)])}")
    lines.append("END")
    return "\n".join(lines) + "\n"
