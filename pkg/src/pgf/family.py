"""Construction certificates and the semiabelian decision procedure.

A certificate is a term over four constructors:

    C(l,k)            cyclic group of order l**k
    D(a,b)            direct product
    W(inner,outer)    regular wreath product
    Q(child;w1,...)   quotient of child by the normal closure of the listed
                      words, which must land inside the Frattini subgroup

All leaves of one certificate must share the same prime. Words are written
in the child's generators: factors "g<k>" with an optional integer exponent
"g2^-1", commutators "[w1,w2]", joined by "*".

Evaluating a certificate produces a permutation group whose rank equals the
declared rank read off the tree (1 for C, sums for D and W, unchanged by Q
because the quotient kernel sits inside the Frattini subgroup); evaluation
verifies that equality and fails loudly if the engine ever breaks it.

A group is semiabelian when it is trivial, abelian, or splits as G = A * H
with A a normal abelian subgroup, H a proper subgroup that is itself
semiabelian. The constructible family above coincides with the semiabelian
groups at each prime, so `in_family_g` is decided by the decomposition
search in `is_semiabelian`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .arith import is_prime
from .errors import CapExceeded, InvalidCertificate, PgfError
from .group import DEFAULT_ENUM_CAP, PermGroup
from .ops import (
    DEFAULT_DEGREE_CAP,
    cyclic_group,
    derived_length,
    direct_product,
    frattini_subgroup,
    normal_closure,
    quotient_group,
    rank,
    wreath_regular,
)
from .perm import commutator
from .table import DEFAULT_TABLE_CAP, CayleyTable

SCREEN_NOT_MEMBER = "definitely_not_member"
SCREEN_INCONCLUSIVE = "inconclusive"


# ----- certificate terms -------------------------------------------------------


@dataclass(frozen=True)
class Cyclic:
    prime: int
    exponent: int


@dataclass(frozen=True)
class DirectProduct:
    left: "Cert"
    right: "Cert"


@dataclass(frozen=True)
class Wreath:
    inner: "Cert"
    outer: "Cert"


@dataclass(frozen=True)
class FrattiniQuotient:
    child: "Cert"
    words: tuple  # parsed word trees, see _parse_word


Cert = Union[Cyclic, DirectProduct, Wreath, FrattiniQuotient]


def cert_prime(c: Cert) -> int:
    """The common prime of all leaves; mixed primes invalidate the term."""
    primes = set()

    def walk(t):
        if isinstance(t, Cyclic):
            if not is_prime(t.prime):
                raise InvalidCertificate(f"{t.prime} is not prime")
            if t.exponent < 1:
                raise InvalidCertificate("cyclic exponent must be >= 1")
            primes.add(t.prime)
        elif isinstance(t, (DirectProduct, Wreath)):
            walk(t.left if isinstance(t, DirectProduct) else t.inner)
            walk(t.right if isinstance(t, DirectProduct) else t.outer)
        elif isinstance(t, FrattiniQuotient):
            walk(t.child)
        else:
            raise InvalidCertificate(f"not a certificate term: {t!r}")

    walk(c)
    if len(primes) != 1:
        raise InvalidCertificate(
            f"certificate mixes primes {sorted(primes)}: {serialize_cert(c)}"
        )
    return primes.pop()


def declared_rank(c: Cert) -> int:
    """Rank promised by the shape of the term alone."""
    if isinstance(c, Cyclic):
        return 1
    if isinstance(c, DirectProduct):
        return declared_rank(c.left) + declared_rank(c.right)
    if isinstance(c, Wreath):
        return declared_rank(c.inner) + declared_rank(c.outer)
    return declared_rank(c.child)


# ----- text form ----------------------------------------------------------------


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, msg: str):
        raise InvalidCertificate(f"{msg} at position {self.pos} in {self.text!r}")

    def peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def take_int(self) -> int:
        self.peek()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if not self.text[start : self.pos].lstrip("-"):
            self.fail("expected an integer")
        return int(self.text[start : self.pos])


def parse_cert(text: str) -> Cert:
    """Parse the certificate grammar; raises InvalidCertificate on errors."""
    cur = _Cursor(text)
    c = _parse_cert(cur)
    if cur.peek():
        cur.fail("unexpected trailing text")
    cert_prime(c)  # validates leaves and the single-prime rule
    return c


def _parse_cert(cur: _Cursor) -> Cert:
    head = cur.peek()
    if head == "C":
        cur.pos += 1
        cur.take("(")
        l = cur.take_int()
        cur.take(",")
        k = cur.take_int()
        cur.take(")")
        if not is_prime(l):
            cur.fail(f"{l} is not prime")
        if k < 1:
            cur.fail("cyclic exponent must be >= 1")
        return Cyclic(l, k)
    if head in ("D", "W"):
        cur.pos += 1
        cur.take("(")
        a = _parse_cert(cur)
        cur.take(",")
        b = _parse_cert(cur)
        cur.take(")")
        return DirectProduct(a, b) if head == "D" else Wreath(a, b)
    if head == "Q":
        cur.pos += 1
        cur.take("(")
        child = _parse_cert(cur)
        cur.take(";")
        words = [_parse_word(cur)]
        while cur.peek() == ",":
            cur.take(",")
            words.append(_parse_word(cur))
        cur.take(")")
        return FrattiniQuotient(child, tuple(words))
    cur.fail("expected one of C, D, W, Q")


def _parse_word(cur: _Cursor):
    factors = [_parse_factor(cur)]
    while cur.peek() == "*":
        cur.take("*")
        factors.append(_parse_factor(cur))
    return factors[0] if len(factors) == 1 else ("prod", tuple(factors))


def _parse_factor(cur: _Cursor):
    head = cur.peek()
    if head == "[":
        cur.take("[")
        a = _parse_word(cur)
        cur.take(",")
        b = _parse_word(cur)
        cur.take("]")
        return ("comm", a, b)
    if head == "g":
        cur.pos += 1
        i = cur.take_int()
        if i < 1:
            cur.fail("generator index must be >= 1")
        e = 1
        if cur.peek() == "^":
            cur.take("^")
            e = cur.take_int()
        return ("gen", i, e)
    cur.fail("expected 'g<k>' or '[word,word]'")


def serialize_cert(c: Cert) -> str:
    if isinstance(c, Cyclic):
        return f"C({c.prime},{c.exponent})"
    if isinstance(c, DirectProduct):
        return f"D({serialize_cert(c.left)},{serialize_cert(c.right)})"
    if isinstance(c, Wreath):
        return f"W({serialize_cert(c.inner)},{serialize_cert(c.outer)})"
    words = ",".join(_word_text(w) for w in c.words)
    return f"Q({serialize_cert(c.child)};{words})"


def _word_text(w) -> str:
    if w[0] == "gen":
        _, i, e = w
        return f"g{i}" if e == 1 else f"g{i}^{e}"
    if w[0] == "comm":
        return f"[{_word_text(w[1])},{_word_text(w[2])}]"
    return "*".join(_word_text(f) for f in w[1])


# ----- evaluation ---------------------------------------------------------------

_EVAL_CACHE: dict = {}


def eval_cert(
    c: Cert,
    order_cap: int = DEFAULT_ENUM_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> PermGroup:
    """Build the permutation group a certificate describes.

    Raises InvalidCertificate for mixed primes, out-of-range word
    generators, or quotient selectors escaping the Frattini subgroup;
    CapExceeded when an intermediate group would outgrow the caps.
    """
    cert_prime(c)
    return _eval(c, order_cap, degree_cap)


def _eval(c: Cert, order_cap: int, degree_cap: int) -> PermGroup:
    key = (c, order_cap, degree_cap)
    hit = _EVAL_CACHE.get(key)
    if hit is not None:
        return hit
    if isinstance(c, Cyclic):
        n = c.prime**c.exponent
        _check_caps(n, n, order_cap, degree_cap, c)
        g = cyclic_group(c.prime, c.exponent)
    elif isinstance(c, DirectProduct):
        a = _eval(c.left, order_cap, degree_cap)
        b = _eval(c.right, order_cap, degree_cap)
        _check_caps(a.order * b.order, a.degree + b.degree, order_cap, degree_cap, c)
        g = direct_product(a, b)
    elif isinstance(c, Wreath):
        a = _eval(c.inner, order_cap, degree_cap)
        b = _eval(c.outer, order_cap, degree_cap)
        if a.order > 1 and b.order * (a.order.bit_length() - 1) > order_cap.bit_length():
            raise CapExceeded(
                f"order exceeds cap {order_cap}: {serialize_cert(c)}"
            )
        _check_caps(
            a.order**b.order * b.order,
            a.degree * b.order,
            order_cap,
            degree_cap,
            c,
        )
        g = wreath_regular(a, b, degree_cap=degree_cap)
    else:
        child = _eval(c.child, order_cap, degree_cap)
        label = serialize_cert(c)
        seeds = [_eval_word(w, child.generators, label) for w in c.words]
        n = normal_closure(child, seeds)
        phi = frattini_subgroup(child)
        for s in n.generators:
            if not phi.contains(s):
                raise InvalidCertificate(
                    "quotient selector escapes the Frattini subgroup: " + label
                )
        g = quotient_group(child, n, cap=degree_cap).group
    want = declared_rank(c)
    got = rank(g)
    if want != got:
        raise PgfError(
            f"declared rank {want} but computed rank {got}: {serialize_cert(c)}"
        )
    _EVAL_CACHE[key] = g
    return g


def _check_caps(order, degree, order_cap, degree_cap, c) -> None:
    if order > order_cap:
        raise CapExceeded(f"order {order} exceeds cap {order_cap}: {serialize_cert(c)}")
    if degree > degree_cap:
        raise CapExceeded(
            f"degree {degree} exceeds cap {degree_cap}: {serialize_cert(c)}"
        )


def _eval_word(w, gens, label):
    if w[0] == "gen":
        _, i, e = w
        if i > len(gens):
            raise InvalidCertificate(
                f"word uses g{i} but the child has only {len(gens)} generators: "
                + label
            )
        return gens[i - 1] ** e
    if w[0] == "comm":
        return commutator(
            _eval_word(w[1], gens, label), _eval_word(w[2], gens, label)
        )
    out = _eval_word(w[1][0], gens, label)
    for f in w[1][1:]:
        out = out * _eval_word(f, gens, label)
    return out


# ----- corpus -------------------------------------------------------------------

# quotient certificates cannot be enumerated mechanically (selectors are
# free text), so the corpus carries a curated set over the same leaves
_CORPUS_QUOTIENTS = (
    "Q(C(2,2);g1^2)",
    "Q(C(3,2);g1^3)",
    "Q(W(C(2,1),C(2,1));[g1,g2])",
    "Q(W(C(3,1),C(3,1));[g1,g2])",
    "Q(D(C(2,2),C(2,2));g1^2*g2^2)",
    "Q(D(C(3,2),C(3,1));g1^3)",
    "Q(W(C(2,1),C(2,1));[g1,g2],g1^2)",
    "Q(Q(D(C(2,2),C(2,2));g1^2*g2^2);g1^2)",
)


def certificate_corpus(
    max_constructors: int = 3,
    order_cap: int = DEFAULT_ENUM_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> tuple:
    """Every D/W tree over the standard leaves within the caps, plus the
    curated quotient certificates; deterministic order."""
    out = []
    for l in (2, 3):
        layers = [[Cyclic(l, 1), Cyclic(l, 2)]]
        for size in range(1, max_constructors + 1):
            layer = []
            for i in range(size):
                j = size - 1 - i
                for a in layers[i]:
                    for b in layers[j]:
                        for ctor in (DirectProduct, Wreath):
                            c = ctor(a, b)
                            if _fits(c, order_cap, degree_cap):
                                layer.append(c)
            layers.append(layer)
        for layer in layers:
            out.extend(layer)
    for text in _CORPUS_QUOTIENTS:
        c = parse_cert(text)
        if _fits(c, order_cap, degree_cap):
            out.append(c)
    out.sort(key=lambda c: (_constructor_count(c), serialize_cert(c)))
    return tuple(out)


def _constructor_count(c: Cert) -> int:
    if isinstance(c, Cyclic):
        return 0
    if isinstance(c, FrattiniQuotient):
        return 1 + _constructor_count(c.child)
    return 1 + _constructor_count(c.left if isinstance(c, DirectProduct) else c.inner) + _constructor_count(
        c.right if isinstance(c, DirectProduct) else c.outer
    )


def _order_bound(c: Cert, cap: int) -> Optional[int]:
    """Structural order, or None once it exceeds the cap."""
    if isinstance(c, Cyclic):
        o = c.prime**c.exponent
        return o if o <= cap else None
    if isinstance(c, DirectProduct):
        a = _order_bound(c.left, cap)
        b = _order_bound(c.right, cap)
        if a is None or b is None or a * b > cap:
            return None
        return a * b
    if isinstance(c, Wreath):
        a = _order_bound(c.inner, cap)
        b = _order_bound(c.outer, cap)
        if a is None or b is None:
            return None
        if a > 1 and b * (a.bit_length() - 1) > cap.bit_length():
            return None
        o = a**b * b
        return o if o <= cap else None
    return _order_bound(c.child, cap)


def _degree_bound(c: Cert, order_cap: int, degree_cap: int) -> Optional[int]:
    if isinstance(c, Cyclic):
        d = c.prime**c.exponent
        return d if d <= degree_cap else None
    if isinstance(c, DirectProduct):
        a = _degree_bound(c.left, order_cap, degree_cap)
        b = _degree_bound(c.right, order_cap, degree_cap)
        if a is None or b is None or a + b > degree_cap:
            return None
        return a + b
    if isinstance(c, Wreath):
        a = _degree_bound(c.inner, order_cap, degree_cap)
        m = _order_bound(c.outer, order_cap)
        if a is None or m is None or a * m > degree_cap:
            return None
        return a * m
    # a quotient acts on cosets, at worst one per child element
    d = _order_bound(c.child, order_cap)
    return d if d is not None and d <= degree_cap else None


def _fits(c: Cert, order_cap: int, degree_cap: int) -> bool:
    return (
        _order_bound(c, order_cap) is not None
        and _degree_bound(c, order_cap, degree_cap) is not None
    )


# ----- semiabelian decision -----------------------------------------------------


@dataclass(frozen=True)
class SemiabelianVerdict:
    """Outcome of the decomposition search.

    On success `witness` lists (A_ids, H_ids) steps: the current group S
    factors as the product A * H with A normal abelian in S and H a proper
    subgroup, and the next step continues inside H until H is trivial. On
    failure `search` reports the exhausted search space.
    """

    flag: bool
    witness: Optional[tuple] = None
    search: Optional[dict] = None


def is_semiabelian(g: PermGroup, cap: int = DEFAULT_TABLE_CAP) -> SemiabelianVerdict:
    """Decide semiabelianity of a group of order at most `cap`."""
    return semiabelian_table(CayleyTable.from_perm_group(g, cap=cap))


def semiabelian_table(ct: CayleyTable) -> SemiabelianVerdict:
    """Drive the decomposition search on a tabulated group.

    Candidate pairs run over normal abelian subgroups A of the current
    group S (largest first) and conjugacy class representatives H of
    proper subgroups of S (smallest first); A * H = S is tested both by
    generated closure and by the order identity |A||H| = |S||A inter H|.
    Results are memoized per conjugacy class of the ambient group, with
    witnesses translated back through the recorded conjugator, since
    conjugate subgroups decompose compatibly.
    """
    n = ct.n
    if n == 1:
        return SemiabelianVerdict(True, ())
    all_ids = tuple(range(n))
    if ct.is_abelian_ids(all_ids):
        return SemiabelianVerdict(True, ((all_ids, (0,)),))
    if ct.prime is None:
        raise PgfError(f"order {n} is not a prime power")
    lat = ct.lattice()
    subs = lat.subgroups
    m = len(subs)
    packed = [int.from_bytes(np.packbits(s.mask).tobytes(), "big") for s in subs]
    conj = ct.conj()
    stats = {"subgroups": m, "classes_examined": 0, "pairs_tested": 0}
    memo: dict = {}
    gens_memo: dict = {}

    def sub_gens(i):
        if i not in gens_memo:
            got = {0}
            gens = []
            for x in subs[i].ids:
                if x not in got:
                    gens.append(x)
                    got = set(ct.closure_ids(gens))
            gens_memo[i] = tuple(gens)
        return gens_memo[i]

    def conj_sub(i, g):
        ids = ct.conjugate_ids(subs[i].ids, g)
        mask = np.zeros(n, dtype=bool)
        mask[list(ids)] = True
        return lat.index_of(mask)

    def class_reps_within(members, sgens, r):
        seen = set()
        reps = []
        for j in sorted(members, key=lambda k: (subs[k].order, subs[k].ids)):
            if j in seen or j == r:
                continue
            orbit = {j}
            queue = [j]
            while queue:
                k = queue.pop()
                for g in sgens:
                    k2 = conj_sub(k, g)
                    if k2 not in orbit:
                        orbit.add(k2)
                        queue.append(k2)
            seen |= orbit
            reps.append(j)
        return reps

    def solve(r):
        stats["classes_examined"] += 1
        s = subs[r]
        if s.order == 1:
            return True, ()
        if s.abelian:
            return True, ((s.ids, (0,)),)
        sgens = sub_gens(r)
        s_int = packed[r]
        members = [j for j in range(m) if packed[j] & s_int == packed[j]]
        a_cands = []
        for j in members:
            t = subs[j]
            if not t.abelian or t.order == 1 or t.order == s.order:
                continue
            ids_arr = np.asarray(t.ids, dtype=np.int64)
            if all(t.mask[conj[g, ids_arr]].all() for g in sgens):
                a_cands.append(j)
        a_cands.sort(key=lambda j: (-subs[j].order, subs[j].ids))
        h_reps = class_reps_within(members, sgens, r)
        for a in a_cands:
            pa = packed[a]
            oa = subs[a].order
            for h in h_reps:
                if oa * subs[h].order != s.order * (pa & packed[h]).bit_count():
                    continue
                stats["pairs_tested"] += 1
                closure = ct.closure_mask(subs[a].ids + subs[h].ids)
                got = int.from_bytes(np.packbits(closure).tobytes(), "big")
                if got != s_int:
                    continue
                ok, sub_chain = decide(h)
                if ok:
                    return True, ((subs[a].ids, subs[h].ids),) + sub_chain
        return False, None

    def decide(i):
        s = subs[i]
        r = s.class_rep
        if r not in memo:
            memo[r] = solve(r)
        flag, chain = memo[r]
        if not flag:
            return False, None
        c = s.conj_to_rep
        if c == 0:
            return True, chain
        return True, tuple(
            (ct.conjugate_ids(a, c), ct.conjugate_ids(h, c)) for a, h in chain
        )

    full = np.ones(n, dtype=bool)
    ok, chain = decide(lat.index_of(full))
    if ok:
        return SemiabelianVerdict(True, chain)
    return SemiabelianVerdict(False, None, dict(stats))


def validate_witness(ct: CayleyTable, chain) -> bool:
    """Re-check a witness chain from the raw table, independently of the
    search: each step needs A, H closed, A abelian and normal in the
    current group, H proper, and the product set A*H covering it."""
    if chain is None:
        return False
    t = ct.table
    inv = ct.inv()
    current = frozenset(range(ct.n))
    for a_ids, h_ids in chain:
        a = frozenset(int(x) for x in a_ids)
        h = frozenset(int(x) for x in h_ids)
        if not a or not h or not (a <= current and h <= current):
            return False
        if len(h) >= len(current):
            return False
        a_arr = np.asarray(sorted(a), dtype=np.int64)
        h_arr = np.asarray(sorted(h), dtype=np.int64)
        if set(t[np.ix_(a_arr, a_arr)].ravel().tolist()) != a:
            return False
        if set(t[np.ix_(h_arr, h_arr)].ravel().tolist()) != h:
            return False
        if not ct.is_abelian_ids(a_arr):
            return False
        cur_arr = np.asarray(sorted(current), dtype=np.int64)
        twisted = t[t[inv[cur_arr][:, None], a_arr], cur_arr[:, None]]
        if not set(twisted.ravel().tolist()) <= a:
            return False
        if set(t[np.ix_(a_arr, h_arr)].ravel().tolist()) != current:
            return False
        current = h
    return len(current) == 1


# ----- membership ---------------------------------------------------------------


def in_family_g(g: PermGroup, cap: int = DEFAULT_TABLE_CAP) -> bool:
    """Membership in the constructible family, decided via the semiabelian
    test; the two classes coincide at every prime."""
    return is_semiabelian(g, cap=cap).flag


def dl_rank_screen(g: PermGroup, l: Optional[int] = None) -> str:
    """Cheap membership pre-filter.

    Semiabelian groups satisfy derived length <= rank, so a violation rules
    membership out; nothing else is concluded.
    """
    if derived_length(g) > rank(g, l):
        return SCREEN_NOT_MEMBER
    return SCREEN_INCONCLUSIVE
