"""Small integer helpers shared across modules."""

from math import log
from typing import Optional


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def prime_power_root(n: int) -> Optional[int]:
    """The prime l with n == l**k for some k >= 1, else None."""
    if n < 2:
        return None
    for q in range(2, n + 1):
        if q * q > n:
            return n  # n itself is prime
        if n % q == 0:
            m = n
            while m % q == 0:
                m //= q
            return q if m == 1 else None
    return None


def exact_log(n: int, base: int) -> int:
    """k with base**k == n; raises ValueError if no such k exists."""
    if n < 1 or base < 2:
        raise ValueError(f"no exact logarithm of {n} in base {base}")
    k = round(log(n, base)) if n > 1 else 0
    if base**k != n:
        raise ValueError(f"{n} is not a power of {base}")
    return k
