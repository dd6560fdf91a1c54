"""Exact factor-count tables refined by residue class, and interval counts.

Representation conventions used throughout this module:

* A GroupSeries stores, for every unit residue u modulo d, the table
  coeff[u][n][k] = number of squarefree monic polynomials of degree n with
  exactly k distinct irreducible factors, all coprime to d, lying in the
  class u.  Row 0 is the empty product: coeff[identity][0][0] = 1.
* Tables are built as one packed big integer per (unit, degree) with
  (K+1) slots of slot_bits(q, N) bits, the same layout as the global
  counting tables; every slot value is a genuine count bounded by q^N, so
  no slot ever carries into its neighbor.
* The builder multiplies out the product over irreducibles p not dividing
  d of (1 + z T^deg(p) e_[p]) where e_[p] is the basis vector of the class
  of p.  Irreducibles with equal degree and equal residue class contribute
  identically, so the product is taken class by class with exact binomial
  weights.  Class sizes come either from per-irreducible enumeration
  ("direct") or, for degrees far beyond enumeration range, from a Newton
  recurrence on the class-refined zeta coefficients followed by exact
  prime-power inversion ("class").
* Interval counts reduce to progression counts through coefficient
  reversal: monic f of degree n with f(0) = a corresponds to the monic
  polynomial a^{-1} f* where f*(X) = X^n f(1/X), and the condition
  deg(f - g) <= h becomes a congruence modulo X^(n-h).  Polynomials with
  f(0) = 0 are handled by stripping one factor of X, which lowers the
  degree and factor count by one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .algebra import (
    Poly,
    enumerate_monics,
    factor_stats,
    involute,
    poly_gcd,
)
from .characters import (
    DEFAULT_IRREDUCIBLE_CAP,
    characters,
    twisted_series,
    unit_group,
)
from .errors import BudgetExceededError, ConsistencyError
from .exactcount import byte_budget, max_omega, slot_bits

__all__ = [
    "APQuery",
    "DEFAULT_IRREDUCIBLE_CAP",
    "GroupSeries",
    "IntervalQuery",
    "ap_enumerate",
    "ap_series",
    "interval_enumerate",
    "pi_k_ap_chars",
    "pi_k_ap_exact",
    "pi_k_interval_exact",
]

@dataclass(frozen=True)
class APQuery:
    """Progression query: degree n, factor count k, residue g modulo d."""

    n: int
    k: int
    g: Poly
    d: Poly

    def __post_init__(self):
        if not self.d.is_monic or self.d.degree < 1:
            raise ValueError("modulus must be monic of degree >= 1")
        if self.n < 0 or self.k < 0:
            raise ValueError("n and k must be nonnegative")
        if self.g.field.key != self.d.field.key:
            raise ValueError("g and d must share a field")
        if poly_gcd(self.g, self.d).degree != 0:
            raise ValueError("g is not coprime to the modulus")


@dataclass(frozen=True)
class IntervalQuery:
    """Interval query: monic center g of degree n, radius degree h."""

    n: int
    k: int
    g: Poly
    h: int

    def __post_init__(self):
        if not self.g.is_monic or self.g.degree != self.n:
            raise ValueError("g must be monic of degree n")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if not 0 <= self.h <= self.n - 1:
            raise ValueError("h must satisfy 0 <= h <= n - 1")


class GroupSeries:
    """Per-unit-class squarefree factor-count tables modulo a polynomial."""

    __slots__ = ("group", "N", "K", "coeff")

    def __init__(self, group, N: int, K: int, coeff):
        self.group = group
        self.N = N
        self.K = K
        self.coeff = coeff

    def count(self, g, n: int, k: int) -> int:
        if not 0 <= n <= self.N:
            raise ValueError(f"degree {n} outside [0, {self.N}]")
        if k < 0:
            raise ValueError("k must be nonnegative")
        if k > self.K:
            # beyond the truncation; only safe to answer when provably zero
            if k > max_omega(self.group.q, n):
                return 0
            raise ValueError(f"k = {k} exceeds the truncation K = {self.K}")
        idx = g if isinstance(g, int) else self.group.index_of(g)
        return self.coeff[idx][n][k]

    def row_total(self, n: int, k: int) -> int:
        return sum(self.count(u, n, k) for u in range(self.group.order))


def _euler_product_classes(group, counts, N: int, K: int, slot: int):
    """Packed per-unit rows of prod over classes of (1 + z T^deg e_class)^count."""
    order = group.order
    width = (K + 1) * slot
    mask = (1 << width) - 1
    rows = [[0] * (N + 1) for _ in range(order)]
    rows[group.identity_index][0] = 1
    for dp in range(1, N + 1):
        for c_idx, cnt in sorted(counts.get(dp, {}).items()):
            jmax = min(N // dp, K)
            binom = [1]
            for j in range(1, jmax + 1):
                binom.append(binom[-1] * (cnt - j + 1) // j)
            inv_c = group.inv(c_idx)
            # src[j][v] = v * c^(-j), the class whose table feeds slot j
            src = [list(range(order))]
            for _ in range(jmax):
                src.append([group.mul(v, inv_c) for v in src[-1]])
            for n in range(N, dp - 1, -1):
                jm = min(n // dp, jmax)
                for v in range(order):
                    acc = rows[v][n]
                    dirty = False
                    for j in range(1, jm + 1):
                        srcrow = rows[src[j][v]][n - dp * j]
                        if srcrow:
                            acc += binom[j] * (srcrow << (j * slot))
                            dirty = True
                    if dirty:
                        rows[v][n] = acc & mask
    return rows


def ap_series(d: Poly, N: int, K: int | None = None, method: str = "auto",
              budget: int | None = None) -> GroupSeries:
    """GroupSeries of squarefree coprime counts refined by residue class mod d.

    method "direct" buckets enumerated irreducibles by residue, "class"
    derives class sizes from the Newton recurrence, "auto" enumerates when
    the total number of irreducibles of degree <= N is within the cap.
    """
    group = unit_group(d)
    if N < 1:
        raise ValueError("N must be >= 1")
    q = group.q
    if K is None:
        K = min(N, max_omega(q, N))
    if K < 0:
        raise ValueError("K must be nonnegative")
    K = min(K, N)
    slot = slot_bits(q, N)
    estimated = group.order * (N + 1) * ((K + 1) * slot // 8 + 64)
    limit = byte_budget() if budget is None else budget
    if estimated > limit:
        raise BudgetExceededError(
            f"group series of estimated size {estimated} bytes exceeds the budget {limit}")
    counts = group.irreducible_classes(N, method=method)
    rows = _euler_product_classes(group, counts, N, K, slot)
    smask = (1 << slot) - 1
    coeff = {
        u: tuple(
            tuple((rows[u][n] >> (k * slot)) & smask for k in range(K + 1))
            for n in range(N + 1))
        for u in range(group.order)
    }
    return GroupSeries(group, N, K, coeff)


def pi_k_ap_exact(qy: APQuery, series: GroupSeries | None = None,
                  budget: int | None = None) -> int:
    """Exact count of squarefree f in the progression g mod d, deg n, k factors."""
    n, k = qy.n, qy.k
    if k > n:
        return 0
    if n == 0:
        return int(k == 0 and (qy.g % qy.d) == Poly.one(qy.d.field))
    if series is None:
        K = max(1, min(k, max_omega(qy.d.field.q, n)))
        series = ap_series(qy.d, n, K, budget=budget)
    else:
        if series.group.d != qy.d:
            raise ValueError("series was built for a different modulus")
        if series.N < n:
            raise ValueError("series truncation is below the queried degree")
    return series.count(qy.g, n, k)


def pi_k_ap_chars(qy: APQuery) -> float:
    """The same progression count assembled from all characters mod d.

    Averages conj(chi(g)) times the character-twisted count over the dual
    group; the imaginary parts must cancel to 1e-8.
    """
    group = unit_group(qy.d)
    n, k = qy.n, qy.k
    if k > n:
        return 0.0
    if n >= 1:
        cap = max_omega(group.q, n)
        if k > cap:
            return 0.0
        # only column k is read, so truncating the series there is safe
        K = max(1, min(k, cap))
    else:
        K = 0
    gidx = group.index_of(qy.g)
    E = group.exponent
    acc = 0j
    for chi in characters(group):
        rows = twisted_series(chi, n, K)
        e = chi.value_exponent(gidx)
        acc += cmath.exp(-2j * math.pi * e / E) * rows[n][k]
    acc /= group.order
    if abs(acc.imag) > 1e-8:
        raise ConsistencyError(
            f"character sum has imaginary part {acc.imag:.3e}")
    return acc.real


def pi_k_interval_exact(qy: IntervalQuery, budget: int | None = None,
                        series: GroupSeries | None = None) -> int:
    """Exact count of squarefree f with deg(f - g) <= h and k factors.

    Splits on f(0): nonvanishing constant terms reverse to a progression
    modulo X^(n-h) after scaling monic, and f(0) = 0 strips one factor of
    X, dropping to degree n-1 with k-1 factors in the same progression.
    A prebuilt series for the modulus X^(n-h) can be passed in when many
    centers share one interval shape.
    """
    n, k, g, h = qy.n, qy.k, qy.g, qy.h
    if k == 0 or k > n:
        return 0
    fld = g.field
    q = fld.q
    m = n - h
    d = Poly.x(fld, m)
    if series is None:
        K = max(1, min(k, max_omega(q, n)))
        series = ap_series(d, n, K, budget=budget)
    else:
        if series.group.d != d:
            raise ValueError("series was built for a different modulus")
        if series.N < n:
            raise ValueError("series truncation is below the queried degree")
    gstar = involute(g)
    total = 0
    for a in range(1, q):
        r = gstar.scale(fld.inv(a)) % d
        total += series.count(r, n, k)
        total += series.count(r, n - 1, k - 1)
    return total


def ap_enumerate(qy: APQuery, budget: int | None = None) -> int:
    """Brute-force progression count; the oracle for pi_k_ap_exact."""
    r = qy.g % qy.d
    total = 0
    for f in enumerate_monics(qy.d.field, qy.n, budget):
        if f % qy.d == r:
            st = factor_stats(f)
            if st.squarefree and st.omega == qy.k:
                total += 1
    return total


def interval_enumerate(qy: IntervalQuery, budget: int | None = None) -> int:
    """Brute-force interval count; the oracle for pi_k_interval_exact."""
    fld = qy.g.field
    q = fld.q
    cap = 2_000_000 if budget is None else budget
    if q ** (qy.h + 1) > cap:
        raise BudgetExceededError(
            f"interval of size {q ** (qy.h + 1)} exceeds the enumeration cap {cap}")
    total = 0
    for code in range(q ** (qy.h + 1)):
        cs = []
        v = code
        for _ in range(qy.h + 1):
            cs.append(v % q)
            v //= q
        f = qy.g + Poly(fld, cs)
        st = factor_stats(f)
        if st.squarefree and st.omega == qy.k:
            total += 1
    return total
