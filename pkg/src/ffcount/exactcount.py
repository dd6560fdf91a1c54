"""Exact counts of monic polynomials by number of distinct irreducible factors.

The central object is a truncated bivariate series in T (tracking degree)
and z (tracking the distinct-factor count).  The squarefree generating
series is the Euler product over irreducibles of (1 + z T^deg p), grouped
by degree class d into local factors (1 + z T^d)^Pi(d), where Pi(d) is the
number of monic irreducibles of degree d.  Coefficients are arbitrary
precision integers; exactness is the point of this module.

Build strategy: each T-row is packed into a single big integer with a
fixed bit stride per z-slot.  All coefficients are nonnegative and bounded
by q^N, so slot values never interact and a local-factor application is a
short sequence of shift-multiply-add operations on row integers.  Rows are
unpacked into plain integer tables once the product is complete.

The all-factors series (every monic polynomial, counted by distinct
irreducible factors with multiplicity ignored) is obtained from the
squarefree series through an exact identity: the local factor
(1 - T^d + z T^d)/(1 - T^d) equals (1 + (z-1) T^d) / (1 - T^d), so the
full product is the squarefree series evaluated at z - 1, convolved with
the geometric series sum_n q^n T^n, and re-expanded around z.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .algebra import FieldSpec, enumerate_monics, factor_stats, irreducible_count
from .errors import BudgetExceededError

DEFAULT_K_CAP = 40
DEFAULT_BITS_CAP = 600
DEFAULT_BYTE_BUDGET = 1 << 30


def byte_budget() -> int:
    """Memory budget in bytes; FFCOUNT_BUDGET_BYTES overrides the default."""
    raw = os.environ.get("FFCOUNT_BUDGET_BYTES")
    if raw is None:
        return DEFAULT_BYTE_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise BudgetExceededError(f"FFCOUNT_BUDGET_BYTES is not an integer: {raw!r}")


def slot_bits(q: int, n: int) -> int:
    """A bit width that holds any count bounded by q**n, with carry headroom."""
    return max(8, math.ceil(n * math.log2(q))) + 2


@lru_cache(maxsize=None)
def max_omega(q: int, n: int) -> int:
    """Largest possible number of distinct irreducible factors in degree <= n.

    Greedy: distinct irreducibles of the smallest degrees pack the most
    factors into a fixed degree budget.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    remaining = n
    k = 0
    d = 1
    while remaining >= d:
        take = min(irreducible_count(q, d), remaining // d)
        k += take
        remaining -= take * d
        if take < irreducible_count(q, d):
            break
        d += 1
    return k


def _coerce_q(q) -> int:
    if isinstance(q, FieldSpec):
        return q.q
    q = int(q)
    if q < 2:
        raise ValueError("q must be at least 2")
    return q


class BiSeries:
    """Truncated series with integer (or exact rational) coefficients.

    coeff[n][k] is the count attached to T^n z^k; the table is rectangular
    with dimensions (N+1) x (K+1) and is immutable after construction.
    """

    __slots__ = ("q", "N", "K", "coeff")

    def __init__(self, q: int, N: int, K: int, coeff):
        rows = tuple(tuple(row) for row in coeff)
        if len(rows) != N + 1 or any(len(r) != K + 1 for r in rows):
            raise ValueError("coefficient table must be (N+1) x (K+1)")
        self.q = q
        self.N = N
        self.K = K
        self.coeff = rows

    def row(self, n: int) -> tuple:
        if not 0 <= n <= self.N:
            raise ValueError(f"row {n} outside [0, {self.N}]")
        return self.coeff[n]

    def row_json(self, n: int) -> dict:
        return {
            "q": self.q,
            "n": n,
            "counts": {str(k): str(c) for k, c in enumerate(self.row(n)) if c},
        }

    def row_sum(self, n: int):
        return sum(self.row(n))


def _check_series_budget(q: int, N: int, K: int, bits_cap: int, budget: int | None) -> int:
    if N < 1 or K < 1:
        raise ValueError("N and K must be >= 1")
    if N * math.log2(q) > bits_cap + 1e-9:
        raise BudgetExceededError(
            f"series truncation N = {N} over F_{q} exceeds the {bits_cap}-bit coefficient cap"
        )
    slot = slot_bits(q, N)
    estimated = (N + 1) * (K + 1) * slot // 8 + (N + 1) * 64
    limit = byte_budget() if budget is None else budget
    if estimated > limit:
        raise BudgetExceededError(
            f"series of estimated size {estimated} bytes exceeds the budget {limit}"
        )
    return slot


def euler_product_squarefree(
    q,
    N: int,
    K: int | None = None,
    *,
    bits_cap: int = DEFAULT_BITS_CAP,
    budget: int | None = None,
) -> BiSeries:
    """Counts of squarefree monic polynomials by degree and distinct-factor count.

    Row n, column k is the number of squarefree monic polynomials of degree
    n over F_q with exactly k distinct monic irreducible factors.
    """
    q = _coerce_q(q)
    if K is None:
        K = min(N, DEFAULT_K_CAP)
    slot = _check_series_budget(q, N, K, bits_cap, budget)
    width = (K + 1) * slot
    mask = (1 << width) - 1
    rows = [0] * (N + 1)
    rows[0] = 1
    for d in range(1, N + 1):
        pi_d = irreducible_count(q, d)
        jmax = min(N // d, K)
        binom = [1]
        for j in range(1, jmax + 1):
            binom.append(binom[-1] * (pi_d - j + 1) // j)
        shifts = [j * slot for j in range(jmax + 1)]
        for n in range(N, d - 1, -1):
            jm = min(n // d, K)
            acc = rows[n]
            for j in range(1, jm + 1):
                acc += binom[j] * (rows[n - d * j] << shifts[j])
            rows[n] = acc & mask
    slot_mask = (1 << slot) - 1
    coeff = [
        [(rows[n] >> (k * slot)) & slot_mask for k in range(K + 1)] for n in range(N + 1)
    ]
    return BiSeries(q, N, K, coeff)


def _row_shift_expand(row: Iterable[int]) -> list[int]:
    # Polynomial substitution w -> z - 1, ascending coefficient lists.
    out: list[int] = []
    for c in reversed(list(row)):
        nxt = [0] * (len(out) + 1)
        for i, v in enumerate(out):
            nxt[i + 1] += v
            nxt[i] -= v
        nxt[0] += c
        out = nxt
    return out if out else [0]


def euler_product_allfactors(
    q,
    N: int,
    K: int | None = None,
    *,
    bits_cap: int = DEFAULT_BITS_CAP,
    budget: int | None = None,
) -> BiSeries:
    """Counts of all monic polynomials by degree and distinct-factor count.

    Row n, column k is the number of monic polynomials of degree n over F_q
    with exactly k distinct monic irreducible factors (multiplicities do not
    add to k).  With K at least max_omega(q, n), row n sums to q^n.
    """
    q = _coerce_q(q)
    if K is None:
        K = min(N, DEFAULT_K_CAP)
    if N < 1 or K < 1:
        raise ValueError("N and K must be >= 1")
    full = max_omega(q, N)
    sf = euler_product_squarefree(q, N, max(1, full), bits_cap=bits_cap, budget=budget)
    coeff = []
    running = [0] * (full + 1)  # q-geometric partial sums of squarefree rows
    for n in range(N + 1):
        for k in range(full + 1):
            running[k] = q * running[k] + sf.coeff[n][k]
        expanded = _row_shift_expand(running)
        row = [expanded[k] if k < len(expanded) else 0 for k in range(K + 1)]
        if any(c < 0 for c in row):
            raise AssertionError("negative count after basis change; series is corrupt")
        coeff.append(row)
    return BiSeries(q, N, K, coeff)


# -- exact z-polynomials -------------------------------------------------------


class ZPoly:
    """Polynomial in z with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0 if not isinstance(z, complex) else 0j
        for c in reversed(self.coeffs):
            acc = acc * z + (complex(c) if isinstance(z, complex) else c)
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, ZPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ZPoly({list(self.coeffs)})"


def dz_polynomial(q, n: int) -> ZPoly:
    """Coefficient of T^n in (1 - qT)^(-z), exactly: q^n binom(n+z-1, n).

    Expanded as the rational-coefficient polynomial
    q^n / n! * z (z+1) ... (z+n-1).
    """
    q = _coerce_q(q)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return ZPoly([1])
    coeffs = [0, 1]  # z
    for j in range(1, n):
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += j * c
            nxt[i + 1] += c
        coeffs = nxt
    scale = Fraction(q**n, math.factorial(n))
    return ZPoly([scale * c for c in coeffs])


def rising_factorial_over_factorial(n: int, z: complex) -> complex:
    """binom(n + z - 1, n) evaluated in floating point: prod (z+j)/(1+j)."""
    acc = complex(1.0)
    for j in range(n):
        acc *= (z + j) / (1 + j)
    return acc


def dz_eval(q, n: int, z: complex) -> complex:
    """Floating-point value of dz_polynomial(q, n) at z."""
    q = _coerce_q(q)
    return rising_factorial_over_factorial(n, complex(z)) * float(q) ** n


def zeta_inverse_power_rows(q, N: int) -> list[list[Fraction]]:
    """Rows of (1 - qT)^z: coefficient of T^n is (-q)^n binom(z, n), as z-polynomials."""
    q = _coerce_q(q)
    rows = [[Fraction(1)]]
    for n in range(1, N + 1):
        # binom(z, n) = binom(z, n-1) * (z - n + 1) / n
        prev = rows[-1]
        nxt = [Fraction(0)] * (len(prev) + 1)
        for i, c in enumerate(prev):
            nxt[i + 1] += c
            nxt[i] += (1 - n) * c
        rows.append([c / n for c in nxt])
    return [[(-q) ** n * c for c in row] for n, row in enumerate(rows)]


def bz_series(q, N: int) -> BiSeries:
    """Correction-factor series: squarefree product times (1 - qT)^z.

    Row n is an exact rational z-polynomial; row 0 is 1 and row 1 vanishes
    identically because the degree-1 terms of the two factors cancel.
    """
    q = _coerce_q(q)
    if N < 1:
        raise ValueError("N must be >= 1")
    sf = euler_product_squarefree(q, N, max(1, max_omega(q, N)))
    zrows = zeta_inverse_power_rows(q, N)
    K = N
    coeff = []
    for n in range(N + 1):
        acc = [Fraction(0)] * (K + 1)
        for a in range(n + 1):
            arow = sf.coeff[a]
            zrow = zrows[n - a]
            for i, ca in enumerate(arow):
                if ca:
                    for j, cz in enumerate(zrow):
                        if cz and i + j <= K:
                            acc[i + j] += ca * cz
        coeff.append(acc)
    return BiSeries(q, N, K, coeff)


# -- enumeration oracle ----------------------------------------------------------


def brute_force_tables(field: FieldSpec, n: int, budget: int | None = None):
    """Counts by distinct-factor count from direct enumeration of M_n.

    Returns (squarefree_counts, all_counts), each a list indexed by k.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    size = n + 1
    sq = [0] * size
    al = [0] * size
    for f in enumerate_monics(field, n, budget):
        st = factor_stats(f)
        al[st.omega] += 1
        if st.squarefree:
            sq[st.omega] += 1
    return sq, al


def brute_force_count(
    field: FieldSpec, n: int, k: int, mode: str = "squarefree", budget: int | None = None
) -> int:
    """Enumeration-based count; mode is "squarefree" or "all"."""
    if mode not in ("squarefree", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    if k < 0:
        raise ValueError("k must be >= 0")
    sq, al = brute_force_tables(field, n, budget)
    table = sq if mode == "squarefree" else al
    return table[k] if k < len(table) else 0


# -- contour extraction -----------------------------------------------------------


def cauchy_extract(series: BiSeries, n: int, k: int, r: float | None = None, M: int = 256) -> float:
    """Recover coeff[n][k] from the z-polynomial row by trapezoid quadrature.

    Averages row_n(r e^(i theta)) r^(-k) e^(-i k theta) over M equispaced
    angles.  The integrand is a trigonometric polynomial, so the error is
    pure aliasing plus floating-point rounding; it at least halves when M
    doubles until the rounding floor is reached.
    """
    if not 0 <= n <= series.N:
        raise ValueError(f"row {n} outside series range")
    if k < 0 or k > series.K:
        raise ValueError(f"column {k} outside series range")
    if M < 64:
        raise ValueError("M must be >= 64")
    if r is None:
        r = (k - 1) / math.log(n) if k >= 2 and n >= 2 else 0.25
    if r == 0:
        raise ValueError("contour radius must be nonzero")
    row = [float(c) for c in series.row(n)]
    total = 0j
    for m in range(M):
        theta = 2.0 * math.pi * m / M
        z = complex(r * math.cos(theta), r * math.sin(theta))
        acc = 0j
        for c in reversed(row):
            acc = acc * z + c
        total += acc * complex(math.cos(k * theta), -math.sin(k * theta))
    return (total.real / M) * r ** (-k)


# -- distribution of the factor-count statistic -----------------------------------


@dataclass(frozen=True)
class OmegaMoments:
    mean: Fraction
    variance: Fraction
    histogram: dict[int, int]


def omega_moments(series: BiSeries, n: int) -> OmegaMoments:
    """Exact mean and variance of the distinct-factor count over all of M_n.

    The series must come from euler_product_allfactors with K large enough
    to hold every attainable factor count for degree n.
    """
    if not 0 <= n <= series.N:
        raise ValueError(f"degree {n} outside series range")
    if series.K < max_omega(series.q, n):
        raise ValueError("series z-truncation is too small to cover degree n")
    row = series.row(n)
    total = sum(row)
    if total != series.q**n:
        raise ValueError("row does not sum to q^n; series is not an all-factors table")
    mean = Fraction(sum(k * c for k, c in enumerate(row)), total)
    second = Fraction(sum(k * k * c for k, c in enumerate(row)), total)
    histogram = {k: c for k, c in enumerate(row) if c}
    return OmegaMoments(mean=mean, variance=second - mean * mean, histogram=histogram)


def omega_mean_exact(q, n: int) -> Fraction:
    """Closed form for the mean factor count: sum over d <= n of Pi(d) q^(-d)."""
    q = _coerce_q(q)
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(
        (Fraction(irreducible_count(q, d), q**d) for d in range(1, n + 1)),
        Fraction(0),
    )
