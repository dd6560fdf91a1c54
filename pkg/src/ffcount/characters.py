"""Unit groups modulo a polynomial, their characters, and L-polynomials.

Representation conventions used throughout this module:

* A unit group element is a canonical representative: the residue of degree
  < deg(d) coprime to the modulus d, stored as a Poly and addressed by its
  dense index in enumeration order.  Elements need not be monic; constants
  other than 0 are units.
* The group structure is a basis: a list of (generator, order) pairs whose
  cyclic spans form an internal direct product.  It is found by picking a
  maximal-order element, passing to the quotient, recursing, and lifting
  each quotient generator v by a power of the chosen u so its order is
  preserved (v^m lands in <u> as u^t with m | t, so v u^(-t/m) works).
  Construction validates itself by regenerating all elements from the
  basis, which doubles as the discrete-log table.
* A character is an exponent vector against the basis: its value on
  generator i is the order-n_i root of unity raised to exponents[i].
  Values stay exact (integers modulo the group exponent E) until a caller
  asks for a complex float.  Exact zero tests for sums of roots of unity
  reduce the integer count polynomial modulo the E-th cyclotomic
  polynomial, so orthogonality checks carry no float tolerance at all.
* L-polynomial coefficients are indexed from degree 0 with c_0 = 1 (the
  single degree-0 monic, value 1 under every character); the coefficient
  list runs to degree m-1 and the effective degree is found by the exact
  zero test above.  Inverse roots come from a deterministic simultaneous
  (Durand-Kerner) iteration on the reversed polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct

from .algebra import (
    Poly,
    enumerate_irreducibles,
    enumerate_monics,
    factor_stats,
    irreducible_count,
    phi_poly,
    poly_gcd,
    _int_factorization,
)
from .errors import BudgetExceededError, ConsistencyError, RootFindingError
from .exactcount import max_omega

__all__ = [
    "DEFAULT_GROUP_BUDGET",
    "DirichletChar",
    "LPoly",
    "UnitGroup",
    "characters",
    "cyclotomic_polynomial",
    "l_polynomial",
    "root_unity_sum_is_zero",
    "twisted_count",
    "twisted_dz_sum",
    "twisted_series",
    "unit_group",
    "weil_check",
]

DEFAULT_GROUP_BUDGET = 100_000

# above this many irreducibles, class counts switch from enumeration to the
# Newton recurrence on the class-refined zeta coefficients
DEFAULT_IRREDUCIBLE_CAP = 2_000_000

# the Newton path convolves vectors indexed by the unit group, which needs
# the full multiplication table in memory
MAX_CLASS_METHOD_ORDER = 1024

L_COEFF_NOTE = "coefficients indexed from degree 0; constant coefficient is 1"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, ascending."""
    if n < 1:
        raise ValueError("n must be positive")
    # (x^n - 1) divided by the product of lower cyclotomics, exactly
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d:
            continue
        div = cyclotomic_polynomial(d)
        out = [0] * (len(num) - len(div) + 1)
        rem = list(num)
        for i in range(len(out) - 1, -1, -1):
            c = rem[i + len(div) - 1]
            out[i] = c
            if c:
                for j, dc in enumerate(div):
                    rem[i + j] -= c * dc
        assert all(v == 0 for v in rem[: len(div) - 1])
        num = out
    return tuple(num)


def root_unity_sum_is_zero(counts, order: int) -> bool:
    """Exact test: does sum of counts[e] * zeta^e vanish, zeta = e^(2pi i/order)?

    Reduces the integer polynomial modulo the order-th cyclotomic polynomial;
    the sum is zero exactly when the remainder is the zero polynomial.
    """
    rem = [0] * order
    for e, c in enumerate(counts):
        rem[e % order] += c
    cyc = cyclotomic_polynomial(order)
    deg = len(cyc) - 1
    for i in range(order - 1, deg - 1, -1):
        c = rem[i]
        if c:
            for j, dc in enumerate(cyc):
                rem[i - deg + j] -= c * dc
    return all(v == 0 for v in rem[:deg])


class UnitGroup:
    """Multiplicative group of residues coprime to a monic modulus."""

    def __init__(self, d: Poly, budget: int | None = None):
        if not d.is_monic or d.degree < 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.d = d
        self.field = d.field
        self.q = d.field.q
        self.m = d.degree
        self.order = phi_poly(d)
        limit = DEFAULT_GROUP_BUDGET if budget is None else budget
        if self.order > limit:
            raise BudgetExceededError(
                "unit group order %d exceeds budget %d" % (self.order, limit))
        elems = []
        index: dict[tuple, int] = {}
        for f in self._residues():
            if f.is_zero:
                continue
            g = poly_gcd(f, d)
            if g.degree == 0:
                index[f.coeffs] = len(elems)
                elems.append(f)
        assert len(elems) == self.order
        self.elements: tuple[Poly, ...] = tuple(elems)
        self._index = index
        self.identity_index = index[(1,)]
        self.structure: tuple[tuple[Poly, int], ...] = ()
        self._dlog: dict[int, tuple[int, ...]] = {}
        self._build_structure()
        self.exponent = 1
        for _, n in self.structure:
            self.exponent = _lcm(self.exponent, n)
        self._class_counts: dict[int, dict[int, dict[int, int]]] = {}

    def _residues(self):
        fld = self.field
        q = self.q
        for code in range(q**self.m):
            cs = []
            v = code
            for _ in range(self.m):
                cs.append(v % q)
                v //= q
            while cs and cs[-1] == 0:
                cs.pop()
            yield Poly(fld, tuple(cs))

    def index_of(self, f: Poly) -> int:
        """Index of the residue class of f; rejects non-coprime f."""
        if f.field.key != self.field.key:
            raise ValueError("field mismatch")
        r = f % self.d
        idx = self._index.get(r.coeffs)
        if idx is None:
            raise ValueError("polynomial is not coprime to the modulus")
        return idx

    def mul(self, i: int, j: int) -> int:
        r = (self.elements[i] * self.elements[j]) % self.d
        return self._index[r.coeffs]

    def pow(self, i: int, t: int) -> int:
        t %= self.order
        out = self.identity_index
        base = i
        while t:
            if t & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            t >>= 1
        return out

    def inv(self, i: int) -> int:
        return self.pow(i, self.order - 1)

    def element_order(self, i: int) -> int:
        e = self.order
        for p in _int_factorization(self.order):
            while e % p == 0 and self.pow(i, e // p) == self.identity_index:
                e //= p
        return e

    def dlog(self, i: int) -> tuple[int, ...]:
        """Exponent vector of element i against the basis."""
        return self._dlog[i]

    def _build_structure(self):
        basis = self._extract_basis(list(range(self.order)),
                                    lambda a, b: self.mul(a, b),
                                    self.identity_index,
                                    self.order)
        self.structure = tuple((self.elements[i], n) for i, n in basis)
        # regenerate the whole group from the basis; this both validates the
        # direct-product property and fills the discrete-log table
        dlog: dict[int, tuple[int, ...]] = {}
        combos = [(self.identity_index, ())]
        for gi, n in basis:
            nxt = []
            for start, vec in combos:
                cur = start
                for t in range(n):
                    nxt.append((cur, vec + (t,)))
                    if t < n - 1:
                        cur = self.mul(cur, gi)
            combos = nxt
        for idx, vec in combos:
            if idx in dlog:
                raise ConsistencyError("unit group basis is not independent")
            dlog[idx] = vec
        if len(dlog) != self.order:
            raise ConsistencyError("unit group basis does not span the group")
        self._dlog = dlog

    @staticmethod
    def _extract_basis(elements, mul, identity, size):
        """Basis of an abelian group given by element list and multiplication.

        Returns [(element, order), ...] whose cyclic factors direct-product
        to the whole group, largest order first.
        """
        if size == 1:
            return []

        def order_of(x):
            e = size
            for p in _int_factorization(size):
                while e % p == 0:
                    y = x
                    t = e // p
                    acc = identity
                    while t:
                        if t & 1:
                            acc = mul(acc, y)
                        y = mul(y, y)
                        t >>= 1
                    if acc != identity:
                        break
                    e //= p
            return e

        best, best_ord = identity, 1
        for x in elements:
            o = order_of(x)
            if o > best_ord:
                best, best_ord = x, o
                if o == size:
                    break
        if best_ord == size:
            return [(best, best_ord)]
        # label cosets of <best>
        powers = [identity]
        for _ in range(best_ord - 1):
            powers.append(mul(powers[-1], best))
        coset: dict[object, int] = {}
        reps = []
        for x in elements:
            if x in coset:
                continue
            cid = len(reps)
            reps.append(x)
            for p in powers:
                coset[mul(x, p)] = cid
        qsize = size // best_ord
        assert len(reps) == qsize

        def qmul(a, b):
            return coset[mul(reps[a], reps[b])]

        qid = coset[identity]
        sub = UnitGroup._extract_basis(list(range(qsize)), qmul, qid, qsize)
        out = [(best, best_ord)]
        for qgen, n in sub:
            v = reps[qgen]
            # v^n lies in <best> as best^t with n | t; correct by best^(-t/n)
            vn = identity
            y, t = v, n
            while t:
                if t & 1:
                    vn = mul(vn, y)
                y = mul(y, y)
                t >>= 1
            tpow = powers.index(vn)
            assert tpow % n == 0
            shift = (-(tpow // n)) % best_ord
            adj = v
            for _ in range(shift):
                adj = mul(adj, best)
            out.append((adj, n))
        return out

    def irreducible_classes(self, max_degree: int, budget: int | None = None,
                            method: str = "auto"):
        """Per-degree counts of irreducibles by unit class, {deg: {idx: count}}.

        Irreducibles dividing the modulus are excluded (their residues are
        not units).  Cached per degree.  method "direct" reduces every
        enumerated irreducible, "class" uses the Newton recurrence on the
        class-refined zeta coefficients, and "auto" enumerates only when
        the total number of irreducibles is within the cap.
        """
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        if method not in ("auto", "direct", "class"):
            raise ValueError(f"unknown method {method!r}")
        missing = [n for n in range(1, max_degree + 1)
                   if n not in self._class_counts]
        mode = method
        if mode == "auto" and missing:
            total = 0
            for n in range(1, max_degree + 1):
                total += irreducible_count(self.q, n)
                if total > DEFAULT_IRREDUCIBLE_CAP:
                    break
            mode = "direct" if total <= DEFAULT_IRREDUCIBLE_CAP else "class"
        if mode == "direct":
            for n in missing:
                counts: dict[int, int] = {}
                for p in enumerate_irreducibles(self.field, n, budget):
                    r = p % self.d
                    idx = self._index.get(r.coeffs)
                    if idx is not None:
                        counts[idx] = counts.get(idx, 0) + 1
                self._class_counts[n] = counts
        elif mode == "class":
            # recompute even over cached degrees; a cached value then acts
            # as a free cross-check between the two derivations
            for n, counts in _newton_class_counts(self, max_degree).items():
                cached = self._class_counts.get(n)
                if cached is not None and cached != counts:
                    raise ConsistencyError(
                        f"class counts disagree between methods at degree {n}")
                self._class_counts[n] = counts
        return {n: dict(self._class_counts[n]) for n in range(1, max_degree + 1)}


def _newton_class_counts(group: UnitGroup, N: int):
    """Irreducible counts per (degree, unit class) without enumeration.

    Works on the class-refined coefficients z_n of the zeta function
    restricted to polynomials coprime to d: z_n[u] is q^(n-m) for n >= m
    and an indicator of the monic degree-n representatives below that.
    The recurrence n z_n = sum_j w_j * z_(n-j) (convolution over the
    group) yields the prime-power vectors w_n, and exact prime-power
    inversion recovers the per-class prime counts.
    """
    order = group.order
    if order > MAX_CLASS_METHOD_ORDER:
        raise BudgetExceededError(
            "class-count method needs a full multiplication table; "
            f"group order {order} exceeds {MAX_CLASS_METHOD_ORDER}")
    q, m, id0 = group.q, group.m, group.identity_index
    multab = [[group.mul(u, v) for v in range(order)] for u in range(order)]
    zrows = []
    for n in range(min(m, N + 1)):
        row = [0] * order
        if n == 0:
            row[id0] = 1
        else:
            for u, el in enumerate(group.elements):
                if el.is_monic and el.degree == n:
                    row[u] = 1
        zrows.append(row)
    qpow = [1]
    for _ in range(N):
        qpow.append(qpow[-1] * q)
    excluded: dict[int, int] = {}
    for p, _ in factor_stats(group.d).factors:
        excluded[p.degree] = excluded.get(p.degree, 0) + 1
    w: list[list[int] | None] = [None] * (N + 1)
    wsum = [0] * (N + 1)
    cvec: list[list[int] | None] = [None] * (N + 1)
    powmaps: dict[int, list[int]] = {}
    counts: dict[int, dict[int, int]] = {}
    for n in range(1, N + 1):
        if n >= m:
            acc = [n * qpow[n - m]] * order
        else:
            acc = [n * zrows[n][u] for u in range(order)]
        for j in range(1, n):
            nj = n - j
            if nj >= m:
                # z_(n-j) is constant across classes, so the convolution
                # collapses to a constant shift by the total weight of w_j
                c = qpow[nj - m] * wsum[j]
                if c:
                    acc = [a - c for a in acc]
            else:
                zr = zrows[nj]
                wj = w[j]
                for u in range(order):
                    wu = wj[u]
                    if wu:
                        row = multab[u]
                        for v in range(order):
                            if zr[v]:
                                acc[row[v]] -= wu * zr[v]
        w[n] = acc
        wsum[n] = sum(acc)
        sub = [0] * order
        for j in range(2, n + 1):
            if n % j:
                continue
            t = n // j
            ct = cvec[t]
            pm = powmaps.get(j)
            if pm is None:
                pm = [group.pow(x, j) for x in range(order)]
                powmaps[j] = pm
            for x in range(order):
                if ct[x]:
                    sub[pm[x]] += t * ct[x]
        cn = []
        for u in range(order):
            val = acc[u] - sub[u]
            if val % n:
                raise ConsistencyError(
                    f"class-count inversion is not integral at degree {n}")
            cn.append(val // n)
        cvec[n] = cn
        if sum(cn) + excluded.get(n, 0) != irreducible_count(q, n):
            raise ConsistencyError(
                f"class counts at degree {n} do not sum to the prime count")
        counts[n] = {u: c for u, c in enumerate(cn) if c}
    return counts


@lru_cache(maxsize=None)
def unit_group(d: Poly, budget: int | None = None) -> UnitGroup:
    return UnitGroup(d, budget)


@dataclass(frozen=True)
class DirichletChar:
    """Character of a unit group, stored as exponents against the basis."""

    group: UnitGroup
    exponents: tuple[int, ...]

    def __post_init__(self):
        orders = [n for _, n in self.group.structure]
        if len(self.exponents) != len(orders):
            raise ValueError("exponent vector length mismatch")
        if any(not 0 <= e < n for e, n in zip(self.exponents, orders)):
            raise ValueError("exponents out of range")

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def value_exponent(self, f) -> int | None:
        """Value on f as an exponent modulo the group exponent; None if not a unit."""
        g = self.group
        if isinstance(f, Poly):
            try:
                idx = g.index_of(f)
            except ValueError:
                return None
        else:
            idx = f
        vec = g.dlog(idx)
        E = g.exponent
        total = 0
        for e, t, (_, n) in zip(self.exponents, vec, g.structure):
            total += e * t * (E // n)
        return total % E

    def __call__(self, f) -> complex:
        e = self.value_exponent(f)
        if e is None:
            return 0j
        return cmath.exp(2j * math.pi * e / self.group.exponent)

    def conjugate(self) -> "DirichletChar":
        orders = [n for _, n in self.group.structure]
        return DirichletChar(self.group,
                             tuple((-e) % n for e, n in zip(self.exponents, orders)))

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        if other.group is not self.group:
            raise ValueError("characters belong to different groups")
        orders = [n for _, n in self.group.structure]
        return DirichletChar(self.group,
                             tuple((a + b) % n for a, b, n in
                                   zip(self.exponents, other.exponents, orders)))


def characters(group: UnitGroup) -> tuple[DirichletChar, ...]:
    """The full dual group; the all-zero (principal) character comes first."""
    orders = [n for _, n in group.structure]
    return tuple(DirichletChar(group, exps)
                 for exps in _iproduct(*(range(n) for n in orders)))


def _find_roots(coeffs: list[complex]) -> tuple[tuple[complex, ...], float]:
    """Roots of a monic complex polynomial by simultaneous iteration.

    coeffs are ascending with coeffs[-1] == 1.  Deterministic seeds on a
    spiral; returns (roots, residual).
    """
    deg = len(coeffs) - 1
    if deg == 0:
        return (), 0.0
    seed = 0.4 + 0.9j
    xs = [seed**i for i in range(deg)]

    def val(x):
        acc = 0j
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    for _ in range(200):
        moved = 0.0
        for i in range(deg):
            num = val(xs[i])
            den = 1 + 0j
            for j in range(deg):
                if j != i:
                    den *= xs[i] - xs[j]
            if den == 0:
                den = 1e-30
            delta = num / den
            xs[i] -= delta
            moved = max(moved, abs(delta))
        if moved <= 1e-14:
            break
    residual = max((abs(val(x)) for x in xs), default=0.0)
    return tuple(xs), residual


@dataclass(frozen=True)
class LPoly:
    """Dirichlet L-polynomial data for a non-principal character."""

    chi: DirichletChar
    coeffs: tuple[complex, ...]
    effective_degree: int
    inverse_roots: tuple[complex, ...]
    residual: float


def _l_coefficient_counts(chi: DirichletChar, j: int) -> list[int]:
    """chi summed over all monics of degree j, as root-of-unity counts."""
    g = chi.group
    counts = [0] * g.exponent
    for f in enumerate_monics(g.field, j):
        e = chi.value_exponent(f)
        if e is not None:
            counts[e] += 1
    return counts


def _counts_to_complex(counts: list[int], E: int) -> complex:
    acc = 0j
    for e, c in enumerate(counts):
        if c:
            acc += c * cmath.exp(2j * math.pi * e / E)
    return acc


def l_polynomial(chi: DirichletChar) -> LPoly:
    """Coefficients and inverse roots of L(T, chi) for non-principal chi."""
    if chi.is_principal:
        raise ValueError("the principal character has no polynomial L-function")
    g = chi.group
    E = g.exponent
    count_rows = [_l_coefficient_counts(chi, j) for j in range(g.m)]
    coeffs = tuple(_counts_to_complex(row, E) for row in count_rows)
    eff = 0
    for j in range(g.m - 1, -1, -1):
        if not root_unity_sum_is_zero(count_rows[j], E):
            eff = j
            break
    # inverse roots are the zeros of the reversed polynomial
    # y^eff + c_1 y^(eff-1) + ... + c_eff  (c_0 = 1 keeps it monic)
    rev = [coeffs[eff - i] for i in range(eff + 1)]
    roots, residual = _find_roots(rev)
    if residual > 1e-10:
        raise RootFindingError("inverse-root iteration stalled", residual)
    return LPoly(chi, coeffs, eff, roots, residual)


def weil_check(chi: DirichletChar, tol: float = 1e-6) -> dict:
    """Classify inverse-root moduli of L(T, chi) against {1, sqrt(q)}.

    Returns a report dict; "ok" is True when every root modulus is within
    tol of one of the two predicted values.  Missing degree (effective
    degree below m-1) is reported as degree_deficit rather than as zero
    roots.
    """
    lp = l_polynomial(chi)
    g = chi.group
    rt_q = math.sqrt(g.q)
    roots = []
    ok = True
    for a in lp.inverse_roots:
        mod = abs(a)
        dist1 = abs(mod - 1.0)
        distq = abs(mod - rt_q)
        cls = "1" if dist1 <= distq else "sqrt_q"
        if min(dist1, distq) > tol:
            ok = False
        roots.append({"re": a.real, "im": a.imag, "modulus": mod, "class": cls})
    return {
        "q": g.q,
        "modulus": g.d.text(),
        "exponents": list(chi.exponents),
        "inverse_roots": roots,
        "degree_deficit": (g.m - 1) - lp.effective_degree,
        "ok": ok,
        "coefficient_convention": L_COEFF_NOTE,
    }


def twisted_series(chi: DirichletChar, N: int, K: int | None = None):
    """Rows [n][k] of the character-twisted squarefree factor-count series.

    Truncated product over irreducibles p coprime to the modulus of
    (1 + z chi(p) T^deg p), grouped by (degree, character value) so the
    work scales with N * group exponent rather than the irreducible count.
    """
    g = chi.group
    if K is None:
        K = min(N, max_omega(g.q, N)) if N >= 1 else 0
    rows = [[0j] * (K + 1) for _ in range(N + 1)]
    rows[0][0] = 1 + 0j
    classes = g.irreducible_classes(N)
    E = g.exponent
    for dp in range(1, N + 1):
        by_exp: dict[int, int] = {}
        for idx, cnt in classes[dp].items():
            e = chi.value_exponent(idx)
            by_exp[e] = by_exp.get(e, 0) + cnt
        for e, cnt in sorted(by_exp.items()):
            zeta = cmath.exp(2j * math.pi * e / E)
            # multiply by (1 + z zeta T^dp)^cnt expanded binomially
            jmax = min(K, N // dp)
            binom = [1]
            for j in range(1, jmax + 1):
                binom.append(binom[-1] * (cnt - j + 1) // j)
            for n in range(N, dp - 1, -1):
                for k in range(min(K, n), 0, -1):
                    acc = rows[n][k]
                    zj = 1 + 0j
                    for j in range(1, jmax + 1):
                        if n - dp * j < 0 or k - j < 0:
                            break
                        zj *= zeta
                        acc += binom[j] * zj * rows[n - dp * j][k - j]
                    rows[n][k] = acc
    return tuple(tuple(r) for r in rows)


def twisted_count(n: int, k: int, chi: DirichletChar) -> complex:
    """Character-weighted count of squarefree degree-n monics with k factors.

    Computed two ways (direct enumeration and the truncated Euler product);
    the paths must agree to 1e-8 or a ConsistencyError is raised.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be nonnegative")
    g = chi.group
    direct = 0j
    for f in enumerate_monics(g.field, n):
        e = chi.value_exponent(f)
        if e is None:
            continue
        st = factor_stats(f)
        if st.squarefree and st.omega == k:
            direct += cmath.exp(2j * math.pi * e / g.exponent)
    series = twisted_series(chi, n)
    viaproduct = series[n][k] if k < len(series[n]) else 0j
    if abs(direct - viaproduct) > 1e-8:
        raise ConsistencyError(
            "twisted count paths disagree: enumeration %r vs product %r"
            % (direct, viaproduct))
    return viaproduct


def twisted_dz_sum(chi: DirichletChar, n: int, z) -> complex:
    """Sum over degree-n monics of the z-th divisor weight times chi.

    Equals the T^n coefficient of L(T, chi)^z, computed by the log-derivative
    recurrence n p_n = sum_{a=1}^{n} (a z - (n - a)) l_a p_{n-a}.
    """
    if chi.is_principal:
        raise ValueError("defined here for non-principal characters only")
    if n < 0:
        raise ValueError("n must be nonnegative")
    zc = complex(z)
    lp = l_polynomial(chi)
    l = lp.coeffs
    p = [1 + 0j]
    for m in range(1, n + 1):
        acc = 0j
        for a in range(1, min(m, len(l) - 1) + 1):
            acc += (a * zc - (m - a)) * l[a] * p[m - a]
        p.append(acc / m)
    return p[n]
