"""Rational lattices: LLL, duals, constants, enumeration, tensor products.

All lattice data is exact (Fraction entries).  LLL runs on integers via the
classical d/lambda bookkeeping and certifies its own output, enumeration
compares squared norms as exact rationals, and the Hermite constant table
carries the nine dimensions with known exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import EnumerationBudgetError, InputError, InternalError

Vec = tuple[Fraction, ...]


def _fracv(v) -> Vec:
    return tuple(Fraction(x) for x in v)


class LatticeBasis:
    """Basis of a rational lattice, columns plus the transform that made it."""

    __slots__ = ("ambient_dim", "rank", "columns", "unimodular_history", "perturbation")

    def __init__(self, columns: Sequence[Sequence], unimodular_history=None, perturbation=None):
        cols = [_fracv(c) for c in columns]
        if not cols:
            raise InputError("empty basis")
        dim = len(cols[0])
        if any(len(c) != dim for c in cols):
            raise InputError("ragged basis columns")
        object.__setattr__(self, "ambient_dim", dim)
        object.__setattr__(self, "rank", len(cols))
        object.__setattr__(self, "columns", tuple(cols))
        if unimodular_history is None:
            unimodular_history = tuple(
                tuple(1 if i == j else 0 for j in range(len(cols))) for i in range(len(cols))
            )
        object.__setattr__(self, "unimodular_history", tuple(tuple(r) for r in unimodular_history))
        object.__setattr__(self, "perturbation", perturbation)

    def __setattr__(self, *args):
        raise AttributeError("LatticeBasis is immutable")

    def gram(self) -> list[list[Fraction]]:
        k = self.rank
        g = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            for j in range(i, k):
                s = _dot(self.columns[i], self.columns[j])
                g[i][j] = s
                g[j][i] = s
        return g

    def norm_sq(self, j: int) -> Fraction:
        return _dot(self.columns[j], self.columns[j])

    def det_sq(self) -> Fraction:
        """Square of the lattice determinant (Gram determinant)."""
        return _det_fraction(self.gram())

    def vector(self, coeffs: Sequence[int]) -> Vec:
        out = [Fraction(0)] * self.ambient_dim
        for j, c in enumerate(coeffs):
            if c:
                col = self.columns[j]
                for i in range(self.ambient_dim):
                    out[i] += c * col[i]
        return tuple(out)

    def __repr__(self):
        return f"LatticeBasis(rank={self.rank}, dim={self.ambient_dim})"


def _dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _det_fraction(g: list[list[Fraction]]) -> Fraction:
    n = len(g)
    m = [row[:] for row in g]
    det = Fraction(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                m[r] = [m[r][j] - f * m[c][j] for j in range(n)]
    return det


def gram_schmidt(gram: Sequence[Sequence[Fraction]]):
    """Exact GSO data (mu, D) from a Gram matrix; D are squared star norms."""
    k = len(gram)
    mu = [[Fraction(0)] * k for _ in range(k)]
    D = [Fraction(0)] * k
    for i in range(k):
        for j in range(i):
            s = gram[i][j]
            for l in range(j):
                s -= mu[i][l] * mu[j][l] * D[l]
            if D[j] == 0:
                raise InputError("dependent basis vectors")
            mu[i][j] = s / D[j]
        s = gram[i][i]
        for l in range(i):
            s -= mu[i][l] * mu[i][l] * D[l]
        D[i] = s
        if D[i] <= 0:
            raise InputError("Gram matrix is not positive definite")
    return mu, D


# -- LLL ---------------------------------------------------------------------


def lll_reduce(basis: LatticeBasis, delta: Fraction = Fraction(3, 4)) -> LatticeBasis:
    """LLL-reduced basis of the same lattice, with certified output.

    Runs the integer d/lambda variant on the scaled Gram, applies the
    accumulated unimodular transform to the input columns, and then verifies
    size reduction and the Lovasz condition exactly before returning.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise InputError("delta must lie strictly between 1/4 and 1")
    n = basis.rank
    scale = 1
    for col in basis.columns:
        for x in col:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    cols = [[int(x * scale) for x in col] for col in basis.columns]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def g(i, j):
        return sum(a * b for a, b in zip(cols[i], cols[j]))

    lam = [[0] * n for _ in range(n)]
    d = [0] * (n + 1)
    d[0] = 1

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _round_ratio(lam[k][l], d[l + 1])
            cols[k] = [a - q * b for a, b in zip(cols[k], cols[l])]
            U[k] = [a - q * b for a, b in zip(U[k], U[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    k = 1
    k_max = 0
    _init_row(0, g, lam, d)
    while k < n:
        if k > k_max:
            k_max = k
            _init_row(k, g, lam, d)
        red(k, k - 1)
        p, q = delta.numerator, delta.denominator
        if q * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < p * d[k] ** 2:
            # swap b_k and b_{k-1}
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            U[k], U[k - 1] = U[k - 1], U[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lam_ = lam[k][k - 1]
            b_new = (d[k - 1] * d[k + 1] + lam_ * lam_) // d[k]
            for i in range(k + 1, k_max + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_ * t) // d[k]
                lam[i][k - 1] = (b_new * t + lam_ * lam[i][k]) // d[k + 1]
            d[k] = b_new
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1

    out_cols = [tuple(Fraction(x, scale) for x in col) for col in cols]
    history = _compose_history(basis.unimodular_history, U)
    out = LatticeBasis(out_cols, unimodular_history=history, perturbation=basis.perturbation)
    _certify_lll(out, delta)
    return out


def _round_ratio(a: int, b: int) -> int:
    """Nearest integer to a/b with b > 0, ties toward even like round()."""
    return round(Fraction(a, b))


def _init_row(k, g, lam, d):
    for j in range(k + 1):
        u = g(k, j)
        for i in range(j):
            u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
        if j < k:
            lam[k][j] = u
        else:
            if u == 0:
                raise InputError("dependent basis vectors")
            d[k + 1] = u


def _compose_history(prev, U_rows):
    # U is stored by rows of coefficients over the previous basis:
    # new_col_k = sum_j U[k][j] prev_col_j, so as a matrix product the
    # column-transform is U transposed.
    n = len(U_rows)
    prev = [list(r) for r in prev]
    out = [[0] * n for _ in range(len(prev))]
    for i in range(len(prev)):
        for k in range(n):
            out[i][k] = sum(prev[i][j] * U_rows[k][j] for j in range(n))
    return out


def _certify_lll(basis: LatticeBasis, delta: Fraction):
    mu, D = gram_schmidt(basis.gram())
    for i in range(basis.rank):
        for j in range(i):
            if 2 * abs(mu[i][j]) > 1:
                raise InternalError("LLL output is not size-reduced")
    for i in range(1, basis.rank):
        if D[i] < (delta - mu[i][i - 1] ** 2) * D[i - 1]:
            raise InternalError("LLL output violates the Lovasz condition")


def orthogonality_defect(basis: LatticeBasis) -> float:
    """prod ||b_i|| / det(L), the tightest usable coefficient-bound constant."""
    return math.sqrt(float(orthogonality_defect_sq(basis)))


def orthogonality_defect_sq(basis: LatticeBasis) -> Fraction:
    num = Fraction(1)
    for j in range(basis.rank):
        num *= basis.norm_sq(j)
    den = basis.det_sq()
    if den == 0:
        raise InputError("degenerate basis")
    return num / den


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """Dual lattice basis (inverse transpose); requires a full-rank square basis."""
    if basis.rank != basis.ambient_dim:
        raise InputError("dual basis requires a full-rank lattice")
    from .exactnum import QQ, ExactMatrix

    B = ExactMatrix.from_columns(QQ, [list(c) for c in basis.columns])
    Binv = B.inverse()
    cols = [Binv.row(i) for i in range(basis.rank)]
    return LatticeBasis(cols)


def lattice_equal(a: LatticeBasis, b: LatticeBasis) -> bool:
    """True when the two bases span the same lattice."""
    if a.ambient_dim != b.ambient_dim or a.rank != b.rank:
        return False
    from .exactnum import QQ, ExactMatrix

    A = ExactMatrix.from_columns(QQ, [list(c) for c in a.columns])
    B = ExactMatrix.from_columns(QQ, [list(c) for c in b.columns])
    if a.rank != a.ambient_dim:
        # compare via pairwise membership on the Gram level
        raise InputError("lattice_equal requires full-rank bases")
    try:
        X = A.inverse() @ B
    except InputError:
        return False
    ints = all(x.denominator == 1 for row in X.entries for x in row)
    return ints and abs(X.det()) == 1


# -- constants ---------------------------------------------------------------

# gamma_n ** n for the dimensions with exactly known Hermite constants
_GAMMA_POW: dict[int, Fraction] = {
    1: Fraction(1),
    2: Fraction(4, 3),
    3: Fraction(2),
    4: Fraction(4),
    5: Fraction(8),
    6: Fraction(64, 3),
    7: Fraction(64),
    8: Fraction(256),
    24: Fraction(4) ** 24,
}


def gamma_pow(n: int) -> Fraction:
    """Exact value of gamma_n ** n for n in the known table."""
    if n not in _GAMMA_POW:
        raise InputError(f"gamma_{n} has no exactly known value")
    return _GAMMA_POW[n]


def hermite_gamma(n: int) -> tuple[float, bool]:
    """(gamma_n, exact flag); a proven upper bound when no exact value is known."""
    if n < 1:
        raise InputError("dimension must be positive")
    if n in _GAMMA_POW:
        return float(_GAMMA_POW[n]) ** (1.0 / n), True
    return hermite_upper(n), False


def hermite_upper(n: int) -> float:
    """Classical bound gamma_n <= (4/3)^((n-1)/2), valid for every n."""
    return (4.0 / 3.0) ** ((n - 1) / 2.0)


def berge_martinet_upper(n: int) -> float:
    """Upper bound for the dual-product constant; gamma_n is always admissible."""
    return hermite_gamma(n)[0]


def c_m(m: int) -> float:
    """Reducedness constant gamma_m^(m/2) (3/2)^m 2^(m(m-1)/2)."""
    if m in _GAMMA_POW:
        # gamma_m^(m/2) = sqrt(gamma_m^m), taking one exact square root
        head = math.sqrt(float(_GAMMA_POW[m]))
    else:
        head = hermite_upper(m) ** (m / 2.0)
    return head * 1.5**m * 2.0 ** (m * (m - 1) / 2.0)


def rank_norm_floor(r: int) -> float:
    """sqrt(r / gamma_r^2): norm floor for tensors of rank r relative to lambda1."""
    g, _ = hermite_gamma(r)
    return math.sqrt(r / g**2)


def _floor_key_less(r1: int, r2: int) -> bool:
    """Exact comparison r1/gamma_{r1}^2 < r2/gamma_{r2}^2 for table ranks."""
    g1, g2 = gamma_pow(r1), gamma_pow(r2)
    lhs = Fraction(r1) ** (r1 * r2) * g2**(2 * r1)
    rhs = Fraction(r2) ** (r1 * r2) * g1**(2 * r2)
    return lhs < rhs


def min_rank_floor(rmax: int) -> tuple[float, int]:
    """(min floor value, argmin rank) over 2 <= r <= rmax, compared exactly."""
    if rmax < 2:
        raise InputError("rmax must be at least 2")
    best = 2
    for r in range(3, rmax + 1):
        if r not in _GAMMA_POW:
            raise InputError(f"rank {r} outside the exact table")
        if _floor_key_less(r, best):
            best = r
    return rank_norm_floor(best), best


def lenstra_coefficient_bounds(c: float, v_norm: float, basis_norms: Sequence[float]) -> list[int]:
    """Per-coefficient bounds floor(c * ||v|| / ||b_i||) for box enumeration."""
    if c <= 0 or v_norm < 0:
        raise InputError("bounds require c > 0 and a nonnegative norm")
    return [int(math.floor(c * v_norm / bn)) for bn in basis_norms]


# -- enumeration -------------------------------------------------------------


def _norm_bound_sq(norm_bound) -> Fraction:
    b = Fraction(norm_bound)
    if b < 0:
        raise InputError("negative norm bound")
    return b * b


def short_vectors(
    gram: Sequence[Sequence[Fraction]],
    norm_bound,
    budget: int | None = None,
    partition: tuple[int, int] | None = None,
) -> list[tuple[tuple[int, ...], Fraction]]:
    """All +-classes of nonzero vectors with norm <= norm_bound, sorted.

    Returns (coefficients, squared norm) pairs ordered by norm then
    lexicographic coefficients; each class is represented with its first
    nonzero coefficient positive.  ``partition=(index, count)`` keeps only
    the classes whose leading (last) coefficient falls in the given residue
    class; the union over all residues is exactly the full output.
    """
    k = len(gram)
    bound_sq = _norm_bound_sq(norm_bound)
    mu, D = gram_schmidt(gram)
    results: list[tuple[tuple[int, ...], Fraction]] = []
    x = [0] * k
    # center of the admissible interval at each level, given choices above
    centers = [Fraction(0)] * k
    visited = 0

    def descend(level: int, remaining: Fraction):
        nonlocal visited
        if budget is not None and visited > budget:
            raise EnumerationBudgetError("short vector enumeration budget exceeded")
        c = centers[level]
        # scan the contiguous admissible range outward from the center
        start = -c
        base = math.floor(start) if start.denominator > 1 else int(start)
        for first, step in ((base, -1), (base + 1, 1)):
            xi = first
            while True:
                diff = xi + c
                used = D[level] * diff * diff
                if used > remaining:
                    break
                x[level] = xi
                visited += 1
                if level == 0:
                    if any(x):
                        norm_sq = bound_sq - (remaining - used)
                        results.append((tuple(x), norm_sq))
                else:
                    nxt = level - 1
                    centers[nxt] = sum(
                        (mu[l][nxt] * x[l] for l in range(nxt + 1, k)), Fraction(0)
                    )
                    descend(nxt, remaining - used)
                xi += step
        x[level] = 0

    if k:
        descend(k - 1, bound_sq)
    canonical = []
    for coeffs, nsq in results:
        lead = next(c for c in coeffs if c)
        if lead > 0:
            canonical.append((coeffs, nsq))
    if partition is not None:
        idx, count = partition
        canonical = [cv for cv in canonical if cv[0][k - 1] % count == idx]
    canonical.sort(key=lambda cv: (cv[1], cv[0]))
    return canonical


def enumerate_short(
    gram,
    norm_bound,
    budget: int | None = None,
    partition: tuple[int, int] | None = None,
):
    """Stream of (coefficients, squared norm) in nondecreasing norm order."""
    yield from short_vectors(gram, norm_bound, budget=budget, partition=partition)


@dataclass
class BoxStats:
    nodes: int = 0  # complete coefficient tuples visited (including zero)
    level_steps: int = 0  # loop iterations over all levels


def box_enumerate(
    per_coeff_bounds: Sequence[int],
    dynamic_bounds_fn: Callable[[], Sequence[int]] | None = None,
    stats: BoxStats | None = None,
    budget: int | None = None,
):
    """Literal box iteration |alpha_i| <= bound_i, yielding nonzero tuples.

    When ``dynamic_bounds_fn`` is given it is consulted as the iteration
    proceeds and may only shrink the box; the enumeration then skips the
    regions excluded by the updated bounds.  The caller drives shrinking by
    updating whatever state the callback reads between ``next()`` calls.
    """
    m = len(per_coeff_bounds)
    bounds = [int(b) for b in per_coeff_bounds]
    if any(b < 0 for b in bounds):
        raise InputError("negative box bound")
    if stats is None:
        stats = BoxStats()

    def current(i: int) -> int:
        if dynamic_bounds_fn is None:
            return bounds[i]
        dyn = dynamic_bounds_fn()
        return min(bounds[i], int(dyn[i]))

    x = [0] * m

    def level(i: int):
        if i == m:
            stats.nodes += 1
            if budget is not None and stats.nodes > budget:
                raise EnumerationBudgetError("box enumeration budget exceeded")
            if any(x):
                yield tuple(x)
            return
        xi = -current(i)
        while xi <= current(i):
            stats.level_steps += 1
            if abs(xi) <= current(i):
                x[i] = xi
                yield from level(i + 1)
            xi += 1
        x[i] = 0

    yield from level(0)


# -- tensor products ----------------------------------------------------------


def tensor_product(L: LatticeBasis, M: LatticeBasis) -> LatticeBasis:
    """Kronecker-product basis of L (x) M, columns ordered pairwise (i, j)."""
    cols = []
    for bi in L.columns:
        for cj in M.columns:
            cols.append(tuple(a * b for a in bi for b in cj))
    return LatticeBasis(cols)


@dataclass
class TensorExperimentReport:
    """Per-matrix-rank minima of tensor norms and the rank floor audit."""

    min_norm_sq_by_rank: dict[int, Fraction]
    lambda1_sq: Fraction
    floor_violations: list = dc_field(default_factory=list)
    enumerated: int = 0

    @property
    def lambda1(self) -> float:
        return math.sqrt(float(self.lambda1_sq))

    def min_norm(self, r: int) -> float:
        return math.sqrt(float(self.min_norm_sq_by_rank[r]))


def _int_matrix_rank(rows: list[list[int]]) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def min_norm_by_matrix_rank(
    L: LatticeBasis,
    M: LatticeBasis,
    norm_bound,
    budget: int | None = 2_000_000,
) -> TensorExperimentReport:
    """Classify all tensors up to the bound by matrix rank, with floor checks.

    A coefficient matrix alpha reshaped to rank(L) x rank(M) has the same
    rank as the tensor it represents, so the classification is exact integer
    linear algebra.  Every enumerated vector is checked against the rank-r
    norm floor sqrt(r / gamma_r^2) * lambda1 with an exact power comparison;
    any violation would disprove the floor theorem, so the list must come
    back empty.
    """
    T = lll_reduce(tensor_product(L, M))
    vecs = short_vectors(T.gram(), norm_bound, budget=budget)
    if not vecs:
        return TensorExperimentReport({}, Fraction(0))
    # coefficients are over the reduced basis; map back to the kron basis
    hist = T.unimodular_history
    kdim = T.rank
    by_rank: dict[int, Fraction] = {}
    lambda1_sq = vecs[0][1]
    violations = []
    for coeffs, nsq in vecs:
        kron_coeffs = [
            sum(hist[i][j] * coeffs[j] for j in range(kdim)) for i in range(kdim)
        ]
        rows = [
            kron_coeffs[i * M.rank : (i + 1) * M.rank] for i in range(L.rank)
        ]
        r = _int_matrix_rank(rows)
        if r == 0:
            continue
        if r not in by_rank or nsq < by_rank[r]:
            by_rank[r] = nsq
        # exact floor test: ||v||^(2r) * gamma_r^(2... ) vs r^r lambda1^(2r)
        if r in _GAMMA_POW:
            lhs = nsq**r * gamma_pow(r) ** 2
            rhs = Fraction(r) ** r * lambda1_sq**r
            if lhs < rhs:
                violations.append((coeffs, nsq, r))
    return TensorExperimentReport(
        min_norm_sq_by_rank=by_rank,
        lambda1_sq=lambda1_sq,
        floor_violations=violations,
        enumerated=len(vecs),
    )


def trace_product_check(A, B) -> bool:
    """Tr(AB) >= n (det A det B)^(1/n) for SPD matrices, checked exactly.

    Accepts square matrices as nested sequences of rationals.  The comparison
    is done on n-th powers so no roots are taken.
    """
    a = [[Fraction(x) for x in row] for row in A]
    b = [[Fraction(x) for x in row] for row in B]
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n or any(len(r) != n for r in b):
        raise InputError("trace_product_check needs two square matrices of equal size")
    tr = Fraction(0)
    for i in range(n):
        for k in range(n):
            tr += a[i][k] * b[k][i]
    det_a = _det_fraction(a)
    det_b = _det_fraction(b)
    if tr < 0:
        return False
    return tr**n >= Fraction(n) ** n * det_a * det_b
