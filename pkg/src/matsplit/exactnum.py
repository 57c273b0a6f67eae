"""Exact scalar and matrix arithmetic over Q and imaginary quadratic fields.

Scalars are ``fractions.Fraction`` over Q, or :class:`QuadScalar` values
a + b*sqrt(-d) with rational a, b over Q(sqrt(-d)).  Matrices do plain
rational Gaussian elimination; every operation is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InputError

Rat = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise InputError(f"not an exact rational: {x!r}")


def _is_square_free(n: int) -> bool:
    if n % 4 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class Field:
    """Base field descriptor: ``d is None`` means Q, otherwise Q(sqrt(-d))."""

    d: int | None = None

    def __post_init__(self):
        if self.d is not None:
            if self.d <= 0:
                raise InputError("d must be a positive square-free integer")
            if not _is_square_free(self.d):
                raise InputError(f"d={self.d} is not square-free")

    @property
    def is_rational(self) -> bool:
        return self.d is None

    @property
    def has_half_integers(self) -> bool:
        """True when the ring of integers is Z[(1+sqrt(-d))/2]."""
        return self.d is not None and self.d % 4 == 3

    def zero(self):
        return Fraction(0) if self.is_rational else QuadScalar(self.d, 0, 0)

    def one(self):
        return Fraction(1) if self.is_rational else QuadScalar(self.d, 1, 0)

    def omega(self) -> "QuadScalar":
        """Generator of the ring of integers over Z: sqrt(-d) or (1+sqrt(-d))/2."""
        if self.is_rational:
            raise InputError("omega is only defined for quadratic fields")
        if self.has_half_integers:
            return QuadScalar(self.d, Fraction(1, 2), Fraction(1, 2))
        return QuadScalar(self.d, 0, 1)

    def coerce(self, x):
        """Coerce ints, Fractions and compatible QuadScalars into this field."""
        if isinstance(x, QuadScalar):
            if self.is_rational or x.d != self.d:
                raise InputError(f"scalar {x} does not live in {self}")
            return x
        x = _frac(x)
        return x if self.is_rational else QuadScalar(self.d, x, 0)

    def __str__(self):
        return "Q" if self.is_rational else f"Q(sqrt(-{self.d}))"


QQ = Field(None)
GAUSS = Field(1)
EISENSTEIN = Field(3)


class QuadScalar:
    """Element a + b*sqrt(-d) of an imaginary quadratic field."""

    __slots__ = ("d", "a", "b")

    def __init__(self, d: int, a: Rat, b: Rat):
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, *args):
        raise AttributeError("QuadScalar is immutable")

    def _coerce(self, other) -> "QuadScalar | None":
        if isinstance(other, QuadScalar):
            return other if other.d == self.d else None
        if isinstance(other, (int, Fraction)):
            return QuadScalar(self.d, other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(self.d, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(
            self.d,
            self.a * o.a - self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        num = self * o.conjugate()
        return QuadScalar(self.d, num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm a^2 + d*b^2, a nonnegative rational."""
        return self.a * self.a + self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        """Membership in the ring of integers of Q(sqrt(-d))."""
        if self.d % 4 == 3:
            two_a = 2 * self.a
            two_b = 2 * self.b
            return (
                two_a.denominator == 1
                and two_b.denominator == 1
                and (self.a - self.b).denominator == 1
            )
        return self.a.denominator == 1 and self.b.denominator == 1

    def denominator(self) -> int:
        """Least positive integer q such that q * self is integral."""
        q = (self.a.denominator * self.b.denominator) // _gcd(
            self.a.denominator, self.b.denominator
        )
        # the minimal q divides 2*lcm(den a, den b); scan divisors ascending
        for cand in _divisors_sorted(2 * q):
            s = QuadScalar(self.d, self.a * cand, self.b * cand)
            if s.is_integral():
                return cand
        return 2 * q

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.d, self.a, self.b))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"QuadScalar({self.d}, {self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt(-{self.d})"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*sqrt(-{self.d})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _divisors_sorted(n: int):
    divs = [k for k in range(1, n + 1) if n % k == 0]
    return divs


# -- generic scalar helpers (Fraction or QuadScalar) -------------------------

Scalar = Union[Fraction, QuadScalar]


def scalar_is_zero(x: Scalar) -> bool:
    if isinstance(x, QuadScalar):
        return x.is_zero()
    return x == 0


def scalar_conj(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, QuadScalar) else x


def scalar_field(x: Scalar) -> Field:
    return Field(x.d) if isinstance(x, QuadScalar) else QQ


def as_rational(x: Scalar) -> Fraction:
    """Extract a Fraction from a scalar known to be rational."""
    if isinstance(x, QuadScalar):
        if x.b != 0:
            raise InputError(f"scalar {x} is not rational")
        return x.a
    return _frac(x)


class ExactMatrix:
    """Immutable dense matrix with exact entries over Q or Q(sqrt(-d))."""

    __slots__ = ("rows", "cols", "entries", "field")

    def __init__(self, field: Field, entries: Sequence[Sequence]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        coerced = []
        for r in entries:
            if len(r) != cols:
                raise InputError("ragged matrix rows")
            coerced.append(tuple(field.coerce(x) for x in r))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(coerced))
        object.__setattr__(self, "field", field)

    def __setattr__(self, *args):
        raise AttributeError("ExactMatrix is immutable")

    # -- construction ---------------------------------------------------

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        one, zero = field.one(), field.zero()
        return cls(field, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "ExactMatrix":
        zero = field.zero()
        return cls(field, [[zero] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence]) -> "ExactMatrix":
        rows = len(columns[0])
        return cls(field, [[columns[j][i] for j in range(len(columns))] for i in range(rows)])

    # -- accessors --------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i) -> tuple:
        return self.entries[i]

    def column(self, j) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.entries == other.entries

    def __hash__(self):
        return hash((self.field, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols} over {self.field}: {body})"

    # -- arithmetic -------------------------------------------------------

    def _check_same_field(self, other: "ExactMatrix"):
        if self.field != other.field:
            raise InputError("matrices over different fields")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("dimension mismatch in addition")
        return ExactMatrix(
            self.field,
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scaled(-1)

    def scaled(self, c) -> "ExactMatrix":
        c = self.field.coerce(c)
        return ExactMatrix(
            self.field,
            [[c * x for x in row] for row in self.entries],
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise InputError("dimension mismatch in product")
        zero = self.field.zero()
        out = []
        ot = other.transpose().entries
        for i in range(self.rows):
            ri = self.entries[i]
            row = []
            for j in range(other.cols):
                cj = ot[j]
                acc = zero
                for k in range(self.cols):
                    x = ri[k]
                    if not scalar_is_zero(x):
                        acc = acc + x * cj[k]
                row.append(acc)
            out.append(row)
        return ExactMatrix(self.field, out)

    def mul_vector(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise InputError("dimension mismatch in matrix-vector product")
        v = [self.field.coerce(x) for x in v]
        zero = self.field.zero()
        out = []
        for i in range(self.rows):
            acc = zero
            ri = self.entries[i]
            for k in range(self.cols):
                if not scalar_is_zero(v[k]):
                    acc = acc + ri[k] * v[k]
            out.append(acc)
        return tuple(out)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.field,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def conj_transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.field,
            [
                [scalar_conj(self.entries[i][j]) for i in range(self.rows)]
                for j in range(self.cols)
            ],
        )

    def trace(self):
        if self.rows != self.cols:
            raise InputError("trace of a non-square matrix")
        acc = self.field.zero()
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(scalar_is_zero(x) for r in self.entries for x in r)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_field(other)
        if self.rows != other.rows:
            raise InputError("row count mismatch in hstack")
        return ExactMatrix(
            self.field,
            [list(self.entries[i]) + list(other.entries[i]) for i in range(self.rows)],
        )

    # -- elimination ------------------------------------------------------

    def _echelon(self):
        """Row echelon form by exact elimination; returns (rows, pivot cols)."""
        m = [list(r) for r in self.entries]
        pivots = []
        r = 0
        for c in range(self.cols):
            pivot_row = None
            for i in range(r, self.rows):
                if not scalar_is_zero(m[i][c]):
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            inv = self.field.one() / m[r][c]
            m[r] = [inv * x for x in m[r]]
            for i in range(self.rows):
                if i != r and not scalar_is_zero(m[i][c]):
                    f = m[i][c]
                    m[i] = [m[i][j] - f * m[r][j] for j in range(self.cols)]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return m, pivots

    def rank(self) -> int:
        return len(self._echelon()[1])

    def det(self):
        if self.rows != self.cols:
            raise InputError("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = self.rows
        det = self.field.one()
        for c in range(n):
            pivot_row = None
            for i in range(c, n):
                if not scalar_is_zero(m[i][c]):
                    pivot_row = i
                    break
            if pivot_row is None:
                return self.field.zero()
            if pivot_row != c:
                m[c], m[pivot_row] = m[pivot_row], m[c]
                det = -det
            det = det * m[c][c]
            inv = self.field.one() / m[c][c]
            for i in range(c + 1, n):
                if not scalar_is_zero(m[i][c]):
                    f = m[i][c] * inv
                    m[i] = [m[i][j] - f * m[c][j] for j in range(n)]
        return det

    def kernel_basis(self) -> list:
        """Basis of the right null space; empty iff full column rank."""
        m, pivots = self._echelon()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        one, zero = self.field.one(), self.field.zero()
        for f in free:
            v = [zero] * self.cols
            v[f] = one
            for r, c in enumerate(pivots):
                v[c] = -m[r][f]
            basis.append(tuple(v))
        return basis

    def solve(self, rhs: Sequence):
        """A particular solution of M x = rhs, or None when inconsistent."""
        if len(rhs) != self.rows:
            raise InputError("rhs length mismatch")
        aug = ExactMatrix(
            self.field,
            [list(self.entries[i]) + [rhs[i]] for i in range(self.rows)],
        )
        m, pivots = aug._echelon()
        if self.cols in pivots:
            return None
        zero = self.field.zero()
        x = [zero] * self.cols
        for r, c in enumerate(pivots):
            x[c] = m[r][self.cols]
        return tuple(x)

    def inverse(self) -> "ExactMatrix":
        if self.rows != self.cols:
            raise InputError("inverse of a non-square matrix")
        n = self.rows
        aug = self.hstack(ExactMatrix.identity(self.field, n))
        m, pivots = aug._echelon()
        if pivots != list(range(n)):
            raise InputError("matrix is singular")
        return ExactMatrix(self.field, [row[n:] for row in m[:n]])


# -- module level operations (the public surface) ----------------------------


def matrix_rank(M: ExactMatrix) -> int:
    """Rank over the fraction field by exact elimination."""
    return M.rank()


def determinant(M: ExactMatrix):
    """Exact determinant of a square matrix."""
    return M.det()


def kernel_basis(M: ExactMatrix) -> list:
    """Basis of the right null space of M."""
    return M.kernel_basis()


def solve_linear(M: ExactMatrix, rhs: Sequence):
    """Particular solution of M x = rhs, or None when the system is inconsistent."""
    return M.solve(rhs)


def rational_matrix(entries: Iterable[Iterable[Rat]]) -> ExactMatrix:
    return ExactMatrix(QQ, [list(r) for r in entries])
