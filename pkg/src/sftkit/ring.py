"""Exact coefficient arithmetic: Q, the polynomial ring Q[U], and matrices.

Everything here is exact.  Rationals are ``fractions.Fraction`` (arbitrary
precision), polynomials store a tuple of rational coefficients indexed by the
exponent of U, and matrices carry a ring tag ("Q" or "QU") so that the normal
form routines know which division rule applies.  No value is mutated after
construction; all operations return new values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction

RING_Q = "Q"
RING_QU = "QU"


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class UPoly:
    """Univariate polynomial in U with rational coefficients.

    ``coeffs[k]`` is the coefficient of U^k; the tuple carries no trailing
    zeros, so the zero polynomial is the empty tuple and ``degree`` of zero
    is -1 by convention.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("UPoly is immutable")

    @staticmethod
    def const(c) -> "UPoly":
        return UPoly([rat(c)])

    @staticmethod
    def monomial(exponent: int, coeff=1) -> "UPoly":
        if exponent < 0:
            raise ValueError("exponents must be nonnegative")
        return UPoly([0] * exponent + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        lead = self.leading()
        return UPoly([c / lead for c in self.coeffs])

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("UPoly", self.coeffs))

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly([_at(self, i) + _at(other, i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return UPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = UPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "UPoly"):
        """Exact Euclidean division: self = q*other + r with deg r < deg other."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        q = [Fraction(0)] * max(len(self.coeffs) - len(other.coeffs) + 1, 1)
        rem = list(self.coeffs)
        dlead = other.leading()
        dd = other.degree
        while len(rem) - 1 >= dd and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < dd:
                break
            shift = len(rem) - 1 - dd
            factor = rem[-1] / dlead
            q[shift] = factor
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= factor * c
        return UPoly(q), UPoly(rem)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def evaluate(self, s) -> Fraction:
        s = rat(s)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                body = str(abs(c))
            else:
                u = "U" if k == 1 else f"U^{k}"
                body = u if abs(c) == 1 else f"{abs(c)}*{u}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__


def _as_poly(x):
    if isinstance(x, UPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return UPoly.const(x)
    return NotImplemented


def _at(p: UPoly, i: int) -> Fraction:
    return p.coeffs[i] if i < len(p.coeffs) else Fraction(0)


def poly_gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd in Q[U] by the Euclidean algorithm."""
    a, b = _as_poly(a), _as_poly(b)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_arith(a: UPoly, b: UPoly, op: str) -> UPoly:
    if op == "add":
        return _as_poly(a) + _as_poly(b)
    if op == "mul":
        return _as_poly(a) * _as_poly(b)
    raise ValueError(f"unknown op {op!r}")


def parse_upoly(text: str) -> UPoly:
    """Parse strings like '2*U^2 - U + 1/2' (also bare rationals)."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    s = s.replace("-", "+-")
    if s.startswith("+"):
        s = s[1:]
    acc = UPoly()
    for term in s.split("+"):
        if not term:
            raise ValueError(f"cannot parse polynomial {text!r}")
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "U" in term:
            head, _, tail = term.partition("U")
            coeff = rat(head.rstrip("*")) if head.rstrip("*") else Fraction(1)
            if tail.startswith("^"):
                exp = int(tail[1:])
            elif tail == "":
                exp = 1
            else:
                raise ValueError(f"cannot parse polynomial {text!r}")
        else:
            coeff, exp = rat(term), 0
        if neg:
            coeff = -coeff
        acc = acc + UPoly.monomial(exp, coeff)
    return acc


ScalarLike = Union[int, Fraction, UPoly]


def _coerce(ring: str, x) -> ScalarLike:
    if ring == RING_Q:
        if isinstance(x, UPoly):
            if x.degree > 0:
                raise ValueError("nonconstant polynomial in a Q matrix")
            return x.coeffs[0] if x.coeffs else Fraction(0)
        return rat(x)
    if ring == RING_QU:
        p = _as_poly(x)
        if p is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into Q[U]")
        return p
    raise ValueError(f"unknown ring tag {ring!r}")


def _zero(ring: str):
    return Fraction(0) if ring == RING_Q else UPoly()

def _one(ring: str):
    return Fraction(1) if ring == RING_Q else UPoly.const(1)


def _euclid_size(ring: str, x) -> int:
    # Euclidean norm: 0 for units; polynomial degree over Q[U].
    if ring == RING_Q:
        return 0
    return x.degree


def _divmod(ring: str, a, b):
    if ring == RING_Q:
        return a / b, Fraction(0)
    return a.divmod(b)


def _unit_normalize(ring: str, a):
    """Return (u, a/u) with u a unit making a/u canonical (1 over Q, monic over Q[U])."""
    if ring == RING_Q:
        return a, Fraction(1)
    lead = a.leading()
    return UPoly.const(lead), a.monic()


@dataclass(frozen=True)
class SmithResult:
    """Diagonalization L*M*R = D with unimodular L, R.

    ``factors`` lists the nonzero diagonal entries d_1 | d_2 | ..., unit
    normalized (all 1 over Q, monic over Q[U]).
    """

    factors: tuple
    diagonal: "ExactMatrix"
    left: "ExactMatrix"
    right: "ExactMatrix"
    left_inverse: "ExactMatrix"
    right_inverse: "ExactMatrix"

    def verify(self, m: "ExactMatrix") -> bool:
        return (self.left @ m) @ self.right == self.diagonal


class ExactMatrix:
    """Immutable rectangular matrix over Q or Q[U]."""

    __slots__ = ("ring", "rows", "nrows", "ncols")

    def __init__(self, ring: str, rows: Sequence[Sequence]):
        rows = [list(r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("matrix rows have unequal lengths")
        else:
            width = 0
        coerced = tuple(tuple(_coerce(ring, x) for x in r) for r in rows)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", coerced)
        object.__setattr__(self, "nrows", len(coerced))
        object.__setattr__(self, "ncols", width)

    def __setattr__(self, *a):
        raise AttributeError("ExactMatrix is immutable")

    @staticmethod
    def identity(ring: str, n: int) -> "ExactMatrix":
        one, zero = _one(ring), _zero(ring)
        return ExactMatrix(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(ring: str, nrows: int, ncols: int) -> "ExactMatrix":
        zero = _zero(ring)
        return ExactMatrix(ring, [[zero] * ncols for _ in range(nrows)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.ring == other.ring and self.rows == other.rows

    def __hash__(self):
        return hash((self.ring, self.rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ring != other.ring or self.ncols != other.nrows:
            raise ValueError("incompatible matrices")
        zero = _zero(self.ring)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return ExactMatrix(self.ring, out)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, list(zip(*self.rows)) if self.rows else [])

    def evaluate(self, s) -> "ExactMatrix":
        """Substitute U := s, landing in a Q matrix."""
        if self.ring == RING_Q:
            return self
        return ExactMatrix(RING_Q, [[e.evaluate(s) for e in row] for row in self.rows])

    def det(self):
        """Determinant by division-free cofactor expansion (square matrices)."""
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return _one(self.ring)

        from functools import lru_cache

        cols0 = tuple(range(n))

        @lru_cache(maxsize=None)
        def minor(row: int, cols: tuple):
            if row == n:
                return _one(self.ring)
            acc = _zero(self.ring)
            for pos, j in enumerate(cols):
                entry = self.rows[row][j]
                if not entry:
                    continue
                sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
                term = entry * sub
                acc = acc + term if pos % 2 == 0 else acc - term
            return acc

        return minor(0, cols0)

    def rank(self) -> int:
        """Rank over the fraction field (Q, or Q(U) via fraction-free elimination)."""
        if self.ring == RING_Q:
            return _rank_q(self.rows)
        return _rank_qu(self.rows)

    def __str__(self):
        body = "; ".join(", ".join(str(e) for e in row) for row in self.rows)
        return f"[{body}]"

    __repr__ = __str__


def _rank_q(rows) -> int:
    m = [list(r) for r in rows]
    nr, nc = len(m), len(m[0]) if m else 0
    rank = 0
    row = 0
    for col in range(nc):
        pivot = next((r for r in range(row, nr) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(nr):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def _rank_qu(rows) -> int:
    # Fraction-free elimination: cross-multiply rows, divide out content lazily.
    m = [list(r) for r in rows]
    nr, nc = len(m), len(m[0]) if m else 0
    rank = 0
    row = 0
    for col in range(nc):
        pivot = next((r for r in range(row, nr) if not m[r][col].is_zero()), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        p = m[row][col]
        for r in range(row + 1, nr):
            if m[r][col].is_zero():
                continue
            f = m[r][col]
            m[r] = [p * a - f * b for a, b in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def smith_normal_form(m: ExactMatrix) -> SmithResult:
    """Smith normal form over Q or Q[U] with exact transform certificates.

    Returns unimodular ``left``/``right`` (with tracked inverses) such that
    ``left @ m @ right`` is diagonal with the divisibility chain
    d_1 | d_2 | ... ; the chain is unit-normalized.
    """
    ring = m.ring
    a = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    left = [list(r) for r in ExactMatrix.identity(ring, nr).rows]
    linv = [list(r) for r in ExactMatrix.identity(ring, nr).rows]
    right = [list(r) for r in ExactMatrix.identity(ring, nc).rows]
    rinv = [list(r) for r in ExactMatrix.identity(ring, nc).rows]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]
        linv_col_swap(i, j)

    def linv_col_swap(i, j):
        for r in range(nr):
            linv[r][i], linv[r][j] = linv[r][j], linv[r][i]

    def swap_cols(i, j):
        for r in range(nr):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(nc):
            right[r][i], right[r][j] = right[r][j], right[r][i]
        rinv[i], rinv[j] = rinv[j], rinv[i]

    def add_row(dst, src, f):
        # row_dst += f * row_src ; inverse op on linv columns.
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        left[dst] = [x + f * y for x, y in zip(left[dst], left[src])]
        for r in range(nr):
            linv[r][src] = linv[r][src] - f * linv[r][dst]

    def add_col(dst, src, f):
        for r in range(nr):
            a[r][dst] = a[r][dst] + f * a[r][src]
        for r in range(nc):
            right[r][dst] = right[r][dst] + f * right[r][src]
        rinv[src] = [x - f * y for x, y in zip(rinv[src], rinv[dst])]

    def scale_row(i, u):
        # row_i *= 1/u for a unit u.
        if ring == RING_Q:
            inv = 1 / u
            a[i] = [x * inv for x in a[i]]
            left[i] = [x * inv for x in left[i]]
            for r in range(nr):
                linv[r][i] = linv[r][i] * u
        else:
            inv = UPoly.const(1 / u.coeffs[0])
            a[i] = [x * inv for x in a[i]]
            left[i] = [x * inv for x in left[i]]
            for r in range(nr):
                linv[r][i] = linv[r][i] * u

    def is_zero(x) -> bool:
        return (x == 0) if ring == RING_Q else x.is_zero()

    def size(x) -> int:
        return _euclid_size(ring, x)

    s = 0
    limit = min(nr, nc)
    while s < limit:
        # Find a pivot of minimal Euclidean size in the trailing block.
        pivot = None
        best = None
        for i in range(s, nr):
            for j in range(s, nc):
                if not is_zero(a[i][j]):
                    sz = size(a[i][j])
                    if best is None or sz < best:
                        best, pivot = sz, (i, j)
        if pivot is None:
            break
        swap_rows(s, pivot[0])
        swap_cols(s, pivot[1])

        dirty = True
        while dirty:
            dirty = False
            for i in range(s + 1, nr):
                if is_zero(a[i][s]):
                    continue
                q, r = _divmod(ring, a[i][s], a[s][s])
                add_row(i, s, -q)
                if not is_zero(a[i][s]):
                    swap_rows(s, i)
                    dirty = True
            for j in range(s + 1, nc):
                if is_zero(a[s][j]):
                    continue
                q, r = _divmod(ring, a[s][j], a[s][s])
                add_col(j, s, -q)
                if not is_zero(a[s][j]):
                    swap_cols(s, j)
                    dirty = True
        # Enforce divisibility into the trailing block.
        fixed = False
        for i in range(s + 1, nr):
            for j in range(s + 1, nc):
                if is_zero(a[i][j]):
                    continue
                _, r = _divmod(ring, a[i][j], a[s][s])
                if not is_zero(r):
                    add_row(s, i, _one(ring))
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        s += 1

    # Unit-normalize the diagonal.
    factors = []
    for i in range(limit):
        if is_zero(a[i][i]):
            continue
        u, norm = _unit_normalize(ring, a[i][i])
        if ring == RING_Q:
            if u != 1:
                scale_row(i, u)
        else:
            if u != UPoly.const(1):
                scale_row(i, u)
        factors.append(a[i][i])

    diag = ExactMatrix(ring, a)
    return SmithResult(
        factors=tuple(factors),
        diagonal=diag,
        left=ExactMatrix(ring, left),
        right=ExactMatrix(ring, right),
        left_inverse=ExactMatrix(ring, linv),
        right_inverse=ExactMatrix(ring, rinv),
    )
