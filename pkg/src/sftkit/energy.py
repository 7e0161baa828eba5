"""Energy bookkeeping for cobordism decompositions and admissibility gates.

Type A data is a pair of cutting constants (C-, C+) with energy C- + C+;
Type B data is a sampled family (C2, C1, C1~, C0)(t) whose energy is the
supremum of C2 + C0 - C1 - C1~ over the samples.  The admissibility gate
r+ > e^E r- decides when a cobordism induces a map; since e^E is
transcendental for rational nonzero E, the comparison runs in interval
arithmetic with outward rounding and refuses to answer within 1e-12 of
equality rather than silently flipping a strict inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Tuple, Union

import mpmath

from .errors import BoundaryConditionViolated, NotSupported, UnresolvedComparison

Real = Union[int, float, Fraction]

EQUALITY_TOLERANCE = Fraction(1, 10**12)


def exp_scaled_compare(lhs: Real, coeff: Real, energy: Real, rhs: Real, strict: bool = True) -> bool:
    """Decide lhs > coeff * e^energy * rhs (or >= when strict=False), carefully.

    Zero energy is decided exactly.  Otherwise the right-hand side is
    enclosed in a shrinking interval; if the difference cannot be resolved
    outside the 1e-12 band the comparison raises UnresolvedComparison.
    """
    if rhs == 0:
        return lhs > 0 if strict else lhs >= 0
    if energy == 0:
        product = Fraction(coeff) * Fraction(rhs) if not isinstance(coeff, float) and not isinstance(rhs, float) else coeff * rhs
        return lhs > product if strict else lhs >= product
    tol = float(EQUALITY_TOLERANCE)
    for prec in (80, 160, 320):
        iv = mpmath.iv
        iv.prec = prec
        e = iv.exp(_to_iv(energy))
        rhs_iv = _to_iv(coeff) * e * _to_iv(rhs)
        diff = _to_iv(lhs) - rhs_iv
        lo, hi = mpmath.mpf(diff.a), mpmath.mpf(diff.b)
        if hi < -tol:
            return False
        if lo > tol:
            return True
        if -tol < lo and hi < tol:
            raise UnresolvedComparison(
                f"difference {float(lo)}..{float(hi)} is within 1e-12 of equality"
            )
    raise UnresolvedComparison(
        f"could not separate lhs from coeff*e^E*rhs: enclosure {float(lo)}..{float(hi)}"
    )


def _to_iv(x: Real):
    if isinstance(x, Fraction):
        return mpmath.iv.mpf(x.numerator) / mpmath.iv.mpf(x.denominator)
    return mpmath.iv.mpf(x)


@dataclass(frozen=True)
class TypeADecomposition:
    """Cutting constants of a two-sided decomposition; C- is 0 for fillings."""

    c_minus: Real = 0
    c_plus: Real = 0
    empty_negative_end: bool = False

    def __post_init__(self):
        if self.empty_negative_end and self.c_minus != 0:
            raise ValueError("an empty negative end forces c_minus = 0")


def type_a_energy(d: TypeADecomposition) -> Real:
    """Energy C- + C+; a filling (empty negative end) is unbounded below."""
    if d.empty_negative_end:
        return float("-inf")
    return d.c_minus + d.c_plus


class TypeBSample(NamedTuple):
    t: Real
    c2: Real
    c1: Real
    c1_tilde: Real
    c0: Real


@dataclass(frozen=True)
class TypeBDecomposition:
    """Sampled one-parameter family of cutting constants over t in [0, T]."""

    samples: Tuple[TypeBSample, ...]

    def __init__(self, samples: Sequence):
        rows = tuple(TypeBSample(*s) for s in samples)
        if not rows:
            raise ValueError("need at least one sample")
        if any(a.t > b.t for a, b in zip(rows, rows[1:])):
            raise ValueError("samples must be ordered by t")
        object.__setattr__(self, "samples", rows)


class TypeBEnergy(NamedTuple):
    energy: Real
    induced_at_zero: Real
    induced_at_infinity: Real


def type_b_energy(d: TypeBDecomposition) -> TypeBEnergy:
    """Supremum of C2 + C0 - C1 - C1~ over the samples.

    The t = 0 sample must satisfy C1~(0) = -C1(0); the decomposition it
    induces there has energy C2(0) + C0(0), and the pair induced by the
    stabilized tail (read off the last sample) has total energy equal to the
    functional there.  Both are dominated by the supremum, which is itself a
    lower bound for the true supremum of the sampled family.
    """
    first = d.samples[0]
    if first.c1_tilde != -first.c1:
        raise BoundaryConditionViolated(
            f"need c1_tilde(0) = -c1(0), got {first.c1_tilde} vs {-first.c1}"
        )
    energy = max(s.c2 + s.c0 - s.c1 - s.c1_tilde for s in d.samples)
    induced = first.c2 + first.c0
    last = d.samples[-1]
    at_infinity = last.c2 + last.c0 - last.c1 - last.c1_tilde
    assert induced <= energy and at_infinity <= energy
    return TypeBEnergy(energy, induced, at_infinity)


def glue_energy(e1: Real, e2: Real, one_is_symplectization: bool) -> Real:
    """Energy of a gluing; additive only across a symplectization factor."""
    if not one_is_symplectization:
        raise NotSupported(
            "energy is not additive under gluing unless one factor is a symplectization"
        )
    return e1 + e2


def admissible(r_plus: Real, r_minus: Real, energy: Real, relaxed: bool = False) -> bool:
    """Admissibility of a cobordism with rotation parameters (r+, r-).

    Strict mode decides r+ > e^energy * r-.  Relaxed mode is the
    symplectization-with-equal-forms case: energy is forced to zero and the
    bar is r+ >= r-.
    """
    if r_plus <= 0:
        raise ValueError("r_plus must be positive")
    if r_minus < 0:
        raise ValueError("r_minus must be nonnegative")
    if relaxed:
        return r_plus >= r_minus
    return exp_scaled_compare(r_plus, 1, energy, r_minus, strict=True)
