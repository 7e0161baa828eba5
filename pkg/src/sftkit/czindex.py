"""Conley-Zehnder and Robbin-Salamon index calculators.

The families covered are the ones that actually occur in the geometry this
toolkit serves: planar rotation blocks exp(t*theta*J0) coming from an elliptic
local model, shear blocks [[1,0],[2t,1]] (with optional loops appended), the
two tubular-neighborhood orbit families of a binding region, and generic
paths generated by a positive-definite quadratic form, where the index is
read off from integer crossings of a monotone eigenvalue trajectory.

Conventions: positive elliptic is the default sign; a path whose eigenvalue
trajectory ends on an integer is rejected as degenerate rather than rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import BadResonance, DegeneratePath, GenericityViolated

INTEGER_TOL = 1e-12


Scalar = Union[int, float, Fraction]


def _floor_guarded(x: Scalar, tol: float = INTEGER_TOL) -> int:
    """Floor that refuses values within tol of an integer (exact ints excepted)."""
    if isinstance(x, (int, Fraction)):
        if x == int(x):
            raise DegeneratePath(f"value {x} is an integer")
        return math.floor(x)
    nearest = round(x)
    if abs(x - nearest) < tol:
        raise DegeneratePath(f"value {x} is within {tol} of the integer {nearest}")
    return math.floor(x)


def cz_rotation(lam: Scalar, negative_elliptic: bool = False) -> int:
    """Index of the rotation path exp(2*pi*i*lam*t), lam > 0 nondegenerate.

    Positive elliptic gives 1 + 2*floor(lam); the negative elliptic variant
    is its negation.  Integer lam violates the spectral gap condition and
    raises DegeneratePath.
    """
    if lam < 0:
        raise ValueError("rotation parameter must be nonnegative")
    base = 1 + 2 * _floor_guarded(lam)
    return -base if negative_elliptic else base


def rs_shear(blocks: int, loop_k: int = 0) -> Fraction:
    """Robbin-Salamon index of a shear path with `blocks` unit shear blocks.

    Appending k full positive loops adds 2k (loop property of the index).
    """
    if blocks < 1:
        raise ValueError("need at least one shear block")
    if loop_k < 0:
        raise ValueError("loop count must be nonnegative")
    return Fraction(blocks, 2) + 2 * loop_k


@dataclass(frozen=True)
class PathSpec:
    """A symplectic path from one of the families this toolkit computes with.

    family "rotation": eigenvalue trajectory lam(t) = t * lam_end.
    family "elliptic_local": lam(t) = t * c * period, the local model block.
    family "monotone_exp": a user-supplied strictly increasing trajectory
    lam(t) with lam(0) = 0, sampled by a callable; such trajectories arise
    from paths generated by positive-definite forms.
    family "shear": `blocks` unit shear blocks with `loop_k` full loops
    appended; degenerate, so it is graded by the half-integer index and has
    no eigenvalue trajectory.
    """

    family: str
    lam_end: Optional[Scalar] = None
    c: Optional[Scalar] = None
    period: Optional[Scalar] = None
    trajectory: Optional[Callable[[float], float]] = None
    blocks: Optional[int] = None
    loop_k: int = 0

    def eigenvalue(self, t: float) -> float:
        if self.family == "rotation":
            return float(self.lam_end) * t
        if self.family == "elliptic_local":
            if self.c is None or self.period is None or self.c <= 0 or self.period <= 0:
                raise ValueError("elliptic_local needs positive c and period")
            return float(self.c) * float(self.period) * t
        if self.family == "monotone_exp":
            if self.trajectory is None:
                raise ValueError("monotone_exp needs a trajectory callable")
            return self.trajectory(t)
        if self.family == "shear":
            raise ValueError("shear paths have no monotone eigenvalue trajectory")
        raise ValueError(f"unknown path family {self.family!r}")


def path_index(path: PathSpec, subdivisions: int = 256):
    """Index of a path by the method its family admits.

    Rotation and local-model blocks go через the crossing count (equal to the
    closed form); shear blocks get the half-integer index with the loop
    shift.
    """
    if path.family == "shear":
        if path.blocks is None:
            raise ValueError("shear paths need a block count")
        return rs_shear(path.blocks, path.loop_k)
    return cz_crossing(path, subdivisions=subdivisions)


def cz_crossing(path: PathSpec, subdivisions: int = 256) -> int:
    """Index 1 + 2 * #{t in (0,1) : lam(t) integer} for a monotone trajectory.

    Each crossing is isolated by bisection on the sampled grid; a trajectory
    ending within tolerance of an integer raises DegeneratePath, and a
    non-monotone sample grid is rejected.
    """
    if subdivisions < 2:
        raise ValueError("need at least two subdivisions")
    lam = path.eigenvalue
    lam0 = lam(0.0)
    if abs(lam0) > INTEGER_TOL:
        raise ValueError("trajectory must start at 0")
    grid = [i / subdivisions for i in range(subdivisions + 1)]
    values = [lam(t) for t in grid]
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValueError("eigenvalue trajectory is not strictly increasing on the grid")
    end = values[-1]
    if abs(end - round(end)) < INTEGER_TOL:
        raise DegeneratePath(f"trajectory ends at {end}, within tolerance of an integer")

    crossings = 0
    target = 1
    for (t0, v0), (t1, v1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        while target <= v1:
            if target > v0:
                lo, hi = t0, t1
                for _ in range(200):
                    mid = (lo + hi) / 2
                    if lam(mid) < target:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-15:
                        break
                crossings += 1
            target += 1
    return 1 + 2 * crossings


class GammaOrbitResult(NamedTuple):
    index: int
    period: float


def cz_gamma_orbit(
    kind: str,
    P_U: Scalar,
    a: Scalar,
    cz_base: int,
    extra: Optional[Tuple[Scalar, int, int]] = None,
) -> GammaOrbitResult:
    """Index of the two tubular-neighborhood orbit families over a base orbit.

    kind "gamma1" is the central orbit (period P_U): index
    1 + 2*floor(P_U*a / 4pi) + cz_base.  kind "gamma2" spirals at radius
    r0 in (0,1) with winding data (m, n) subject to the exact resonance
    a*P_U / (4pi*sqrt(1-r0^2)) = m/n; its period is (2-r0^2)*2pi*m/a and its
    index is 1 + 2*floor(a*P2 / (pi*(2-r0^2)^2)) + cz_base, where cz_base is
    the index of the n-fold cover of the base orbit.

    An eigenvalue trajectory ending on an integer means the rotation
    parameter resonates with the supplied action data (GenericityViolated).
    """
    a = float(a)
    P_U = float(P_U)
    if a <= 0 or P_U <= 0:
        raise ValueError("a and P_U must be positive")

    if kind == "gamma1":
        lam_end = a * P_U / (4 * math.pi)
        try:
            fl = _floor_guarded(lam_end)
        except DegeneratePath as exc:
            raise GenericityViolated(str(exc)) from exc
        return GammaOrbitResult(1 + 2 * fl + cz_base, P_U)

    if kind == "gamma2":
        if extra is None:
            raise ValueError("gamma2 requires (r0, m, n_cover)")
        r0, m, n = extra
        r0 = float(r0)
        if not (0.0 < r0 < 1.0):
            raise BadResonance(f"radius r0={r0} must lie strictly inside (0,1)")
        if m <= 0 or n <= 0:
            raise BadResonance("winding numbers m, n must be positive")
        ratio = a * P_U / (4 * math.pi * math.sqrt(1.0 - r0 * r0))
        if abs(ratio - m / n) > 1e-9 * max(1.0, abs(ratio)):
            raise BadResonance(
                f"a*P_U/(4*pi*sqrt(1-r0^2)) = {ratio}, not the required {m}/{n}"
            )
        period = (2.0 - r0 * r0) * 2.0 * math.pi * m / a
        lam_end = a * period / (math.pi * (2.0 - r0 * r0) ** 2)
        try:
            fl = _floor_guarded(lam_end)
        except DegeneratePath as exc:
            raise GenericityViolated(str(exc)) from exc
        return GammaOrbitResult(1 + 2 * fl + cz_base, period)

    raise ValueError(f"unknown orbit kind {kind!r}")


class NormalIndexData(NamedTuple):
    """Floor/ceiling bookkeeping attached to a normal index."""

    cz_n: int
    p_n: int
    alpha_minus: int
    alpha_plus: int


def normal_index_data(cz_n: int) -> NormalIndexData:
    alpha_minus = math.floor(cz_n / 2)
    alpha_plus = math.ceil(cz_n / 2)
    return NormalIndexData(cz_n, alpha_plus - alpha_minus, alpha_minus, alpha_plus)


def cz_direct_sum(parts: Sequence[int]) -> int:
    """Index of a direct sum of symplectic paths: the sum of the indices."""
    return sum(parts)
