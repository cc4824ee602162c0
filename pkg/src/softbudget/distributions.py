"""Type distributions for the fiscal-need parameter.

The screening solver treats the recipient government's fiscal need ("type")
as a scalar random variable with density f, CDF F, and hazard rate

    h(theta) = f(theta) / (1 - F(theta)).

Everything downstream (virtual weights, cap schedules, cutoff probabilities)
consumes the distribution through the small interface defined here: density,
CDF, survival function, quantile function, hazard, and hazard slope.  The
survival function is always computed directly rather than as ``1 - cdf`` so
hazards stay accurate deep into the upper tail.

Supported kinds
---------------
* :class:`Weibull` -- shape/scale parameterization; IFR when shape >= 1.
* :class:`Exponential` -- constant hazard equal to the rate.
* :class:`Uniform` -- linear CDF on a compact interval; IFR.
* :class:`Truncated` -- any analytic base restricted to a subinterval.
* :class:`Tabulated` -- (theta, density) pairs on a uniform grid, with a
  piecewise-linear density model integrated exactly per cell.
* :class:`PointMass` -- degenerate single-type distribution, accepted so
  oracle tests can exercise the mechanism layer without screening; its
  hazard is deliberately undefined.

Sampling
--------
``sample_types`` draws i.i.d. types by inverse-CDF transform of a
deterministic uniform stream.  The stream is produced by the Philox4x64-10
counter-based generator: sample block ``j`` (blocks of 65,536 draws) comes
from ``Philox(key=seed)`` jumped ``j`` times.  The mapping from
``(seed, n)`` to output is therefore bit-reproducible and independent of
how a caller partitions the blocks across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError, UpperSupportError

__all__ = [
    "TypeDistribution",
    "Weibull",
    "Exponential",
    "Uniform",
    "Truncated",
    "Tabulated",
    "PointMass",
    "hazard",
    "sample_types",
    "uniform_stream",
    "SAMPLE_BLOCK",
]

# Samples are produced in fixed blocks so that partitioning work across
# processes cannot change the merged output.
SAMPLE_BLOCK = 65_536

_MAX_SEED = 2**64 - 1


def _aligned(theta):
    """Coerce input to a float array, remembering whether it was scalar."""
    arr = np.asarray(theta, dtype=float)
    return arr, arr.ndim == 0


def _maybe_scalar(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


class TypeDistribution:
    """Abstract interface shared by every type-distribution kind.

    Subclasses provide vectorized ``pdf``, ``cdf``, ``survivor`` and ``ppf``;
    the hazard machinery and grid construction live here.
    """

    kind: str = "abstract"

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def is_ifr(self) -> bool:
        """True when the hazard rate is nondecreasing on the support."""
        raise NotImplementedError

    def pdf(self, theta):
        raise NotImplementedError

    def cdf(self, theta):
        raise NotImplementedError

    def survivor(self, theta):
        """P(type > theta), computed without forming ``1 - cdf``."""
        raise NotImplementedError

    def ppf(self, u):
        """Quantile function; accepts u in [0, 1)."""
        raise NotImplementedError

    # -- hazard ---------------------------------------------------------

    def hazard(self, theta):
        """Hazard rate f(theta) / P(type > theta).

        Raises
        ------
        DomainError
            If any evaluation point lies outside the support.
        UpperSupportError
            If the survival probability is zero to machine precision; the
            caller must truncate its grid short of the upper support.
        """
        arr, scalar = _aligned(theta)
        lo, hi = self.support
        if np.any(arr < lo) or np.any(arr > hi):
            raise DomainError(
                f"type value outside support [{lo}, {hi}] for kind '{self.kind}'"
            )
        surv = np.asarray(self.survivor(arr), dtype=float)
        if np.any(surv <= 0.0):
            raise UpperSupportError(
                "survival probability underflowed to zero; truncate the grid "
                "below the upper support before evaluating hazards"
            )
        out = np.asarray(self.pdf(arr), dtype=float) / surv
        return _maybe_scalar(out, scalar)

    def hazard_slope(self, theta):
        """Derivative of the hazard in theta.

        Analytic for kinds that have one; otherwise a 5-point central
        stencil on :meth:`hazard`.
        """
        arr, scalar = _aligned(theta)
        lo, hi = self.support
        width = (hi - lo) if math.isfinite(hi) else max(1.0, abs(float(np.max(arr))))
        step = 1e-4 * max(width, 1e-8)
        # keep the stencil inside the support
        step = float(np.minimum(step, np.maximum((np.minimum(arr - lo, hi - arr)) / 2.5, 1e-12)).min()) \
            if arr.size else step
        shifts = np.array([-2.0, -1.0, 1.0, 2.0]) * step
        coeff = np.array([1.0, -8.0, 8.0, -1.0]) / (12.0 * step)
        vals = sum(c * np.asarray(self.hazard(arr + s), dtype=float) for s, c in zip(shifts, coeff))
        return _maybe_scalar(np.asarray(vals, dtype=float), scalar)

    # -- grids ----------------------------------------------------------

    def grid(self, size: int = 4097, tail_mass: float = 1e-10) -> np.ndarray:
        """Uniform evaluation grid on the truncated support.

        The upper end sits at the ``1 - tail_mass`` quantile so hazards stay
        finite even for unbounded supports; the truncation discards only
        ``tail_mass`` of probability.
        """
        if size < 2:
            raise ParameterError("grid size must be at least 2")
        if not (0.0 < tail_mass < 0.5):
            raise ParameterError("tail_mass must lie in (0, 0.5)")
        lo, hi_q = self.support[0], float(self.ppf(1.0 - tail_mass))
        if not math.isfinite(self.hazard(lo)):  # pragma: no cover - defensive
            lo = float(self.ppf(tail_mass))
        if hi_q <= lo:
            raise ParameterError("degenerate grid: truncated support has zero width")
        return np.linspace(lo, hi_q, size)

    def validate_ifr_flag(self, size: int = 512) -> None:
        """Raise if the IFR flag contradicts the hazard on a check grid."""
        if not self.is_ifr:
            return
        g = self.grid(size, tail_mass=1e-9)
        h = np.asarray(self.hazard(g), dtype=float)
        drops = np.diff(h) < -1e-9 * np.maximum(1.0, np.abs(h[:-1]))
        if np.any(drops):
            raise ParameterError(f"distribution flagged IFR but hazard decreases (kind '{self.kind}')")


# ---------------------------------------------------------------------------
# analytic kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weibull(TypeDistribution):
    """Weibull(shape k, scale s): F(t) = 1 - exp(-(t/s)^k) on [0, inf)."""

    shape: float
    scale: float = 1.0
    kind: str = field(default="weibull", init=False)

    def __post_init__(self):
        if not (self.shape > 0.0 and math.isfinite(self.shape)):
            raise ParameterError("weibull shape must be positive and finite")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ParameterError("weibull scale must be positive and finite")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def is_ifr(self):
        return self.shape >= 1.0

    def pdf(self, theta):
        arr, scalar = _aligned(theta)
        z = np.maximum(arr, 0.0) / self.scale
        with np.errstate(divide="ignore"):
            out = np.where(
                arr < 0.0,
                0.0,
                (self.shape / self.scale) * z ** (self.shape - 1.0) * np.exp(-(z**self.shape)),
            )
        return _maybe_scalar(out, scalar)

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        z = np.maximum(arr, 0.0) / self.scale
        return _maybe_scalar(np.where(arr < 0.0, 0.0, -np.expm1(-(z**self.shape))), scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        z = np.maximum(arr, 0.0) / self.scale
        return _maybe_scalar(np.where(arr < 0.0, 1.0, np.exp(-(z**self.shape))), scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        return _maybe_scalar(self.scale * (-np.log1p(-arr)) ** (1.0 / self.shape), scalar)

    def hazard(self, theta):
        arr, scalar = _aligned(theta)
        if np.any(arr < 0.0):
            raise DomainError("type value outside support [0, inf) for kind 'weibull'")
        with np.errstate(divide="ignore"):
            out = (self.shape / self.scale) * (arr / self.scale) ** (self.shape - 1.0)
        if np.any(~np.isfinite(out)):
            raise UpperSupportError("weibull hazard not finite at the requested point")
        return _maybe_scalar(out, scalar)

    def hazard_slope(self, theta):
        arr, scalar = _aligned(theta)
        k, s = self.shape, self.scale
        if k == 1.0:
            return _maybe_scalar(np.zeros_like(arr), scalar)
        with np.errstate(divide="ignore"):
            out = (k * (k - 1.0) / s**2) * (arr / s) ** (k - 2.0)
        return _maybe_scalar(out, scalar)


@dataclass(frozen=True)
class Exponential(TypeDistribution):
    """Exponential(rate): constant hazard equal to the rate."""

    rate: float
    kind: str = field(default="exponential", init=False)

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ParameterError("exponential rate must be positive and finite")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def is_ifr(self):
        return True

    def pdf(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.where(arr < 0.0, 0.0, self.rate * np.exp(-self.rate * np.maximum(arr, 0.0))), scalar)

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.where(arr < 0.0, 0.0, -np.expm1(-self.rate * np.maximum(arr, 0.0))), scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.where(arr < 0.0, 1.0, np.exp(-self.rate * np.maximum(arr, 0.0))), scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        return _maybe_scalar(-np.log1p(-arr) / self.rate, scalar)

    def hazard(self, theta):
        arr, scalar = _aligned(theta)
        if np.any(arr < 0.0):
            raise DomainError("type value outside support [0, inf) for kind 'exponential'")
        return _maybe_scalar(np.full_like(arr, self.rate), scalar)

    def hazard_slope(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.zeros_like(arr), scalar)


@dataclass(frozen=True)
class Uniform(TypeDistribution):
    """Uniform on [lower, upper]; hazard 1/(upper - theta) is increasing."""

    lower: float
    upper: float
    kind: str = field(default="uniform", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ParameterError("uniform bounds must be finite")
        if not self.upper > self.lower:
            raise ParameterError("uniform requires upper > lower")

    @property
    def support(self):
        return (self.lower, self.upper)

    @property
    def is_ifr(self):
        return True

    def pdf(self, theta):
        arr, scalar = _aligned(theta)
        inside = (arr >= self.lower) & (arr <= self.upper)
        return _maybe_scalar(np.where(inside, 1.0 / (self.upper - self.lower), 0.0), scalar)

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.clip((arr - self.lower) / (self.upper - self.lower), 0.0, 1.0), scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(np.clip((self.upper - arr) / (self.upper - self.lower), 0.0, 1.0), scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        return _maybe_scalar(self.lower + arr * (self.upper - self.lower), scalar)

    def hazard_slope(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar(1.0 / (self.upper - arr) ** 2, scalar)


@dataclass(frozen=True)
class Truncated(TypeDistribution):
    """An analytic base distribution conditioned on [lower, upper]."""

    base: TypeDistribution
    lower: float
    upper: float
    kind: str = field(default="truncated", init=False)

    def __post_init__(self):
        if isinstance(self.base, (Truncated, Tabulated, PointMass)):
            raise ParameterError("truncation is supported for analytic base kinds only")
        blo, bhi = self.base.support
        lo = max(self.lower, blo)
        hi = min(self.upper, bhi)
        if not hi > lo:
            raise ParameterError("truncation interval does not intersect the base support")
        mass = float(self.base.cdf(hi)) - float(self.base.cdf(lo))
        if mass <= 0.0:
            raise ParameterError("truncation interval carries zero probability mass")
        object.__setattr__(self, "lower", float(lo))
        object.__setattr__(self, "upper", float(hi))
        object.__setattr__(self, "_mass", mass)
        object.__setattr__(self, "_cdf_lo", float(self.base.cdf(lo)))
        object.__setattr__(self, "_surv_hi", float(self.base.survivor(hi)))

    @property
    def support(self):
        return (self.lower, self.upper)

    @property
    def is_ifr(self):
        # Conditioning an IFR base on an interval keeps the hazard
        # nondecreasing: right truncation adds f/(F(hi)-F) >= f/(1-F) and the
        # slope term f' (F(hi)-F) + f^2 >= f' S + f^2 >= 0.
        return self.base.is_ifr

    def pdf(self, theta):
        arr, scalar = _aligned(theta)
        inside = (arr >= self.lower) & (arr <= self.upper)
        return _maybe_scalar(np.where(inside, np.asarray(self.base.pdf(arr), dtype=float) / self._mass, 0.0), scalar)

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        raw = (np.asarray(self.base.cdf(arr), dtype=float) - self._cdf_lo) / self._mass
        return _maybe_scalar(np.clip(raw, 0.0, 1.0), scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        raw = (np.asarray(self.base.survivor(arr), dtype=float) - self._surv_hi) / self._mass
        return _maybe_scalar(np.clip(raw, 0.0, 1.0), scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        out = np.asarray(self.base.ppf(self._cdf_lo + arr * self._mass), dtype=float)
        return _maybe_scalar(np.clip(out, self.lower, self.upper), scalar)


# ---------------------------------------------------------------------------
# tabulated kind
# ---------------------------------------------------------------------------


class Tabulated(TypeDistribution):
    """Density supplied as (theta, f) pairs on a uniform grid.

    The density is modeled as piecewise linear between nodes, which makes
    the CDF piecewise quadratic and exactly integrable per cell.  The input
    is renormalized so the trapezoid integral equals one; the survival
    function is accumulated from the right so upper-tail hazards do not
    suffer cancellation.
    """

    kind = "tabulated"

    def __init__(self, theta, density):
        nodes = np.asarray(theta, dtype=float)
        dens = np.asarray(density, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or nodes.shape != dens.shape:
            raise ParameterError("tabulated kind needs matching 1-d theta and density arrays (>= 2 nodes)")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(dens))):
            raise ParameterError("tabulated nodes and densities must be finite")
        steps = np.diff(nodes)
        if np.any(steps <= 0.0):
            raise ParameterError("tabulated theta grid must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > 1e-9 * max(steps[0], 1.0):
            raise ParameterError("tabulated theta grid must be uniformly spaced")
        if np.any(dens < 0.0):
            raise ParameterError("tabulated densities must be nonnegative")
        total = np.trapezoid(dens, nodes)
        if total <= 0.0:
            raise ParameterError("tabulated density integrates to zero")
        self.nodes = nodes
        self.density = dens / total
        # per-cell areas under the piecewise-linear density
        self._areas = 0.5 * (self.density[:-1] + self.density[1:]) * steps
        self._cdf_nodes = np.concatenate([[0.0], np.cumsum(self._areas)])
        self._cdf_nodes[-1] = 1.0
        surv = np.concatenate([[0.0], np.cumsum(self._areas[::-1])])[::-1]
        surv[0] = 1.0
        self._surv_nodes = surv
        self._ifr = self._hazard_nondecreasing()

    def _hazard_nondecreasing(self) -> bool:
        keep = self._surv_nodes > 1e-9
        h = self.density[keep] / self._surv_nodes[keep]
        return bool(np.all(np.diff(h) >= -1e-9 * np.maximum(1.0, np.abs(h[:-1]))))

    @property
    def support(self):
        return (float(self.nodes[0]), float(self.nodes[-1]))

    @property
    def is_ifr(self):
        return self._ifr

    def _locate(self, arr):
        idx = np.clip(np.searchsorted(self.nodes, arr, side="right") - 1, 0, self.nodes.size - 2)
        return idx, arr - self.nodes[idx]

    def pdf(self, theta):
        arr, scalar = _aligned(theta)
        lo, hi = self.support
        idx, s = self._locate(np.clip(arr, lo, hi))
        step = self.nodes[1] - self.nodes[0]
        slope = (self.density[idx + 1] - self.density[idx]) / step
        vals = self.density[idx] + slope * s
        inside = (arr >= lo) & (arr <= hi)
        return _maybe_scalar(np.where(inside, np.maximum(vals, 0.0), 0.0), scalar)

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        lo, hi = self.support
        clipped = np.clip(arr, lo, hi)
        idx, s = self._locate(clipped)
        step = self.nodes[1] - self.nodes[0]
        slope = (self.density[idx + 1] - self.density[idx]) / step
        vals = self._cdf_nodes[idx] + self.density[idx] * s + 0.5 * slope * s**2
        vals = np.where(arr < lo, 0.0, np.where(arr >= hi, 1.0, np.clip(vals, 0.0, 1.0)))
        return _maybe_scalar(vals, scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        lo, hi = self.support
        clipped = np.clip(arr, lo, hi)
        idx, s = self._locate(clipped)
        step = self.nodes[1] - self.nodes[0]
        # accumulate the remaining area of the current cell from the right
        t = step - s
        slope = (self.density[idx + 1] - self.density[idx]) / step
        cell_rest = self.density[idx + 1] * t - 0.5 * slope * t**2
        vals = self._surv_nodes[idx + 1] + cell_rest
        vals = np.where(arr <= lo, 1.0, np.where(arr > hi, 0.0, np.clip(vals, 0.0, 1.0)))
        return _maybe_scalar(vals, scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        idx = np.clip(np.searchsorted(self._cdf_nodes, arr, side="right") - 1, 0, self.nodes.size - 2)
        step = self.nodes[1] - self.nodes[0]
        f0 = self.density[idx]
        slope = (self.density[idx + 1] - self.density[idx]) / step
        resid = arr - self._cdf_nodes[idx]
        # solve f0*s + slope*s^2/2 = resid for s in [0, step], stable form
        disc = np.sqrt(np.maximum(f0**2 + 2.0 * slope * resid, 0.0))
        denom = f0 + disc
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(denom > 0.0, 2.0 * resid / denom, 0.0)
        out = self.nodes[idx] + np.clip(s, 0.0, step)
        return _maybe_scalar(out, scalar)


@dataclass(frozen=True)
class PointMass(TypeDistribution):
    """Degenerate distribution at a single type, for oracle tests.

    The hazard is undefined; mechanism routines that accept point masses
    bypass hazard weighting entirely.
    """

    value: float
    kind: str = field(default="point-mass", init=False)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ParameterError("point mass location must be finite")

    @property
    def support(self):
        return (self.value, self.value)

    @property
    def is_ifr(self):
        return True

    def pdf(self, theta):
        raise ParameterError("density undefined for a point mass")

    def cdf(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar((arr >= self.value).astype(float), scalar)

    def survivor(self, theta):
        arr, scalar = _aligned(theta)
        return _maybe_scalar((arr < self.value).astype(float), scalar)

    def ppf(self, u):
        arr, scalar = _aligned(u)
        _check_unit_interval(arr)
        return _maybe_scalar(np.full_like(arr, self.value), scalar)

    def hazard(self, theta):
        raise ParameterError("hazard undefined for degenerate (point-mass) supports")

    def grid(self, size: int = 4097, tail_mass: float = 1e-10) -> np.ndarray:
        return np.array([self.value])


def _check_unit_interval(arr: np.ndarray) -> None:
    if np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile argument must lie in [0, 1)")


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def hazard(dist: TypeDistribution, theta):
    """Hazard rate of ``dist`` at ``theta`` (scalar or array)."""
    return dist.hazard(theta)


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """Deterministic uniforms in [0, 1) from Philox4x64-10 counter blocks.

    Block ``j`` of 65,536 values is drawn from ``Philox(key=seed)`` jumped
    ``j`` times, so any partition of [0, n) into whole blocks generates the
    identical merged array.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError("sample size must be a positive integer")
    if not isinstance(seed, (int, np.integer)) or not (0 <= int(seed) <= _MAX_SEED):
        raise ParameterError("seed must be an unsigned 64-bit integer")
    out = np.empty(int(n), dtype=float)
    for j in range((int(n) + SAMPLE_BLOCK - 1) // SAMPLE_BLOCK):
        start = j * SAMPLE_BLOCK
        count = min(SAMPLE_BLOCK, int(n) - start)
        gen = np.random.Generator(np.random.Philox(key=int(seed)).jumped(j))
        out[start : start + count] = gen.random(count)
    return out


def sample_types(dist: TypeDistribution, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. types by inverse-CDF transform of the uniform stream.

    Identical ``(seed, n, kind)`` triples reproduce bit-identical output.
    """
    u = uniform_stream(seed, n)
    return np.asarray(dist.ppf(u), dtype=float)
