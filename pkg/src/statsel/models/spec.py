"""Scalar-parameter candidate laws: density, CDF, quantile, sampling.

Each model fixes all but one parameter (the parameter of interest).
The free parameter has two ranges: ``space``, the closed training
interval grids and test draws come from, and ``domain``, the wider set
of mathematically valid values (so degenerate laws like Bernoulli(0)
still sample correctly).

Sampling is inverse transform: uniforms from a counter-based stream are
pushed through the quantile function, so draws are deterministic given
(model, theta, n, seed) and independent across streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DomainError
from ..rng import stream

NEG_INF = float("-inf")

# categories a model's support can fall in
SUPPORT_KINDS = (
    "continuous-real",
    "nonnegative-real",
    "unit-interval",
    "nonnegative-integer",
    "integer",
)

_DISCRETE_KINDS = ("nonnegative-integer", "integer")


@dataclass(frozen=True)
class ParamSpace:
    """Training interval for the parameter of interest.

    Integer spaces are the lattice {lo, lo+1, ..., hi}. Open endpoint
    flags shift generated grids strictly inside the interval.
    """

    lo: float
    hi: float
    integer: bool = False
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"empty parameter interval [{self.lo}, {self.hi}]")

    def grid(self, n: int) -> np.ndarray:
        """n distinct values spanning the space, evenly spaced."""
        if n < 2:
            raise ConfigError("grid needs at least 2 points")
        if self.integer:
            pts = np.unique(np.rint(np.linspace(self.lo, self.hi, n)))
            if pts.size != n:
                raise ConfigError(
                    f"cannot place {n} distinct integers in [{self.lo:g}, {self.hi:g}]"
                )
            return pts
        lo, hi = self.lo, self.hi
        nudge = 1e-9 * (hi - lo)
        if self.open_lo:
            lo += nudge
        if self.open_hi:
            hi -= nudge
        return np.linspace(lo, hi, n)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform draws over the space (held-out parameter values)."""
        if self.integer:
            lo, hi = int(self.lo), int(self.hi)
            return rng.integers(lo, hi + 1, size=size).astype(np.float64)
        return rng.uniform(self.lo, self.hi, size)

    def contains(self, theta: float) -> bool:
        t = float(theta)
        if self.integer and not t.is_integer():
            return False
        lo_ok = t > self.lo if self.open_lo else t >= self.lo
        hi_ok = t < self.hi if self.open_hi else t <= self.hi
        return lo_ok and hi_ok

    def as_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "integer": self.integer,
            "open_lo": self.open_lo,
            "open_hi": self.open_hi,
        }


class Model:
    """Base class for one-parameter candidate laws.

    Subclass hooks (``_log_density``, ``_cdf``, ``_ppf``) may assume a
    valid theta and ignore support masking; the public wrappers mask
    out-of-support points and clamp probabilities. Continuous-parameter
    hooks must broadcast theta against y (used by batch likelihoods).

    ``log_density`` is the log pmf for discrete laws and the log pdf for
    continuous ones; mixed laws report the log point mass at their atoms
    and the log pdf elsewhere.
    """

    name = ""
    param_name = "theta"
    support_kind = "continuous-real"
    space: ParamSpace
    nuisance: dict = {}
    atoms: tuple = ()
    # mathematical validity of theta: (lo, hi, closed_lo, closed_hi)
    domain = (0.0, math.inf, False, False)
    model_id = 0  # assigned by the registry

    # -- metadata ----------------------------------------------------

    @property
    def discrete(self) -> bool:
        return self.support_kind in _DISCRETE_KINDS

    def support(self, theta):
        """Inclusive (lo, hi) bounds of the support at theta."""
        kind = self.support_kind
        if kind in ("nonnegative-real", "nonnegative-integer"):
            return (0.0, math.inf)
        if kind == "unit-interval":
            return (0.0, 1.0)
        return (-math.inf, math.inf)

    def support_union(self):
        """Support bounds across the entire parameter space."""
        lo1, hi1 = self.support(self.space.lo)
        lo2, hi2 = self.support(self.space.hi)
        return (min(lo1, lo2), max(hi1, hi2))

    def theta_valid(self, theta) -> bool:
        """True when every element of theta lies in the open/closed domain."""
        try:
            t = np.asarray(theta, dtype=np.float64)
        except (TypeError, ValueError):
            return False
        if t.size == 0 or not np.all(np.isfinite(t)):
            return False
        if self.space.integer and np.any(t != np.floor(t)):
            return False
        lo, hi, closed_lo, closed_hi = self.domain
        lo_ok = t >= lo if closed_lo else t > lo
        hi_ok = t <= hi if closed_hi else t < hi
        return bool(np.all(lo_ok & hi_ok))

    def _require_theta(self, theta):
        if not self.theta_valid(theta):
            raise DomainError(
                f"{self.name}: {self.param_name}={theta!r} outside the valid domain"
            )

    def spec_dict(self) -> dict:
        """Registry metadata, JSON-ready."""
        return {
            "model_id": self.model_id,
            "name": self.name,
            "param_name": self.param_name,
            "param_space": self.space.as_dict(),
            "support": self.support_kind,
            "is_discrete": self.discrete,
            "nuisance": dict(self.nuisance),
        }

    # -- densities ---------------------------------------------------

    def log_density(self, y, theta):
        """log f(y | theta); -inf outside the support."""
        self._require_theta(theta)
        return self._masked_log_density(np.asarray(y, dtype=np.float64), theta)

    def _masked_log_density(self, y, theta):
        # theta already validated (or an array from a batch caller);
        # +inf marks a density singularity at a support edge, a
        # zero-probability point under any continuous law
        with np.errstate(all="ignore"):
            out = np.asarray(self._log_density(y, theta), dtype=np.float64)
            lo, hi = self.support(theta)
            bad = (y < lo) | (y > hi) | np.isnan(out) | (out == np.inf)
            if self.discrete:
                bad = bad | (y != np.floor(y))
            return np.where(bad, NEG_INF, out)

    def cdf(self, y, theta):
        """P(Y <= y | theta); right-continuous for discrete laws."""
        self._require_theta(theta)
        y = np.asarray(y, dtype=np.float64)
        if self.discrete:
            y = np.floor(y)  # lattice laws are step functions between integers
        with np.errstate(all="ignore"):
            out = np.asarray(self._cdf(y, theta), dtype=np.float64)
            lo, hi = self.support(theta)
            out = np.where(y < lo, 0.0, out)
            out = np.where(y >= hi, 1.0, out)
            return np.clip(out, 0.0, 1.0)

    def point_mass(self, y, theta):
        """Probability mass exactly at y (zero at continuous points)."""
        y = np.asarray(y, dtype=np.float64)
        if self.discrete:
            with np.errstate(all="ignore"):
                return np.exp(self._masked_log_density(y, theta))
        if self.atoms:
            mass = np.zeros(y.shape)
            with np.errstate(all="ignore"):
                dens = np.exp(self._masked_log_density(y, theta))
            for a in self.atoms:
                mass = np.where(y == a, dens, mass)
            return mass
        return np.zeros(y.shape)

    def cdf_left(self, y, theta):
        """P(Y < y | theta): left limit of the CDF."""
        return np.clip(self.cdf(y, theta) - self.point_mass(y, theta), 0.0, 1.0)

    # -- sampling ----------------------------------------------------

    def ppf(self, u, theta):
        """Quantile: smallest y in the support with cdf(y) >= u."""
        self._require_theta(theta)
        u = np.asarray(u, dtype=np.float64)
        if np.any((u < 0.0) | (u > 1.0)) or np.any(np.isnan(u)):
            raise DomainError("quantile levels must lie in [0, 1]")
        with np.errstate(all="ignore"):
            return np.asarray(self._ppf(u, theta), dtype=np.float64)

    def sample(self, theta, n, seed=None, rng=None):
        """n i.i.d. draws; deterministic given (theta, n, seed)."""
        self._require_theta(theta)
        if n < 1:
            raise DomainError("sample size must be >= 1")
        if rng is None:
            rng = stream(0 if seed is None else seed)
        u = rng.random(n)
        np.clip(u, 1e-300, None, out=u)  # ppf(0) can be -inf
        with np.errstate(all="ignore"):
            return np.asarray(self._ppf(u, theta), dtype=np.float64)

    # -- subclass hooks ----------------------------------------------

    def _log_density(self, y, theta):
        raise NotImplementedError

    def _cdf(self, y, theta):
        raise NotImplementedError

    def _ppf(self, u, theta):
        raise NotImplementedError


class ScipyModel(Model):
    """Delegates density/CDF/quantile to a frozen scipy.stats law."""

    def _frozen(self, theta):
        raise NotImplementedError

    def _log_density(self, y, theta):
        d = self._frozen(theta)
        return d.logpmf(y) if self.discrete else d.logpdf(y)

    def _cdf(self, y, theta):
        return self._frozen(theta).cdf(y)

    def _ppf(self, u, theta):
        return self._frozen(theta).ppf(u)


def bisect_ppf(cdf, u, lo, hi, iters=80):
    """Vectorized bisection quantile for a continuous monotone cdf."""
    u = np.asarray(u, dtype=np.float64)
    lo = np.full(u.shape, lo, dtype=np.float64)
    hi = np.full(u.shape, hi, dtype=np.float64)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def lattice_ppf(cdf, u, lo=0.0, hi0=16.0):
    """Smallest integer lattice point y >= lo with cdf(y) >= u."""
    u = np.asarray(u, dtype=np.float64)
    hi = float(hi0)
    while cdf(np.asarray(hi)) < np.max(u) and hi < 2.0**40:
        hi *= 2.0
    lo_arr = np.full(u.shape, lo - 1.0)
    hi_arr = np.full(u.shape, hi)
    # invariant: cdf(lo_arr) < u <= cdf(hi_arr)
    while np.any(hi_arr - lo_arr > 1.0):
        mid = np.floor((lo_arr + hi_arr) / 2.0)
        below = cdf(mid) < u
        lo_arr = np.where(below, mid, lo_arr)
        hi_arr = np.where(below, hi_arr, mid)
    return hi_arr
