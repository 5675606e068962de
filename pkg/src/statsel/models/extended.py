"""Candidate models 21-50: less common laws from the applied literature.

Closed-form densities and quantiles are used wherever they exist; the
few laws without a closed CDF (simplex) or quantile (lindley via the
Lambert W, discrete laws via lattice search) document their method.
"""

import math
from functools import lru_cache

import numpy as np
from scipy import special, stats

from .spec import Model, ParamSpace, ScipyModel, lattice_ppf

_REAL = (-math.inf, math.inf, False, False)
_POSITIVE = (0.0, math.inf, False, False)

_LN_2PI = math.log(2.0 * math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# 8-point Gauss-Legendre rule for short CDF stubs
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class OneInflatedLogarithmic(Model):
    """Logarithmic(shape) with one-inflation probability fixed at 0.

    pmf -shape^y / (y log(1-shape)) on y = 1, 2, ...
    Sampling: lattice search on a cached cumulative table.
    """

    name = "one-inflated-logarithmic"
    param_name = "shape"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.05, 0.95)
    nuisance = {"pstr1": 0.0}
    domain = (0.0, 1.0, False, False)

    def support(self, theta):
        return (1.0, math.inf)

    def _log_density(self, y, theta):
        norm = -np.log(-np.log1p(-np.asarray(theta, dtype=np.float64)))
        return special.xlogy(y, theta) - np.log(y) + norm

    def _table(self, theta):
        return _logarithmic_cum(float(theta))

    def _cdf(self, y, theta):
        cum = self._table(theta)
        idx = np.clip(np.floor(y).astype(np.int64), 0, len(cum)) - 1
        return np.where(idx < 0, 0.0, cum[np.clip(idx, 0, len(cum) - 1)])

    def _ppf(self, u, theta):
        cum = self._table(theta)
        return np.minimum(np.searchsorted(cum, u) + 1.0, float(len(cum)))


@lru_cache(maxsize=64)
def _logarithmic_cum(s: float) -> np.ndarray:
    # table long enough that the truncated tail is < 1e-18
    ymax = int(min(max(64, math.ceil(math.log(1e-18) / math.log(s))), 1 << 20))
    ys = np.arange(1.0, ymax + 1.0)
    pmf = -np.exp(special.xlogy(ys, s) - np.log(ys)) / math.log1p(-s)
    return np.cumsum(pmf)


class Triangle(Model):
    """Triangular on [0, 33] with free mode theta.

    Sampling: closed-form inverse transform.
    """

    name = "triangle"
    param_name = "mode"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"lower": 0.0, "upper": 33.0}
    domain = (0.0, 33.0, True, True)

    def support(self, theta):
        return (0.0, self.nuisance["upper"])

    def _log_density(self, y, theta):
        h = self.nuisance["upper"]
        up = np.log(2.0 * y) - np.log(h * theta)
        down = np.log(2.0 * (h - y)) - np.log(h * (h - theta))
        return np.where(y <= theta, up, down)

    def _cdf(self, y, theta):
        h = self.nuisance["upper"]
        up = y * y / (h * theta)
        down = 1.0 - (h - y) ** 2 / (h * (h - theta))
        return np.where(y <= theta, up, down)

    def _ppf(self, u, theta):
        h = self.nuisance["upper"]
        up = np.sqrt(u * h * theta)
        down = h - np.sqrt((1.0 - u) * h * (h - theta))
        return np.where(u <= theta / h, up, down)


class WilcoxonSignedRank(Model):
    """Null law of the Wilcoxon signed-rank statistic for n pairs.

    W = sum of the ranks with positive sign, uniform over the 2^n sign
    patterns; pmf computed by subset-sum counting.
    Sampling: lattice search on the cumulative table.
    """

    name = "wilcoxon-signed-rank"
    param_name = "n"
    support_kind = "nonnegative-integer"
    space = ParamSpace(2, 13, integer=True)
    domain = (1.0, math.inf, True, False)

    def support(self, theta):
        n = float(theta)
        return (0.0, n * (n + 1.0) / 2.0)

    def _log_density(self, y, theta):
        pmf, _ = _signed_rank_table(int(theta))
        idx = np.clip(np.floor(y).astype(np.int64), 0, len(pmf) - 1)
        return np.log(pmf[idx])

    def _cdf(self, y, theta):
        _, cum = _signed_rank_table(int(theta))
        idx = np.clip(np.floor(y).astype(np.int64), -1, len(cum) - 1)
        return np.where(idx < 0, 0.0, cum[np.clip(idx, 0, len(cum) - 1)])

    def _ppf(self, u, theta):
        _, cum = _signed_rank_table(int(theta))
        return np.searchsorted(cum, u).astype(np.float64)


@lru_cache(maxsize=32)
def _signed_rank_table(n: int):
    c = np.zeros(n * (n + 1) // 2 + 1)
    c[0] = 1.0
    for i in range(1, n + 1):
        c[i:] = c[i:] + c[:-i]  # RHS evaluated before assignment
    pmf = c / 2.0**n
    return pmf, np.cumsum(pmf)


class Benini(Model):
    """Benini(y0=1, shape): cdf 1 - exp(-shape * log(y)^2), y >= 1.

    Sampling: closed-form inverse transform.
    """

    name = "benini"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"y0": 1.0}
    domain = _POSITIVE

    def support(self, theta):
        return (1.0, math.inf)

    def _log_density(self, y, theta):
        t = np.log(y)
        return np.log(2.0 * theta * t) - theta * t * t - t

    def _cdf(self, y, theta):
        t = np.log(y)
        return -np.expm1(-theta * t * t)

    def _ppf(self, u, theta):
        return np.exp(np.sqrt(-np.log1p(-u) / theta))


class BetaGeometric(Model):
    """Beta-geometric with shape1=5 and free shape2.

    pmf B(6, shape2+y) / B(5, shape2) on y = 0, 1, ...; the sum
    telescopes, giving cdf 1 - B(5, shape2+y+1) / B(5, shape2).
    Sampling: integer bisection on the closed-form cdf.
    """

    name = "beta-geometric"
    param_name = "shape2"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.5, 12)
    nuisance = {"shape1": 5.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        a = self.nuisance["shape1"]
        return special.betaln(a + 1.0, theta + y) - special.betaln(a, theta)

    def _cdf(self, y, theta):
        a = self.nuisance["shape1"]
        k = np.floor(y)
        return -np.expm1(special.betaln(a, theta + k + 1.0) - special.betaln(a, theta))

    def _ppf(self, u, theta):
        return lattice_ppf(lambda k: self._cdf(k, theta), u)


class BetaNormal(Model):
    """Beta(shape1, 10) law warped through a Normal(5, 11) CDF.

    cdf I_x(shape1, 10) at x = Phi((y-5)/11), free first shape.
    Sampling: inverse transform through both inverse CDFs.
    """

    name = "beta-normal"
    param_name = "shape1"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"shape2": 10.0, "mean": 5.0, "sd": 11.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        b, m, s = 10.0, 5.0, 11.0
        z = (y - m) / s
        return (
            (theta - 1.0) * special.log_ndtr(z)
            + (b - 1.0) * special.log_ndtr(-z)
            - special.betaln(theta, b)
            - 0.5 * (z * z + _LN_2PI)
            - math.log(s)
        )

    def _cdf(self, y, theta):
        z = (y - 5.0) / 11.0
        return special.betainc(theta, 10.0, special.ndtr(z))

    def _ppf(self, u, theta):
        x = special.betaincinv(theta, 10.0, u)
        return 5.0 + 11.0 * special.ndtri(x)


class BirnbaumSaunders(ScipyModel):
    """Birnbaum-Saunders (fatigue life) with scale 1 and free shape.

    Sampling: scipy quantile.
    """

    name = "birnbaum-saunders"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.fatiguelife(theta)


class Dagum(Model):
    """Dagum(scale=1, a, p=2): cdf (1 + y^-a)^-2 with free a.

    Sampling: closed-form inverse transform.
    """

    name = "dagum"
    param_name = "shape_a"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0, "shape_p": 2.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        p = self.nuisance["shape_p"]
        return (
            np.log(p * theta)
            - (theta + 1.0) * np.log(y)
            - (p + 1.0) * np.log1p(y ** -theta)
        )

    def _cdf(self, y, theta):
        p = self.nuisance["shape_p"]
        return np.exp(-p * np.log1p(y ** -theta))

    def _ppf(self, u, theta):
        p = self.nuisance["shape_p"]
        return (u ** (-1.0 / p) - 1.0) ** (-1.0 / theta)


class Frechet(Model):
    """Frechet(location=0, scale=1, shape): cdf exp(-y^-shape).

    Sampling: closed-form inverse transform.
    """

    name = "frechet"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"location": 0.0, "scale": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return np.log(theta) - (theta + 1.0) * np.log(y) - y ** -theta

    def _cdf(self, y, theta):
        return np.exp(-(y ** -theta))

    def _ppf(self, u, theta):
        return (-np.log(u)) ** (-1.0 / theta)


class DirichletMarginal(Model):
    """First coordinate of a Dirichlet(shape1, 2, 4): Beta(shape1, 6).

    Sampling: scipy Beta quantile.
    """

    name = "dirichlet-marginal"
    param_name = "shape1"
    support_kind = "unit-interval"
    space = ParamSpace(0.5, 12)
    nuisance = {"shape2": 2.0, "shape3": 4.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return stats.beta.logpdf(y, theta, 6.0)

    def _cdf(self, y, theta):
        return special.betainc(theta, 6.0, y)

    def _ppf(self, u, theta):
        return special.betaincinv(theta, 6.0, u)


class HuberLeastFavorable(Model):
    """Huber's least favorable law: Gaussian center, exponential tails.

    Density C exp(-rho_k(y)) with rho_k quadratic inside |y| <= k and
    linear outside; free corner k, location 0, scale 1.
    Sampling: piecewise closed-form inverse transform.
    """

    name = "huber-least-favorable"
    param_name = "k"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"mu": 0.0, "sigma": 1.0}
    domain = _POSITIVE

    def _const(self, k):
        # normalizer over center mass + two exponential tails
        center = _SQRT_2PI * (2.0 * special.ndtr(k) - 1.0)
        tails = 2.0 * np.exp(-0.5 * k * k) / k
        return 1.0 / (center + tails)

    def _log_density(self, y, theta):
        k = theta
        a = np.abs(y)
        rho = np.where(a <= k, 0.5 * y * y, k * a - 0.5 * k * k)
        return np.log(self._const(k)) - rho

    def _cdf(self, y, theta):
        k = theta
        c = self._const(k)
        lower = (c / k) * np.exp(0.5 * k * k + k * y)
        upper = 1.0 - (c / k) * np.exp(0.5 * k * k - k * y)
        p_lo = (c / k) * np.exp(-0.5 * k * k)
        mid = p_lo + c * _SQRT_2PI * (special.ndtr(y) - special.ndtr(-k))
        return np.where(y < -k, lower, np.where(y > k, upper, mid))

    def _ppf(self, u, theta):
        k = theta
        c = self._const(k)
        p_lo = (c / k) * np.exp(-0.5 * k * k)
        with np.errstate(all="ignore"):
            lower = (np.log(u * k / c) - 0.5 * k * k) / k
            upper = (0.5 * k * k - np.log((1.0 - u) * k / c)) / k
            mid = special.ndtri(
                special.ndtr(-k) + np.clip(u - p_lo, 0.0, 1.0) / (c * _SQRT_2PI)
            )
        return np.where(u < p_lo, lower, np.where(u > 1.0 - p_lo, upper, mid))


class Gumbel(Model):
    """Gumbel(location=1, scale): cdf exp(-exp(-(y-1)/scale)).

    Sampling: closed-form inverse transform.
    """

    name = "gumbel"
    param_name = "scale"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"location": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        z = (y - self.nuisance["location"]) / theta
        return -np.log(theta) - z - np.exp(-z)

    def _cdf(self, y, theta):
        z = (y - self.nuisance["location"]) / theta
        return np.exp(-np.exp(-z))

    def _ppf(self, u, theta):
        return self.nuisance["location"] - theta * np.log(-np.log(u))


class Gompertz(Model):
    """Gompertz(scale=1, shape): hazard shape * e^y, y >= 0.

    cdf 1 - exp(-shape (e^y - 1)). Sampling: closed-form inverse transform.
    """

    name = "gompertz"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return np.log(theta) + y - theta * np.expm1(y)

    def _cdf(self, y, theta):
        return -np.expm1(-theta * np.expm1(y))

    def _ppf(self, u, theta):
        return np.log1p(-np.log1p(-u) / theta)


class Kumaraswamy(Model):
    """Kumaraswamy(shape1=10, shape2): cdf 1 - (1 - y^10)^shape2 on (0,1).

    Sampling: closed-form inverse transform.
    """

    name = "kumaraswamy"
    param_name = "shape2"
    support_kind = "unit-interval"
    space = ParamSpace(0.5, 12)
    nuisance = {"shape1": 10.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        a = self.nuisance["shape1"]
        ya = y**a
        return (
            np.log(a * theta) + (a - 1.0) * np.log(y) + (theta - 1.0) * np.log1p(-ya)
        )

    def _cdf(self, y, theta):
        return -np.expm1(theta * np.log1p(-(y ** self.nuisance["shape1"])))

    def _ppf(self, u, theta):
        a = self.nuisance["shape1"]
        return (-np.expm1(np.log1p(-u) / theta)) ** (1.0 / a)


class Laplace(Model):
    """Laplace(location=5, scale), free scale.

    Sampling: closed-form inverse transform.
    """

    name = "laplace"
    param_name = "scale"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"location": 5.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        z = np.abs(y - self.nuisance["location"]) / theta
        return -z - np.log(2.0 * theta)

    def _cdf(self, y, theta):
        z = (y - self.nuisance["location"]) / theta
        return np.where(z < 0.0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))

    def _ppf(self, u, theta):
        loc = self.nuisance["location"]
        return loc + theta * np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 - 2.0 * u))


class LogGamma(ScipyModel):
    """Log-gamma with location 0, free scale, shape 2; support all reals.

    Sampling: scipy quantile.
    """

    name = "log-gamma"
    param_name = "scale"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"location": 0.0, "shape": 2.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.loggamma(self.nuisance["shape"], scale=theta)


class Lindley(Model):
    """Lindley(theta): pdf theta^2/(1+theta) (1+y) exp(-theta y).

    Sampling: inverse transform via the Lambert W (-1 branch).
    """

    name = "lindley"
    param_name = "theta"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return 2.0 * np.log(theta) - np.log1p(theta) + np.log1p(y) - theta * y

    def _cdf(self, y, theta):
        return -np.expm1(np.log1p(theta * y / (1.0 + theta)) - theta * y)

    def _ppf(self, u, theta):
        a = 1.0 + theta
        w = special.lambertw(a * (u - 1.0) * np.exp(-a), k=-1)
        return np.maximum(-1.0 - 1.0 / theta - np.real(w) / theta, 0.0)


class Lomax(Model):
    """Lomax(scale=1, q): cdf 1 - (1+y)^-q, free tail index q.

    Sampling: closed-form inverse transform.
    """

    name = "lomax"
    param_name = "shape_q"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return np.log(theta) - (theta + 1.0) * np.log1p(y)

    def _cdf(self, y, theta):
        return -np.expm1(-theta * np.log1p(y))

    def _ppf(self, u, theta):
        return np.expm1(-np.log1p(-u) / theta)


class Makeham(Model):
    """Makeham(scale=0, shape, epsilon=0): hazard shape*e^(scale*y) + epsilon.

    At the fixed nuisance values the hazard is the constant shape, so the
    law reduces to an exponential with rate shape.
    Sampling: closed-form inverse transform.
    """

    name = "makeham"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 0.0, "epsilon": 0.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return np.log(theta) - theta * y

    def _cdf(self, y, theta):
        return -np.expm1(-theta * y)

    def _ppf(self, u, theta):
        return -np.log1p(-u) / theta


class Maxwell(ScipyModel):
    """Maxwell with free rate a (scale 1/sqrt(a)). Sampling: scipy quantile."""

    name = "maxwell"
    param_name = "rate"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.maxwell(scale=np.asarray(theta, dtype=np.float64) ** -0.5)


class Nakagami(ScipyModel):
    """Nakagami(scale=1, shape). Sampling: scipy quantile.

    The smallno entry is a numerical epsilon of the source package,
    recorded for fidelity but unused by the math.
    """

    name = "nakagami"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0, "smallno": 1.0e-6}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.nakagami(theta)


class Perks(Model):
    """Perks(scale=1, shape): cdf 1 - (1+shape)/(1+shape*e^y), y >= 0.

    Sampling: closed-form inverse transform.
    """

    name = "perks"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        denom = np.logaddexp(0.0, np.log(theta) + y)
        return np.log(theta) + y + np.log1p(theta) - 2.0 * denom

    def _cdf(self, y, theta):
        return -np.expm1(np.log1p(theta) - np.logaddexp(0.0, np.log(theta) + y))

    def _ppf(self, u, theta):
        return np.log(theta + u) - np.log1p(-u) - np.log(theta)


class Rayleigh(Model):
    """Rayleigh(scale): cdf 1 - exp(-y^2 / (2 scale^2)).

    Sampling: closed-form inverse transform.
    """

    name = "rayleigh"
    param_name = "scale"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _log_density(self, y, theta):
        z = y / theta
        return np.log(y) - 2.0 * np.log(theta) - 0.5 * z * z

    def _cdf(self, y, theta):
        z = y / theta
        return -np.expm1(-0.5 * z * z)

    def _ppf(self, u, theta):
        return theta * np.sqrt(-2.0 * np.log1p(-u))


class Rice(ScipyModel):
    """Rice(sigma=1, vee), free noncentrality vee. Sampling: scipy quantile."""

    name = "rice"
    param_name = "vee"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"sigma": 1.0}
    domain = (0.0, math.inf, True, False)

    def _frozen(self, theta):
        return stats.rice(theta)


class Simplex(Model):
    """Simplex(mu=0.5, dispersion) on (0,1).

    pdf (2 pi s^2 (y(1-y))^3)^(-1/2) exp(-d(y)/(2 s^2)) with
    d(y) = (y-mu)^2 / (y(1-y) mu^2 (1-mu)^2). No closed CDF: node
    tables are integrated on a logit grid and short stubs are finished
    with Gauss-Legendre, so cdf' matches the density.
    Sampling: quantile-table inverse transform with Newton polish.
    """

    name = "simplex"
    param_name = "dispersion"
    support_kind = "unit-interval"
    space = ParamSpace(0.5, 12)
    nuisance = {"mu": 0.5}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        v = y * (1.0 - y)
        d = 16.0 * (y - 0.5) ** 2 / v
        s2 = np.asarray(theta, dtype=np.float64) ** 2
        return -0.5 * (_LN_2PI + np.log(s2) + 3.0 * np.log(v)) - d / (2.0 * s2)

    def _cdf(self, y, theta):
        nodes, cum = _simplex_nodes(float(theta))
        y = np.asarray(y, dtype=np.float64)
        yc = np.clip(y, nodes[0], nodes[-1])
        idx = np.clip(np.searchsorted(nodes, yc, side="right") - 1, 0, len(nodes) - 1)
        lo = nodes[idx]
        half = 0.5 * (yc - lo)
        pts = lo[..., None] + half[..., None] * (_GL_X + 1.0)
        dens = np.exp(self._log_density(np.clip(pts, 1e-300, 1.0), theta))
        stub = half * (dens * _GL_W).sum(-1)
        return cum[idx] + stub

    def _ppf(self, u, theta):
        nodes, cum = _simplex_nodes(float(theta))
        y = np.interp(u, cum / cum[-1], nodes)
        for _ in range(2):  # Newton polish against the exact density
            err = self._cdf(y, theta) - u
            dens = np.exp(self._log_density(y, theta))
            y = np.clip(y - err / np.maximum(dens, 1e-30), nodes[0], nodes[-1])
        return y


@lru_cache(maxsize=64)
def _simplex_nodes(sigma: float):
    t = np.linspace(-36.0, 36.0, (1 << 15) + 1)
    y = special.expit(t)
    v = y * (1.0 - y)
    d = 16.0 * (y - 0.5) ** 2 / v
    logf = -0.5 * (_LN_2PI + 2.0 * math.log(sigma) + 3.0 * np.log(v)) - d / (
        2.0 * sigma * sigma
    )
    w = np.exp(logf) * v  # integrand in logit coordinates (dy/dt = v)
    w[~np.isfinite(w)] = 0.0
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(t))))
    return y, cum


class SinghMaddala(Model):
    """Singh-Maddala(scale=1, a=5, q): cdf 1 - (1 + y^5)^-q, free q.

    Sampling: closed-form inverse transform.
    """

    name = "singh-maddala"
    param_name = "shape_q"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0, "shape_a": 5.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        a = self.nuisance["shape_a"]
        return (
            np.log(a * theta)
            + (a - 1.0) * np.log(y)
            - (theta + 1.0) * np.log1p(y**a)
        )

    def _cdf(self, y, theta):
        return -np.expm1(-theta * np.log1p(y ** self.nuisance["shape_a"]))

    def _ppf(self, u, theta):
        a = self.nuisance["shape_a"]
        return np.expm1(-np.log1p(-u) / theta) ** (1.0 / a)


class Skellam(ScipyModel):
    """Skellam(mu1=5, mu2): difference of two Poisson counts.

    Support is all integers. Sampling: inverse transform by integer
    bisection on a mean +- 40 sd bracket.
    """

    name = "skellam"
    param_name = "mu2"
    support_kind = "integer"
    space = ParamSpace(0.5, 12)
    nuisance = {"mu1": 5.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.skellam(self.nuisance["mu1"], theta)

    def _ppf(self, u, theta):
        mu1 = self.nuisance["mu1"]
        mean, sd = mu1 - theta, math.sqrt(mu1 + theta)
        lo = math.floor(mean - 40.0 * sd) - 1
        hi = math.ceil(mean + 40.0 * sd)
        cdf = self._frozen(theta).cdf
        u = np.asarray(u, dtype=np.float64)
        a = np.full(u.shape, float(lo))
        b = np.full(u.shape, float(hi))
        # invariant cdf(a) < u <= cdf(b); stop at unit gap, answer is b
        while np.any(b - a > 1.5):
            mid = np.floor((a + b) / 2.0)
            below = cdf(mid) < u
            a = np.where(below, mid, a)
            b = np.where(below, b, mid)
        return b


class Tobit(Model):
    """Tobit: y = max(0, Z) with Z ~ Normal(mean, 1), free mean.

    Mixed law with an atom at 0 carrying mass Phi(-mean); log_density
    reports the log point mass there and the normal log pdf above 0.
    Sampling: censored normal inverse transform.
    """

    name = "tobit"
    param_name = "mean"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"sd": 1.0, "lower": 0.0, "upper": math.inf}
    atoms = (0.0,)
    domain = _REAL

    def _log_density(self, y, theta):
        z = y - theta
        dens = -0.5 * (z * z + _LN_2PI)
        return np.where(y == 0.0, special.log_ndtr(np.asarray(-theta)), dens)

    def _cdf(self, y, theta):
        return special.ndtr(y - theta)

    def _ppf(self, u, theta):
        mass0 = special.ndtr(-np.asarray(theta))
        return np.where(u <= mass0, 0.0, theta + special.ndtri(u))


class Paralogistic(Model):
    """Paralogistic(scale=1, a): cdf 1 - (1 + y^a)^-a, free a.

    Sampling: closed-form inverse transform.
    """

    name = "paralogistic"
    param_name = "shape_a"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 1.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return (
            2.0 * np.log(theta)
            + (theta - 1.0) * np.log(y)
            - (theta + 1.0) * np.log1p(y**theta)
        )

    def _cdf(self, y, theta):
        return -np.expm1(-theta * np.log1p(y**theta))

    def _ppf(self, u, theta):
        return np.expm1(-np.log1p(-u) / theta) ** (1.0 / theta)


class Zipf(Model):
    """Zipf on {1, ..., 10}: pmf proportional to y^-shape.

    Sampling: lattice search on the ten-point cumulative table.
    """

    name = "zipf"
    param_name = "shape"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.5, 12)
    nuisance = {"N": 10.0}
    domain = _POSITIVE

    _support = np.arange(1.0, 11.0)

    def support(self, theta):
        return (1.0, float(self.nuisance["N"]))

    def _log_z(self, theta):
        t = np.asarray(theta, dtype=np.float64)
        return np.log((self._support ** -t[..., None]).sum(-1))

    def _log_density(self, y, theta):
        return -np.asarray(theta, dtype=np.float64) * np.log(y) - self._log_z(theta)

    def _cdf(self, y, theta):
        w = self._support ** -float(theta)
        cum = np.cumsum(w / w.sum())
        idx = np.clip(np.floor(y).astype(np.int64), 0, 10) - 1
        return np.where(idx < 0, 0.0, cum[np.clip(idx, 0, 9)])

    def _ppf(self, u, theta):
        w = self._support ** -float(theta)
        cum = np.cumsum(w / w.sum())
        return np.minimum(np.searchsorted(cum, u) + 1.0, 10.0)
