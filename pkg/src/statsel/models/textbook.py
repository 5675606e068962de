"""Candidate models 1-20: classic textbook families.

Parameterizations follow the conventions of the source packages the
candidate list was drawn from; the free parameter and the fixed
nuisance values are documented per class.
"""

import math

import numpy as np
from scipy import special, stats

from .spec import Model, ParamSpace, ScipyModel

_REAL = (-math.inf, math.inf, False, False)
_POSITIVE = (0.0, math.inf, False, False)

_LN_2PI = math.log(2.0 * math.pi)


class Bernoulli(Model):
    """Bernoulli(p): P(y=1) = p, P(y=0) = 1 - p.

    Sampling: inverse transform (u > 1 - p).
    """

    name = "bernoulli"
    param_name = "p"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.05, 0.95)
    domain = (0.0, 1.0, True, True)

    def support(self, theta):
        return (0.0, 1.0)

    def _log_density(self, y, theta):
        return np.where(y == 1.0, np.log(theta), np.log1p(-theta))

    def _cdf(self, y, theta):
        return np.where(np.floor(y) >= 1.0, 1.0, 1.0 - theta)

    def _ppf(self, u, theta):
        return (u > 1.0 - theta).astype(np.float64)


class DiscreteUniform(Model):
    """Discrete Uniform on {1, ..., N}: pmf 1/N.

    Sampling: inverse transform (ceil(u * N)).
    """

    name = "discrete-uniform"
    param_name = "N"
    support_kind = "nonnegative-integer"
    space = ParamSpace(2, 13, integer=True)
    domain = (1.0, math.inf, True, False)

    def support(self, theta):
        return (1.0, float(theta))

    def _log_density(self, y, theta):
        return np.broadcast_to(-np.log(theta), y.shape).copy()

    def _cdf(self, y, theta):
        return np.clip(np.floor(y), 0.0, theta) / theta

    def _ppf(self, u, theta):
        return np.clip(np.ceil(u * theta), 1.0, theta)


class Geometric(Model):
    """Geometric(p) counting failures before the first success.

    pmf p(1-p)^y on y = 0, 1, 2, ...
    Sampling: inverse transform via the closed-form quantile.
    """

    name = "geometric"
    param_name = "p"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.05, 0.95)
    domain = (0.0, 1.0, False, True)

    def _log_density(self, y, theta):
        # xlogy keeps pmf(0) finite at p=1
        return np.log(theta) + special.xlogy(y, 1.0 - theta)

    def _cdf(self, y, theta):
        return -np.expm1(np.log1p(-theta) * (np.floor(y) + 1.0))

    def _ppf(self, u, theta):
        if theta == 1.0:
            return np.zeros_like(u)
        k = np.ceil(np.log1p(-u) / np.log1p(-theta)) - 1.0
        return np.maximum(k, 0.0)


class NegativeBinomial(ScipyModel):
    """Negative Binomial(r, p=0.3) counting failures before the r-th success.

    r may be any positive real. Sampling: scipy quantile (inverse transform).
    """

    name = "negative-binomial"
    param_name = "r"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.5, 12)
    nuisance = {"p": 0.3}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.nbinom(theta, self.nuisance["p"])


class Exponential(Model):
    """Exponential(rate lambda): pdf lambda * exp(-lambda y), y >= 0.

    Sampling: inverse transform, -log(1-u)/lambda.
    """

    name = "exponential"
    param_name = "rate"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _log_density(self, y, theta):
        return np.log(theta) - theta * y

    def _cdf(self, y, theta):
        return -np.expm1(-theta * y)

    def _ppf(self, u, theta):
        return -np.log1p(-u) / theta


class Normal(Model):
    """Normal(mu, sigma=1), free location mu.

    Sampling: inverse transform via ndtri.
    """

    name = "normal"
    param_name = "mean"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"sd": 1.0}
    domain = _REAL

    def _log_density(self, y, theta):
        z = y - theta
        return -0.5 * (z * z + _LN_2PI)

    def _cdf(self, y, theta):
        return special.ndtr(y - theta)

    def _ppf(self, u, theta):
        return theta + special.ndtri(u)


class Poisson(ScipyModel):
    """Poisson(lambda). Sampling: scipy quantile (inverse transform)."""

    name = "poisson"
    param_name = "rate"
    support_kind = "nonnegative-integer"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.poisson(theta)


class Beta(ScipyModel):
    """Beta(alpha, beta=3), free first shape alpha.

    Sampling: scipy quantile (regularized incomplete beta inverse).
    """

    name = "beta"
    param_name = "alpha"
    support_kind = "unit-interval"
    space = ParamSpace(0.5, 12)
    nuisance = {"beta": 3.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.beta(theta, self.nuisance["beta"])


class Weibull(Model):
    """Weibull(scale lambda=3, shape k), free shape.

    cdf 1 - exp(-(y/3)^k). Sampling: closed-form inverse transform.
    """

    name = "weibull"
    param_name = "shape"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 3.0}
    domain = _POSITIVE

    def _log_density(self, y, theta):
        s = self.nuisance["scale"]
        z = y / s
        # xlogy keeps the density finite at y=0 when shape == 1
        return np.log(theta / s) + special.xlogy(theta - 1.0, z) - z**theta

    def _cdf(self, y, theta):
        return -np.expm1(-((y / self.nuisance["scale"]) ** theta))

    def _ppf(self, u, theta):
        return self.nuisance["scale"] * (-np.log1p(-u)) ** (1.0 / theta)


class DoubleExponential(Model):
    """Double exponential (Laplace) with location mu and scale 3.

    pdf exp(-|y - mu| / 3) / 6. Sampling: closed-form inverse transform.
    """

    name = "double-exponential"
    param_name = "location"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 3.0}
    domain = _REAL

    def _log_density(self, y, theta):
        s = self.nuisance["scale"]
        return -np.abs(y - theta) / s - math.log(2.0 * s)

    def _cdf(self, y, theta):
        z = (y - theta) / self.nuisance["scale"]
        return np.where(z < 0.0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))

    def _ppf(self, u, theta):
        s = self.nuisance["scale"]
        return theta + np.where(
            u < 0.5, s * np.log(2.0 * u), -s * np.log(2.0 * (1.0 - u))
        )


class ChiSquare(ScipyModel):
    """Chi square with real df k. Sampling: scipy quantile."""

    name = "chi-square"
    param_name = "df"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.chi2(theta)


class F(ScipyModel):
    """F(d1=3, d2), free denominator df. Sampling: scipy quantile."""

    name = "f"
    param_name = "df2"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"df1": 3.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.f(self.nuisance["df1"], theta)


class Gamma(ScipyModel):
    """Gamma(alpha=0.5, beta), free scale beta. Sampling: scipy quantile."""

    name = "gamma"
    param_name = "scale"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"alpha": 0.5}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.gamma(self.nuisance["alpha"], scale=theta)


class Logistic(Model):
    """Logistic(mu, s=0.5), free location.

    Sampling: inverse transform via the logit.
    """

    name = "logistic"
    param_name = "location"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"scale": 0.5}
    domain = _REAL

    def _log_density(self, y, theta):
        z = np.abs(y - theta) / self.nuisance["scale"]
        return -z - 2.0 * np.log1p(np.exp(-z)) - np.log(self.nuisance["scale"])

    def _cdf(self, y, theta):
        return special.expit((y - theta) / self.nuisance["scale"])

    def _ppf(self, u, theta):
        return theta + self.nuisance["scale"] * (np.log(u) - np.log1p(-u))


class Lognormal(Model):
    """Lognormal: log y ~ Normal(mu, 0.5), free mu.

    Sampling: exp of the normal inverse transform.
    """

    name = "lognormal"
    param_name = "meanlog"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"sdlog": 0.5}
    domain = _REAL

    def _log_density(self, y, theta):
        s = self.nuisance["sdlog"]
        z = (np.log(y) - theta) / s
        return -np.log(y * s) - 0.5 * (z * z + _LN_2PI)

    def _cdf(self, y, theta):
        return special.ndtr((np.log(y) - theta) / self.nuisance["sdlog"])

    def _ppf(self, u, theta):
        return np.exp(theta + self.nuisance["sdlog"] * special.ndtri(u))


class Pareto(Model):
    """Pareto(x_m, alpha=2), free scale x_m; support [x_m, inf).

    Sampling: closed-form inverse transform.
    """

    name = "pareto"
    param_name = "x_m"
    support_kind = "nonnegative-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"alpha": 2.0}
    domain = _POSITIVE

    def support(self, theta):
        return (theta, math.inf)

    def _log_density(self, y, theta):
        a = self.nuisance["alpha"]
        return np.log(a) + a * np.log(theta) - (a + 1.0) * np.log(y)

    def _cdf(self, y, theta):
        return 1.0 - (theta / y) ** self.nuisance["alpha"]

    def _ppf(self, u, theta):
        return theta * (1.0 - u) ** (-1.0 / self.nuisance["alpha"])


class NoncentralT(ScipyModel):
    """Student's t with free df nu and noncentrality 2. Sampling: scipy quantile."""

    name = "noncentral-t"
    param_name = "df"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"ncp": 2.0}
    domain = _POSITIVE

    def _frozen(self, theta):
        return stats.nct(theta, self.nuisance["ncp"])


class Uniform(Model):
    """Uniform(a, a+2), free left endpoint.

    Sampling: a + 2u.
    """

    name = "uniform"
    param_name = "a"
    support_kind = "continuous-real"
    space = ParamSpace(0.5, 12)
    nuisance = {"width": 2.0}
    domain = _REAL

    def support(self, theta):
        return (theta, theta + 2.0)

    def _log_density(self, y, theta):
        shape = np.broadcast_shapes(np.shape(y), np.shape(theta))
        return np.full(shape, -math.log(2.0))

    def _cdf(self, y, theta):
        return (y - theta) / 2.0

    def _ppf(self, u, theta):
        return theta + 2.0 * u


class Hypergeometric(ScipyModel):
    """Hypergeometric: 3 white and n black balls, 2 drawn; y = whites drawn.

    Free n (number of black balls). Sampling: scipy quantile.
    """

    name = "hypergeometric"
    param_name = "n"
    support_kind = "nonnegative-integer"
    space = ParamSpace(2, 13, integer=True)
    nuisance = {"m": 3.0, "k": 2.0}
    domain = (0.0, math.inf, True, False)

    def support(self, theta):
        k = self.nuisance["k"]
        return (max(0.0, k - float(theta)), min(self.nuisance["m"], k))

    def _frozen(self, theta):
        m = int(self.nuisance["m"])
        k = int(self.nuisance["k"])
        return stats.hypergeom(m + int(theta), m, k)


class Binomial(ScipyModel):
    """Binomial(n, p=0.5), free number of trials n. Sampling: scipy quantile."""

    name = "binomial"
    param_name = "n"
    support_kind = "nonnegative-integer"
    space = ParamSpace(2, 13, integer=True)
    nuisance = {"p": 0.5}
    domain = (1.0, math.inf, True, False)

    def support(self, theta):
        return (0.0, float(theta))

    def _frozen(self, theta):
        return stats.binom(int(theta), self.nuisance["p"])
