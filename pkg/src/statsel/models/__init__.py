"""Registry of the fifty candidate distributions and regression laws.

Models are keyed by 1-based id in a fixed catalogue order; the first K
form the candidate set for a K-model selection task.
"""

from ..errors import UnknownModelError
from . import extended as _e
from . import textbook as _t
from .mle import check_support, golden_max, loglik, mle
from .regression import (
    REGRESSION_MODELS,
    RegressionModelSpec,
    coefficient_grid,
    get_regression_model,
    sample_regression,
)
from .spec import SUPPORT_KINDS, Model, ParamSpace

_CLASSES = (
    _t.Bernoulli,
    _t.DiscreteUniform,
    _t.Geometric,
    _t.NegativeBinomial,
    _t.Exponential,
    _t.Normal,
    _t.Poisson,
    _t.Beta,
    _t.Weibull,
    _t.DoubleExponential,
    _t.ChiSquare,
    _t.F,
    _t.Gamma,
    _t.Logistic,
    _t.Lognormal,
    _t.Pareto,
    _t.NoncentralT,
    _t.Uniform,
    _t.Hypergeometric,
    _t.Binomial,
    _e.OneInflatedLogarithmic,
    _e.Triangle,
    _e.WilcoxonSignedRank,
    _e.Benini,
    _e.BetaGeometric,
    _e.BetaNormal,
    _e.BirnbaumSaunders,
    _e.Dagum,
    _e.Frechet,
    _e.DirichletMarginal,
    _e.HuberLeastFavorable,
    _e.Gumbel,
    _e.Gompertz,
    _e.Kumaraswamy,
    _e.Laplace,
    _e.LogGamma,
    _e.Lindley,
    _e.Lomax,
    _e.Makeham,
    _e.Maxwell,
    _e.Nakagami,
    _e.Perks,
    _e.Rayleigh,
    _e.Rice,
    _e.Simplex,
    _e.SinghMaddala,
    _e.Skellam,
    _e.Tobit,
    _e.Paralogistic,
    _e.Zipf,
)

_MODELS = []
for _i, _cls in enumerate(_CLASSES):
    _m = _cls()
    _m.model_id = _i + 1
    _MODELS.append(_m)
_MODELS = tuple(_MODELS)

_BY_NAME = {m.name: m for m in _MODELS}


def all_models() -> tuple:
    """All fifty models in catalogue order."""
    return _MODELS


def top_models(k: int) -> tuple:
    """First k models, the candidate set of a K-model task."""
    if not 1 <= k <= len(_MODELS):
        raise UnknownModelError(f"candidate count must be in 1..{len(_MODELS)}, got {k}")
    return _MODELS[:k]


def get_model(ref) -> Model:
    """Model by 1-based id or by name."""
    if isinstance(ref, str):
        if ref in _BY_NAME:
            return _BY_NAME[ref]
        raise UnknownModelError(f"unknown model name {ref!r}")
    idx = int(ref)
    if not 1 <= idx <= len(_MODELS):
        raise UnknownModelError(f"model id must be in 1..{len(_MODELS)}, got {ref}")
    return _MODELS[idx - 1]


def registry_json() -> list:
    """Catalogue as plain dicts, for the list-models verb."""
    return [m.spec_dict() for m in _MODELS]


__all__ = [
    "SUPPORT_KINDS",
    "Model",
    "ParamSpace",
    "all_models",
    "top_models",
    "get_model",
    "registry_json",
    "loglik",
    "mle",
    "golden_max",
    "check_support",
    "RegressionModelSpec",
    "REGRESSION_MODELS",
    "get_regression_model",
    "coefficient_grid",
    "sample_regression",
]
