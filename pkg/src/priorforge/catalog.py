"""Built-in family catalog.

Each entry carries an analytic log-density, a sampler, analytic scores
and (where known in closed form) the exact Fisher information and the
expected negative third derivative.  Families are addressable by string
id; custom families can be built with the exported factory helpers.

Observation conventions: scalar-observation families take ``x`` as a
float or 1-D array; paired-observation families take ``(2,)`` or
``(N, 2)`` arrays; the structured-array families (``neyman_scott``,
``random_effects``) take the flat vector of their sufficient
statistics as one observation.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.special import expit, gammaln, polygamma, psi

from .errors import UsageError
from .family import (
    FamilyModel,
    FiniteSupport,
    IntervalSupport,
    LatticeSupport,
    ProductComponent,
    ProductSupport,
)
from .space import ParameterSpace

_REGISTRY = {}


def _register(fid):
    def deco(fn):
        _REGISTRY[fid] = fn
        return fn

    return deco


def family_ids():
    return sorted(_REGISTRY)


def get_family(fid: str, **kwargs) -> FamilyModel:
    try:
        factory = _REGISTRY[fid]
    except KeyError:
        raise UsageError(
            f"unknown family id {fid!r}; known ids: {', '.join(family_ids())}"
        ) from None
    return factory(**kwargs)


def _pairs(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    return x[:, 0], x[:, 1], x.ndim


def _const_like(val, x):
    """Broadcast a parameter-only derivative to the shape of x."""
    return np.broadcast_to(float(val), np.shape(x)).astype(float) if np.ndim(x) else float(val)


# ---------------------------------------------------------------------------
# Binomial, mean and canonical parameterizations
# ---------------------------------------------------------------------------


@_register("binomial")
def binomial(m: int = 1) -> FamilyModel:
    """Binomial(m, p) with success probability p as the parameter."""
    m = int(m)

    def logf(x, th):
        p = th[0]
        return (
            x * np.log(p)
            + (m - x) * np.log1p(-p)
            + gammaln(m + 1)
            - gammaln(x + 1)
            - gammaln(m - x + 1)
        )

    dlog = {
        1: lambda x, th: x / th[0] - (m - x) / (1 - th[0]),
        2: lambda x, th: -x / th[0] ** 2 - (m - x) / (1 - th[0]) ** 2,
        3: lambda x, th: 2 * x / th[0] ** 3 - 2 * (m - x) / (1 - th[0]) ** 3,
        4: lambda x, th: -6 * x / th[0] ** 4 - 6 * (m - x) / (1 - th[0]) ** 4,
    }

    return FamilyModel(
        name=f"binomial(m={m})",
        space=ParameterSpace(((0.0, 1.0),)),
        observation_kind="discrete",
        support=FiniteSupport(tuple(range(m + 1))),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.binomial(m, th[0], size=size),
        exact_fisher=lambda th: [[m / (th[0] * (1 - th[0]))]],
        exact_g3=lambda th: 2 * m * (1 / (1 - th[0]) ** 2 - 1 / th[0] ** 2),
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(0.5,),
        diagnostic_box=((0.05, 0.95),),
        mle_guess=lambda data: (np.clip(np.mean(data) / m, 1e-6, 1 - 1e-6),),
        loglik_grid=lambda data, grid: (
            np.sum(data) * np.log(grid)
            + (m * len(np.atleast_1d(data)) - np.sum(data)) * np.log1p(-grid)
        ),
        sufficient_stat=lambda data: int(np.sum(data)),
        structure={"m": m},
    )


@_register("binomial_logit")
def binomial_logit(m: int = 1) -> FamilyModel:
    """Binomial(m, p) in the canonical parameter theta = logit(p)."""
    m = int(m)

    def logf(x, th):
        t = th[0]
        return (
            x * t
            - m * np.logaddexp(0.0, t)
            + gammaln(m + 1)
            - gammaln(x + 1)
            - gammaln(m - x + 1)
        )

    def p_of(th):
        return expit(th[0])

    dlog = {
        1: lambda x, th: x - m * p_of(th),
        2: lambda x, th: _const_like(-m * p_of(th) * (1 - p_of(th)), x),
        3: lambda x, th: _const_like(
            -m * p_of(th) * (1 - p_of(th)) * (1 - 2 * p_of(th)), x
        ),
        4: lambda x, th: _const_like(
            -m * p_of(th) * (1 - p_of(th)) * (1 - 6 * p_of(th) * (1 - p_of(th))), x
        ),
    }

    return FamilyModel(
        name=f"binomial_logit(m={m})",
        space=ParameterSpace(((-np.inf, np.inf),)),
        observation_kind="discrete",
        support=FiniteSupport(tuple(range(m + 1))),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.binomial(m, expit(th[0]), size=size),
        exact_fisher=lambda th: [[m * expit(th[0]) * (1 - expit(th[0]))]],
        exact_g3=lambda th: m * expit(th[0]) * (1 - expit(th[0])) * (1 - 2 * expit(th[0])),
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(0.0,),
        diagnostic_box=((-2.5, 2.5),),
        mle_guess=lambda data: (
            float(np.log(np.clip(np.mean(data) / m, 1e-6, 1 - 1e-6))
                  - np.log1p(-np.clip(np.mean(data) / m, 1e-6, 1 - 1e-6))),
        ),
        sufficient_stat=lambda data: int(np.sum(data)),
        structure={"m": m},
    )


# ---------------------------------------------------------------------------
# Poisson, mean and canonical parameterizations
# ---------------------------------------------------------------------------


@_register("poisson")
def poisson() -> FamilyModel:
    def logf(x, th):
        lam = th[0]
        return x * np.log(lam) - lam - gammaln(x + 1)

    dlog = {
        1: lambda x, th: x / th[0] - 1.0,
        2: lambda x, th: -x / th[0] ** 2,
        3: lambda x, th: 2 * x / th[0] ** 3,
        4: lambda x, th: -6 * x / th[0] ** 4,
    }

    return FamilyModel(
        name="poisson",
        space=ParameterSpace(((0.0, np.inf),)),
        observation_kind="discrete",
        support=LatticeSupport(mode_of=lambda th: th[0]),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.poisson(th[0], size=size),
        exact_fisher=lambda th: [[1.0 / th[0]]],
        exact_g3=lambda th: -2.0 / th[0] ** 2,
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(1.0,),
        diagnostic_box=((0.5, 4.0),),
        mle_guess=lambda data: (max(float(np.mean(data)), 1e-6),),
        loglik_grid=lambda data, grid: np.sum(data) * np.log(grid)
        - len(np.atleast_1d(data)) * grid,
        sufficient_stat=lambda data: int(np.sum(data)),
    )


@_register("poisson_log")
def poisson_log() -> FamilyModel:
    """Poisson in the canonical parameter theta = log(lambda)."""

    def logf(x, th):
        t = th[0]
        return x * t - np.exp(t) - gammaln(x + 1)

    dlog = {
        1: lambda x, th: x - np.exp(th[0]),
        2: lambda x, th: _const_like(-np.exp(th[0]), x),
        3: lambda x, th: _const_like(-np.exp(th[0]), x),
        4: lambda x, th: _const_like(-np.exp(th[0]), x),
    }

    return FamilyModel(
        name="poisson_log",
        space=ParameterSpace(((-np.inf, np.inf),)),
        observation_kind="discrete",
        support=LatticeSupport(mode_of=lambda th: np.exp(th[0])),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.poisson(np.exp(th[0]), size=size),
        exact_fisher=lambda th: [[np.exp(th[0])]],
        exact_g3=lambda th: np.exp(th[0]),
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(0.0,),
        diagnostic_box=((-1.0, 1.5),),
        mle_guess=lambda data: (float(np.log(max(np.mean(data), 1e-6))),),
        sufficient_stat=lambda data: int(np.sum(data)),
    )


# ---------------------------------------------------------------------------
# Normal families
# ---------------------------------------------------------------------------

_LOG_2PI = float(np.log(2.0 * np.pi))


def _flatten_first(theta, base):
    return base[:, 0]


@_register("normal_known_var")
def normal_known_var() -> FamilyModel:
    """N(theta, 1) with known unit variance."""

    def logf(x, th):
        return -0.5 * _LOG_2PI - 0.5 * (x - th[0]) ** 2

    dlog = {
        1: lambda x, th: x - th[0],
        2: lambda x, th: _const_like(-1.0, x),
        3: lambda x, th: _const_like(0.0, x),
        4: lambda x, th: _const_like(0.0, x),
    }

    return FamilyModel(
        name="normal_known_var",
        space=ParameterSpace(((-np.inf, np.inf),)),
        observation_kind="continuous",
        support=ProductSupport(
            (ProductComponent("normal", lambda th: (th[0], 1.0)),),
            transform=_flatten_first,
        ),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.normal(th[0], 1.0, size=size),
        exact_fisher=lambda th: [[1.0]],
        exact_g3=lambda th: 0.0,
        score=lambda x, th: np.asarray(x - th[0], dtype=float)[..., None],
        dlog=dlog,
        default_anchor=(0.0,),
        diagnostic_box=((-2.0, 2.0),),
        mle_guess=lambda data: (float(np.mean(data)),),
        loglik_grid=lambda data, grid: -0.5
        * len(np.atleast_1d(data))
        * (grid - np.mean(data)) ** 2,
        sufficient_stat=lambda data: (len(np.atleast_1d(data)), float(np.sum(data))),
    )


@_register("normal_location_scale")
def normal_location_scale() -> FamilyModel:
    """N(mu, sigma^2), parameterized by (mu, sigma)."""

    def logf(x, th):
        mu, sg = th
        return -0.5 * _LOG_2PI - np.log(sg) - 0.5 * ((x - mu) / sg) ** 2

    def score(x, th):
        mu, sg = th
        z = (np.asarray(x, dtype=float) - mu) / sg
        return np.stack([z / sg, (z**2 - 1.0) / sg], axis=-1)

    return FamilyModel(
        name="normal_location_scale",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=ProductSupport(
            (ProductComponent("normal", lambda th: (th[0], th[1])),),
            transform=_flatten_first,
        ),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.normal(th[0], th[1], size=size),
        exact_fisher=lambda th: [[1.0 / th[1] ** 2, 0.0], [0.0, 2.0 / th[1] ** 2]],
        score=score,
        default_anchor=(0.0, 1.0),
        diagnostic_box=((-2.0, 2.0), (0.5, 3.0)),
        sufficient_stat=lambda data: (
            len(np.atleast_1d(data)),
            float(np.sum(data)),
            float(np.sum(np.square(data))),
        ),
    )


def symmetric_location_family(logf0, name: str, fisher_constant=None) -> FamilyModel:
    """Location family f(x - theta) for a user-supplied symmetric log-density.

    ``logf0`` must be vectorized and satisfy logf0(u) == logf0(-u).
    """

    def logf(x, th):
        return logf0(np.asarray(x, dtype=float) - th[0])

    exact_fisher = None
    if fisher_constant is not None:
        exact_fisher = lambda th: [[fisher_constant]]  # noqa: E731

    return FamilyModel(
        name=name,
        space=ParameterSpace(((-np.inf, np.inf),)),
        observation_kind="continuous",
        support=IntervalSupport(-np.inf, np.inf),
        log_density=logf,
        sampler=None,
        exact_fisher=exact_fisher,
        exact_g3=lambda th: 0.0,
        default_anchor=(0.0,),
        diagnostic_box=((-2.0, 2.0),),
        mle_guess=lambda data: (float(np.median(data)),),
    )


@_register("logistic_location")
def logistic_location() -> FamilyModel:
    """Location family with standard-logistic errors (Fisher information 1/3)."""

    def logf0(u):
        return -u - 2.0 * np.log1p(np.exp(-u))

    fam = symmetric_location_family(logf0, "logistic_location", fisher_constant=1.0 / 3.0)
    return replace(
        fam,
        sampler=lambda th, rng, size=None: rng.logistic(th[0], 1.0, size=size),
        score=lambda x, th: np.asarray(
            2.0 * expit(np.asarray(x, dtype=float) - th[0]) - 1.0
        )[..., None],
    )


# ---------------------------------------------------------------------------
# Scale families
# ---------------------------------------------------------------------------


@_register("exponential_scale")
def exponential_scale() -> FamilyModel:
    """Exponential with scale theta: density exp(-x/theta)/theta on x > 0."""

    def logf(x, th):
        t = th[0]
        return -np.log(t) - x / t

    dlog = {
        1: lambda x, th: -1.0 / th[0] + x / th[0] ** 2,
        2: lambda x, th: 1.0 / th[0] ** 2 - 2.0 * x / th[0] ** 3,
        3: lambda x, th: -2.0 / th[0] ** 3 + 6.0 * x / th[0] ** 4,
        4: lambda x, th: 6.0 / th[0] ** 4 - 24.0 * x / th[0] ** 5,
    }

    return FamilyModel(
        name="exponential_scale",
        space=ParameterSpace(((0.0, np.inf),)),
        observation_kind="continuous",
        support=IntervalSupport(0.0, np.inf),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.exponential(th[0], size=size),
        exact_fisher=lambda th: [[1.0 / th[0] ** 2]],
        exact_g3=lambda th: -4.0 / th[0] ** 3,
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(1.0,),
        diagnostic_box=((0.5, 4.0),),
        mle_guess=lambda data: (max(float(np.mean(data)), 1e-9),),
        loglik_grid=lambda data, grid: -len(np.atleast_1d(data)) * np.log(grid)
        - np.sum(data) / grid,
        sufficient_stat=lambda data: (len(np.atleast_1d(data)), float(np.sum(data))),
    )


def scale_family(logf0, name: str, sampler0=None) -> FamilyModel:
    """Scale family f(x/theta)/theta on x > 0 for a user-supplied density."""

    def logf(x, th):
        t = th[0]
        return logf0(np.asarray(x, dtype=float) / t) - np.log(t)

    sampler = None
    if sampler0 is not None:
        sampler = lambda th, rng, size=None: th[0] * sampler0(rng, size)  # noqa: E731
    return FamilyModel(
        name=name,
        space=ParameterSpace(((0.0, np.inf),)),
        observation_kind="continuous",
        support=IntervalSupport(0.0, np.inf),
        log_density=logf,
        sampler=sampler,
        default_anchor=(1.0,),
        diagnostic_box=((0.5, 4.0),),
        mle_guess=lambda data: (float(np.sqrt(np.mean(np.square(data)))),),
    )


@_register("halfnormal_scale")
def halfnormal_scale() -> FamilyModel:
    """Scale family with standard half-normal shape."""

    def logf(x, th):
        t = th[0]
        return 0.5 * np.log(2.0 / np.pi) - np.log(t) - 0.5 * (x / t) ** 2

    dlog = {
        1: lambda x, th: -1.0 / th[0] + x**2 / th[0] ** 3,
        2: lambda x, th: 1.0 / th[0] ** 2 - 3.0 * x**2 / th[0] ** 4,
        3: lambda x, th: -2.0 / th[0] ** 3 + 12.0 * x**2 / th[0] ** 5,
        4: lambda x, th: 6.0 / th[0] ** 4 - 60.0 * x**2 / th[0] ** 6,
    }

    return FamilyModel(
        name="halfnormal_scale",
        space=ParameterSpace(((0.0, np.inf),)),
        observation_kind="continuous",
        support=IntervalSupport(0.0, np.inf),
        log_density=logf,
        sampler=lambda th, rng, size=None: th[0] * np.abs(rng.normal(size=size)),
        exact_fisher=lambda th: [[2.0 / th[0] ** 2]],
        exact_g3=lambda th: -10.0 / th[0] ** 3,
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(1.0,),
        diagnostic_box=((0.5, 4.0),),
        mle_guess=lambda data: (float(np.sqrt(np.mean(np.square(data)))),),
    )


# ---------------------------------------------------------------------------
# Bivariate-normal correlation
# ---------------------------------------------------------------------------


@_register("bvn_rho")
def bvn_rho() -> FamilyModel:
    """Correlation of a standard bivariate normal pair; one observation
    is the pair (x1, x2)."""

    def logf(x, th):
        x1, x2, ndim = _pairs(x)
        r = th[0]
        v = 1.0 - r**2
        q = x1**2 - 2.0 * r * x1 * x2 + x2**2
        out = -_LOG_2PI - 0.5 * np.log(v) - q / (2.0 * v)
        return out if ndim > 1 else float(out[0])

    def score(x, th):
        x1, x2, ndim = _pairs(x)
        r = th[0]
        v = 1.0 - r**2
        q = x1**2 - 2.0 * r * x1 * x2 + x2**2
        s = r / v + (x1 * x2 * v - r * q) / v**2
        return s[..., None] if ndim > 1 else np.array([s[0]])

    def dlog3(x, th):
        # third derivative in rho of the pair log-density
        x1, x2, ndim = _pairs(x)
        r = th[0]
        v = 1.0 - r**2
        a = x1**2 + x2**2
        b = x1 * x2
        q = a - 2.0 * r * b
        n = b * v - r * q
        nprime = 2.0 * b * r - a
        out = (
            2.0 * r / v**2
            + 4.0 * r * (1.0 + r**2) / v**3
            + 2.0 * b / v**2
            + 4.0 * r * (2.0 * b * r - a) / v**3
            + 4.0 * (n + r * nprime) / v**3
            + 24.0 * r**2 * n / v**4
        )
        return out if ndim > 1 else float(out[0])

    def sample(th, rng, size=None):
        r = th[0]
        n = 1 if size is None else int(size)
        z = rng.normal(size=(n, 2))
        x = np.stack([z[:, 0], r * z[:, 0] + np.sqrt(1 - r**2) * z[:, 1]], axis=-1)
        return x[0] if size is None else x

    def transform(th, base):
        r = th[0]
        return np.stack(
            [base[:, 0], r * base[:, 0] + np.sqrt(1 - r**2) * base[:, 1]], axis=-1
        )

    return FamilyModel(
        name="bvn_rho",
        space=ParameterSpace(((-1.0, 1.0),)),
        observation_kind="continuous",
        support=ProductSupport(
            (
                ProductComponent("normal", lambda th: (0.0, 1.0)),
                ProductComponent("normal", lambda th: (0.0, 1.0)),
            ),
            transform=transform,
        ),
        log_density=logf,
        sampler=sample,
        exact_fisher=lambda th: [[(1.0 + th[0] ** 2) / (1.0 - th[0] ** 2) ** 2]],
        exact_g3=lambda th: 4.0 * th[0] * (3.0 + th[0] ** 2) / (1.0 - th[0] ** 2) ** 3,
        score=score,
        dlog={1: lambda x, th: score(x, th)[..., 0], 3: dlog3},
        default_anchor=(0.0,),
        diagnostic_box=((-0.75, 0.75),),
        mle_guess=lambda data: (
            float(np.clip(np.mean(np.prod(np.atleast_2d(data), axis=1)), -0.99, 0.99)),
        ),
    )


# ---------------------------------------------------------------------------
# Noncentrality (mu/sigma) families
# ---------------------------------------------------------------------------


@_register("noncentrality")
def noncentrality() -> FamilyModel:
    """One observation x ~ N(theta*sigma, sigma^2); parameters (theta, sigma)."""

    def logf(x, th):
        t, sg = th
        return -0.5 * _LOG_2PI - np.log(sg) - 0.5 * (x / sg - t) ** 2

    def score(x, th):
        t, sg = th
        z = np.asarray(x, dtype=float) / sg - t
        return np.stack([z, (z**2 + t * z - 1.0) / sg], axis=-1)

    return FamilyModel(
        name="noncentrality",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=ProductSupport(
            (ProductComponent("normal", lambda th: (th[0] * th[1], th[1])),),
            transform=_flatten_first,
        ),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.normal(th[0] * th[1], th[1], size=size),
        exact_fisher=lambda th: [
            [1.0, th[0] / th[1]],
            [th[0] / th[1], (th[0] ** 2 + 2.0) / th[1] ** 2],
        ],
        score=score,
        default_anchor=(0.0, 1.0),
        diagnostic_box=((-1.5, 1.5), (0.7, 3.0)),
    )


@_register("noncentrality_orthogonal")
def noncentrality_orthogonal() -> FamilyModel:
    """Noncentrality family in the orthogonalized parameters (theta, phi)
    with phi = sigma * sqrt(theta^2 + 2)."""

    def sigma_of(th):
        return th[1] / np.sqrt(th[0] ** 2 + 2.0)

    def logf(x, th):
        t = th[0]
        sg = sigma_of(th)
        return -0.5 * _LOG_2PI - np.log(sg) - 0.5 * (x / sg - t) ** 2

    def score(x, th):
        t, phi = th
        sg = sigma_of(th)
        u = np.asarray(x, dtype=float) / sg - t
        mfac = -t / (t**2 + 2.0)
        a = u**2 + t * u - 1.0
        return np.stack([mfac * a + u, a / phi], axis=-1)

    return FamilyModel(
        name="noncentrality_orthogonal",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=ProductSupport(
            (ProductComponent("normal", lambda th: (th[0] * sigma_of(th), sigma_of(th))),),
            transform=_flatten_first,
        ),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.normal(
            th[0] * sigma_of(th), sigma_of(th), size=size
        ),
        exact_fisher=lambda th: [
            [2.0 / (th[0] ** 2 + 2.0), 0.0],
            [0.0, (th[0] ** 2 + 2.0) / th[1] ** 2],
        ],
        score=score,
        default_anchor=(0.0, np.sqrt(2.0)),
        diagnostic_box=((-1.5, 1.5), (0.7, 3.0)),
    )


# ---------------------------------------------------------------------------
# Fieller--Creasy (ratio of normal means)
# ---------------------------------------------------------------------------


@_register("fieller_creasy")
def fieller_creasy() -> FamilyModel:
    """One observation is the pair (x1, x2), x1 ~ N(mu, 1), x2 ~ N(theta*mu, 1);
    interest is the mean ratio theta."""

    def logf(x, th):
        x1, x2, ndim = _pairs(x)
        t, mu = th
        out = -_LOG_2PI - 0.5 * (x1 - mu) ** 2 - 0.5 * (x2 - t * mu) ** 2
        return out if ndim > 1 else float(out[0])

    def score(x, th):
        x1, x2, ndim = _pairs(x)
        t, mu = th
        z1 = x1 - mu
        z2 = x2 - t * mu
        s = np.stack([z2 * mu, z1 + t * z2], axis=-1)
        return s if ndim > 1 else s[0]

    def transform(th, base):
        t, mu = th
        return np.stack([mu + base[:, 0], t * mu + base[:, 1]], axis=-1)

    def sample(th, rng, size=None):
        t, mu = th
        n = 1 if size is None else int(size)
        x = np.stack(
            [rng.normal(mu, 1.0, size=n), rng.normal(t * mu, 1.0, size=n)], axis=-1
        )
        return x[0] if size is None else x

    return FamilyModel(
        name="fieller_creasy",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=ProductSupport(
            (
                ProductComponent("normal", lambda th: (0.0, 1.0)),
                ProductComponent("normal", lambda th: (0.0, 1.0)),
            ),
            transform=transform,
        ),
        log_density=logf,
        sampler=sample,
        exact_fisher=lambda th: [
            [th[1] ** 2, th[1] * th[0]],
            [th[1] * th[0], 1.0 + th[0] ** 2],
        ],
        score=score,
        default_anchor=(1.0, 1.0),
        diagnostic_box=((0.3, 2.0), (0.5, 2.5)),
    )


@_register("fieller_creasy_orthogonal")
def fieller_creasy_orthogonal() -> FamilyModel:
    """Fieller--Creasy pair in the orthogonalized parameters (theta, phi)
    with phi = mu * sqrt(1 + theta^2)."""

    def mu_of(th):
        return th[1] / np.sqrt(1.0 + th[0] ** 2)

    def logf(x, th):
        x1, x2, ndim = _pairs(x)
        t = th[0]
        mu = mu_of(th)
        out = -_LOG_2PI - 0.5 * (x1 - mu) ** 2 - 0.5 * (x2 - t * mu) ** 2
        return out if ndim > 1 else float(out[0])

    def score(x, th):
        x1, x2, ndim = _pairs(x)
        t, phi = th
        s = 1.0 / np.sqrt(1.0 + t**2)
        mu = phi * s
        z1 = x1 - mu
        z2 = x2 - t * mu
        out = np.stack([phi * s**3 * (z2 - t * z1), s * (z1 + t * z2)], axis=-1)
        return out if ndim > 1 else out[0]

    def transform(th, base):
        t = th[0]
        mu = mu_of(th)
        return np.stack([mu + base[:, 0], t * mu + base[:, 1]], axis=-1)

    def sample(th, rng, size=None):
        t = th[0]
        mu = mu_of(th)
        n = 1 if size is None else int(size)
        x = np.stack(
            [rng.normal(mu, 1.0, size=n), rng.normal(t * mu, 1.0, size=n)], axis=-1
        )
        return x[0] if size is None else x

    return FamilyModel(
        name="fieller_creasy_orthogonal",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=ProductSupport(
            (
                ProductComponent("normal", lambda th: (0.0, 1.0)),
                ProductComponent("normal", lambda th: (0.0, 1.0)),
            ),
            transform=transform,
        ),
        log_density=logf,
        sampler=sample,
        exact_fisher=lambda th: [
            [th[1] ** 2 / (1.0 + th[0] ** 2) ** 2, 0.0],
            [0.0, 1.0],
        ],
        score=score,
        default_anchor=(0.0, 1.0),
        diagnostic_box=((-1.5, 1.5), (0.5, 2.5)),
    )


# ---------------------------------------------------------------------------
# Structured-array families
# ---------------------------------------------------------------------------


@_register("neyman_scott")
def neyman_scott(n_cells: int = 3, k: int = 2) -> FamilyModel:
    """Balanced one-way layout with cell count growing with the data:
    X_ij ~ N(theta_i, v), j = 1..k, i = 1..n_cells, v = sigma^2.

    One observation is the sufficient statistic vector
    (xbar_1, ..., xbar_n, W) with W the pooled within-cell sum of squares,
    W ~ v * chi^2 on n_cells*(k-1) degrees of freedom.
    """
    n_cells = int(n_cells)
    k = int(k)
    a = 0.5 * n_cells * (k - 1)

    def logf(x, th):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        means = np.asarray(th[:n_cells])
        v = th[n_cells]
        xbar = x[:, :n_cells]
        w = x[:, n_cells]
        ll = (
            -0.5 * n_cells * np.log(2.0 * np.pi * v / k)
            - 0.5 * k * np.sum((xbar - means) ** 2, axis=1) / v
            + (a - 1.0) * np.log(w)
            - w / (2.0 * v)
            - a * np.log(2.0 * v)
            - gammaln(a)
        )
        return ll if np.asarray(x).ndim > 1 else float(ll[0])

    def score(x, th):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        means = np.asarray(th[:n_cells])
        v = th[n_cells]
        xbar = x[:, :n_cells]
        w = x[:, n_cells]
        s_means = k * (xbar - means) / v
        q = k * np.sum((xbar - means) ** 2, axis=1) + w
        s_v = -0.5 * n_cells / v - a / v + q / (2.0 * v**2)
        return np.concatenate([s_means, s_v[:, None]], axis=1)

    def components():
        comps = [
            ProductComponent("normal", lambda th, i=i: (th[i], np.sqrt(th[n_cells] / k)))
            for i in range(n_cells)
        ]
        comps.append(ProductComponent("gamma", lambda th: (a, 2.0 * th[n_cells])))
        return tuple(comps)

    def sample(th, rng, size=None):
        means = np.asarray(th[:n_cells])
        v = th[n_cells]
        n = 1 if size is None else int(size)
        arr = rng.normal(means[None, :, None], np.sqrt(v), size=(n, n_cells, k))
        xbar = arr.mean(axis=2)
        w = np.sum((arr - xbar[:, :, None]) ** 2, axis=(1, 2))
        out = np.concatenate([xbar, w[:, None]], axis=1)
        return out[0] if size is None else out

    boxes = tuple([(-np.inf, np.inf)] * n_cells + [(0.0, np.inf)])
    return FamilyModel(
        name=f"neyman_scott(n={n_cells},k={k})",
        space=ParameterSpace(boxes),
        observation_kind="continuous",
        support=ProductSupport(components(), nodes=12),
        log_density=logf,
        sampler=sample,
        exact_fisher=lambda th: np.diag(
            [k / th[n_cells]] * n_cells + [0.5 * n_cells * k / th[n_cells] ** 2]
        ),
        score=score,
        interest_index=n_cells,
        default_anchor=tuple([0.0] * n_cells + [1.0]),
        diagnostic_box=tuple([(-1.0, 1.0)] * n_cells + [(0.5, 2.0)]),
        structure={"n_cells": n_cells, "k": k},
    )


@_register("random_effects")
def random_effects(k_groups: int = 5, n_per: int = 4) -> FamilyModel:
    """Balanced one-way random effects model Y_ij = m + alpha_i + e_ij
    (i = 1..k groups, j = 1..n per group) in the parameters
    (m, r, u) = (mean, 1/sigma^2, sigma^2 / (n sigma_alpha^2 + sigma^2)).

    One observation is the sufficient statistic vector (Ybar, T, S).
    The catalog information matrix is the k * diag(n r u, n/(2 r^2),
    1/(2 u^2)) form under which the standard reference-prior results
    for this model are stated; see the notes field.
    """
    k = int(k_groups)
    n = int(n_per)

    def logf(x, th):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        m, r, u = th
        ybar, t, s = x[:, 0], x[:, 1], x[:, 2]
        ll = (
            0.5 * n * k * np.log(r)
            + 0.5 * k * np.log(u)
            - 0.5 * r * (n * k * u * (ybar - m) ** 2 + u * t + s)
        )
        return ll if np.asarray(x).ndim > 1 else float(ll[0])

    def score(x, th):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        m, r, u = th
        ybar, t, s = x[:, 0], x[:, 1], x[:, 2]
        s_m = r * n * k * u * (ybar - m)
        s_r = 0.5 * n * k / r - 0.5 * (n * k * u * (ybar - m) ** 2 + u * t + s)
        s_u = 0.5 * k / u - 0.5 * r * (n * k * (ybar - m) ** 2 + t)
        return np.stack([s_m, s_r, s_u], axis=-1)

    def sample(th, rng, size=None):
        m, r, u = th
        sigma2 = 1.0 / r
        b = 1.0 / (r * u)  # n*sigma_alpha^2 + sigma^2
        nrep = 1 if size is None else int(size)
        ybar = rng.normal(m, np.sqrt(b / (n * k)), size=nrep)
        t = b * rng.chisquare(k - 1, size=nrep)
        s = sigma2 * rng.chisquare(k * (n - 1), size=nrep)
        out = np.stack([ybar, t, s], axis=-1)
        return out[0] if size is None else out

    def h_one(_):
        return 1.0

    factorizations = {
        0: {"h11": h_one, "h22": h_one},
        1: {"h11": lambda r: r**-2, "h22": h_one},
        2: {"h11": lambda u: u**-2, "h22": h_one},
    }

    support = ProductSupport(
        (
            ProductComponent(
                "normal", lambda th: (th[0], np.sqrt(1.0 / (th[1] * th[2] * n * k)))
            ),
            ProductComponent("gamma", lambda th: (0.5 * (k - 1), 2.0 / (th[1] * th[2]))),
            ProductComponent("gamma", lambda th: (0.5 * k * (n - 1), 2.0 / th[1])),
        )
    )

    return FamilyModel(
        name=f"random_effects(k={k},n={n})",
        space=ParameterSpace(((-np.inf, np.inf), (0.0, np.inf), (0.0, 1.0))),
        observation_kind="continuous",
        support=support,
        log_density=logf,
        sampler=sample,
        exact_fisher=lambda th: np.diag(
            [k * n * th[1] * th[2], 0.5 * k * n / th[1] ** 2, 0.5 * k / th[2] ** 2]
        ),
        score=score,
        interest_index=0,
        default_anchor=(0.0, 1.0, 0.5),
        diagnostic_box=((-1.0, 1.0), (0.5, 2.0), (0.2, 0.8)),
        structure={"k_groups": k, "n_per": n, "factorizations": factorizations},
        expectation_supported=False,
        notes=(
            "Information matrix stored in the diagonal form under which the "
            "standard reference-prior results for this model are quoted; the "
            "(r, u) block of the statistic likelihood also carries an "
            "off-diagonal term k/(2ru), so the generic expectation engine is "
            "disabled for this family and the two-group factorizations are "
            "supplied explicitly."
        ),
    )


# ---------------------------------------------------------------------------
# Gamma with mean parameterization
# ---------------------------------------------------------------------------


@_register("gamma_mean")
def gamma_mean() -> FamilyModel:
    """Gamma observations parameterized by (mu, lam) = (mean, shape):
    density (lam/mu)^lam y^(lam-1) exp(-lam y / mu) / Gamma(lam)."""

    def logf(x, th):
        mu, lam = th
        return (
            lam * np.log(lam)
            - gammaln(lam)
            - lam * np.log(mu)
            + (lam - 1.0) * np.log(x)
            - lam * x / mu
        )

    def score(x, th):
        mu, lam = th
        v = np.asarray(x, dtype=float) / mu
        s_mu = (lam / mu) * (v - 1.0)
        s_lam = np.log(lam) + 1.0 - psi(lam) - v + np.log(v)
        return np.stack([s_mu, s_lam], axis=-1)

    return FamilyModel(
        name="gamma_mean",
        space=ParameterSpace(((0.0, np.inf), (0.0, np.inf))),
        observation_kind="continuous",
        support=IntervalSupport(0.0, np.inf),
        log_density=logf,
        sampler=lambda th, rng, size=None: rng.gamma(th[1], th[0] / th[1], size=size),
        exact_fisher=lambda th: [
            [th[1] / th[0] ** 2, 0.0],
            [0.0, polygamma(1, th[1]) - 1.0 / th[1]],
        ],
        score=score,
        default_anchor=(1.0, 1.0),
        diagnostic_box=((0.6, 2.5), (0.8, 3.0)),
    )


# ---------------------------------------------------------------------------
# Exponential family with exponential information
# ---------------------------------------------------------------------------


@_register("exp_family_expc")
def exp_family_expc(c: float = 1.0) -> FamilyModel:
    """Canonical exponential family with Fisher information exp(c*theta).

    Realized as X = c*K with K ~ Poisson(exp(c*theta)/c^2); the cumulant
    function is exp(c*theta)/c^2, so I(theta) = exp(c*theta) exactly.
    """
    c = float(c)
    if c <= 0:
        raise UsageError("exp_family_expc requires c > 0")

    def mean_count(th):
        return np.exp(c * th[0]) / c**2

    def logf(x, th):
        kk = np.asarray(x, dtype=float) / c
        mu = mean_count(th)
        return kk * np.log(mu) - mu - gammaln(kk + 1.0)

    def const(val, x):
        return np.broadcast_to(val, np.shape(x)).astype(float) if np.ndim(x) else val

    dlog = {
        1: lambda x, th: np.asarray(x, dtype=float) - np.exp(c * th[0]) / c,
        2: lambda x, th: const(-np.exp(c * th[0]), x),
        3: lambda x, th: const(-c * np.exp(c * th[0]), x),
        4: lambda x, th: const(-(c**2) * np.exp(c * th[0]), x),
    }

    return FamilyModel(
        name=f"exp_family_expc(c={c:g})",
        space=ParameterSpace(((-np.inf, np.inf),)),
        observation_kind="discrete",
        support=LatticeSupport(scale=c, mode_of=lambda th: mean_count(th)),
        log_density=logf,
        sampler=lambda th, rng, size=None: c * rng.poisson(mean_count(th), size=size),
        exact_fisher=lambda th: [[np.exp(c * th[0])]],
        exact_g3=lambda th: c * np.exp(c * th[0]),
        score=lambda x, th: np.asarray(dlog[1](np.asarray(x, dtype=float), th))[..., None],
        dlog=dlog,
        default_anchor=(0.0,),
        diagnostic_box=((-0.5, 1.0),),
        mle_guess=lambda data: (
            float(np.log(max(np.mean(data) * c, 1e-9)) / c),
        ),
        structure={"c": c},
    )


def describe(fid: str) -> dict:
    """Catalog metadata for the CLI listing."""
    fam = get_family(fid)
    return {
        "id": fid,
        "name": fam.name,
        "dim": fam.dim,
        "boxes": [list(b) for b in fam.space.boxes],
        "observation_kind": fam.observation_kind,
        "exact_fisher": fam.exact_fisher is not None,
        "exact_g3": fam.exact_g3 is not None,
        "interest_index": fam.interest_index,
    }
