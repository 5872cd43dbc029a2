"""Parametric families and the expectation engine.

A :class:`FamilyModel` bundles everything downstream work needs from a
parametric family: the one-observation log-density and its derivatives
in the parameter, a sampler, and an expectation engine over the sample
space.  Expected-information quantities (Fisher matrix, its Schur
complement, third-derivative functionals) are computed here.

Expectations are routed by the support kind:

* ``finite``   -- exact sum over the support points;
* ``lattice``  -- summation with a geometric tail bound below 1e-12;
* ``interval`` -- adaptive Gauss--Kronrod quadrature (absolute
  tolerance 1e-10);
* ``product``  -- tensor Gaussian rules matched to independent normal /
  gamma base variables, optionally pushed through a transform to the
  observation space (used for paired-observation and sufficient-
  statistic families, where integrands are polynomial and the rules
  are exact).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import derivatives as dv
from . import quadrature as qd
from .errors import ConditioningError, DomainError
from .space import ParameterSpace


# ---------------------------------------------------------------------------
# Support descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSupport:
    """Fixed finite set of observation values."""

    points: tuple

    kind = "finite"

    def contains(self, x) -> np.ndarray:
        return np.isin(np.asarray(x, dtype=float), np.asarray(self.points, dtype=float))


@dataclass(frozen=True)
class LatticeSupport:
    """Points ``offset + scale * k`` for k = 0, 1, 2, ...

    ``mode_of`` maps a parameter point to (roughly) the index where the
    probability mass peaks, which steers the tail-bounded summation.
    """

    scale: float = 1.0
    offset: float = 0.0
    mode_of: Optional[Callable] = None

    kind = "lattice"

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = (x - self.offset) / self.scale
        return (k >= -1e-9) & (np.abs(k - np.round(k)) < 1e-9)


@dataclass(frozen=True)
class IntervalSupport:
    """Continuous scalar observations on an open interval."""

    lo: float = -np.inf
    hi: float = np.inf

    kind = "interval"

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)


@dataclass(frozen=True)
class ProductComponent:
    """One independent base variable of a product support.

    ``dist`` is "normal" (params -> (center, sd)) or "gamma"
    (params -> (shape, scale)).
    """

    dist: str
    params: Callable


@dataclass(frozen=True)
class ProductSupport:
    """Observation built from independent normal / gamma components.

    The observation vector is ``transform(theta, components)`` when a
    transform is given, else the component vector itself.  ``nodes``
    controls the per-component Gaussian rule order.
    """

    components: tuple
    transform: Optional[Callable] = None
    nodes: int = 24

    kind = "product"

    @property
    def obs_dim(self) -> int:
        return len(self.components)

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ok = np.ones(x.shape[0], dtype=bool)
        if self.transform is None:
            for i, comp in enumerate(self.components):
                if comp.dist == "gamma":
                    ok &= x[:, i] > 0
        return ok


# ---------------------------------------------------------------------------
# Family model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyModel:
    """Immutable description of a parametric family.

    Only ``name``, ``space``, ``observation_kind``, ``support``,
    ``log_density`` and ``sampler`` are required; the remaining hooks
    (analytic scores and higher derivatives, closed-form information,
    starting values, marginal-posterior recipes) let the catalog trade
    generic numerics for exact formulas where they are known.
    """

    name: str
    space: ParameterSpace
    observation_kind: str  # "discrete" | "continuous"
    support: object
    log_density: Callable  # (x, theta) -> array matching x's leading shape
    sampler: Callable  # (theta, rng, size) -> observations
    exact_fisher: Optional[Callable] = None
    exact_g3: Optional[Callable] = None
    interest_index: int = 0
    score: Optional[Callable] = None  # (x, theta) -> (..., dim)
    dlog: dict = field(default_factory=dict)  # order -> (x, theta) -> d^i l/dtheta^i
    default_anchor: Optional[tuple] = None
    diagnostic_box: Optional[tuple] = None  # finite box used by default grids
    mle_guess: Optional[Callable] = None
    loglik_grid: Optional[Callable] = None  # (data, grid) -> summed loglik per grid
    sufficient_stat: Optional[Callable] = None
    marginals: dict = field(default_factory=dict)  # prior tag -> recipe
    structure: dict = field(default_factory=dict)  # fixed structural constants
    expectation_supported: bool = True
    notes: str = ""

    @property
    def dim(self) -> int:
        return self.space.dim

    def require_point(self, theta) -> np.ndarray:
        return self.space.require_interior(theta)

    def grid(self, n: int = 33) -> np.ndarray:
        """Default diagnostic grid (finite box if provided, else the
        mapped grid of the full space)."""
        if self.diagnostic_box is not None:
            axes = [np.linspace(lo, hi, n) for lo, hi in self.diagnostic_box]
            if self.dim == 1:
                return axes[0]
            mesh = np.meshgrid(*axes, indexing="ij")
            return np.stack([m.ravel() for m in mesh], axis=-1)
        return self.space.grid(n)


# ---------------------------------------------------------------------------
# Basic evaluation
# ---------------------------------------------------------------------------


def log_density(family: FamilyModel, x, theta) -> np.ndarray:
    """Validated one-observation log-density.

    Raises ``DomainError`` for out-of-support observations and
    ``BoundaryError`` for parameter points on or too near the boundary.
    """
    theta = family.require_point(theta)
    inside = family.support.contains(x)
    if not np.all(inside):
        bad = np.atleast_1d(np.asarray(x))[~np.atleast_1d(inside)]
        raise DomainError(f"observations outside the support of {family.name}: {bad[:5]}")
    val = family.log_density(np.asarray(x, dtype=float), theta)
    val = np.asarray(val, dtype=float)
    if not np.all(np.isfinite(val)):
        raise DomainError(f"non-finite log-density for {family.name}")
    return val if val.ndim else float(val)


def derivatives(family: FamilyModel, x, theta, order: int) -> dv.DerivativeBundle:
    """Per-observation log-density derivatives d^i l / d theta^i, i <= order.

    Scalar-parameter families only.  Analytic formulas from the catalog
    are used when present; otherwise central differences with one
    Richardson level, with per-entry error estimates.
    """
    if family.dim != 1:
        raise DomainError("derivative bundles are defined for scalar parameters")
    if not 1 <= order <= 4:
        raise DomainError("order must be in 1..4")
    theta = family.require_point(theta)
    t0 = float(theta[0])

    values, errors = {}, {}
    analytic = all(i in family.dlog for i in range(1, order + 1))
    if analytic:
        for i in range(1, order + 1):
            values[i] = float(np.asarray(family.dlog[i](x, theta)))
            errors[i] = None
        return dv.DerivativeBundle(theta, values, errors, "analytic")

    def f(t):
        return float(np.asarray(family.log_density(np.asarray(x, dtype=float), np.array([t]))))

    for i in range(1, order + 1):
        h = dv.default_step(t0, i)
        dv.require_room(family.space, theta, 0, i, h)
        values[i], errors[i] = dv.central_derivative(f, t0, i, h)
    return dv.DerivativeBundle(theta, values, errors, "finite-difference")


# ---------------------------------------------------------------------------
# Expectation engine
# ---------------------------------------------------------------------------


def expectation(family: FamilyModel, fn, theta) -> float:
    """E[fn(X) | theta] under the family's observation distribution.

    ``fn`` must be vectorized over observations (leading axis; for
    multi-component observations it receives an ``(N, obs_dim)`` array).
    """
    if not family.expectation_supported:
        raise DomainError(f"family {family.name} does not support the expectation engine")
    theta = family.require_point(theta)
    sup = family.support

    if sup.kind == "finite":
        xs = np.asarray(sup.points, dtype=float)
        w = np.exp(family.log_density(xs, theta))
        return float(w @ np.asarray(fn(xs), dtype=float))

    if sup.kind == "lattice":
        mode = int(sup.mode_of(theta)) if sup.mode_of is not None else 0

        def term(ks):
            xs = sup.offset + sup.scale * ks.astype(float)
            return np.exp(family.log_density(xs, theta)) * np.asarray(fn(xs), dtype=float)

        return qd.lattice_expectation(term, mode)

    if sup.kind == "interval":

        def integrand(x):
            xv = np.asarray([x], dtype=float)
            return float(np.exp(family.log_density(xv, theta)) * np.asarray(fn(xv), dtype=float))

        return qd.integrate_interval(integrand, sup.lo, sup.hi)

    if sup.kind == "product":
        rules = []
        posts = []
        for comp in sup.components:
            p = comp.params(theta)
            if comp.dist == "normal":
                z, w = qd.standard_normal_rule(sup.nodes)
                rules.append((z, w))
                posts.append(("normal", p))
            elif comp.dist == "gamma":
                shape, scale = p
                v, w = qd.gamma_rule(shape, sup.nodes)
                rules.append((v, w))
                posts.append(("gamma", (shape, scale)))
            else:
                raise DomainError(f"unknown product component {comp.dist}")
        nodes, weights = qd.tensor_rule(rules)
        cols = []
        for node, (dist, p) in zip(nodes, posts):
            if dist == "normal":
                center, sd = p
                cols.append(center + sd * node)
            else:
                cols.append(p[1] * node)
        base = np.stack(cols, axis=-1)
        obs = sup.transform(theta, base) if sup.transform is not None else base
        return float(weights @ np.asarray(fn(obs), dtype=float))

    raise DomainError(f"unknown support kind {sup.kind}")


def _score(family: FamilyModel, x, theta) -> np.ndarray:
    """Per-observation score vector(s), analytic when available."""
    if family.score is not None:
        return np.asarray(family.score(x, theta), dtype=float)
    x = np.asarray(x, dtype=float)

    def comp(i):
        def f(p):
            return family.log_density(x, p)

        h = dv.default_step(theta[i], 1)
        ei = np.zeros(family.dim)
        ei[i] = 1.0
        coarse = (f(theta + h * ei) - f(theta - h * ei)) / (2 * h)
        fine = (f(theta + 0.5 * h * ei) - f(theta - 0.5 * h * ei)) / h
        return (4.0 * fine - coarse) / 3.0

    return np.stack([np.asarray(comp(i), dtype=float) for i in range(family.dim)], axis=-1)


def _neg_hessian_entry(family: FamilyModel, theta, j: int, r: int):
    """Observation-wise -d^2 l / dtheta_j dtheta_r as a vectorized fn."""
    hj = dv.default_step(theta[j], 1)

    def fn(x):
        ej = np.zeros(family.dim)
        ej[j] = 1.0

        def score_r(p):
            return _score(family, x, p)[..., r]

        coarse = (score_r(theta + hj * ej) - score_r(theta - hj * ej)) / (2 * hj)
        fine = (score_r(theta + 0.5 * hj * ej) - score_r(theta - 0.5 * hj * ej)) / hj
        return -(4.0 * fine - coarse) / 3.0

    return fn


def fisher_information(family: FamilyModel, theta) -> np.ndarray:
    """Per-observation expected information E[-d^2 l] as a symmetric
    positive-definite matrix (closed form when the catalog has one)."""
    theta = family.require_point(theta)
    if family.exact_fisher is not None:
        mat = np.atleast_2d(np.asarray(family.exact_fisher(theta), dtype=float))
    else:
        d = family.dim
        mat = np.empty((d, d))
        for j in range(d):
            for r in range(j, d):
                mat[j, r] = mat[r, j] = expectation(
                    family, _neg_hessian_entry(family, theta, j, r), theta
                )
    mat = 0.5 * (mat + mat.T)
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        raise ConditioningError(
            f"Fisher information for {family.name} at {theta} is not positive definite",
            details={"theta": theta.tolist(), "matrix": mat.tolist(),
                     "eigenvalues": np.linalg.eigvalsh(mat).tolist()},
        ) from None
    return mat


def fisher_information_numeric(family: FamilyModel, theta) -> np.ndarray:
    """Information matrix from the expectation engine, ignoring any
    closed form (used to cross-check catalog formulas)."""
    theta = family.require_point(theta)
    d = family.dim
    mat = np.empty((d, d))
    for j in range(d):
        for r in range(j, d):
            mat[j, r] = mat[r, j] = expectation(
                family, _neg_hessian_entry(family, theta, j, r), theta
            )
    return 0.5 * (mat + mat.T)


def fisher_schur(family: FamilyModel, theta) -> float:
    """Information about the interest coordinate after adjusting for the
    others: I_11 - I_1n I_nn^{-1} I_n1 (scalar, positive)."""
    if family.dim < 2:
        raise DomainError("the Schur complement needs at least two parameters")
    theta = family.require_point(theta)
    mat = fisher_information(family, theta)
    i = family.interest_index
    rest = [j for j in range(family.dim) if j != i]
    i11 = mat[i, i]
    i12 = mat[i, rest]
    i22 = mat[np.ix_(rest, rest)]
    try:
        solve = np.linalg.solve(i22, i12)
    except np.linalg.LinAlgError:
        raise ConditioningError(
            f"nuisance information block of {family.name} is singular at {theta}",
            details={"block": i22.tolist()},
        ) from None
    val = float(i11 - i12 @ solve)
    if val <= 0:
        raise ConditioningError(
            f"Schur complement {val} is not positive at {theta}",
            details={"matrix": mat.tolist()},
        )
    return val


def _interest_dlog3(family: FamilyModel, theta):
    """Observation-wise third derivative along the interest coordinate."""
    i = family.interest_index
    if family.dim == 1 and 3 in family.dlog:
        return lambda x: np.asarray(family.dlog[3](x, theta), dtype=float)
    h = dv.default_step(theta[i], 3)
    dv.require_room(family.space, theta, i, 3, h)
    ei = np.zeros(family.dim)
    ei[i] = 1.0

    def fn(x):
        def f(step):
            return family.log_density(x, theta + step * ei)

        def stencil(hh):
            return (f(2 * hh) - 2.0 * f(hh) + 2.0 * f(-hh) - f(-2 * hh)) / (2.0 * hh**3)

        return (4.0 * stencil(h / 2) - stencil(h)) / 3.0

    return fn


def g3(family: FamilyModel, theta) -> float:
    """E[-d^3 log f / d theta_1^3 | theta] along the interest coordinate
    (closed form when the catalog has one)."""
    theta = family.require_point(theta)
    if family.exact_g3 is not None:
        return float(family.exact_g3(theta))
    fn = _interest_dlog3(family, theta)
    return -expectation(family, lambda x: fn(x), theta)


def score_moment(family: FamilyModel, theta, idx: tuple) -> float:
    """E[ prod_k (d log f / d theta_{idx_k}) | theta ] for an index tuple."""
    theta = family.require_point(theta)

    def fn(x):
        s = _score(family, x, theta)
        s = np.atleast_2d(s)
        out = np.ones(s.shape[0])
        for k in idx:
            out = out * s[:, k]
        return out

    return expectation(family, fn, theta)


def score_cube_expectation(family: FamilyModel, theta) -> float:
    """E[(d log f / d theta_1)^3 | theta] along the interest coordinate."""
    i = family.interest_index
    return score_moment(family, theta, (i, i, i))
