"""Numerical integration and summation backends.

Three kinds of expectation support live here:

* adaptive Gauss--Kronrod quadrature over a (possibly infinite) interval,
  delegated to QUADPACK via :func:`scipy.integrate.quad`;
* fixed-order Gaussian rules matched to a weight (Hermite for normal
  components, generalized Laguerre for gamma components) used for the
  product-statistic families, where the integrands are polynomials in
  the statistics and the rules are exact;
* tail-bounded summation over lattice supports.

All routines raise :class:`~priorforge.errors.IntegrationError` instead
of silently returning an inaccurate value.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate
from scipy.special import gammaln, roots_genlaguerre, roots_hermitenorm, roots_legendre

from .errors import IntegrationError

ABS_TOL = 1e-10


def integrate_interval(f, lo: float, hi: float, abs_tol: float = ABS_TOL) -> float:
    """Adaptive quadrature of a scalar function over (lo, hi).

    Infinite endpoints are handled by QUADPACK's own transformations.
    """
    value, err = integrate.quad(f, lo, hi, epsabs=abs_tol, epsrel=1e-10, limit=200)
    if not np.isfinite(value) or err > max(abs_tol, 1e-8 * abs(value)) * 50:
        raise IntegrationError(
            f"quadrature over ({lo}, {hi}) failed: value={value}, err={err}",
            interval=(lo, hi),
            estimate=value,
            error=err,
        )
    return value


def gauss_legendre_nodes(lo: float, hi: float, n: int):
    """Nodes and weights of the n-point Gauss--Legendre rule on [lo, hi]."""
    x, w = roots_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def integrate_panel_doubling(
    f, lo: float, hi: float, start: int = 64, rel_tol: float = 1e-9, max_doublings: int = 6
):
    """Vectorized Gauss--Legendre integral with node doubling.

    ``f`` must accept an array of abscissae.  The node count starts at
    ``start`` and doubles until the value changes by less than
    ``rel_tol`` in relative terms (absolute terms near zero).
    """
    n = start
    x, w = gauss_legendre_nodes(lo, hi, n)
    prev = float(w @ np.asarray(f(x), dtype=float))
    for _ in range(max_doublings):
        n *= 2
        x, w = gauss_legendre_nodes(lo, hi, n)
        cur = float(w @ np.asarray(f(x), dtype=float))
        if abs(cur - prev) <= rel_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise IntegrationError(
        f"panel integral on ({lo}, {hi}) did not stabilize at {n} nodes",
        interval=(lo, hi),
        estimate=prev,
    )


# ---------------------------------------------------------------------------
# Gaussian rules matched to probability weights
# ---------------------------------------------------------------------------


def standard_normal_rule(n: int = 24):
    """Nodes/weights with sum_i w_i f(x_i) = E[f(Z)], Z ~ N(0,1)."""
    x, w = roots_hermitenorm(n)
    return x, w / np.sqrt(2.0 * np.pi)


def gamma_rule(shape: float, n: int = 24):
    """Nodes/weights with sum_i w_i f(x_i) = E[f(V)], V ~ Gamma(shape, 1).

    Uses the generalized Gauss--Laguerre rule with alpha = shape - 1,
    which integrates x^(shape-1) e^(-x) exactly against polynomials.
    """
    x, w = roots_genlaguerre(n, shape - 1.0)
    return x, w / np.exp(gammaln(shape))


def tensor_rule(rules):
    """Tensor product of 1-D rules.

    ``rules`` is a sequence of (nodes, weights) pairs; returns a list of
    node arrays (one per dimension, all of the common product length)
    and the combined weight array.
    """
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    nodes = [g.ravel() for g in grids]
    weights = np.ones_like(nodes[0])
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    for wg in wgrids:
        weights = weights * wg.ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# Lattice sums
# ---------------------------------------------------------------------------


def lattice_expectation(term, mode: int, tail_tol: float = 1e-12, max_terms: int = 2_000_000):
    """Sum ``term(k)`` over k = 0, 1, 2, ... with a geometric tail bound.

    ``term`` must accept an integer array and return the summand values
    (probability times integrand).  Summation proceeds in blocks away
    from ``mode`` until the last block plus a geometric extrapolation of
    its decay is below ``tail_tol``.
    """
    block = max(64, 4 * int(np.sqrt(mode + 1.0)))
    total = 0.0
    k0 = 0
    last_block_mass = np.inf
    while k0 < max_terms:
        ks = np.arange(k0, k0 + block)
        vals = np.asarray(term(ks), dtype=float)
        total += float(vals.sum())
        tail_head = float(np.abs(vals[-8:]).sum())
        if k0 + block > mode and tail_head < tail_tol:
            # terms decay at least geometrically past the mode with ratio
            # bounded by the last observed ratio
            return total
        if k0 + block > mode and tail_head >= last_block_mass:
            raise IntegrationError("lattice sum is not decaying past the mode")
        last_block_mass = max(tail_head, tail_tol)
        k0 += block
    raise IntegrationError(f"lattice sum did not converge within {max_terms} terms")


def cumulative_simpson_integral(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cumulative integral of samples ``y`` over grid ``x`` with Simpson
    accuracy, starting at 0."""
    out = integrate.cumulative_simpson(y, x=x, initial=0.0)
    return np.asarray(out, dtype=float)
