"""Shared numeric kernels: bracketed root finding and 1-d quadrature.

Both routines are pure and deterministic; identical inputs give
bit-identical outputs.  The quadrature is a composite Gauss-Legendre rule
of fixed order with panel doubling, which is exact (up to rounding) for
the polynomial and piecewise-polynomial integrands used elsewhere in this
package.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInterval, NoBracket, NoConvergence

#: Gauss-Legendre order of one quadrature panel.  Exact for polynomials up
#: to degree 2*order - 1 = 47 on a single panel.
_GL_ORDER = 24

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

#: Hard cap on panel doublings before giving up.
_MAX_DOUBLINGS = 16

_TOL_ENV = "BCGAME_TOL"


@dataclass(frozen=True)
class Tolerance:
    """Absolute error target plus iteration budget for numeric routines."""

    abs_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def default_tolerance() -> Tolerance:
    """Tolerance used when callers pass none.

    The absolute tolerance may be overridden through the BCGAME_TOL
    environment variable; explicit Tolerance arguments always win.
    """
    raw = os.environ.get(_TOL_ENV)
    if raw is None:
        return Tolerance()
    return Tolerance(abs_tol=float(raw))


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance | None = None,
) -> float:
    """Root of a monotone function on [lo, hi] by bisection.

    Requires f(lo) and f(hi) of opposite sign (or zero).  Returns a point r
    with the final bracket width at most ``tol.abs_tol``; r always lies in
    [lo, hi].  Raises NoBracket when the endpoints do not straddle a sign
    change and NoConvergence when the iteration budget is exhausted.
    """
    tol = tol or default_tolerance()
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoBracket(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    for _ in range(tol.max_iter):
        if hi - lo <= tol.abs_tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise NoConvergence(
        f"bisection did not reach width {tol.abs_tol} in {tol.max_iter} iterations"
    )


def _eval_panel_nodes(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array of nodes, tolerating scalar-only callables."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.fromiter((float(f(v)) for v in x), dtype=float, count=len(x))


def _composite_gl(f: Callable, a: float, b: float, panels: int) -> float:
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * (edges[1:] - edges[:-1])
    # nodes laid out panel-by-panel so scalar fallback stays deterministic
    nodes = (mids[:, None] + halves[:, None] * _GL_NODES[None, :]).ravel()
    vals = _eval_panel_nodes(f, nodes).reshape(panels, _GL_ORDER)
    return float(np.sum((vals @ _GL_WEIGHTS) * halves))


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance | None = None,
) -> float:
    """Integral of f over [a, b] to an absolute error target.

    Composite Gauss-Legendre with panel doubling until two successive
    refinements agree within ``tol.abs_tol``.  Exact for polynomials up to
    the rule's degree, hence one doubling normally suffices here.  Raises
    InvalidInterval when a > b.
    """
    tol = tol or default_tolerance()
    if a > b:
        raise InvalidInterval(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    prev = _composite_gl(f, a, b, 1)
    panels = 2
    for _ in range(_MAX_DOUBLINGS):
        cur = _composite_gl(f, a, b, panels)
        if abs(cur - prev) <= tol.abs_tol:
            return cur
        prev = cur
        panels *= 2
    raise NoConvergence(
        f"quadrature did not meet abs_tol={tol.abs_tol} on [{a}, {b}]"
    )


def gauss_legendre_nodes(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the m-point Gauss-Legendre rule on [a, b]."""
    t, w = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * t, half * w
