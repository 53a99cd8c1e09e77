"""Adaptive Gauss-Legendre quadrature for piecewise-smooth integrands."""

import functools
import logging
import typing
import warnings
import numpy
import scipy.special
from geogates.errors import QuadratureWarning

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_ORDER = 16


@functools.lru_cache(maxsize=None)
def gauss_legendre_rule(order: int) -> typing.Tuple[numpy.ndarray,
                                                     numpy.ndarray]:
    """Nodes and weights of the Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = scipy.special.roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panels(f, lo: numpy.ndarray, hi: numpy.ndarray,
            order: int) -> numpy.ndarray:
    # One vectorized call for every panel [lo[i], hi[i]].
    nodes, weights = gauss_legendre_rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    points = mid[:, None] + half[:, None] * nodes[None, :]
    values = numpy.asarray(f(points.reshape(-1))).reshape(points.shape)
    return half * (values @ weights)


def adaptive_gauss_legendre(f: typing.Callable[[numpy.ndarray], numpy.ndarray],
                            a: float, b: float,
                            tol: float = DEFAULT_TOL,
                            order: int = DEFAULT_ORDER,
                            max_depth: int = 40):
    """Integrate a vectorized function over [a, b].

    Each panel is compared with the sum of its two halves; panels that
    disagree by more than their share of the tolerance are split.

    :param f: function evaluated on a 1-D array of abscissas.
    :param tol: absolute tolerance for the whole interval.
    :param order: number of Gauss-Legendre nodes per panel.
    :param max_depth: maximum number of bisections of a panel.
    :return: the integral (real or complex, following f).
    """
    if a == b:
        return 0.0
    total = 0.0
    exhausted = False
    n_panels = 0
    stack: typing.List[tuple] = [(a, b, tol, 0, None)]
    while stack:
        lo, hi, panel_tol, depth, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        if whole is None:
            whole, left, right = _panels(f, numpy.array([lo, lo, mid]),
                                         numpy.array([hi, mid, hi]), order)
        else:
            left, right = _panels(f, numpy.array([lo, mid]),
                                  numpy.array([mid, hi]), order)
        n_panels += 1
        err = abs(whole - (left + right))
        floor = 64 * numpy.finfo(float).eps * abs(left + right)
        if err <= max(panel_tol, floor):
            total += left + right
        elif depth >= max_depth:
            exhausted = True
            total += left + right
        else:
            stack.append((mid, hi, panel_tol / 2, depth + 1, right))
            stack.append((lo, mid, panel_tol / 2, depth + 1, left))
    logger.debug('quadrature on [%g, %g] used %i panels', a, b, n_panels)
    if exhausted:
        warnings.warn(
            'Adaptive quadrature on [%g, %g] reached the maximum depth '
            '%i before meeting tolerance %g.' % (a, b, max_depth, tol),
            QuadratureWarning)
    return total


def integrate_windows(f: typing.Callable[[numpy.ndarray], numpy.ndarray],
                      breakpoints: typing.Sequence[float],
                      tol: float = DEFAULT_TOL,
                      order: int = DEFAULT_ORDER):
    """Sum of adaptive integrals over consecutive smooth windows."""
    edges = [float(x) for x in breakpoints]
    n = max(len(edges) - 1, 1)
    return sum(adaptive_gauss_legendre(f, lo, hi, tol=tol / n, order=order)
               for lo, hi in zip(edges[:-1], edges[1:]))
