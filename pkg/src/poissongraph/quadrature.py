"""Composite Gauss-Legendre quadrature with automatic refinement.

Used as the numerical fallback for kernel integrals that have no closed
form.  The integrand is assumed smooth within the integration interval;
callers are expected to split at known breakpoints before integrating.
"""

import numpy as np

from .errors import QuadratureError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(8)


def composite_gl(f, a, b, subdivisions):
    """Integrate ``f`` over [a, b] with 8-node Gauss-Legendre per subdivision.

    ``f`` must accept a numpy array of evaluation points.
    """
    if b <= a:
        return 0.0
    edges = np.linspace(a, b, subdivisions + 1)
    half = (edges[1:] - edges[:-1]) / 2.0
    mid = (edges[1:] + edges[:-1]) / 2.0
    # points: (subdivisions, nodes)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return float(np.sum(half[:, None] * _WEIGHTS[None, :] * vals))


def adaptive_gl(f, a, b, rel_tol=1e-10, max_subdivisions=1024):
    """Integrate ``f`` over [a, b], doubling subdivisions until converged.

    Stops when successive composite values agree to ``rel_tol`` relative
    change; raises :class:`QuadratureError` if the cap is hit first.
    """
    prev = composite_gl(f, a, b, 1)
    sub = 2
    while sub <= max_subdivisions:
        cur = composite_gl(f, a, b, sub)
        scale = max(abs(cur), abs(prev), 1e-300)
        if abs(cur - prev) <= rel_tol * scale:
            return cur
        prev = cur
        sub *= 2
    raise QuadratureError(
        f"quadrature on [{a}, {b}] did not converge to rel_tol={rel_tol} "
        f"within {max_subdivisions} subdivisions"
    )
