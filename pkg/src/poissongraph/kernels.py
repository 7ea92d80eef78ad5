"""Symmetric kernels on the unit square and their exact cell integrals.

A kernel W(x, y) >= 0 drives the edge intensities of the random multigraph:
vertex i owns the interval S_i = ((i-1)/n, i/n] and the unordered pair
(i, j), i <= j, receives the Poisson rate

    lambda_ij = t * integral of W over S_i x S_j,

where the diagonal cell (i = j) is the full square S_i x S_i (self-loops).
Four kernel families are supported, each with closed-form cell integrals:

* constant  W = a                      (homogeneous / Erdos-Renyi-like)
* product   W(x, y) = f(x) f(y)        (f piecewise polynomial, rank one)
* block     piecewise constant on a breakpoint grid (block model)
* grid      piecewise constant on the uniform m x m grid

The marginal H(x) = integral of W(x, .) over [0, 1] and its essential
infimum nu0 determine the connectivity threshold c* = 1/nu0 when edges are
scaled as t = c * n * log n.

Boundary convention: a point x on a cell or block boundary belongs to the
lower-index cell (left continuity), except x = 0 which belongs to cell 1.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import KernelSpecError
from .quadrature import adaptive_gl


# ---------------------------------------------------------------------------
# triangular indexing for condensed rate storage (0-based internally)

def tri_size(n):
    return n * (n + 1) // 2


def tri_row_starts(n):
    """Start offset of row i in the condensed upper triangle (diagonal included)."""
    i = np.arange(n, dtype=np.int64)
    return i * n - i * (i - 1) // 2


def tri_index(n, i, j):
    """Condensed offset of (i, j), 0-based, i <= j."""
    return i * n - i * (i - 1) // 2 + (j - i)


def tri_unravel(n, k):
    """Inverse of :func:`tri_index` for an array of condensed offsets."""
    starts = tri_row_starts(n)
    i = np.searchsorted(starts, k, side="right") - 1
    j = i + (k - starts[i])
    return i, j


def cell_index(x, m):
    """1-based index of the cell ((i-1)/m, i/m] containing x; x = 0 maps to 1.

    Left-continuous: boundary points i/m belong to cell i.  A small slack
    absorbs floating-point noise in x*m at exact boundaries.
    """
    i = math.ceil(x * m - 1e-12)
    return min(max(i, 1), m)


def _check_coord(name, v):
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"{name}={v} outside [0, 1]")


def _interval_overlaps(lo, hi, edges):
    """Overlap lengths of [lo, hi] with consecutive intervals of ``edges``."""
    left = np.maximum(lo, edges[:-1])
    right = np.minimum(hi, edges[1:])
    return np.maximum(right - left, 0.0)


# ---------------------------------------------------------------------------
# kernel variants

class Kernel:
    """Base class; concrete variants implement the closed forms."""

    kind = "abstract"

    # -- pointwise ---------------------------------------------------------
    def eval(self, x, y):
        """W(x, y) for x, y in [0, 1]."""
        _check_coord("x", x)
        _check_coord("y", y)
        return self._eval(x, y)

    def marginal(self, x):
        """H(x) = integral of W(x, y) dy over [0, 1]."""
        _check_coord("x", x)
        return self._marginal(x)

    # -- integrals ---------------------------------------------------------
    def cell_integral(self, n, i, j):
        """Integral of W over S_i x S_j, 1-based i <= j (full square on diagonal)."""
        raise NotImplementedError

    def cell_integrals_condensed(self, n):
        """All cell integrals for i <= j as a condensed triangular array."""
        out = np.empty(tri_size(n))
        k = 0
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                out[k] = self.cell_integral(n, i, j)
                k += 1
        return out

    def marginal_cell_integral(self, n, i):
        """Integral of H over S_i, 1-based i."""
        raise NotImplementedError

    # -- global quantities -------------------------------------------------
    def nu0(self):
        """(essinf of H, method flag 'exact' | 'approximate')."""
        raise NotImplementedError

    def lq_norm(self, q):
        """L_q norm of W over the unit square, q > 1."""
        raise NotImplementedError

    def is_irreducible(self):
        """(bool, method flag): no measurable split with zero cross integral."""
        raise NotImplementedError

    def label(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class ConstantKernel(Kernel):
    """W(x, y) = a."""

    kind = "constant"

    def __init__(self, a):
        if a < 0:
            raise KernelSpecError(f"field 'a' must be nonnegative, got {a}")
        self.a = float(a)

    def _eval(self, x, y):
        return self.a

    def _marginal(self, x):
        return self.a

    def cell_integral(self, n, i, j):
        return self.a / (n * n)

    def cell_integrals_condensed(self, n):
        return np.full(tri_size(n), self.a / (n * n))

    def marginal_cell_integral(self, n, i):
        return self.a / n

    def nu0(self):
        return self.a, "exact"

    def lq_norm(self, q):
        return self.a

    def is_irreducible(self):
        return self.a > 0.0, "exact"

    def label(self):
        return f"constant(a={self.a:g})"

    def to_json(self):
        return {"kind": "constant", "a": self.a}


class ProductKernel(Kernel):
    """W(x, y) = f(x) f(y) with f piecewise polynomial on [0, 1].

    ``coeffs[p]`` are the coefficients (lowest degree first, in the global
    x variable) of the polynomial on [breakpoints[p], breakpoints[p+1]].
    """

    kind = "product"

    def __init__(self, breakpoints, coeffs):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise KernelSpecError("field 'breakpoints' must list at least two values")
        if not np.all(np.diff(bp) > 0):
            raise KernelSpecError("field 'breakpoints' must be strictly increasing")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise KernelSpecError("field 'breakpoints' must start at 0 and end at 1")
        if len(coeffs) != bp.size - 1:
            raise KernelSpecError(
                "field 'coeffs' must have one coefficient list per piece "
                f"({bp.size - 1}), got {len(coeffs)}"
            )
        self.breakpoints = bp
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        for p, c in enumerate(self.coeffs):
            if c.ndim != 1 or c.size == 0:
                raise KernelSpecError(f"field 'coeffs[{p}]' must be a nonempty list")
        # antiderivatives and cumulative integrals F(b_p) of f from 0
        self._anti = [npoly.polyint(c) for c in self.coeffs]
        cum = [0.0]
        for p, anti in enumerate(self._anti):
            lo, hi = bp[p], bp[p + 1]
            cum.append(cum[-1] + npoly.polyval(hi, anti) - npoly.polyval(lo, anti))
        self._cum = np.asarray(cum)
        self.norm1 = float(self._cum[-1])
        self._fmin, self._fmax = self._extrema()
        if self._fmin < -1e-9:
            raise KernelSpecError(
                f"field 'coeffs' defines a negative f (min {self._fmin:.3g})"
            )

    def _extrema(self):
        lo_val = math.inf
        hi_val = -math.inf
        for p, c in enumerate(self.coeffs):
            lo, hi = self.breakpoints[p], self.breakpoints[p + 1]
            pts = [lo, hi]
            if c.size > 1:
                der = npoly.polyder(c)
                for r in npoly.polyroots(der):
                    if abs(r.imag) < 1e-12 and lo < r.real < hi:
                        pts.append(r.real)
            vals = [npoly.polyval(p_, c) for p_ in pts]
            lo_val = min(lo_val, min(vals))
            hi_val = max(hi_val, max(vals))
        return lo_val, hi_val

    def _piece_of(self, x):
        p = np.searchsorted(self.breakpoints, x, side="left") - 1
        return np.clip(p, 0, len(self.coeffs) - 1)

    def f(self, x):
        """Evaluate f at scalar or array x (left-continuous at breakpoints)."""
        x = np.asarray(x, dtype=float)
        piece = self._piece_of(x)
        out = np.empty_like(x, dtype=float)
        for p, c in enumerate(self.coeffs):
            mask = piece == p
            if np.any(mask):
                out[mask] = npoly.polyval(x[mask], c)
        return out if out.ndim else float(out)

    def f_cumulative(self, x):
        """F(x) = integral of f from 0 to x."""
        p = int(self._piece_of(x))
        anti = self._anti[p]
        return float(
            self._cum[p]
            + npoly.polyval(x, anti)
            - npoly.polyval(self.breakpoints[p], anti)
        )

    def _eval(self, x, y):
        return float(self.f(x)) * float(self.f(y))

    def _marginal(self, x):
        return float(self.f(x)) * self.norm1

    def _cell_masses(self, n):
        """F(i/n) - F((i-1)/n) for every cell, exact."""
        bounds = np.array([self.f_cumulative(i / n) for i in range(n + 1)])
        return np.diff(bounds)

    def cell_integral(self, n, i, j):
        fi = self.f_cumulative(i / n) - self.f_cumulative((i - 1) / n)
        fj = self.f_cumulative(j / n) - self.f_cumulative((j - 1) / n)
        return fi * fj

    def cell_integrals_condensed(self, n):
        masses = self._cell_masses(n)
        out = np.empty(tri_size(n))
        starts = tri_row_starts(n)
        for i in range(n):
            out[starts[i] : starts[i] + (n - i)] = masses[i] * masses[i:]
        return out

    def marginal_cell_integral(self, n, i):
        return self.norm1 * (
            self.f_cumulative(i / n) - self.f_cumulative((i - 1) / n)
        )

    def nu0(self):
        # essinf (f(x) ||f||_1) attained at the exact polynomial minimum of f
        return self._fmin * self.norm1, "exact"

    def lq_norm(self, q):
        # (iint (f(x)f(y))^q)^{1/q} = (int f^q)^{2/q}; f^q integrated piecewise
        total = 0.0
        for p in range(len(self.coeffs)):
            lo, hi = self.breakpoints[p], self.breakpoints[p + 1]
            total += adaptive_gl(lambda u: np.abs(self.f(u)) ** q, lo, hi)
        return total ** (2.0 / q)

    def is_irreducible(self):
        # f >= 0 and polynomial per piece: the zero set has positive measure
        # iff some piece is identically zero, and then A = {f = 0} separates.
        if all(np.any(c != 0.0) for c in self.coeffs):
            return True, "exact"
        return False, "exact"

    def label(self):
        return f"product(pieces={len(self.coeffs)})"

    def to_json(self):
        return {
            "kind": "product",
            "breakpoints": self.breakpoints.tolist(),
            "coeffs": [c.tolist() for c in self.coeffs],
        }


class BlockKernel(Kernel):
    """Piecewise-constant kernel on a breakpoint grid (block model)."""

    kind = "block"

    def __init__(self, breakpoints, matrix):
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise KernelSpecError("field 'breakpoints' must list at least two values")
        if not np.all(np.diff(bp) > 0):
            raise KernelSpecError("field 'breakpoints' must be strictly increasing")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise KernelSpecError("field 'breakpoints' must start at 0 and end at 1")
        mat = np.asarray(matrix, dtype=float)
        k = bp.size - 1
        if mat.shape != (k, k):
            raise KernelSpecError(f"field 'matrix' must be {k}x{k}, got {mat.shape}")
        if not np.array_equal(mat, mat.T):
            raise KernelSpecError("field 'matrix' must be exactly symmetric")
        if np.any(mat < 0):
            raise KernelSpecError("field 'matrix' must be nonnegative")
        self.breakpoints = bp
        self.matrix = mat
        self.widths = np.diff(bp)

    def _block_of(self, x):
        p = np.searchsorted(self.breakpoints, x, side="left") - 1
        return int(np.clip(p, 0, self.matrix.shape[0] - 1))

    def _eval(self, x, y):
        return float(self.matrix[self._block_of(x), self._block_of(y)])

    def _marginal(self, x):
        return float(self.matrix[self._block_of(x)] @ self.widths)

    def _cell_overlaps(self, n):
        """(n, k) matrix of overlap lengths of cells with blocks."""
        lo = np.arange(n) / n
        hi = np.arange(1, n + 1) / n
        left = np.maximum(lo[:, None], self.breakpoints[None, :-1])
        right = np.minimum(hi[:, None], self.breakpoints[None, 1:])
        return np.maximum(right - left, 0.0)

    def cell_integral(self, n, i, j):
        oi = _interval_overlaps((i - 1) / n, i / n, self.breakpoints)
        oj = _interval_overlaps((j - 1) / n, j / n, self.breakpoints)
        return float(oi @ self.matrix @ oj)

    def cell_integrals_condensed(self, n):
        ov = self._cell_overlaps(n)
        out = np.empty(tri_size(n))
        starts = tri_row_starts(n)
        for i in range(n):
            row = ov[i] @ self.matrix
            out[starts[i] : starts[i] + (n - i)] = ov[i:] @ row
        return out

    def marginal_cell_integral(self, n, i):
        oi = _interval_overlaps((i - 1) / n, i / n, self.breakpoints)
        return float(oi @ self.matrix @ self.widths)

    def nu0(self):
        return float(np.min(self.matrix @ self.widths)), "exact"

    def lq_norm(self, q):
        w = self.widths
        return float(np.sum(np.outer(w, w) * self.matrix**q) ** (1.0 / q))

    def is_irreducible(self):
        # Any separating set refines to a union of blocks, so reducibility is
        # exactly disconnection of the block support graph.
        k = self.matrix.shape[0]
        if k == 1:
            return bool(self.matrix[0, 0] > 0), "exact"
        comp = np.arange(k)
        for a in range(k):
            for b in range(a + 1, k):
                if self.matrix[a, b] > 0:
                    ca, cb = comp[a], comp[b]
                    comp[comp == cb] = ca
        return bool(np.all(comp == comp[0])), "exact"

    def label(self):
        return f"block(k={self.matrix.shape[0]})"

    def to_json(self):
        return {
            "kind": "block",
            "breakpoints": self.breakpoints.tolist(),
            "matrix": self.matrix.tolist(),
        }


class GridKernel(BlockKernel):
    """Piecewise-constant kernel of cell averages on the uniform m-grid."""

    kind = "grid"

    def __init__(self, m, matrix):
        if int(m) != m or m < 1:
            raise KernelSpecError(f"field 'm' must be a positive integer, got {m}")
        self.m = int(m)
        super().__init__(np.linspace(0.0, 1.0, self.m + 1), matrix)

    def label(self):
        return f"grid(m={self.m})"

    def to_json(self):
        return {"kind": "grid", "m": self.m, "matrix": self.matrix.tolist()}


# ---------------------------------------------------------------------------
# rate tables

@dataclass(frozen=True)
class RateTable:
    """Triangular array of Poisson rates lambda_ij (1 <= i <= j <= n).

    ``rates`` is condensed row-major over the upper triangle including the
    diagonal; ``total`` is the grand total Lambda = sum of all rates, i.e.
    the expected number of multigraph points.  Immutable after construction.
    """

    n: int
    t: float
    rates: np.ndarray
    total: float
    kernel_label: str = ""

    def __post_init__(self):
        self.rates.flags.writeable = False

    def rate(self, i, j):
        """lambda_ij for 1-based i <= j."""
        if not (1 <= i <= j <= self.n):
            raise IndexError(f"need 1 <= i <= j <= n, got i={i}, j={j}, n={self.n}")
        return float(self.rates[tri_index(self.n, i - 1, j - 1)])

    def rate_pair(self, i, j):
        """lambda of the unordered pair {i, j}, indices in either order."""
        return self.rate(min(i, j), max(i, j)) if i != j else self.rate(i, i)

    def row_offdiag_sums(self):
        """s_i = sum over j != i of lambda_{pair(i,j)}, for every vertex."""
        n = self.n
        starts = tri_row_starts(n)
        s = np.zeros(n)
        for i in range(n):
            row = self.rates[starts[i] + 1 : starts[i] + (n - i)]  # j > i
            s[i] += row.sum()
            s[i + 1 :] += row
        return s

    def lambda_matrix(self):
        """Full symmetric n x n rate matrix (diagonal = self-loop rates)."""
        n = self.n
        mat = np.zeros((n, n))
        starts = tri_row_starts(n)
        for i in range(n):
            mat[i, i:] = self.rates[starts[i] : starts[i] + (n - i)]
        return np.maximum(mat, mat.T)


# ---------------------------------------------------------------------------
# module-level operations (1-based public indices)

def evaluate(W, x, y):
    return W.eval(x, y)


def cell_rate(W, t, n, i, j):
    """lambda_ij = t * integral of W over S_i x S_j."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if not (1 <= i <= j <= n):
        raise IndexError(f"need 1 <= i <= j <= n, got i={i}, j={j}, n={n}")
    return t * W.cell_integral(n, i, j)


def build_rate_table(W, t, n):
    """Populate all n(n+1)/2 rates for intensity t and n vertices."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    rates = t * W.cell_integrals_condensed(n)
    return RateTable(
        n=n, t=float(t), rates=rates, total=float(rates.sum()),
        kernel_label=W.label(),
    )


def marginal(W, x):
    return W.marginal(x)


def marginal_discretized(W, n, x):
    """H_n(x) = n * integral of H over the cell containing x (left-continuous)."""
    if not (0.0 < x <= 1.0):
        raise ValueError(f"x={x} outside (0, 1]")
    i = cell_index(x, n)
    return n * W.marginal_cell_integral(n, i)


def nu0(W):
    """essinf of the marginal H, with ('exact' | 'approximate') method flag."""
    return W.nu0()


def lq_norm(W, q):
    if q <= 1:
        raise ValueError(f"q must exceed 1, got {q}")
    return W.lq_norm(q)


def is_irreducible(W):
    return W.is_irreducible()


# ---------------------------------------------------------------------------
# JSON interface

_KINDS = {"constant", "product", "block", "grid"}


def kernel_from_json(doc):
    """Build a kernel from a JSON document (dict or string).

    Raises :class:`KernelSpecError` naming the offending field on invalid
    input.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise KernelSpecError(f"kernel document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise KernelSpecError("kernel document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise KernelSpecError(
            f"field 'kind' must be one of {sorted(_KINDS)}, got {kind!r}"
        )

    def require(field):
        if field not in doc:
            raise KernelSpecError(f"field '{field}' is required for kind '{kind}'")
        return doc[field]

    try:
        if kind == "constant":
            return ConstantKernel(float(require("a")))
        if kind == "product":
            return ProductKernel(require("breakpoints"), require("coeffs"))
        if kind == "block":
            return BlockKernel(require("breakpoints"), require("matrix"))
        return GridKernel(require("m"), require("matrix"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, KernelSpecError):
            raise
        raise KernelSpecError(f"invalid parameters for kind '{kind}': {exc}") from exc


def kernel_to_json(W):
    return W.to_json()
