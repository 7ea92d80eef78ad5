"""Exact samplers for the Poisson multigraph, with reproducible streams.

Two distributionally identical algorithms:

* per-pair: one Poisson draw per cell of the triangular rate table,
  Theta(n^2) draws per graph.
* global: draw the total point count N ~ Poisson(Lambda), then place each
  point into a cell with probability lambda_ij / Lambda via an alias table
  (Poisson thinning).  O(n^2) setup once, O(1) per point, which wins in the
  sparse regime where E[N] << n^2.

Streams are derived from a 64-bit master seed and a (replicate, purpose)
pair through splitmix64 mixing, so any replicate can be regenerated in
isolation and parallel runs are order-independent.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .graphs import MultiGraph
from .kernels import RateTable, tri_row_starts

_MASK64 = (1 << 64) - 1


def splitmix64(z):
    """One step of the splitmix64 mixing function (public domain constants)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def purpose_tag(purpose):
    """Stable 64-bit tag for a purpose string."""
    digest = hashlib.blake2b(purpose.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def mix_seed(master, *words):
    """Fold words into the master seed: h <- splitmix64(h xor w) repeatedly."""
    h = master & _MASK64
    for w in words:
        h = splitmix64(h ^ (int(w) & _MASK64))
    return h


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the documented stream-derivation rule.

    ``stream(replicate, purpose)`` returns a PCG64 generator seeded with
    mix_seed(master, replicate, purpose_tag(purpose)); identical triples
    always yield identical streams.
    """

    master: int

    def stream(self, replicate=0, purpose="sample"):
        seed = mix_seed(self.master, replicate, purpose_tag(purpose))
        return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------------------
# alias table

def build_alias(probs):
    """Alias table (J, q) for a normalized probability vector.

    Vose's construction, run in batches so the small/large pairing is
    vectorized; a pure-python tail handles skewed leftovers.
    """
    probs = np.asarray(probs, dtype=float)
    K = probs.size
    q = probs * K
    J = np.arange(K, dtype=np.int64)
    small = np.flatnonzero(q < 1.0)
    large = np.flatnonzero(q >= 1.0)
    while small.size and large.size and min(small.size, large.size) > 512:
        m = min(small.size, large.size)
        s, l = small[:m], large[:m]
        J[s] = l
        q[l] -= 1.0 - q[s]
        still_large = q[l] >= 1.0
        small = np.concatenate([small[m:], l[~still_large]])
        large = np.concatenate([large[m:], l[still_large]])
    small, large = list(small), list(large)
    while small and large:
        s = small.pop()
        l = large[-1]
        J[s] = l
        q[l] -= 1.0 - q[s]
        if q[l] < 1.0:
            large.pop()
            small.append(l)
    # leftovers are within rounding of 1
    q[small] = 1.0
    q[large] = 1.0
    return J, q


def alias_draw(J, q, rng, size):
    """Draw ``size`` categories from an alias table."""
    idx = rng.integers(0, J.size, size=size)
    keep = rng.random(size) < q[idx]
    return np.where(keep, idx, J[idx])


# ---------------------------------------------------------------------------
# samplers

class PerPairSampler:
    """Poisson draw per triangular cell."""

    def __init__(self, rates: RateTable):
        self.rates = rates

    def sample_counts(self, rng):
        """Condensed vector of per-cell multiplicities."""
        return rng.poisson(self.rates.rates)

    def sample_cells(self, rng):
        """(i_idx, j_idx, counts) arrays (0-based) of occupied cells."""
        counts = self.sample_counts(rng)
        k = np.flatnonzero(counts)
        i, j = _unravel(self.rates.n, k)
        return i, j, counts[k]

    def sample(self, rng):
        return _to_multigraph(self.rates.n, *self.sample_cells(rng))


class GlobalSampler:
    """Count-then-place: N ~ Poisson(Lambda), alias placement per point."""

    def __init__(self, rates: RateTable):
        self.rates = rates
        self.n = rates.n
        self.total = rates.total
        if self.total > 0:
            self._alias = build_alias(rates.rates / self.total)
        else:
            self._alias = None
        self._row_starts = tri_row_starts(self.n)

    def sample_cells(self, rng):
        if self._alias is None:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        N = rng.poisson(self.total)
        cells = alias_draw(*self._alias, rng, N)
        k, counts = np.unique(cells, return_counts=True)
        i = np.searchsorted(self._row_starts, k, side="right") - 1
        j = i + (k - self._row_starts[i])
        return i, j, counts

    def sample_counts(self, rng):
        """Condensed per-cell multiplicities (dense; meant for small n)."""
        counts = np.zeros(self.rates.rates.size, dtype=np.int64)
        i, j, c = self.sample_cells(rng)
        if i.size:
            counts[self._row_starts[i] + (j - i)] = c
        return counts

    def sample(self, rng):
        return _to_multigraph(self.n, *self.sample_cells(rng))


def _unravel(n, k):
    starts = tri_row_starts(n)
    i = np.searchsorted(starts, k, side="right") - 1
    j = i + (k - starts[i])
    return i, j


def _to_multigraph(n, i, j, counts):
    edges = {
        (int(a) + 1, int(b) + 1): int(c)
        for a, b, c in zip(i.tolist(), j.tolist(), counts.tolist())
    }
    return MultiGraph(n=n, edges=edges)


def sample_per_pair(rates, rng):
    """One multigraph via independent per-cell Poisson draws."""
    return PerPairSampler(rates).sample(rng)


def sample_global(rates, rng):
    """One multigraph via the count-then-place realization of the same PPP."""
    return GlobalSampler(rates).sample(rng)


def expected_edge_count(rates):
    """Lambda, the expected number of multigraph points.

    Equals t * ||W||_1 / 2 up to the diagonal-cell correction of order t/n
    (the triangle i <= j covers half the square plus the diagonal cells).
    """
    return rates.total


SAMPLERS = {"per-pair": PerPairSampler, "global": GlobalSampler}
