"""Scale-free trust network between investors."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FitUndefinedError, InsufficientNodesError, InvalidParameterError


@dataclass(frozen=True, eq=False)
class TrustNetwork:
    """Undirected simple graph in CSR form; neighbor lists are sorted.

    Arrays are read-only, so one instance can be shared by any number of runs.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.indptr, self.indices):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges) -> TrustNetwork:
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise InvalidParameterError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise InvalidParameterError("self-loops are not allowed")
        lo, hi = np.minimum(e[:, 0], e[:, 1]), np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * n + hi)
        lo, hi = keys // n, keys % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64))

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.n)]

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edges(self) -> np.ndarray:
        """(E, 2) array of ``i < j`` pairs in lexicographic order."""
        src = np.repeat(np.arange(self.n), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def to_text(self) -> str:
        lines = [f"nodes={self.n}"]
        lines += [f"{i} {j}" for i, j in self.edges().tolist()]
        return "\n".join(lines) + "\n"

    def checksum(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrustNetwork):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None  # type: ignore[assignment]


def generate_ba(
    n: int, m: int, rng: np.random.Generator, isolated_fraction: float = 0.0
) -> TrustNetwork:
    """Barabási–Albert graph grown from a fully connected clique of ``m + 1`` nodes.

    Each later node attaches ``m`` edges to distinct existing nodes chosen with
    probability proportional to their current degree. With
    ``isolated_fraction > 0`` that share of nodes (picked at random) is left
    out of the growth process and ends with no links.
    """
    if m < 1 or n <= m:
        raise InvalidParameterError(f"BA network needs n > m >= 1, got n={n}, m={m}")
    if not 0.0 <= isolated_fraction < 1.0:
        raise InvalidParameterError("isolated_fraction must lie in [0, 1)")

    n_isolated = int(round(isolated_fraction * n))
    if n_isolated:
        ids = rng.permutation(n)
        isolated, attached = np.sort(ids[:n_isolated]), np.sort(ids[n_isolated:])
    else:
        attached = np.arange(n)
    n_att = len(attached)
    if n_att <= m:
        raise InvalidParameterError(
            f"only {n_att} nodes left to attach after isolating {n_isolated}; need more than m={m}"
        )

    n_edges = m * (m + 1) // 2 + m * (n_att - m - 1)
    src = np.empty(n_edges, dtype=np.int64)
    dst = np.empty(n_edges, dtype=np.int64)
    # every edge endpoint once: uniform picks from here are degree-proportional
    ends = np.empty(2 * n_edges, dtype=np.int64)
    e = 0
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            src[e], dst[e] = i, j
            ends[2 * e], ends[2 * e + 1] = i, j
            e += 1
    # random draws are taken in blocks; rejection of repeats keeps targets distinct
    for new in range(m + 1, n_att):
        n_ends = 2 * e
        targets: list[int] = []
        while len(targets) < m:
            for pos in rng.integers(0, n_ends, size=m):
                t = int(ends[pos])
                if t not in targets:
                    targets.append(t)
                    if len(targets) == m:
                        break
        for t in targets:
            src[e], dst[e] = new, t
            ends[2 * e], ends[2 * e + 1] = new, t
            e += 1
    edges = np.column_stack([attached[src], attached[dst]])
    return TrustNetwork.from_edges(n, edges)


def expected_edge_count(n: int, m: int) -> int:
    """Edge count of :func:`generate_ba` without isolated nodes."""
    return m * (n - m) + m * (m - 1) // 2


@dataclass(frozen=True)
class DegreeDistribution:
    histogram: dict[int, int]
    fitted_exponent: float
    fit_r2: float
    raw_exponent: float = float("nan")  # slope over single-degree points, for comparison


def degree_histogram(net: TrustNetwork) -> dict[int, int]:
    counts = np.bincount(net.degrees)
    return {int(d): int(c) for d, c in enumerate(counts) if c}


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def log_bins(kmin: int, kmax: int, per_octave: int = 2) -> np.ndarray:
    """Integer bin edges growing geometrically from ``kmin`` past ``kmax``."""
    n = max(1, int(np.ceil(np.log2((kmax + 1) / kmin) * per_octave)))
    edges = np.unique(np.floor(kmin * 2.0 ** (np.arange(n + 1) / per_octave)).astype(np.int64))
    if edges[-1] <= kmax:
        edges = np.append(edges, kmax + 1)
    return edges


def degree_distribution(net: TrustNetwork) -> DegreeDistribution:
    """Histogram plus a least-squares power-law slope in log-log space.

    Degrees are grouped into logarithmic bins and the slope is fitted to
    log(count / bin width) against log(bin center), over bins holding at
    least one node; degree 0 is excluded. Fitting single-degree counts
    directly is dominated by the sparse tail (counts of 0 or 1) and
    flattens the slope, so that value is kept only as ``raw_exponent``.
    """
    hist = degree_histogram(net)
    pts = np.array([(d, c) for d, c in hist.items() if d > 0], dtype=np.float64)
    if len(pts) < 3:
        raise FitUndefinedError(f"power-law fit needs 3 distinct positive degrees, have {len(pts)}")
    raw, raw_r2 = _linfit(np.log(pts[:, 0]), np.log(pts[:, 1]))
    deg = net.degrees[net.degrees > 0]
    edges = log_bins(int(deg.min()), int(deg.max()))
    counts, _ = np.histogram(deg, bins=edges)
    ok = counts > 0
    if ok.sum() < 3:
        return DegreeDistribution(hist, raw, raw_r2, raw)
    lo, hi = edges[:-1][ok], edges[1:][ok]
    centers = np.sqrt(lo * (hi - 1.0).clip(min=lo))
    density = counts[ok] / (hi - lo)
    slope, r2 = _linfit(np.log(centers), np.log(density))
    return DegreeDistribution(hist, slope, r2, raw)


def hub(net: TrustNetwork) -> int:
    """Maximum-degree node, lowest id on ties."""
    if net.n < 1:
        raise InvalidParameterError("empty network has no hub")
    return int(np.argmax(net.degrees))


def least_connected(net: TrustNetwork, count: int) -> list[int]:
    """``count`` nodes of smallest positive degree, ties by ascending id."""
    if count < 0:
        raise InvalidParameterError("count must be non-negative")
    if count == 0:
        return []
    deg = net.degrees
    candidates = np.flatnonzero(deg > 0)
    if len(candidates) < count:
        raise InsufficientNodesError(
            f"asked for {count} least-connected nodes, only {len(candidates)} have links"
        )
    order = np.lexsort((candidates, deg[candidates]))
    return candidates[order[:count]].tolist()


def write_network(net: TrustNetwork, path: str | Path) -> None:
    Path(path).write_text(net.to_text())


def read_network(path: str | Path) -> TrustNetwork:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("nodes="):
        raise InvalidParameterError(f"{path}: missing 'nodes=<n>' header")
    n = int(lines[0].split("=", 1)[1])
    edges = [tuple(int(x) for x in ln.split()) for ln in lines[1:] if ln.strip()]
    if any(len(e) != 2 for e in edges):
        raise InvalidParameterError(f"{path}: edge lines must hold two ids")
    return TrustNetwork.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))
