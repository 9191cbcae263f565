"""Resistance-scale partitions and the chemical (cell-chain) metric.

A scale-k partition collects the maximal words whose resistance factor has
dropped to e^{-k}: a word is kept once r_w <= e^{-k} while its parent is still
above the threshold. The cell graph joins vertices lying in a common cell, and
graph distance on it is the chemical metric d_k.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .graphs import build_level_graph, embedding
from .specs import FractalSpec, Point
from .util import ConfigError, ModelError

CELL_CAP = 200_000


@dataclass(frozen=True)
class Partition:
    spec: FractalSpec
    k: float
    words: tuple[tuple[int, ...], ...]

    @property
    def level(self) -> int:
        return max(len(w) for w in self.words)

    @cached_property
    def resistances(self) -> np.ndarray:
        return np.array([self.spec.word_r(w) for w in self.words])


def partition_at_scale(spec: FractalSpec, k: float) -> Partition:
    """Words w with r_w <= e^{-k} whose parent is still above threshold."""
    if k < 0:
        raise ConfigError("partition scale must be nonnegative")
    thresh = math.exp(-k)
    out: list[tuple[int, ...]] = []

    def walk(word: tuple[int, ...], rw: float) -> None:
        if word and rw <= thresh:
            out.append(word)
            return
        if len(out) + (0 if word else 1) > CELL_CAP:
            raise ConfigError(f"partition at scale {k} exceeds {CELL_CAP} cells")
        for j in range(spec.nletters):
            walk(word + (j,), rw * spec.r[j])

    walk((), 1.0)
    if len(out) > CELL_CAP:
        raise ConfigError(f"partition at scale {k} exceeds {CELL_CAP} cells")
    return Partition(spec, float(k), tuple(out))


class PartitionMetric:
    """Cell graph of a partition plus chemical distances.

    Vertices of the cell graph are the corner points of the partition cells,
    realized as level-L vertex ids with L the deepest word length. Distances
    between arbitrary addressed points use the interior extension: zero when a
    common cell contains both, else the minimum graph distance between corners
    of the containing cells.
    """

    def __init__(self, spec: FractalSpec, k: float):
        self.spec = spec
        self.k = float(k)
        self.partition = partition_at_scale(spec, k)
        self.level = self.partition.level
        self.graph = build_level_graph(spec, self.level)
        nb = spec.nboundary
        embeds = {
            d: embedding(spec, d, self.level)
            for d in sorted({len(w) for w in self.partition.words})
        }
        corner_rows = []
        for word in self.partition.words:
            d = len(word)
            gd = build_level_graph(spec, d)
            corner_rows.append(embeds[d][gd.corners[gd.word_index(word)]])
        self.cell_corners = np.array(corner_rows, dtype=np.int64)
        self.vertex_ids = np.unique(self.cell_corners)
        self._vpos = {int(v): i for i, v in enumerate(self.vertex_ids)}
        n = len(self.vertex_ids)
        rows, cols = [], []
        for corners in self.cell_corners:
            for a in range(nb):
                for b in range(a + 1, nb):
                    i, j = self._vpos[int(corners[a])], self._vpos[int(corners[b])]
                    rows += [i, j]
                    cols += [j, i]
        self.adjacency = coo_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
        ).tocsr()
        self._dist_cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        self._word_set = {w: i for i, w in enumerate(self.partition.words)}

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_ids)

    def _distances_from(self, gidx: int) -> np.ndarray:
        with self._lock:
            hit = self._dist_cache.get(gidx)
        if hit is not None:
            return hit
        d = shortest_path(self.adjacency, method="D", unweighted=True, indices=gidx)
        with self._lock:
            self._dist_cache[gidx] = d
        return d

    def _resolve(self, point) -> int:
        if isinstance(point, Point):
            return self.graph.vertex_of(point)
        return int(point)

    def _containing_cells(self, v: int) -> list[int]:
        """Indices of partition cells whose closure contains level-L vertex v."""
        hits = set()
        for widx, _ in self.graph.addresses(v):
            letters = _word_letters(widx, self.level, self.spec.nletters)
            for d in range(1, self.level + 1):
                cand = letters[:d]
                i = self._word_set.get(cand)
                if i is not None:
                    hits.add(i)
                    break
        return sorted(hits)

    def graph_distance(self, x, y) -> int:
        """Chemical distance between two cell-graph vertices."""
        vx, vy = self._resolve(x), self._resolve(y)
        if vx not in self._vpos or vy not in self._vpos:
            raise ConfigError("graph_distance needs partition-cell corners")
        if vx == vy:
            return 0
        d = self._distances_from(self._vpos[vx])[self._vpos[vy]]
        if not np.isfinite(d):
            raise ModelError("cell graph is disconnected")
        return int(d)

    def _locate(self, point) -> tuple[bool, list[int], list[int]]:
        """(is cell-graph vertex, corner reps, containing cells) for a point.

        Addresses deeper than the partition level fall back to the prefix
        cell; such points count as interior to it.
        """
        if isinstance(point, Point) and len(point.word) > self.level:
            cells = []
            for d in range(1, self.level + 1):
                i = self._word_set.get(tuple(point.word[:d]))
                if i is not None:
                    cells.append(i)
                    break
            if not cells:
                raise ModelError(f"no partition cell contains {point}")
            reps = sorted({int(v) for c in cells for v in self.cell_corners[c]})
            return False, reps, cells
        v = self._resolve(point)
        cells = self._containing_cells(v)
        if v in self._vpos:
            return True, [v], cells
        reps = sorted({int(vv) for c in cells for vv in self.cell_corners[c]})
        return False, reps, cells

    def distance(self, x, y) -> float:
        """Chemical distance extended to arbitrary addressed points.

        Cell-graph vertices use the exact graph metric. A point interior to a
        cell sits half a step from that cell's corners, so interiors of
        adjacent cells come out at distance one, not zero.
        """
        xg, reps_x, cx = self._locate(x)
        yg, reps_y, cy = self._locate(y)
        if xg and yg:
            return float(self.graph_distance(reps_x[0], reps_y[0]))
        if set(cx) & set(cy):
            return 0.0
        best = None
        for a in sorted(set(reps_x)):
            da = self._distances_from(self._vpos[a])
            for b in set(reps_y):
                d = da[self._vpos[b]]
                if np.isfinite(d) and (best is None or d < best):
                    best = d
        if best is None:
            raise ModelError("cell graph is disconnected")
        return float(best) + 0.5 * (not xg) + 0.5 * (not yg)


def _word_letters(widx: int, length: int, nletters: int) -> tuple[int, ...]:
    # digits come out low-order first; the address convention is high-order first
    out = []
    for _ in range(length):
        out.append(widx % nletters)
        widx //= nletters
    return tuple(reversed(out))


_METRICS: dict[tuple[FractalSpec, float], PartitionMetric] = {}
_MLOCK = threading.Lock()


def partition_metric(spec: FractalSpec, k: float) -> PartitionMetric:
    key = (spec, float(k))
    with _MLOCK:
        hit = _METRICS.get(key)
    if hit is None:
        hit = PartitionMetric(spec, k)
        with _MLOCK:
            _METRICS[key] = hit
    return hit


def k_of_lambda(spec: FractalSpec, lam: float, c_cal: float = 1.0) -> float:
    """Partition scale matched to spectral parameter lambda.

    Chosen so that cells at scale k have resistance * measure about 1/lambda,
    shifted down by the calibration constant and a safety margin of 2.
    """
    if lam <= 0:
        return 0.0
    raw = math.log(lam) / (spec.S + 1.0) - math.log(c_cal) - 2.0
    return float(max(0.0, math.floor(raw)))


def corner_pair(spec: FractalSpec, a: int = 0, b: int = 1) -> tuple[Point, Point]:
    return Point((), a), Point((), b)


def estimate_gamma(
    spec: FractalSpec,
    ks: list[float] | None = None,
    pairs: list[tuple[Point, Point]] | None = None,
) -> dict:
    """Fit the growth exponent of k -> d_k(x, y) on a log scale.

    Returns the pooled slope with per-pair distances and residuals; raises
    ModelError when the distances fail to grow, which makes the exponent
    meaningless.
    """
    ks = [float(k) for k in (ks if ks is not None else [1.0, 2.0, 3.0, 4.0])]
    if len(ks) < 2:
        raise ConfigError("need at least two scales to fit a slope")
    pairs = pairs if pairs is not None else [corner_pair(spec)]
    rows = []
    slopes = []
    for x, y in pairs:
        ds = []
        for k in ks:
            pm = partition_metric(spec, k)
            ds.append(pm.distance(x, y))
        if any(d <= 0 for d in ds):
            raise ModelError(f"pair {x}, {y} has zero chemical distance at some scale")
        if all(b <= a for a, b in zip(ds, ds[1:])):
            raise ModelError(f"pair {x}, {y} has non-growing distances {ds}")
        slope, intercept = np.polyfit(ks, np.log(ds), 1)
        resid = np.log(ds) - (slope * np.asarray(ks) + intercept)
        slopes.append(float(slope))
        rows.append(
            {
                "pair": [str(x), str(y)],
                "distances": [int(d) for d in ds],
                "slope": float(slope),
                "max_abs_residual": float(np.max(np.abs(resid))),
            }
        )
    return {
        "scales": ks,
        "gamma": float(np.mean(slopes)),
        "pairs": rows,
    }


def distance_ratio_scan(
    spec: FractalSpec,
    ks: list[float],
    kprime: float,
    pairs: list[tuple[Point, Point]] | None = None,
) -> dict:
    """Growth ratios d_{k+k'} / d_k against the two-sided model rates.

    The lower rate is e^{k'}, the upper is e^{(S+1) k'/2}; the fitted constants
    are the extreme ratios against each rate over all (pair, k) samples.
    """
    if kprime <= 0:
        raise ConfigError("scale increment must be positive")
    pairs = pairs if pairs is not None else [corner_pair(spec)]
    lo_rate = math.exp(kprime)
    hi_rate = math.exp((spec.S + 1.0) * kprime / 2.0)
    records = []
    c_low, c_up = math.inf, 0.0
    for x, y in pairs:
        for k in ks:
            d0 = partition_metric(spec, k).distance(x, y)
            d1 = partition_metric(spec, k + kprime).distance(x, y)
            if d0 <= 0:
                continue
            ratio = d1 / d0
            c_low = min(c_low, ratio / lo_rate)
            c_up = max(c_up, ratio / hi_rate)
            records.append(
                {
                    "pair": [str(x), str(y)],
                    "k": float(k),
                    "d_k": int(d0),
                    "d_k_plus": int(d1),
                    "ratio": float(ratio),
                }
            )
    if not records:
        raise ModelError("no usable pairs: all chemical distances were zero")
    return {
        "kprime": float(kprime),
        "lower_rate": lo_rate,
        "upper_rate": hi_rate,
        "c_low": float(c_low),
        "c_up": float(c_up),
        "records": records,
    }
