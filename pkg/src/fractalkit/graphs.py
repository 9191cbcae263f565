"""Level-m approximation graphs.

Vertices are glued corners of the J^m level-m cells. A cell is addressed by its
word, encoded big-endian (first letter most significant), so the words of any
cell's refinement form a contiguous index range. Edges carry the index of the
word that generated them, which is what makes cell-restricted fluxes cheap.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .specs import FractalSpec, Point
from .util import CapacityError, ConfigError

VERTEX_CAP = 200_000


@dataclass(eq=False)
class LevelGraph:
    spec: FractalSpec
    m: int
    nvert: int
    corners: np.ndarray  # (J^m, nb) vertex id of each cell corner
    boundary: np.ndarray  # (nb,) vertex ids of the global corners, in order
    edges_u: np.ndarray
    edges_v: np.ndarray
    edges_c: np.ndarray  # conductance c0[p,q] / r_w per edge
    edges_word: np.ndarray  # generating cell word index per edge
    mass: np.ndarray  # (nvert,) lumped measure, sums to 1
    r_words: np.ndarray  # (J^m,) resistance factor per word
    mu_words: np.ndarray  # (J^m,) measure weight per word
    transitions: tuple[np.ndarray, ...]  # T_l[j, v_prev] -> v, l = 1..m

    @cached_property
    def interior(self) -> np.ndarray:
        mask = np.ones(self.nvert, dtype=bool)
        mask[self.boundary] = False
        return np.nonzero(mask)[0]

    @cached_property
    def _corner_order(self) -> np.ndarray:
        return np.argsort(self.corners.ravel(), kind="stable")

    def addresses(self, v: int) -> list[tuple[int, int]]:
        """All (word_index, corner) addresses of vertex v."""
        flat = self.corners.ravel()
        order = self._corner_order
        lo = np.searchsorted(flat, v, side="left", sorter=order)
        hi = np.searchsorted(flat, v, side="right", sorter=order)
        nb = self.spec.nboundary
        out = [(int(pos) // nb, int(pos) % nb) for pos in order[lo:hi]]
        out.sort()
        return out

    def point_at(self, v: int) -> Point:
        """Canonical address of vertex v (first in address order)."""
        widx, q = self.addresses(v)[0]
        letters = []
        for _ in range(self.m):
            letters.append(widx % self.spec.nletters)
            widx //= self.spec.nletters
        return Point(tuple(reversed(letters)), q)

    def cells_containing(self, v: int, depth: int) -> list[int]:
        """Distinct depth-`depth` cell prefixes whose closure contains vertex v."""
        if not 0 <= depth <= self.m:
            raise ConfigError(f"depth {depth} outside 0..{self.m}")
        shift = self.spec.nletters ** (self.m - depth)
        return sorted({w // shift for w, _ in self.addresses(v)})

    def vertex_of(self, point: Point) -> int:
        """Vertex id of F_w(corner), lifting coarser addresses to this level."""
        d = len(point.word)
        if d > self.m:
            raise ConfigError(
                f"address {point} is deeper than graph level {self.m}"
            )
        if not 0 <= point.label < self.spec.nboundary:
            raise ConfigError(f"corner label {point.label} out of range")
        if any(not 0 <= j < self.spec.nletters for j in point.word):
            raise ConfigError(f"letter out of range in {point}")
        v = point.label
        for i in range(d):
            # Innermost letter first: level i+1 vertex of F_{w_{d-i}..w_d}(corner).
            v = int(self.transitions[i][point.word[d - 1 - i], v])
        for lvl in range(d, self.m):
            v = int(_embedding_step(self.spec, lvl)[v])
        return v

    def word_index(self, word: tuple[int, ...]) -> int:
        if len(word) > self.m:
            raise ConfigError(f"word {word} longer than level {self.m}")
        J = self.spec.nletters
        idx = 0
        for j in word:
            idx = idx * J + j
        return idx * J ** (self.m - len(word))

    def cell_word_range(self, word: tuple[int, ...]) -> tuple[int, int]:
        """Contiguous [lo, hi) range of level-m word indices refining `word`."""
        lo = self.word_index(word)
        return lo, lo + self.spec.nletters ** (self.m - len(word))

    def cell_mass_at(self, v: int, word: tuple[int, ...]) -> float:
        """Portion of the lumped mass of vertex v carried by the given cell."""
        lo, hi = self.cell_word_range(word)
        counts = (self.corners[lo:hi] == v).sum(axis=1)
        return float(np.dot(self.mu_words[lo:hi], counts)) / self.spec.nboundary

    def cell_edges(self, word: tuple[int, ...]) -> np.ndarray:
        """Indices of edges generated inside the given cell."""
        lo, hi = self.cell_word_range(word)
        return np.nonzero((self.edges_word >= lo) & (self.edges_word < hi))[0]


_GRAPH_CACHE: dict[tuple[FractalSpec, int], LevelGraph] = {}
_EMB_CACHE: dict[tuple[FractalSpec, int], np.ndarray] = {}
_LOCK = threading.Lock()


def build_level_graph(spec: FractalSpec, m: int) -> LevelGraph:
    """Level-m graph for the structure, built and cached level by level."""
    if m < 0:
        raise ConfigError("level must be nonnegative")
    with _LOCK:
        return _build_locked(spec, m)


def _build_locked(spec: FractalSpec, m: int) -> LevelGraph:
    key = (spec, m)
    if key in _GRAPH_CACHE:
        return _GRAPH_CACHE[key]
    if m == 0:
        g = _level_zero(spec)
    else:
        g = _refine(spec, _build_locked(spec, m - 1))
    _GRAPH_CACHE[key] = g
    return g


def _conductance_pairs(spec: FractalSpec) -> list[tuple[int, int, float]]:
    c0 = np.asarray(spec.c0)
    nb = spec.nboundary
    return [
        (p, q, float(c0[p, q]))
        for p in range(nb)
        for q in range(p + 1, nb)
        if c0[p, q] > 0
    ]


def _corner_reps(spec: FractalSpec) -> list[tuple[int, int]]:
    """For each global corner p, a cell slot (j, q) with F_j(corner_q) = corner_p."""
    reps = []
    for p in range(spec.nboundary):
        label = spec.boundary[p]
        for j, row in enumerate(spec.cell_boundary_map):
            if label in row:
                reps.append((j, row.index(label)))
                break
    return reps


def _level_zero(spec: FractalSpec) -> LevelGraph:
    nb = spec.nboundary
    pairs = _conductance_pairs(spec)
    return LevelGraph(
        spec=spec,
        m=0,
        nvert=nb,
        corners=np.arange(nb, dtype=np.int64)[None, :],
        boundary=np.arange(nb, dtype=np.int64),
        edges_u=np.array([p for p, _, _ in pairs], dtype=np.int64),
        edges_v=np.array([q for _, q, _ in pairs], dtype=np.int64),
        edges_c=np.array([c for _, _, c in pairs], dtype=float),
        edges_word=np.zeros(len(pairs), dtype=np.int64),
        mass=np.full(nb, 1.0 / nb),
        r_words=np.ones(1),
        mu_words=np.ones(1),
        transitions=(),
    )


def _refine(spec: FractalSpec, prev: LevelGraph) -> LevelGraph:
    J, nb = spec.nletters, spec.nboundary
    nprev = prev.nvert
    nslots = J * nprev

    # Glue copies: slots (j, v) identified whenever two cell corners share a
    # level-1 label. Components of that relation are the new vertices.
    by_label: dict[int, list[tuple[int, int]]] = {}
    for j, row in enumerate(spec.cell_boundary_map):
        for p, lab in enumerate(row):
            by_label.setdefault(lab, []).append((j, p))
    links_u, links_v = [], []
    for lab in sorted(by_label):
        slots = by_label[lab]
        j0, p0 = slots[0]
        a = j0 * nprev + prev.boundary[p0]
        for j1, p1 in slots[1:]:
            links_u.append(a)
            links_v.append(j1 * nprev + prev.boundary[p1])
    adj = coo_matrix(
        (np.ones(len(links_u)), (np.array(links_u), np.array(links_v))),
        shape=(nslots, nslots),
    )
    nvert, labels = connected_components(adj, directed=False)
    if nvert > VERTEX_CAP:
        raise CapacityError(f"level graph would have {nvert} vertices (cap {VERTEX_CAP})")
    T = labels.reshape(J, nprev).astype(np.int64)

    corners = np.concatenate([T[j][prev.corners] for j in range(J)], axis=0)
    reps = _corner_reps(spec)
    bnd = np.array(
        [T[j, prev.boundary[q]] for j, q in reps],
        dtype=np.int64,
    )
    r_words = np.concatenate([spec.r[j] * prev.r_words for j in range(J)])
    mu_words = np.concatenate([spec.mu[j] * prev.mu_words for j in range(J)])

    nwords = J * len(prev.r_words)
    pairs = _conductance_pairs(spec)
    eu, ev, ec, ew = [], [], [], []
    widx = np.arange(nwords, dtype=np.int64)
    for p, q, c in pairs:
        eu.append(corners[:, p])
        ev.append(corners[:, q])
        ec.append(c / r_words)
        ew.append(widx)
    mass = np.zeros(nvert)
    for p in range(nb):
        np.add.at(mass, corners[:, p], mu_words / nb)

    return LevelGraph(
        spec=spec,
        m=prev.m + 1,
        nvert=nvert,
        corners=corners,
        boundary=bnd,
        edges_u=np.concatenate(eu),
        edges_v=np.concatenate(ev),
        edges_c=np.concatenate(ec),
        edges_word=np.concatenate(ew),
        mass=mass,
        r_words=r_words,
        mu_words=mu_words,
        transitions=prev.transitions + (T,),
    )


def _embedding_step(spec: FractalSpec, lvl: int) -> np.ndarray:
    """Vertex map from level lvl into level lvl+1 (same point, finer graph)."""
    key = (spec, lvl)
    with _LOCK:
        if key in _EMB_CACHE:
            return _EMB_CACHE[key]
        g0 = _build_locked(spec, lvl)
        g1 = _build_locked(spec, lvl + 1)
        J = spec.nletters
        reps = _corner_reps(spec)
        emb = np.full(g0.nvert, -1, dtype=np.int64)
        nwords = g0.corners.shape[0]
        base = np.arange(nwords, dtype=np.int64) * J
        for p, (j, q) in enumerate(reps):
            # F_w(corner_p) = F_{w j}(corner_q): append the representing letter.
            emb[g0.corners[:, p]] = g1.corners[base + j, q]
        _EMB_CACHE[key] = emb
        return emb


def embedding(spec: FractalSpec, m_from: int, m_to: int) -> np.ndarray:
    """Composed vertex map from level m_from into level m_to >= m_from."""
    if m_to < m_from:
        raise ConfigError("embedding target must be at least the source level")
    g = build_level_graph(spec, m_from)
    out = np.arange(g.nvert, dtype=np.int64)
    for lvl in range(m_from, m_to):
        out = _embedding_step(spec, lvl)[out]
    return out


def clear_caches() -> None:
    with _LOCK:
        _GRAPH_CACHE.clear()
        _EMB_CACHE.clear()
