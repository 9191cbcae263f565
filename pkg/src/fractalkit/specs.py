"""Self-similar structure descriptions.

A structure is given by contraction letters 0..J-1, an abstract boundary cell
with nb corner labels, a map telling which level-1 vertex label each corner of
each contracted cell lands on, resistance scaling factors r_j, and a base
conductance matrix c0 on the boundary cell. Everything else (similarity
dimension S, measure weights mu_j, graphs, operators) is derived.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .util import ConfigError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Point:
    """A point addressed as F_w(q_label): word of letters plus a corner label."""

    word: tuple[int, ...]
    label: int

    def __str__(self) -> str:
        return "".join(str(j) for j in self.word) + f":{self.label}"

    @staticmethod
    def parse(text: str) -> "Point":
        """Parse "w:p" where w is a digit string of letters, e.g. "012:1" or ":0"."""
        if ":" not in text:
            raise ConfigError(f"point address {text!r} must look like 'word:label'")
        wtxt, _, ptxt = text.partition(":")
        if not all(ch.isdigit() for ch in wtxt):
            raise ConfigError(f"point word {wtxt!r} must be a digit string")
        try:
            label = int(ptxt)
        except ValueError:
            raise ConfigError(f"point label {ptxt!r} must be an integer") from None
        return Point(tuple(int(ch) for ch in wtxt), label)


@dataclass(frozen=True)
class FractalSpec:
    """Immutable description of a self-similar structure.

    cell_boundary_map[j][p] is the level-1 vertex label that corner p of cell j
    is glued to; distinct (j, p) slots sharing a label are the identifications.
    boundary lists, in order, the level-1 labels forming the global boundary.
    """

    name: str
    cell_boundary_map: tuple[tuple[int, ...], ...]
    boundary: tuple[int, ...]
    r: tuple[float, ...]
    c0: tuple[tuple[float, ...], ...]

    @property
    def nletters(self) -> int:
        return len(self.cell_boundary_map)

    @property
    def nboundary(self) -> int:
        return len(self.boundary)

    @cached_property
    def nlabels(self) -> int:
        return max(max(row) for row in self.cell_boundary_map) + 1

    @cached_property
    def S(self) -> float:
        """Similarity dimension in resistance scaling: sum r_j^S = 1."""
        r = np.asarray(self.r, dtype=float)
        if np.allclose(r, r[0], rtol=1e-14, atol=0.0):
            return math.log(len(r)) / math.log(1.0 / r[0])

        def defect(s):
            return np.sum(r**s) - 1.0

        return float(brentq(defect, 1e-12, 400.0, xtol=1e-15, rtol=1e-15))

    @cached_property
    def mu(self) -> tuple[float, ...]:
        """Normalized self-similar measure weights mu_j = r_j^S."""
        return tuple(float(rj**self.S) for rj in self.r)

    @cached_property
    def resistance_exponent(self) -> float:
        """Walk-dimension style exponent S + 1 governing resolvent scaling."""
        return self.S + 1.0

    def word_r(self, word: tuple[int, ...]) -> float:
        out = 1.0
        for j in word:
            out *= self.r[j]
        return out

    def word_mu(self, word: tuple[int, ...]) -> float:
        out = 1.0
        for j in word:
            out *= self.mu[j]
        return out

    # -- structural checks ------------------------------------------------

    def validate(self, renorm_tol: float = 1e-8) -> dict:
        """Check structural consistency and the resistance renormalization.

        Returns a diagnostics dict; raises ConfigError on violation. The
        renormalization check Schur-complements the level-1 form onto the
        boundary cell and compares with c0.
        """
        J, nb = self.nletters, self.nboundary
        if J < 2:
            raise ConfigError("need at least two contraction letters")
        if nb < 2:
            raise ConfigError("need at least two boundary corners")
        if any(len(row) != nb for row in self.cell_boundary_map):
            raise ConfigError("cell_boundary_map rows must have one entry per corner")
        for j, row in enumerate(self.cell_boundary_map):
            if len(set(row)) != nb:
                raise ConfigError(f"cell {j} glues two of its own corners together")
        labels = sorted({lab for row in self.cell_boundary_map for lab in row})
        if labels != list(range(len(labels))):
            raise ConfigError("level-1 labels must be 0..n-1 with no gaps")
        if len(set(self.boundary)) != nb:
            raise ConfigError("boundary labels must be distinct")
        if not set(self.boundary) <= set(labels):
            raise ConfigError("boundary labels must occur in cell_boundary_map")
        if len(self.r) != J:
            raise ConfigError("need one resistance factor per letter")
        if any(not (0.0 < rj < 1.0) for rj in self.r):
            raise ConfigError("resistance factors must lie in (0, 1)")
        c0 = np.asarray(self.c0, dtype=float)
        if c0.shape != (nb, nb):
            raise ConfigError("c0 must be square over the boundary corners")
        if not np.allclose(c0, c0.T, atol=0.0):
            raise ConfigError("c0 must be symmetric")
        if np.any(np.diag(c0) != 0.0) or np.any(c0 < 0.0):
            raise ConfigError("c0 must have zero diagonal and nonnegative entries")
        if not self._level1_connected():
            raise ConfigError("level-1 graph is disconnected")
        residual = self.renormalization_residual()
        if residual > renorm_tol:
            raise ConfigError(
                f"conductances are not renormalization-invariant: residual {residual:.3e}"
            )
        mu_sum = sum(self.mu)
        return {
            "similarity_dimension": self.S,
            "measure_weights_sum": mu_sum,
            "renormalization_residual": residual,
        }

    def _level1_connected(self) -> bool:
        n = self.nlabels
        adj = np.zeros((n, n), dtype=bool)
        c0 = np.asarray(self.c0)
        for row in self.cell_boundary_map:
            for p in range(self.nboundary):
                for q in range(self.nboundary):
                    if c0[p, q] > 0:
                        adj[row[p], row[q]] = True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in np.nonzero(adj[v])[0]:
                if int(u) not in seen:
                    seen.add(int(u))
                    stack.append(int(u))
        return len(seen) == n

    def renormalization_residual(self) -> float:
        """Max deviation of the level-1 trace onto the boundary cell from c0."""
        n = self.nlabels
        nb = self.nboundary
        c0 = np.asarray(self.c0, dtype=float)
        L1 = np.zeros((n, n))
        for j, row in enumerate(self.cell_boundary_map):
            scale = 1.0 / self.r[j]
            for p in range(nb):
                for q in range(nb):
                    c = scale * c0[p, q]
                    if c > 0:
                        L1[row[p], row[p]] += c
                        L1[row[p], row[q]] -= c
        bdry = list(self.boundary)
        inner = [v for v in range(n) if v not in set(bdry)]
        L0 = np.diag(c0.sum(axis=1)) - c0
        if not inner:
            return float(np.max(np.abs(L1[np.ix_(bdry, bdry)] - L0)))
        A = L1[np.ix_(bdry, bdry)]
        B = L1[np.ix_(bdry, inner)]
        D = L1[np.ix_(inner, inner)]
        schur = A - B @ np.linalg.solve(D, B.T)
        return float(np.max(np.abs(schur - L0)))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        obj = {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "letters": self.nletters,
            "boundary": list(self.boundary),
            "cell_boundary_map": [list(row) for row in self.cell_boundary_map],
            "gluing": self._gluing_groups(),
            "r": list(self.r),
            "c0": [list(row) for row in self.c0],
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def _gluing_groups(self) -> list[list[list[int]]]:
        by_label: dict[int, list[list[int]]] = {}
        for j, row in enumerate(self.cell_boundary_map):
            for p, lab in enumerate(row):
                by_label.setdefault(lab, []).append([j, p])
        return [slots for lab, slots in sorted(by_label.items()) if len(slots) > 1]

    @staticmethod
    def from_json(text: str, name: str | None = None) -> "FractalSpec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        required = {"letters", "boundary", "cell_boundary_map", "gluing", "r", "c0"}
        missing = required - set(obj)
        if missing:
            raise ConfigError(f"missing keys: {sorted(missing)}")
        cbm = tuple(tuple(int(x) for x in row) for row in obj["cell_boundary_map"])
        if len(cbm) != int(obj["letters"]):
            raise ConfigError("letters count disagrees with cell_boundary_map")
        spec = FractalSpec(
            name=str(obj.get("name", name or "custom")),
            cell_boundary_map=cbm,
            boundary=tuple(int(x) for x in obj["boundary"]),
            r=tuple(float(x) for x in obj["r"]),
            c0=tuple(tuple(float(x) for x in row) for row in obj["c0"]),
        )
        # The gluing key is redundant with label collisions; require agreement.
        stated = sorted(
            sorted((int(j), int(p)) for j, p in group) for group in obj["gluing"]
        )
        derived = sorted(
            sorted((j, p) for j, p in group) for group in spec._gluing_groups()
        )
        if stated != derived:
            raise ConfigError(
                "gluing groups disagree with cell_boundary_map label collisions"
            )
        spec.validate()
        return spec


def interval() -> FractalSpec:
    """Unit interval: two halves glued at the midpoint."""
    return FractalSpec(
        name="interval",
        cell_boundary_map=((0, 1), (1, 2)),
        boundary=(0, 2),
        r=(0.5, 0.5),
        c0=((0.0, 1.0), (1.0, 0.0)),
    )


def gasket() -> FractalSpec:
    """Sierpinski gasket: three corner cells glued pairwise at midpoints."""
    # Labels: corners 0,1,2; midpoints 3 = (01), 4 = (02), 5 = (12).
    return FractalSpec(
        name="gasket",
        cell_boundary_map=((0, 3, 4), (3, 1, 5), (4, 5, 2)),
        boundary=(0, 1, 2),
        r=(0.6, 0.6, 0.6),
        c0=((0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)),
    )


_BUILTINS = {"interval": interval, "gasket": gasket}


def builtin(name: str) -> FractalSpec:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown structure {name!r}; builtins: {sorted(_BUILTINS)}"
        ) from None


def load_spec(source: str) -> FractalSpec:
    """Resolve a builtin name or a JSON file path to a spec."""
    if source in _BUILTINS:
        return _BUILTINS[source]()
    try:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read structure file {source!r}: {exc}") from None
    stem = os.path.splitext(os.path.basename(source))[0]
    return FractalSpec.from_json(text, name=stem)
