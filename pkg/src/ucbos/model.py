"""Effective Ising problems on unit cells and their thermodynamic-limit energetics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .cells import UnitCell
from .lattice import Lattice
from .resummation import DEFAULT_TOL, fold_short_range_bonds, resum_couplings


def as_spins(config: Sequence[int], K: int | None = None) -> np.ndarray:
    """Validate a spin configuration (entries exactly +1/-1) and return it as an int8 array."""
    arr = np.asarray(config)
    if arr.dtype == np.int8 and arr.ndim == 1 and (K is None or arr.shape[0] == K):
        if np.all(np.abs(arr) == 1):
            return arr
        raise ValueError("spin entries must be exactly +1 or -1")
    if arr.ndim != 1:
        raise ValueError("a spin configuration is a 1D sequence")
    if K is not None and arr.shape[0] != K:
        raise ValueError(f"configuration has {arr.shape[0]} spins, problem has {K}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError("spin entries must be exactly +1 or -1")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class IsingProblem:
    """E(s) = sum_i h_i s_i + 1/2 sum_{i != j} J_ij s_i s_j + constant_offset.

    ``couplings`` keeps the diagonal (self-image) terms; they only contribute
    the constant ``constant_offset = 1/2 sum_i J_ii`` because s_i^2 = 1.
    """

    fields: np.ndarray
    couplings: np.ndarray
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        fields = np.array(self.fields, dtype=float)
        couplings = np.array(self.couplings, dtype=float)
        K = fields.shape[0]
        if fields.ndim != 1 or couplings.shape != (K, K):
            raise ValueError(f"fields must have shape (K,) and couplings (K, K); got {fields.shape}, {couplings.shape}")
        if not np.array_equal(couplings, couplings.T):
            raise ValueError("coupling matrix must be exactly symmetric")
        if not (np.all(np.isfinite(fields)) and np.all(np.isfinite(couplings))):
            raise ValueError("fields and couplings must be finite")
        off = couplings.copy()
        np.fill_diagonal(off, 0.0)
        for arr in (fields, couplings, off):
            arr.setflags(write=False)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "_offdiag", off)
        object.__setattr__(self, "_offset", 0.5 * float(np.sum(np.diag(couplings))))

    @property
    def K(self) -> int:
        return self.fields.shape[0]

    @property
    def offdiag(self) -> np.ndarray:
        return self._offdiag

    @property
    def constant_offset(self) -> float:
        return self._offset

    def with_fields(self, h: float | Sequence[float]) -> "IsingProblem":
        """Same couplings, new fields (a scalar means uniform h)."""
        meta = dict(self.metadata)
        if np.isscalar(h):
            fields = np.full(self.K, float(h))
            meta["h"] = float(h)
        else:
            fields = np.array(h, dtype=float)
            if fields.shape != (self.K,) or not np.all(np.isfinite(fields)):
                raise ValueError(f"fields must be {self.K} finite values")
        fields.setflags(write=False)
        # couplings are already validated and read-only; share them
        clone = object.__new__(IsingProblem)
        for name, val in (("fields", fields), ("couplings", self.couplings), ("metadata", meta),
                          ("_offdiag", self._offdiag), ("_offset", self._offset)):
            object.__setattr__(clone, name, val)
        return clone

    def stripped(self) -> "IsingProblem":
        """Same variable part with the diagonal (constant offset) removed."""
        return IsingProblem(self.fields, self.offdiag, dict(self.metadata))


def cell_couplings(
    lattice: Lattice,
    cell: UnitCell,
    alpha: float,
    J: float = 1.0,
    tol: float = DEFAULT_TOL,
    include_long_range: bool = True,
) -> np.ndarray:
    """Sum of the resummed long-range matrix (if enabled) and the folded short-range bonds."""
    total = fold_short_range_bonds(lattice, cell)
    if include_long_range:
        total = resum_couplings(lattice, cell, alpha, J, tol).values + total
    return total


def build_problem(
    lattice: Lattice,
    cell: UnitCell,
    alpha: float,
    J: float = 1.0,
    h: float = 0.0,
    tol: float = DEFAULT_TOL,
    include_long_range: bool = True,
) -> IsingProblem:
    couplings = cell_couplings(lattice, cell, alpha, J, tol, include_long_range)
    meta = {
        "lattice": lattice.name,
        "cell": [list(row) for row in cell.coeffs],
        "alpha": float(alpha),
        "J": float(J),
        "h": float(h),
        "include_long_range": bool(include_long_range),
    }
    return IsingProblem(np.full(cell.K, float(h)), couplings, meta)


def pair_energy(offdiag: np.ndarray, s: np.ndarray) -> float:
    """1/2 s.J.s for a float spin vector (no validation)."""
    return 0.5 * float(s @ (offdiag @ s))


def energy_per_cell(problem: IsingProblem, config: Sequence[int]) -> float:
    s = as_spins(config, problem.K).astype(float)
    return float(problem.fields @ s) + pair_energy(problem.offdiag, s) + problem.constant_offset


def energy_per_site(problem: IsingProblem, config: Sequence[int]) -> float:
    return energy_per_cell(problem, config) / problem.K


def magnetization(config: Sequence[int]) -> float:
    s = as_spins(config)
    return float(np.sum(s, dtype=np.int64)) / s.shape[0]


# --- export document -------------------------------------------------------


def to_document(problem: IsingProblem, include_offset: bool = True) -> dict:
    """Plain-data export: fields, upper-triangle couplings and the constant offset."""
    iu, ju = np.triu_indices(problem.K, k=1)
    vals = problem.couplings[iu, ju]
    return {
        "metadata": dict(problem.metadata),
        "K": problem.K,
        "fields": [float(v) for v in problem.fields],
        "couplings": [[int(i), int(j), float(v)] for i, j, v in zip(iu, ju, vals) if v != 0.0],
        "constantOffset": problem.constant_offset if include_offset else 0.0,
    }


def from_document(doc: Mapping) -> IsingProblem:
    """Inverse of :func:`to_document`. The offset is restored as a uniform diagonal."""
    K = int(doc["K"])
    fields = np.asarray(doc["fields"], dtype=float)
    couplings = np.zeros((K, K))
    for i, j, v in doc["couplings"]:
        i, j = int(i), int(j)
        if not (0 <= i < K and 0 <= j < K) or i == j:
            raise ValueError(f"invalid coupling index pair ({i}, {j}) for K={K}")
        couplings[i, j] = couplings[j, i] = float(v)
    offset = float(doc.get("constantOffset", 0.0))
    if offset:
        np.fill_diagonal(couplings, 2.0 * offset / K)
    return IsingProblem(fields, couplings, dict(doc.get("metadata", {})))
