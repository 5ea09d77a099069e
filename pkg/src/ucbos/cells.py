"""Enumeration of candidate unit cells (sublattices of a Bravais lattice).

A unit cell is an integer 2x2 matrix ``M`` whose rows give the cell's
translation vectors in units of the primitive vectors. Two matrices describe
the same periodicity iff their rows span the same integer sublattice; the
Hermite normal form ``[[a, b], [0, d]]`` with ``a, d > 0`` and ``0 <= b < d``
is the canonical key.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .lattice import Lattice, site_position

Coeffs = tuple[tuple[int, int], tuple[int, int]]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def canonicalize(coeffs: Sequence[Sequence[int]]) -> Coeffs:
    """Hermite normal form of the row lattice of a nonsingular 2x2 integer matrix."""
    (p, q), (r, s) = ((int(v) for v in row) for row in coeffs)
    if p * s - q * r == 0:
        raise ValueError(f"singular cell matrix {coeffs}")
    g, x, y = _egcd(p, r)
    # unimodular row operation clearing the first column below the pivot
    top = (g, x * q + y * s)
    bottom_second = (r // g) * q - (p // g) * s
    d = abs(bottom_second)
    b = top[1] % d
    return ((g, b), (0, d))


def index_of(coeffs: Sequence[Sequence[int]]) -> int:
    (p, q), (r, s) = coeffs
    return abs(p * s - q * r)


def coset_representative(hnf: Coeffs, n: int, m: int) -> tuple[int, int]:
    """Unique representative of (n, m) modulo the sublattice with HNF ``hnf``."""
    (a, b), (_, d) = hnf
    q = n // a
    return (n - q * a, (m - q * b) % d)


@dataclass(frozen=True)
class Site:
    cell_index: tuple[int, int]
    basis_index: int
    position: tuple[float, float]


@dataclass(frozen=True)
class UnitCell:
    coeffs: Coeffs
    T1: tuple[float, float]
    T2: tuple[float, float]
    sites: tuple[Site, ...]

    @property
    def K(self) -> int:
        return len(self.sites)

    @property
    def key(self) -> str:
        (a, b), (c, d) = self.coeffs
        return f"{a}:{b}:{c}:{d}"

    @property
    def translations(self) -> np.ndarray:
        return np.array([self.T1, self.T2])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.position for s in self.sites])

    @property
    def area(self) -> float:
        return abs(float(np.linalg.det(self.translations)))

    def site_lookup(self) -> dict[tuple[tuple[int, int], int], int]:
        """Map (coset representative of cell index, basis index) -> site index."""
        return {
            (coset_representative(self.coeffs, *s.cell_index), s.basis_index): k
            for k, s in enumerate(self.sites)
        }

    def wrap(self, cell_index: Sequence[int], basis_index: int, lookup=None) -> int:
        lookup = lookup if lookup is not None else self.site_lookup()
        rep = coset_representative(self.coeffs, int(cell_index[0]), int(cell_index[1]))
        try:
            return lookup[(rep, basis_index)]
        except KeyError:
            raise KeyError(f"site ({tuple(cell_index)}, {basis_index}) does not wrap onto cell {self.key}")


def cell_sites(lattice: Lattice, coeffs: Coeffs) -> tuple[Site, ...]:
    """One site per equivalence class modulo the cell translations.

    Positions are reduced into the parallelogram spanned by the cell's
    translation vectors; the list is ordered by (cell index, basis index).
    """
    (a, _), (_, d) = coeffs
    mat = np.array(coeffs, dtype=float)
    inv = np.linalg.inv(mat)
    frac_basis = lattice.fractional(lattice.basis_array)
    frac_basis = frac_basis - np.floor(frac_basis + 1e-12)
    out = []
    for i in range(a):
        for j in range(d):
            for b in range(lattice.n_basis):
                c = np.array([i, j], dtype=float) + frac_basis[b]
                w = c @ inv
                shift = np.floor(w + 1e-9).astype(int)
                cell = np.array([i, j]) - shift @ np.array(coeffs)
                pos = site_position(lattice, (int(cell[0]), int(cell[1])), b)
                out.append(Site((int(cell[0]), int(cell[1])), b, (float(pos[0]), float(pos[1]))))
    out.sort(key=lambda s: (s.cell_index, s.basis_index))
    return tuple(out)


def make_cell(lattice: Lattice, coeffs: Sequence[Sequence[int]]) -> UnitCell:
    hnf = canonicalize(coeffs)
    prim = lattice.primitive
    T = np.array(hnf, dtype=float) @ prim
    return UnitCell(
        coeffs=hnf,
        T1=(float(T[0, 0]), float(T[0, 1])),
        T2=(float(T[1, 0]), float(T[1, 1])),
        sites=cell_sites(lattice, hnf),
    )


def supercell(lattice: Lattice, cell: UnitCell, n1: int, n2: int) -> UnitCell:
    """Cell spanned by n1*T1 and n2*T2."""
    (p, q), (r, s) = cell.coeffs
    return make_cell(lattice, ((n1 * p, n1 * q), (n2 * r, n2 * s)))


def extend_pattern(lattice: Lattice, cell: UnitCell, bigger: UnitCell, spins: Sequence[int]) -> np.ndarray:
    """Periodic extension of a spin pattern on ``cell`` to a cell whose sublattice it contains."""
    lookup = cell.site_lookup()
    return np.array([spins[cell.wrap(s.cell_index, s.basis_index, lookup)] for s in bigger.sites])


def is_sublattice(small: Coeffs, big: Coeffs) -> bool:
    """True if every translation of ``big`` is a translation of ``small``.

    Equivalently a pattern periodic on ``small`` is also periodic on ``big``.
    """
    return all(coset_representative(small, *row) == (0, 0) for row in big)


def index_vectors(range_: int, triangular: bool) -> Iterator[tuple[int, int]]:
    """Integer coefficient pairs (i, j) admitted as candidate translation vectors."""
    for i in range(-range_, range_ + 1):
        if triangular:
            lo, hi = max(-range_ - i, -range_), min(range_ - i, range_)
        else:
            lo, hi = -range_, range_
        for j in range(lo, hi + 1):
            if (i, j) != (0, 0):
                yield (i, j)


def enumerate_coeffs(range_: int, max_index: int, triangular: bool) -> list[Coeffs]:
    vecs = list(index_vectors(range_, triangular))
    found: set[Coeffs] = set()
    for v1, v2 in itertools.product(vecs, repeat=2):
        det = abs(v1[0] * v2[1] - v1[1] * v2[0])
        if det == 0 or det > max_index:
            continue
        found.add(canonicalize((v1, v2)))
    return sorted(found, key=lambda c: (index_of(c), c))


def enumerate_cells(
    lattice: Lattice, range_: int = 6, max_sites: int = 36, triangular: bool | None = None
) -> list[UnitCell]:
    """All distinct unit cells from the bounded index set with at most ``max_sites`` sites.

    ``triangular`` selects the hexagonal index constraint (default: on unless
    the lattice is flagged square-symmetric). Sorted by (K, canonical coeffs).
    """
    if range_ < 1:
        raise ValueError("range must be >= 1")
    if max_sites < lattice.n_basis:
        raise ValueError("max_sites must be at least the basis size")
    if triangular is None:
        triangular = not lattice.square_symmetric
    max_index = max_sites // lattice.n_basis
    return [make_cell(lattice, c) for c in enumerate_coeffs(range_, max_index, triangular)]
