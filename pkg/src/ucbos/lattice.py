"""Two-dimensional Bravais lattices with a basis and optional short-range bonds.

All coordinates are dimensionless lattice units; pair distances entering the
power-law couplings are measured directly in these units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# Fractional coordinates closer than this to an integer are snapped to it.
_FRAC_SNAP = 1e-12
# Distance-clustering tolerance for identifying bond classes.
BOND_CLASS_TOL = 1e-9

SSL_BOND_NAMES = ("J1", "J1p", "J2", "J2p")


@dataclass(frozen=True)
class ShortRangeBond:
    """Directed bond from (basis_from, cell 0) to (basis_to, cell n*t1 + m*t2)."""

    basis_from: int
    basis_to: int
    cell_displacement: tuple[int, int]
    amplitude: float

    def reversed(self) -> "ShortRangeBond":
        n, m = self.cell_displacement
        return ShortRangeBond(self.basis_to, self.basis_from, (-n, -m), self.amplitude)

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.basis_from, self.basis_to, *self.cell_displacement)


def _reduce_fractional(frac: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split fractional coordinates into an integer shift and a remainder in [0, 1)."""
    shift = np.floor(frac)
    rest = frac - shift
    # values like 0.9999999999999 are numerically 1 -> fold to 0
    near_one = np.abs(rest - 1.0) < _FRAC_SNAP
    shift = np.where(near_one, shift + 1, shift)
    rest = np.where(near_one, 0.0, rest)
    rest = np.where(np.abs(rest) < _FRAC_SNAP, 0.0, rest)
    return shift.astype(int), rest


@dataclass(frozen=True)
class Lattice:
    """Bravais lattice (t1, t2) with basis offsets reduced into the primitive cell.

    Construct through :meth:`Lattice.create` (or the ``make_*`` helpers), which
    performs the basis reduction and closes the bond list under reversal.
    """

    name: str
    t1: tuple[float, float]
    t2: tuple[float, float]
    basis: tuple[tuple[float, float], ...]
    bonds: tuple[ShortRangeBond, ...] = ()
    square_symmetric: bool = False
    bond_classes: Mapping[str, float] = field(default_factory=dict, compare=False)

    @classmethod
    def create(
        cls,
        name: str,
        t1: Sequence[float],
        t2: Sequence[float],
        basis: Iterable[Sequence[float]],
        bonds: Iterable[ShortRangeBond | Sequence] = (),
        square_symmetric: bool = False,
        bond_classes: Mapping[str, float] | None = None,
    ) -> "Lattice":
        vec1 = np.asarray(t1, dtype=float)
        vec2 = np.asarray(t2, dtype=float)
        if vec1.shape != (2,) or vec2.shape != (2,):
            raise ValueError("primitive vectors must be 2D")
        prim = np.array([vec1, vec2])
        det = float(np.linalg.det(prim))
        if not math.isfinite(det) or abs(det) <= 1e-12 * (np.linalg.norm(vec1) * np.linalg.norm(vec2)):
            raise ValueError("t1 and t2 must be linearly independent")

        raw = np.asarray(list(basis), dtype=float).reshape(-1, 2)
        if raw.shape[0] == 0:
            raise ValueError("basis must contain at least one site")
        frac = np.linalg.solve(prim.T, raw.T).T
        shifts, rest = _reduce_fractional(frac)
        reduced = rest @ prim
        for a, b in itertools.combinations(range(len(reduced)), 2):
            if np.allclose(rest[a], rest[b], atol=1e-9):
                raise ValueError(f"basis offsets {a} and {b} coincide modulo the lattice")

        closed: dict[tuple[int, int, int, int], ShortRangeBond] = {}
        nb = len(reduced)
        for entry in bonds:
            bond = entry if isinstance(entry, ShortRangeBond) else _bond_from_tuple(entry)
            if not (0 <= bond.basis_from < nb and 0 <= bond.basis_to < nb):
                raise ValueError(f"bond {bond} references a basis index out of range")
            if not math.isfinite(bond.amplitude):
                raise ValueError(f"bond amplitude must be finite, got {bond.amplitude}")
            # re-express the displacement relative to the reduced offsets
            n, m = bond.cell_displacement
            sf, st = shifts[bond.basis_from], shifts[bond.basis_to]
            disp = (int(n + st[0] - sf[0]), int(m + st[1] - sf[1]))
            bond = ShortRangeBond(bond.basis_from, bond.basis_to, disp, float(bond.amplitude))
            if bond.basis_from == bond.basis_to and disp == (0, 0):
                raise ValueError("a bond may not connect a site to itself")
            rev = bond.reversed()
            if bond.key in closed or rev.key in closed:
                raise ValueError(f"duplicate bond {bond.key}")
            closed[bond.key] = bond
            closed[rev.key] = rev

        return cls(
            name=name,
            t1=(float(vec1[0]), float(vec1[1])),
            t2=(float(vec2[0]), float(vec2[1])),
            basis=tuple((float(x), float(y)) for x, y in reduced),
            bonds=tuple(closed[k] for k in sorted(closed)),
            square_symmetric=square_symmetric,
            bond_classes=dict(bond_classes or {}),
        )

    @property
    def primitive(self) -> np.ndarray:
        """Rows are t1 and t2."""
        return np.array([self.t1, self.t2])

    @property
    def basis_array(self) -> np.ndarray:
        return np.array(self.basis)

    @property
    def n_basis(self) -> int:
        return len(self.basis)

    @property
    def cell_area(self) -> float:
        return abs(float(np.linalg.det(self.primitive)))

    def fractional(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.primitive.T, np.asarray(points, dtype=float).T).T

    def with_bonds(self, bonds: Iterable[ShortRangeBond | Sequence], name: str | None = None) -> "Lattice":
        """Copy of this lattice with a different (undirected) bond list."""
        return Lattice.create(
            name or self.name, self.t1, self.t2, self.basis, bonds, self.square_symmetric, self.bond_classes
        )

    def without_bonds(self) -> "Lattice":
        return Lattice(self.name, self.t1, self.t2, self.basis, (), self.square_symmetric, self.bond_classes)


def _bond_from_tuple(entry: Sequence) -> ShortRangeBond:
    b_from, b_to, n, m, amp = entry
    return ShortRangeBond(int(b_from), int(b_to), (int(n), int(m)), float(amp))


def site_position(lattice: Lattice, cell_index: Sequence[int], basis_index: int) -> np.ndarray:
    """Cartesian position i*t1 + j*t2 + delta_b."""
    if not 0 <= basis_index < lattice.n_basis:
        raise IndexError(f"basis index {basis_index} out of range for {lattice.n_basis} basis sites")
    i, j = cell_index
    t1, t2 = lattice.t1, lattice.t2
    bx, by = lattice.basis[basis_index]
    return np.array([i * t1[0] + j * t2[0] + bx, i * t1[1] + j * t2[1] + by])


def patch_positions(lattice: Lattice, radius: int) -> np.ndarray:
    """Positions of all sites in cells with |i|, |j| <= radius; shape (n, 2)."""
    rng = range(-radius, radius + 1)
    return np.array(
        [site_position(lattice, (i, j), b) for i in rng for j in rng for b in range(lattice.n_basis)]
    )


def make_triangular() -> Lattice:
    return Lattice.create("triangular", (1.0, 0.0), (0.5, math.sqrt(3) / 2), [(0.0, 0.0)])


def make_kagome() -> Lattice:
    s3 = math.sqrt(3)
    return Lattice.create(
        "kagome",
        (2.0, 0.0),
        (1.0, s3),
        [(0.0, 0.0), (0.5, s3 / 2), (-0.5, s3 / 2)],
    )


def make_square() -> Lattice:
    return Lattice.create("square", (1.0, 0.0), (0.0, 1.0), [(0.0, 0.0)], square_symmetric=True)


_SSL_A = 1.660144
_SSL_X = 1.094581
SSL_T1 = (-_SSL_A, -_SSL_A)
SSL_T2 = (_SSL_A, -_SSL_A)
SSL_BASIS = ((0.0, 0.0), (_SSL_X, 0.5), (_SSL_X, -0.5), (2.189162, 0.0))


def distance_classes(
    lattice: Lattice, n_classes: int, tol: float = BOND_CLASS_TOL, reach: int = 2
) -> list[tuple[float, list[tuple[int, int, int, int]]]]:
    """Shortest ``n_classes`` distinct inter-site distances and the directed bonds realising them.

    Bonds are (basis_from, basis_to, n, m) with basis_from's site in cell 0.
    """
    found: list[tuple[float, tuple[int, int, int, int]]] = []
    nb = lattice.n_basis
    for b_from, b_to in itertools.product(range(nb), repeat=2):
        origin = site_position(lattice, (0, 0), b_from)
        for n, m in itertools.product(range(-reach, reach + 1), repeat=2):
            if b_from == b_to and (n, m) == (0, 0):
                continue
            d = float(np.linalg.norm(site_position(lattice, (n, m), b_to) - origin))
            found.append((d, (b_from, b_to, n, m)))
    found.sort()
    classes: list[tuple[float, list[tuple[int, int, int, int]]]] = []
    for d, key in found:
        if classes and abs(d - classes[-1][0]) <= tol:
            classes[-1][1].append(key)
        elif len(classes) < n_classes:
            classes.append((d, [key]))
        else:
            break
    return classes


def make_shastry_sutherland(
    J1: float = 0.0,
    J1p: float = 0.0,
    J2: float = 0.0,
    J2p: float = 0.0,
    class_order: Sequence[str] = SSL_BOND_NAMES,
) -> Lattice:
    """Anisotropic Shastry-Sutherland lattice with four nearest-neighbour bond classes.

    The four shortest distance classes are assigned to the amplitude names in
    ``class_order`` (default: J1, J1p, J2, J2p in order of increasing distance).
    """
    amps = {"J1": J1, "J1p": J1p, "J2": J2, "J2p": J2p}
    for key, val in amps.items():
        if not math.isfinite(float(val)):
            raise ValueError(f"{key} must be finite, got {val}")
    if sorted(class_order) != sorted(SSL_BOND_NAMES):
        raise ValueError(f"class_order must be a permutation of {SSL_BOND_NAMES}")

    bare = Lattice.create("shastry-sutherland", SSL_T1, SSL_T2, SSL_BASIS, square_symmetric=True)
    classes = distance_classes(bare, 4)
    bonds = []
    distances = {}
    for name, (dist, keys) in zip(class_order, classes):
        distances[name] = dist
        seen = set()
        for b_from, b_to, n, m in keys:
            if (b_to, b_from, -n, -m) in seen:
                continue
            seen.add((b_from, b_to, n, m))
            bonds.append(ShortRangeBond(b_from, b_to, (n, m), float(amps[name])))
    return Lattice(
        bare.name, bare.t1, bare.t2, bare.basis, _close(bonds), True, distances
    )


def _close(bonds: Sequence[ShortRangeBond]) -> tuple[ShortRangeBond, ...]:
    out = {}
    for b in bonds:
        out[b.key] = b
        out[b.reversed().key] = b.reversed()
    return tuple(out[k] for k in sorted(out))


BUILTIN = {
    "triangular": make_triangular,
    "kagome": make_kagome,
    "square": make_square,
    "shastry-sutherland": make_shastry_sutherland,
}


def lattice_from_config(block: Mapping) -> Lattice:
    """Build a lattice from a configuration mapping.

    Either ``{"name": "<builtin>"}`` (SSL accepts J1, J1p, J2, J2p and an
    optional ``class_order``) or a custom block with ``t1``, ``t2``, ``basis``
    and ``bonds`` given as ``[basis_from, basis_to, n, m, amplitude]`` rows.
    """
    name = block.get("name", "custom")
    if "t1" not in block:
        if name not in BUILTIN:
            raise ValueError(f"unknown lattice {name!r}; choose from {sorted(BUILTIN)} or give t1/t2/basis")
        if name == "shastry-sutherland":
            kwargs = {k: float(block[k]) for k in SSL_BOND_NAMES if k in block}
            if "class_order" in block:
                kwargs["class_order"] = tuple(block["class_order"])
            return make_shastry_sutherland(**kwargs)
        return BUILTIN[name]()
    return Lattice.create(
        name,
        block["t1"],
        block["t2"],
        block["basis"],
        [tuple(b) for b in block.get("bonds", [])],
        square_symmetric=bool(block.get("square_symmetric", False)),
    )
