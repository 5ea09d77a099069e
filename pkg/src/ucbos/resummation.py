"""Resummed power-law couplings on a unit cell.

The coupling between sites i and j of a cell is the sum of ``|r_i - r_j + v|^-alpha``
over all translations ``v`` of the cell's sublattice, excluding the ``v = 0``
self term on the diagonal. These are Epstein zeta values of the sublattice.

:func:`lattice_sum` evaluates them with an incomplete-gamma (Ewald-type)
splitting into a real-space and a reciprocal-space sum, both Gaussian
convergent. Each truncation carries a rigorous tail bound, so the returned
value is certified to the requested absolute tolerance.
:func:`direct_lattice_sum` is the plain shell-by-shell sum with an algebraic
tail bound; it is only practical at loose tolerances and serves as a check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .cells import UnitCell
from .lattice import Lattice

DEFAULT_TOL = 1e-10


def upper_gamma(a: float, z: np.ndarray) -> np.ndarray:
    """Non-normalised upper incomplete gamma function for real ``a`` and ``z > 0``."""
    z = np.asarray(z, dtype=float)
    if a > 0:
        return special.gammaincc(a, z) * special.gamma(a)
    steps = int(math.floor(-a)) + 1
    base = a + steps
    if abs(base - 1.0) < 1e-14 and abs(a - round(a)) < 1e-14:
        # a is a non-positive integer: start from Gamma(0, z) = E1(z)
        base, steps = 0.0, steps - 1
        val = special.exp1(z)
    else:
        val = special.gammaincc(base, z) * special.gamma(base)
    # downward recurrence Gamma(s-1, z) = (Gamma(s, z) - z^(s-1) e^-z) / (s-1)
    s = base
    for _ in range(steps):
        val = (val - z ** (s - 1.0) * np.exp(-z)) / (s - 1.0)
        s -= 1.0
    return val


def reduce_basis(T1, T2) -> np.ndarray:
    """Lagrange-Gauss reduced basis (rows) of the 2D lattice spanned by T1, T2."""
    b1 = np.asarray(T1, dtype=float).copy()
    b2 = np.asarray(T2, dtype=float).copy()
    if b1 @ b1 > b2 @ b2:
        b1, b2 = b2, b1
    while True:
        mu = round(float(b1 @ b2) / float(b1 @ b1))
        b2 = b2 - mu * b1
        if b2 @ b2 >= b1 @ b1:
            return np.array([b1, b2])
        b1, b2 = b2, b1


def _covering_radius(basis: np.ndarray) -> float:
    """Half the longer diagonal of the parallelogram spanned by the basis rows."""
    return 0.5 * max(np.linalg.norm(basis[0] + basis[1]), np.linalg.norm(basis[0] - basis[1]))


def _grid(basis: np.ndarray, radius: float, pad: float = 0.0) -> np.ndarray:
    """Integer coefficient grid that covers every lattice point within ``radius + pad``."""
    inv = np.linalg.inv(basis)
    reach = radius + pad
    n1 = int(math.ceil(reach * np.linalg.norm(inv[:, 0]))) + 1
    n2 = int(math.ceil(reach * np.linalg.norm(inv[:, 1]))) + 1
    i, j = np.meshgrid(np.arange(-n1, n1 + 1), np.arange(-n2, n2 + 1), indexing="ij")
    coeffs = np.stack([i.ravel(), j.ravel()], axis=1)
    pts = coeffs @ basis
    return pts[np.einsum("ij,ij->i", pts, pts) <= (reach + 1e-12) ** 2]


def _gaussian_tail(radius: float, rho: float, a: float) -> float:
    """Bound on sum over |y| > radius of Gamma(a, pi y^2) / (pi y^2)^a on a unit-area lattice."""
    u0 = radius - 2.0 * rho
    if u0 <= 0:
        return math.inf
    z0 = math.pi * u0 * u0
    c = 1.0
    if a > 1.0:
        if z0 <= a - 1.0:
            return math.inf
        c = z0 / (z0 - (a - 1.0))
    integral = math.exp(-z0) / (2 * math.pi) + rho * math.erfc(math.sqrt(math.pi) * u0) / 2.0
    return 2.0 * math.pi * c * integral / z0


def _pick_radius(rho: float, a: float, budget: float) -> float:
    radius = 2.0 * rho + 0.5
    while _gaussian_tail(radius, rho, a) > budget:
        radius += 0.25
    return radius


def _check_alpha(alpha: float) -> None:
    if not alpha > 2.0:
        raise ValueError(f"lattice sums in 2D need alpha > 2, got {alpha}")


def lattice_sums(
    displacements: np.ndarray,
    T1,
    T2,
    alpha: float,
    exclude_origin: np.ndarray | bool = False,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, float]:
    """Vectorised :func:`lattice_sum`; returns (values, certified absolute error bound)."""
    _check_alpha(alpha)
    if not tol > 0:
        raise ValueError("tol must be positive")
    disp = np.atleast_2d(np.asarray(displacements, dtype=float))
    excl = np.broadcast_to(np.asarray(exclude_origin, dtype=bool), (len(disp),))

    basis = reduce_basis(T1, T2)
    area = abs(float(np.linalg.det(basis)))
    scale = math.sqrt(area)
    unit = basis / scale
    inv = np.linalg.inv(unit)

    # minimal-image displacements on the unit-area lattice
    frac = (disp / scale) @ inv
    x = (frac - np.round(frac)) @ unit
    on_lattice = np.einsum("ij,ij->i", x, x) < (1e-9) ** 2
    if np.any(on_lattice & ~excl):
        raise ValueError("displacement coincides with a lattice translation; the sum diverges")
    if np.any(excl & ~on_lattice):
        raise ValueError("exclude_origin requested for a displacement that is not a lattice translation")
    x[excl] = 0.0

    nu = float(alpha)
    pref = math.pi ** (nu / 2) / math.gamma(nu / 2)
    outer = pref * scale ** (-nu)
    budget = tol / (2.0 * outer)

    rho = _covering_radius(unit)
    real_r = _pick_radius(rho, nu / 2, budget)
    dual = reduce_basis(*np.linalg.inv(unit).T)
    rho_k = _covering_radius(dual)
    recip_r = _pick_radius(rho_k, 1.0 - nu / 2, budget)

    # real space: pad by the largest minimal-image length so every |x + v| <= real_r is included
    pad = float(np.sqrt(np.max(np.einsum("ij,ij->i", x, x)))) if len(x) else 0.0
    vecs = _grid(unit, real_r, pad)
    y = x[:, None, :] + vecs[None, :, :]
    z = math.pi * np.einsum("pnk,pnk->pn", y, y)
    self_term = z == 0.0
    zs = np.where(self_term, 1.0, z)
    g = upper_gamma(nu / 2, zs) / zs ** (nu / 2)
    g[self_term] = 0.0
    real_part = g.sum(axis=1)

    kvecs = _grid(dual, recip_r)
    kvecs = kvecs[np.einsum("ij,ij->i", kvecs, kvecs) > 0]
    zk = math.pi * np.einsum("ij,ij->i", kvecs, kvecs)
    gk = upper_gamma(1.0 - nu / 2, zk) / zk ** (1.0 - nu / 2)
    recip_part = np.cos(2 * math.pi * (x @ kvecs.T)) @ gk + 2.0 / (nu - 2.0)

    total = real_part + recip_part - np.where(excl, 2.0 / nu, 0.0)
    bound = outer * (_gaussian_tail(real_r, rho, nu / 2) + _gaussian_tail(recip_r, rho_k, 1.0 - nu / 2))
    return outer * total, bound


def lattice_sum(displacement, T1, T2, alpha: float, exclude_origin: bool = False, tol: float = DEFAULT_TOL) -> float:
    """Sum of |displacement + l*T1 + k*T2|^-alpha over all integers l, k.

    With ``exclude_origin`` the single vanishing term is dropped (the
    displacement must then be a lattice translation). Absolute error <= tol.
    """
    values, _ = lattice_sums(np.asarray(displacement, dtype=float)[None, :], T1, T2, alpha, exclude_origin, tol)
    return float(values[0])


def direct_tail_bound(radius: float, rho: float, area: float, alpha: float) -> float:
    """Bound on the sum of |y|^-alpha over lattice-translate points with |y| > radius."""
    u0 = radius - 2.0 * rho
    if u0 <= 0:
        return math.inf
    return 2 * math.pi / area * (u0 ** (2 - alpha) / (alpha - 2) + rho * u0 ** (1 - alpha) / (alpha - 1))


def direct_lattice_sum(
    displacement,
    T1,
    T2,
    alpha: float,
    exclude_origin: bool = False,
    tol: float = 1e-6,
    max_terms: int = 50_000_000,
) -> tuple[float, float]:
    """Shell-ordered direct summation; returns (value, certified tail bound)."""
    _check_alpha(alpha)
    basis = reduce_basis(T1, T2)
    area = abs(float(np.linalg.det(basis)))
    rho = _covering_radius(basis)
    radius = 2 * rho + 1.0
    while direct_tail_bound(radius, rho, area, alpha) > tol:
        radius *= 1.25
    if math.pi * (radius + rho) ** 2 / area > max_terms:
        raise ValueError(f"direct summation to tol={tol} needs radius {radius:.3g}; too many terms")

    inv = np.linalg.inv(basis)
    frac = np.asarray(displacement, dtype=float) @ inv
    x = (frac - np.round(frac)) @ basis
    if exclude_origin:
        x = np.zeros(2)
    elif x @ x < 1e-18:
        raise ValueError("displacement coincides with a lattice translation; the sum diverges")

    # shells in order of increasing radius, innermost first
    edges = np.linspace(0.0, radius, 65)
    n2 = int(math.ceil((radius + 1) * np.linalg.norm(inv[:, 1]))) + 1
    n1 = int(math.ceil((radius + 1) * np.linalg.norm(inv[:, 0]))) + 1
    shells = np.zeros(len(edges) - 1)
    for i in range(-n1, n1 + 1):
        j = np.arange(-n2, n2 + 1)
        pts = x + i * basis[0] + j[:, None] * basis[1]
        r = np.sqrt(np.einsum("ij,ij->i", pts, pts))
        keep = (r <= radius) & (r > 0)
        idx = np.minimum(np.searchsorted(edges, r[keep], side="right") - 1, len(shells) - 1)
        np.add.at(shells, idx, r[keep] ** (-alpha))
    return float(shells[::-1].sum()), direct_tail_bound(radius, rho, area, alpha)


@dataclass(frozen=True)
class CouplingMatrix:
    values: np.ndarray
    alpha: float
    J: float
    achieved_tolerance: float

    def __post_init__(self):
        self.values.setflags(write=False)


def resum_couplings(
    lattice: Lattice, cell: UnitCell, alpha: float, J: float = 1.0, tol: float = DEFAULT_TOL
) -> CouplingMatrix:
    """K x K matrix of resummed long-range couplings J * zeta(r_i - r_j) on ``cell``."""
    _check_alpha(alpha)
    K = cell.K
    values = np.zeros((K, K))
    if J == 0.0:
        return CouplingMatrix(values, alpha, J, 0.0)
    pos = cell.positions
    iu, ju = np.triu_indices(K)
    sums, bound = lattice_sums(pos[iu] - pos[ju], cell.T1, cell.T2, alpha, iu == ju, tol / abs(J))
    values[iu, ju] = J * sums
    values[ju, iu] = J * sums
    return CouplingMatrix(values, alpha, J, abs(J) * bound)


def fold_short_range_bonds(lattice: Lattice, cell: UnitCell) -> np.ndarray:
    """Short-range bonds wrapped onto the cell's sites as a symmetric K x K matrix.

    Every directed bond contributes its amplitude once at (i, j); the global
    one-half of the energy then counts each undirected bond once.
    """
    K = cell.K
    out = np.zeros((K, K))
    if not lattice.bonds:
        return out
    lookup = cell.site_lookup()
    by_basis: dict[int, list] = {}
    for bond in lattice.bonds:
        by_basis.setdefault(bond.basis_from, []).append(bond)
    for i, site in enumerate(cell.sites):
        ci, cj = site.cell_index
        for bond in by_basis.get(site.basis_index, ()):
            n, m = bond.cell_displacement
            j = cell.wrap((ci + n, cj + m), bond.basis_to, lookup)
            out[i, j] += bond.amplitude
    return 0.5 * (out + out.T)
