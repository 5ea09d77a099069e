"""Interchangeable minimisers for :class:`~ucbos.model.IsingProblem`.

Configuration index ``n`` (for exhaustive enumeration) maps spin ``k`` to +1
if bit ``K-1-k`` of ``n`` is set and to -1 otherwise, so increasing ``n`` is
lexicographic order of the spin tuples with -1 < +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numba import njit

from .model import IsingProblem, as_spins, energy_per_cell, pair_energy

KINDS = ("exhaustive", "greedy", "simulatedAnnealing", "externalFileExchange")
EXHAUSTIVE_MAX_K = 28
TIE_TOL = 1e-12
DEFAULT_NUM_READS = 1000
DEFAULT_SWEEPS = 1000


@dataclass(frozen=True)
class SamplerConfig:
    kind: str = "simulatedAnnealing"
    num_reads: int = DEFAULT_NUM_READS
    sweeps: int = DEFAULT_SWEEPS
    # None -> scaled from the problem's coupling magnitudes
    beta_schedule: tuple[float, float] | None = None
    seed: int = 0
    # external sampler only
    exchange_dir: str | None = None
    timeout: float = 600.0
    annealing_time: float = 200.0
    profile: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}; expected one of {KINDS}")
        if self.num_reads < 1:
            raise ValueError("num_reads must be >= 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.beta_schedule is not None:
            lo, hi = self.beta_schedule
            if not (0 < lo <= hi):
                raise ValueError("beta schedule needs 0 < beta_min <= beta_max")
            object.__setattr__(self, "beta_schedule", (float(lo), float(hi)))


@dataclass(frozen=True)
class Sample:
    spins: tuple[int, ...]
    energy: float
    occurrences: int = 1


@dataclass(frozen=True)
class SampleSet:
    samples: tuple[Sample, ...]

    @property
    def best(self) -> int:
        energies = [s.energy for s in self.samples]
        return int(np.argmin(energies))

    @property
    def first(self) -> Sample:
        return self.samples[self.best]

    @property
    def min_energy(self) -> float:
        return self.first.energy

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def from_states(
        cls,
        problem: IsingProblem,
        states: np.ndarray,
        occurrences: Sequence[int] | None = None,
        sort: bool = True,
    ) -> "SampleSet":
        """Aggregate identical states and score them with :func:`energy_per_cell`.

        ``sort`` orders samples by energy (stable in first-occurrence order);
        otherwise input order is kept.
        """
        states = np.atleast_2d(np.asarray(states))
        occ = np.ones(len(states), dtype=int) if occurrences is None else np.asarray(occurrences, dtype=int)
        merged: dict[tuple[int, ...], int] = {}
        for row, n in zip(states, occ):
            key = tuple(int(v) for v in as_spins(row, problem.K))
            merged[key] = merged.get(key, 0) + int(n)
        samples = [Sample(k, energy_per_cell(problem, k), n) for k, n in merged.items()]
        if sort:
            samples.sort(key=lambda s: s.energy)
        return cls(tuple(samples))


# --- exhaustive ------------------------------------------------------------


def index_to_spins(index: np.ndarray | int, K: int) -> np.ndarray:
    idx = np.atleast_1d(np.asarray(index, dtype=np.int64))
    shifts = np.arange(K - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


def _popcount(idx: np.ndarray) -> np.ndarray:
    out = np.zeros(idx.shape, dtype=np.int64)
    work = idx.copy()
    while np.any(work):
        out += work & 1
        work >>= 1
    return out


def _enumerate_blocks(
    fields: np.ndarray, offdiag: np.ndarray, chunk: int = 1 << 22
) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (first index, low-part width L, energies[n_hi, 2^L]) over all 2^K configurations.

    Energies exclude the constant offset.
    """
    K = len(fields)
    L = min(K, 14)
    H = K - L
    lo_idx = np.arange(1 << L, dtype=np.int64)
    s_lo = index_to_spins(lo_idx, L).astype(float) if L else np.zeros((1, 0))
    f_hi, f_lo = fields[:H], fields[H:]
    A, B, C = offdiag[:H, :H], offdiag[H:, H:], offdiag[:H, H:]
    e_lo = s_lo @ f_lo + 0.5 * np.einsum("ni,ij,nj->n", s_lo, B, s_lo)
    per = max(1, chunk >> L)
    for start in range(0, 1 << H, per):
        hi_idx = np.arange(start, min(start + per, 1 << H), dtype=np.int64)
        s_hi = index_to_spins(hi_idx, H).astype(float) if H else np.zeros((len(hi_idx), 0))
        e_hi = s_hi @ f_hi + 0.5 * np.einsum("ni,ij,nj->n", s_hi, A, s_hi)
        block = e_hi[:, None] + e_lo[None, :] + (s_hi @ C) @ s_lo.T
        yield start << L, L, block


def _check_exhaustive(problem: IsingProblem) -> None:
    if problem.K > EXHAUSTIVE_MAX_K:
        raise ValueError(f"exhaustive search is limited to K <= {EXHAUSTIVE_MAX_K}, got K={problem.K}")


def solve_exhaustive(problem: IsingProblem, tie_tol: float = TIE_TOL) -> SampleSet:
    """Exact global minimum; every configuration within ``tie_tol`` of it is retained."""
    _check_exhaustive(problem)
    margin = tie_tol + 1e-9 * (1.0 + float(np.abs(problem.couplings).sum() + np.abs(problem.fields).sum()))
    running = math.inf
    hit_idx: list[np.ndarray] = []
    hit_e: list[np.ndarray] = []
    for first, _, block in _enumerate_blocks(problem.fields, problem.offdiag):
        flat = block.ravel()
        running = min(running, float(flat.min()))
        sel = np.nonzero(flat <= running + margin)[0]
        hit_idx.append(sel + first)
        hit_e.append(flat[sel])
    idx = np.concatenate(hit_idx)
    idx = idx[np.concatenate(hit_e) <= running + margin]
    return _exact_ties(problem, np.sort(idx), tie_tol)


def _exact_ties(problem: IsingProblem, indices: np.ndarray, tie_tol: float) -> SampleSet:
    states = index_to_spins(indices, problem.K)
    energies = np.array([energy_per_cell(problem, s) for s in states])
    keep = energies <= energies.min() + tie_tol
    return SampleSet(tuple(Sample(tuple(int(v) for v in s), float(e), 1) for s, e in zip(states[keep], energies[keep])))


@dataclass(frozen=True)
class _Sector:
    indices: np.ndarray
    spins: tuple[tuple[int, ...], ...]
    floats: np.ndarray
    pair: tuple[float, ...]


class ExhaustiveSpectrum:
    """Per-magnetisation minima of the interaction energy of one coupling matrix.

    For uniform fields h the energy is E_J(s) + h * sum(s), so the minimisers
    at any h lie among the sector minima. :meth:`solve` reproduces
    :func:`solve_exhaustive` for ``problem.with_fields(h)`` without
    re-enumerating; energies are bit-identical to :func:`energy_per_cell`.
    """

    def __init__(self, problem: IsingProblem, tie_tol: float = TIE_TOL):
        _check_exhaustive(problem)
        self.problem = problem.with_fields(0.0)
        self.tie_tol = tie_tol
        K = problem.K
        margin = tie_tol + 1e-9 * (1.0 + float(np.abs(problem.couplings).sum()))
        best = np.full(K + 1, np.inf)
        found: list[list[np.ndarray]] = [[] for _ in range(K + 1)]
        zero = np.zeros(K)
        for first, L, block in _enumerate_blocks(zero, problem.offdiag):
            n_hi, n_lo = block.shape
            ups = (_popcount(np.arange(first >> L, (first >> L) + n_hi, dtype=np.int64))[:, None]
                   + _popcount(np.arange(n_lo, dtype=np.int64))[None, :])
            flat, ups = block.ravel(), ups.ravel()
            sector_min = np.full(K + 1, np.inf)
            np.minimum.at(sector_min, ups, flat)
            best = np.minimum(best, sector_min)
            sel = np.nonzero(flat <= best[ups] + margin)[0]
            if sel.size:
                for n_up in np.unique(ups[sel]):
                    found[n_up].append(sel[ups[sel] == n_up] + first)
        self.sectors: dict[int, _Sector] = {}
        self.sector_energy: dict[int, float] = {}
        off = self.problem.offdiag
        for n_up in range(K + 1):
            if not found[n_up]:
                continue
            idx = np.sort(np.concatenate(found[n_up]))
            floats = index_to_spins(idx, K).astype(float)
            pair = np.array([pair_energy(off, s) for s in floats])
            keep = pair <= pair.min() + margin
            self.sectors[n_up] = _Sector(
                idx[keep],
                tuple(tuple(int(v) for v in s) for s in floats[keep]),
                floats[keep],
                tuple(float(e) for e in pair[keep]),
            )
            self.sector_energy[n_up] = float(pair.min()) + self.problem.constant_offset

    def solve(self, h: float) -> SampleSet:
        K = self.problem.K
        rough = {n: e + h * (2 * n - K) for n, e in self.sector_energy.items()}
        lowest = min(rough.values())
        active = [n for n in sorted(rough) if rough[n] <= lowest + 1e-9 * (1 + abs(lowest))]
        fields = np.full(K, float(h))
        offset = self.problem.constant_offset
        rows = []
        for n in active:
            sec = self.sectors[n]
            for i, spins, s, pair in zip(sec.indices, sec.spins, sec.floats, sec.pair):
                rows.append((int(i), spins, float(fields @ s) + pair + offset))
        rows.sort(key=lambda r: r[0])
        e_min = min(r[2] for r in rows)
        return SampleSet(tuple(Sample(spins, e, 1) for _, spins, e in rows if e <= e_min + self.tie_tol))


# --- stochastic kernels ----------------------------------------------------


@njit(cache=True)
def _random_start(K):
    s = np.empty(K)
    for i in range(K):
        s[i] = 1.0 if np.random.random() < 0.5 else -1.0
    return s


@njit(cache=True)
def _local_fields(offdiag, fields, s):
    K = s.shape[0]
    local = fields.copy()
    for i in range(K):
        for j in range(K):
            local[i] += offdiag[i, j] * s[j]
    return local


@njit(cache=True)
def _flip(offdiag, local, s, i):
    s[i] = -s[i]
    delta = 2.0 * s[i]
    for j in range(s.shape[0]):
        local[j] += offdiag[j, i] * delta


@njit(cache=True)
def _anneal_kernel(offdiag, fields, betas, seeds):
    K = fields.shape[0]
    R = seeds.shape[0]
    out = np.empty((R, K), dtype=np.int8)
    for r in range(R):
        np.random.seed(seeds[r])
        s = _random_start(K)
        local = _local_fields(offdiag, fields, s)
        for beta in betas:
            for i in range(K):
                dE = -2.0 * s[i] * local[i]
                if dE <= 0.0 or np.random.random() < math.exp(-beta * dE):
                    _flip(offdiag, local, s, i)
        for i in range(K):
            out[r, i] = np.int8(s[i])
    return out


@njit(cache=True)
def _greedy_kernel(offdiag, fields, seeds, threshold):
    K = fields.shape[0]
    R = seeds.shape[0]
    out = np.empty((R, K), dtype=np.int8)
    for r in range(R):
        np.random.seed(seeds[r])
        s = _random_start(K)
        local = _local_fields(offdiag, fields, s)
        for _ in range(100 * K * K + 100):
            best_i = -1
            best_dE = -threshold
            for i in range(K):
                dE = -2.0 * s[i] * local[i]
                if dE < best_dE:
                    best_dE = dE
                    best_i = i
            if best_i < 0:
                break
            _flip(offdiag, local, s, best_i)
        for i in range(K):
            out[r, i] = np.int8(s[i])
    return out


@njit(cache=True)
def _metropolis_histogram(offdiag, fields, beta, sweeps, seed):
    K = fields.shape[0]
    np.random.seed(seed)
    s = _random_start(K)
    local = _local_fields(offdiag, fields, s)
    counts = np.zeros(1 << K, dtype=np.int64)
    for _ in range(sweeps):
        for i in range(K):
            dE = -2.0 * s[i] * local[i]
            if dE <= 0.0 or np.random.random() < math.exp(-beta * dE):
                _flip(offdiag, local, s, i)
        idx = 0
        for i in range(K):
            idx = 2 * idx + (1 if s[i] > 0 else 0)
        counts[idx] += 1
    return counts


def read_seeds(seed: int, num_reads: int) -> np.ndarray:
    """Independent per-read RNG seeds derived from one master seed."""
    return np.random.SeedSequence(seed).generate_state(num_reads).astype(np.int64)


def default_beta_range(problem: IsingProblem) -> tuple[float, float]:
    """Inverse-temperature endpoints scaled to the problem's energy scales.

    The hot end accepts the largest possible single-flip increase with
    probability 1/2; the cold end accepts the smallest nonzero coupling or
    field scale with probability 1e-7.
    """
    off = np.abs(problem.offdiag)
    h = np.abs(problem.fields)
    max_delta = float(np.max(2.0 * (h + off.sum(axis=1)))) if problem.K else 0.0
    terms = np.concatenate([2.0 * off[np.triu_indices(problem.K, 1)], 2.0 * h])
    terms = terms[terms > 0]
    if max_delta == 0.0 or terms.size == 0:
        return (1.0, 1.0)
    beta_min = math.log(2.0) / max_delta
    beta_max = math.log(1e7) / float(terms.min())
    return (beta_min, max(beta_min, beta_max))


def geometric_betas(beta_min: float, beta_max: float, sweeps: int) -> np.ndarray:
    if sweeps == 1:
        return np.array([beta_max])
    return np.geomspace(beta_min, beta_max, sweeps)


def solve_simulated_annealing(problem: IsingProblem, config: SamplerConfig | None = None) -> SampleSet:
    """Metropolis single-spin-flip annealing, ``num_reads`` independent reads."""
    config = config or SamplerConfig("simulatedAnnealing")
    lo, hi = config.beta_schedule or default_beta_range(problem)
    betas = geometric_betas(lo, hi, config.sweeps)
    states = _anneal_kernel(
        np.ascontiguousarray(problem.offdiag), np.ascontiguousarray(problem.fields), betas,
        read_seeds(config.seed, config.num_reads),
    )
    return SampleSet.from_states(problem, states)


def solve_greedy(problem: IsingProblem, config: SamplerConfig | None = None) -> SampleSet:
    """Steepest-descent single-spin flips from random starts until no flip lowers the energy."""
    config = config or SamplerConfig("greedy")
    scale = float(np.abs(problem.couplings).max(initial=0.0) + np.abs(problem.fields).max(initial=0.0))
    states = _greedy_kernel(
        np.ascontiguousarray(problem.offdiag), np.ascontiguousarray(problem.fields),
        read_seeds(config.seed, config.num_reads), 1e-12 * max(scale, 1.0),
    )
    return SampleSet.from_states(problem, states)


def metropolis_histogram(problem: IsingProblem, beta: float, sweeps: int, seed: int = 0) -> np.ndarray:
    """Visit counts per configuration index after each fixed-beta sweep (small K only)."""
    if problem.K > 20:
        raise ValueError("histogram over 2^K states is limited to K <= 20")
    return _metropolis_histogram(
        np.ascontiguousarray(problem.offdiag), np.ascontiguousarray(problem.fields), float(beta), int(sweeps), int(seed)
    )


def solve(problem: IsingProblem, config: SamplerConfig) -> SampleSet:
    """Dispatch on ``config.kind``."""
    if config.kind == "exhaustive":
        return solve_exhaustive(problem)
    if config.kind == "greedy":
        return solve_greedy(problem, config)
    if config.kind == "simulatedAnnealing":
        return solve_simulated_annealing(problem, config)
    from .exchange import solve_external

    if config.exchange_dir is None:
        raise ValueError("externalFileExchange sampler needs exchange_dir")
    return solve_external(problem, config, config.exchange_dir)
