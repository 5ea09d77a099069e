"""File-exchange protocol for attaching an external (e.g. quantum) sampler.

A request ``problem-<id>.json`` carries the variable part of the Ising
problem (constant offset stripped) in the fields / upper-triangle couplings /
num_reads shape used by annealer services. The external party answers with
``result-<id>.json``::

    {"id": "<id>", "samples": [{"spins": [1, -1, ...], "occurrences": 3}, ...]}

Returned energies, if any, are ignored: every configuration is validated and
re-scored locally against the full problem.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .model import IsingProblem, from_document, to_document
from .samplers import SamplerConfig, SampleSet, solve_exhaustive

log = logging.getLogger(__name__)


class ExchangeError(RuntimeError):
    """Malformed or missing response from the external sampler."""


class CapacityError(ValueError):
    """Problem does not fit the attached hardware profile."""


@dataclass(frozen=True)
class HardwareProfile:
    name: str
    max_variables: int
    max_chain_length: int
    note: str = ""


PROFILES = {
    # largest all-to-all clique embeddable with equal chains of length <= 7
    "clique-64": HardwareProfile(
        "clique-64", 64, 7, "all-to-all clique embedding with chain length <= 7 supports at most 64 variables"
    ),
}


def check_capacity(problem: IsingProblem, profile: str | None) -> None:
    if profile is None:
        return
    try:
        prof = PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown hardware profile {profile!r}; known: {sorted(PROFILES)}")
    if problem.K > prof.max_variables:
        raise CapacityError(
            f"problem has {problem.K} variables but profile {prof.name!r} has a clique capacity of "
            f"{prof.max_variables} ({prof.note})"
        )


def _atomic_write(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=1))
    os.replace(tmp, path)


def request_id(problem: IsingProblem, config: SamplerConfig) -> str:
    blob = json.dumps([to_document(problem), config.num_reads, config.seed], sort_keys=True)
    return hashlib.sha1(blob.encode()).hexdigest()[:16]


def write_request(problem: IsingProblem, config: SamplerConfig, exchange_dir: str | os.PathLike) -> str:
    check_capacity(problem, config.profile)
    doc = to_document(problem.stripped(), include_offset=False)
    rid = request_id(problem, config)
    payload = {
        "id": rid,
        "K": doc["K"],
        "fields": doc["fields"],
        "couplings": doc["couplings"],
        "numReads": config.num_reads,
        "metadata": {**doc["metadata"], "annealingTime": config.annealing_time, "profile": config.profile},
    }
    directory = Path(exchange_dir)
    directory.mkdir(parents=True, exist_ok=True)
    stale = directory / f"result-{rid}.json"
    if stale.exists():
        stale.unlink()
    _atomic_write(directory / f"problem-{rid}.json", payload)
    return rid


def read_request(path: str | os.PathLike) -> tuple[str, IsingProblem, int, dict]:
    doc = json.loads(Path(path).read_text())
    problem = from_document({"K": doc["K"], "fields": doc["fields"], "couplings": doc["couplings"],
                             "metadata": doc.get("metadata", {})})
    return doc["id"], problem, int(doc.get("numReads", 1)), doc.get("metadata", {})


def write_response(exchange_dir: str | os.PathLike, rid: str, samples: SampleSet | list[dict]) -> Path:
    if isinstance(samples, SampleSet):
        samples = [{"spins": list(s.spins), "occurrences": s.occurrences} for s in samples.samples]
    path = Path(exchange_dir) / f"result-{rid}.json"
    _atomic_write(path, {"id": rid, "samples": samples})
    return path


def parse_response(doc: dict, problem: IsingProblem, rid: str) -> SampleSet:
    if doc.get("id") != rid:
        raise ExchangeError(f"response id {doc.get('id')!r} does not match request {rid!r}")
    entries = doc.get("samples")
    if not isinstance(entries, list) or not entries:
        raise ExchangeError("response carries no samples")
    states, occ = [], []
    for n, entry in enumerate(entries):
        spins = entry.get("spins") if isinstance(entry, dict) else None
        if not isinstance(spins, list) or len(spins) != problem.K:
            raise ExchangeError(f"sample {n}: expected {problem.K} spins, got {spins!r:.60}")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) and v in (1, -1) for v in spins):
            raise ExchangeError(f"sample {n}: spin entries must be +1 or -1")
        count = entry.get("occurrences", 1)
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ExchangeError(f"sample {n}: occurrences must be a positive integer")
        states.append([int(v) for v in spins])
        occ.append(count)
    return SampleSet.from_states(problem, np.array(states), occ, sort=False)


def solve_external(
    problem: IsingProblem,
    config: SamplerConfig,
    exchange_dir: str | os.PathLike,
    poll_interval: float = 0.05,
) -> SampleSet:
    """Write a request, wait for the matching result (up to ``config.timeout`` s), re-score locally."""
    rid = write_request(problem, config, exchange_dir)
    result = Path(exchange_dir) / f"result-{rid}.json"
    deadline = time.monotonic() + config.timeout
    while not result.exists():
        if time.monotonic() > deadline:
            raise TimeoutError(f"no response for request {rid} in {exchange_dir} after {config.timeout} s")
        time.sleep(poll_interval)
    try:
        doc = json.loads(result.read_text())
    except json.JSONDecodeError as exc:
        raise ExchangeError(f"result-{rid}.json is not valid JSON: {exc}") from exc
    samples = parse_response(doc, problem, rid)
    result.unlink()
    return samples


Solver = Callable[[IsingProblem, int, dict], SampleSet]


def exhaustive_responder(problem: IsingProblem, num_reads: int, metadata: dict) -> SampleSet:
    return solve_exhaustive(problem)


def serve(
    exchange_dir: str | os.PathLike,
    solver: Solver = exhaustive_responder,
    stop: threading.Event | None = None,
    max_requests: int | None = None,
    poll_interval: float = 0.05,
) -> int:
    """Stub responder: answer every pending request until stopped; returns the number answered."""
    directory = Path(exchange_dir)
    directory.mkdir(parents=True, exist_ok=True)
    answered = 0
    while stop is None or not stop.is_set():
        pending = sorted(directory.glob("problem-*.json"))
        for path in pending:
            rid, problem, reads, meta = read_request(path)
            log.info("answering request %s (K=%d)", rid, problem.K)
            write_response(directory, rid, solver(problem, reads, meta))
            path.unlink()
            answered += 1
            if max_requests is not None and answered >= max_requests:
                return answered
        if not pending:
            if stop is None and max_requests is None:
                return answered
            time.sleep(poll_interval)
    return answered
