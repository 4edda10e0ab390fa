"""Resumable, parallel verification over a range of primes.

The checkpoint is a JSON-lines file with one record per finished prime,
appended and flushed as each prime completes.  Records may land out of
order while a run is in flight; when the run finishes the checkpoint is
rewritten sorted by p and the report (the same records minus timings) is
written next to it, both through a temp file and ``os.replace``.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from pathlib import Path

from .modmath import primes_in_range
from .verifier import COUNTEREXAMPLE, VERIFIED, SuspiciousResidue, stage1_scan, stage2_lift

log = logging.getLogger(__name__)

SCHEMA = 1
JOBS_ENV = "FLTCHECK_JOBS"
DEFAULT_CHUNK = 1 << 16
FIELDS = ("schema", "p", "conjecture", "status", "suspicious", "lift", "ms")


class CheckpointError(Exception):
    pass


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw is None:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise CheckpointError(f"{JOBS_ENV} must be an integer, got {raw!r}") from None
    return jobs


@dataclass
class RunConfig:
    conjecture: int
    start: int
    stop: int
    jobs: int = 1
    checkpoint_path: Path | None = None
    report_path: Path | None = None
    chunk: int = DEFAULT_CHUNK
    largest_first: bool = False

    def validate(self) -> None:
        if self.conjecture not in (1, 2):
            raise ValueError(f"conjecture must be 1 or 2, got {self.conjecture}")
        if self.start < 5:
            raise ValueError(f"--from must be >= 5, got {self.start}")
        if self.stop < self.start:
            raise ValueError(f"--to ({self.stop}) is below --from ({self.start})")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")
        if self.chunk < 1:
            raise ValueError(f"chunk must be >= 1, got {self.chunk}")


def make_record(p: int, conjecture: int, suspicious: list[int], lift: int | None, ms: float) -> dict:
    return {
        "schema": SCHEMA,
        "p": p,
        "conjecture": conjecture,
        "status": VERIFIED if lift is None else COUNTEREXAMPLE,
        "suspicious": list(suspicious),
        "lift": lift,
        "ms": round(ms, 3),
    }


def dump_line(record: dict, timings: bool = True) -> str:
    keys = FIELDS if timings else FIELDS[:-1]
    return json.dumps({k: record[k] for k in keys}, separators=(",", ":")) + "\n"


def read_checkpoint(path: Path) -> dict[int, dict]:
    """Completed records keyed by p; a torn final line from a killed run is skipped."""
    records: dict[int, dict] = {}
    if not path.exists():
        return records
    lines = path.read_text(encoding="utf-8").splitlines()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            if lineno == len(lines):
                log.warning("ignoring truncated last line of %s", path)
                continue
            raise CheckpointError(f"{path}:{lineno}: not valid JSON") from None
        if rec.get("schema") != SCHEMA:
            raise CheckpointError(f"{path}:{lineno}: unsupported schema {rec.get('schema')!r}")
        records[rec["p"]] = rec
    return records


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _scan_chunk(p: int, lo: int, hi: int) -> tuple[list[int], float]:
    t0 = time.perf_counter()
    xs = [s.X for s in stage1_scan(p, lo, hi)]
    return xs, (time.perf_counter() - t0) * 1000


def _chunks(p: int, size: int) -> list[tuple[int, int]]:
    half = (p - 1) // 2
    return [(lo, min(lo + size - 1, half)) for lo in range(1, half + 1, size)]


@dataclass
class _Pending:
    remaining: int
    suspicious: list[int] = field(default_factory=list)
    ms: float = 0.0


def _completed_serial(todo: list[int], chunk: int):
    for p in todo:
        state = _Pending(0)
        for lo, hi in _chunks(p, chunk):
            xs, ms = _scan_chunk(p, lo, hi)
            state.suspicious.extend(xs)
            state.ms += ms
        yield p, state


def _completed_parallel(todo: list[int], chunk: int, jobs: int):
    with ProcessPoolExecutor(jobs) as pool:
        pending: dict[int, _Pending] = {}
        futures = {}
        for p in todo:
            parts = _chunks(p, chunk)
            pending[p] = _Pending(len(parts))
            for lo, hi in parts:
                futures[pool.submit(_scan_chunk, p, lo, hi)] = p
        waiting = set(futures)
        try:
            while waiting:
                finished, waiting = wait(waiting, return_when=FIRST_COMPLETED)
                for fut in sorted(finished, key=lambda f: futures[f]):
                    p = futures[fut]
                    xs, ms = fut.result()
                    state = pending[p]
                    state.suspicious.extend(xs)
                    state.ms += ms
                    state.remaining -= 1
                    if not state.remaining:
                        del pending[p]
                        yield p, state
        finally:
            for fut in waiting:
                fut.cancel()


@dataclass
class RunSummary:
    records: list[dict]
    new: int
    counterexamples: list[dict]

    @property
    def exit_code(self) -> int:
        return 2 if self.counterexamples else 0


def run_verify(config: RunConfig) -> RunSummary:
    config.validate()
    ckpt = config.checkpoint_path
    done: dict[int, dict] = read_checkpoint(ckpt) if ckpt else {}
    for rec in done.values():
        if rec["conjecture"] != config.conjecture:
            raise CheckpointError(
                f"{ckpt} holds conjecture {rec['conjecture']} records, not {config.conjecture}"
            )

    if ckpt and ckpt.exists():
        # drop a torn tail so appended records start on a fresh line
        _write_atomic(ckpt, "".join(dump_line(done[p]) for p in sorted(done)))

    todo = [p for p in primes_in_range(config.start, config.stop) if p not in done]
    if config.largest_first:
        todo.reverse()
    log.info("%d primes to verify, %d already checkpointed", len(todo), len(done))

    if config.jobs > 1:
        stream = _completed_parallel(todo, config.chunk, config.jobs)
    else:
        stream = _completed_serial(todo, config.chunk)
    new = 0
    out = open(ckpt, "a", encoding="utf-8") if ckpt else None
    try:
        for p, state in stream:
            rec = _finish_prime(p, config.conjecture, state)
            done[p] = rec
            new += 1
            if out:
                out.write(dump_line(rec))
                out.flush()
                os.fsync(out.fileno())
            if rec["status"] == COUNTEREXAMPLE:
                log.warning("counterexample at p=%d: lift %d", p, rec["lift"])
    finally:
        if out:
            out.close()

    ordered = [done[p] for p in sorted(done)]
    if ckpt:
        _write_atomic(ckpt, "".join(dump_line(r) for r in ordered))
    in_range = [r for r in ordered if config.start <= r["p"] <= config.stop]
    if config.report_path:
        _write_atomic(config.report_path, "".join(dump_line(r, timings=False) for r in in_range))
    bad = [r for r in in_range if r["status"] == COUNTEREXAMPLE]
    return RunSummary(in_range, new, bad)


def _finish_prime(p: int, conjecture: int, state: _Pending) -> dict:
    suspicious = sorted(state.suspicious)
    t0 = time.perf_counter()
    lift = stage2_lift(p, [SuspiciousResidue(x) for x in suspicious], conjecture) if suspicious else None
    ms = state.ms + (time.perf_counter() - t0) * 1000
    return make_record(p, conjecture, suspicious, lift, ms)
