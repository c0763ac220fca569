"""Batch classification of power-commutator datasets.

`run_census` ingests one pc file (all groups of a single order and prime),
classifies every group (rank, derived length, semiabelian flag plus the
derived-length screen) and returns summary counts next to the records.
Records append to a JSON-lines cache file keyed by group id, so an
interrupted long run resumes by skipping finished groups. Groups classify
independently, so a worker pool can spread the load; results are keyed and
sorted by group id before reporting, which keeps the output independent of
scheduling.

Per-group failures (typically cap violations) never vanish: they are
collected in the summary, excluded from the cache so a later run retries
them, and the command-line driver turns them into a nonzero exit.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from io import StringIO
from typing import List, Optional, Sequence, Tuple

from .errors import PcFileError, PgfError
from .family import (
    SCREEN_INCONCLUSIVE,
    SCREEN_NOT_MEMBER,
    semiabelian_table,
    validate_witness,
)
from .pc import PcPresentation, parse_pc_file, pc_to_perm
from .table import DEFAULT_TABLE_CAP, CayleyTable

CACHE_ENV = "PGF_CACHE"

CSV_COLUMNS = (
    "order",
    "index",
    "provenance",
    "rank",
    "dl",
    "semiabelian",
    "screen",
    "elapsed_ms",
)


@dataclass(frozen=True)
class CensusRecord:
    """One classified group. Constructing an inconsistent record raises,
    so tampered cache lines and buggy classifications fail loudly instead
    of flowing into reports."""

    group_id: tuple
    provenance: str
    rank: int
    derived_length: int
    semiabelian: bool
    screen: str
    elapsed_ms: int

    def __post_init__(self):
        order, index = self.group_id
        if order < 1 or index < 1:
            raise PgfError(f"malformed group id {self.group_id}")
        expected = (
            SCREEN_NOT_MEMBER
            if self.derived_length > self.rank
            else SCREEN_INCONCLUSIVE
        )
        if self.screen != expected:
            raise PgfError(
                f"record {self.group_id}: screen {self.screen!r} "
                f"inconsistent with dl={self.derived_length}, rank={self.rank}"
            )
        if self.semiabelian and self.derived_length > self.rank:
            raise PgfError(
                f"record {self.group_id}: semiabelian flag contradicts "
                f"dl={self.derived_length} > rank={self.rank}"
            )
        if self.elapsed_ms < 0:
            raise PgfError(f"record {self.group_id}: negative elapsed_ms")

    def to_json_dict(self) -> dict:
        return {
            "order": self.group_id[0],
            "index": self.group_id[1],
            "provenance": self.provenance,
            "rank": self.rank,
            "dl": self.derived_length,
            "semiabelian": self.semiabelian,
            "screen": self.screen,
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CensusRecord":
        try:
            return cls(
                group_id=(d["order"], d["index"]),
                provenance=d["provenance"],
                rank=d["rank"],
                derived_length=d["dl"],
                semiabelian=d["semiabelian"],
                screen=d["screen"],
                elapsed_ms=d["elapsed_ms"],
            )
        except KeyError as exc:
            raise PgfError(f"census record is missing field {exc}") from exc


@dataclass(frozen=True)
class CensusSummary:
    order: int
    total: int
    non_semiabelian: int
    wall_time_ms: int
    failures: tuple


def classify_presentation(
    pres: PcPresentation, table_cap: int = DEFAULT_TABLE_CAP
) -> CensusRecord:
    """Classify one group, cross-checking the two order computations and
    independently validating any semiabelian witness before trusting it."""
    t0 = time.perf_counter()
    g = pc_to_perm(pres)
    if pres.prime**pres.ngens != pres.order or g.order != pres.order:
        raise PgfError(
            f"group {pres.group_id}: declared order {pres.order} disagrees "
            f"with {pres.prime}^{pres.ngens} or chain order {g.order}"
        )
    ct = CayleyTable.from_perm_group(g, cap=table_cap)
    rk = ct.rank()
    dl = ct.derived_length()
    verdict = semiabelian_table(ct)
    if verdict.flag and not validate_witness(ct, verdict.witness):
        raise PgfError(
            f"group {pres.group_id}: decomposition witness failed the "
            f"independent recheck"
        )
    screen = SCREEN_NOT_MEMBER if dl > rk else SCREEN_INCONCLUSIVE
    elapsed = int((time.perf_counter() - t0) * 1000)
    return CensusRecord(
        group_id=pres.group_id,
        provenance=pres.provenance,
        rank=rk,
        derived_length=dl,
        semiabelian=verdict.flag,
        screen=screen,
        elapsed_ms=elapsed,
    )


def cache_file_path(cache_dir: str, prime: int, order: int) -> str:
    return os.path.join(cache_dir, f"census-p{prime}-o{order}.jsonl")


def _load_cache(path: str, valid_ids: set) -> dict:
    """Read completed records; first occurrence of an id wins. Ids outside
    the dataset are skipped (the file is append-only and may be shared)."""
    out: dict = {}
    if not os.path.exists(path):
        return out
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = CensusRecord.from_json_dict(json.loads(line))
            except PgfError:
                raise
            except Exception as exc:
                raise PgfError(
                    f"unreadable cache line {lineno} in {path}: {exc}"
                ) from exc
            if rec.group_id in valid_ids:
                out.setdefault(rec.group_id, rec)
    return out


def _append_record(path: str, rec: CensusRecord) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(rec.to_json_dict()) + "\n")


def _classify_task(args) -> tuple:
    pres, table_cap = args
    try:
        return ("ok", classify_presentation(pres, table_cap))
    except PgfError as exc:
        return ("fail", pres.group_id, str(exc))


def _map_tasks(todo: Sequence, table_cap: int, jobs: int) -> list:
    tasks = [(p, table_cap) for p in todo]
    if jobs <= 1 or len(tasks) <= 1:
        return [_classify_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_classify_task, tasks))


def run_census(
    path: str,
    cache_dir: Optional[str] = None,
    jobs: Optional[int] = None,
    table_cap: int = DEFAULT_TABLE_CAP,
) -> Tuple[CensusSummary, List[CensusRecord]]:
    """Classify every group in a pc file, resuming from the cache if given.

    `cache_dir` falls back to the PGF_CACHE environment variable; with
    neither set the run is purely in-memory. `jobs` defaults to the
    machine's available parallelism.
    """
    t0 = time.perf_counter()
    presentations = parse_pc_file(path)
    if not presentations:
        raise PcFileError("dataset has no groups", path=path)
    orders = sorted({p.order for p in presentations})
    primes = sorted({p.prime for p in presentations})
    if len(orders) > 1:
        raise PcFileError(f"dataset mixes orders {orders}", path=path)
    if len(primes) > 1:
        raise PcFileError(f"dataset mixes primes {primes}", path=path)
    order, prime = orders[0], primes[0]
    valid_ids = {p.group_id for p in presentations}

    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    cache_path = None
    cached: dict = {}
    if cache_dir:
        cache_path = cache_file_path(cache_dir, prime, order)
        cached = _load_cache(cache_path, valid_ids)

    todo = [p for p in presentations if p.group_id not in cached]
    if jobs is None:
        jobs = os.cpu_count() or 1

    fresh: dict = {}
    failures: list = []
    for outcome in _map_tasks(todo, table_cap, jobs):
        if outcome[0] == "ok":
            rec = outcome[1]
            fresh[rec.group_id] = rec
            if cache_path:
                _append_record(cache_path, rec)
        else:
            _, gid, msg = outcome
            failures.append({"order": gid[0], "index": gid[1], "error": msg})

    records = sorted((cached | fresh).values(), key=lambda r: r.group_id)
    summary = CensusSummary(
        order=order,
        total=len(records),
        non_semiabelian=sum(1 for r in records if not r.semiabelian),
        wall_time_ms=int((time.perf_counter() - t0) * 1000),
        failures=tuple(failures),
    )
    return summary, records


def emit_report(records, fmt: str, failures: Sequence[dict] = ()) -> str:
    """Serialize records with a stable column order.

    Output is byte-identical for identical inputs: records are sorted by
    group id and the JSON summary aggregates per-record times rather than
    embedding a measured wall clock. CSV carries the records only;
    failures appear in the JSON summary and in the driver's exit code.
    """
    rows = sorted(records, key=lambda r: r.group_id)
    if fmt == "csv":
        buf = StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.group_id[0],
                    r.group_id[1],
                    r.provenance,
                    r.rank,
                    r.derived_length,
                    "true" if r.semiabelian else "false",
                    r.screen,
                    r.elapsed_ms,
                ]
            )
        return buf.getvalue()
    if fmt == "json":
        summary = {
            "order": rows[0].group_id[0] if rows else None,
            "total": len(rows),
            "non_semiabelian": sum(1 for r in rows if not r.semiabelian),
            "wall_time_ms": sum(r.elapsed_ms for r in rows),
            "failures": [dict(f) for f in failures],
        }
        doc = {"summary": summary, "records": [r.to_json_dict() for r in rows]}
        return json.dumps(doc, indent=2)
    raise ValueError(f"unknown report format {fmt!r}")
