"""Zero records and sets: persistence, ingestion and synthetic configurations.

A :class:`ZeroSet` is an immutable, ordinate-sorted multiset of
:class:`ZeroRecord` over a window ``(t_min, t_max]``.  Multiplicity is an
explicit field; records are never duplicated to express it.
"""
from __future__ import annotations

import csv
import io
import json
import math
import zlib
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import (
    ChecksumMismatch,
    EmptyFile,
    InvariantViolation,
    NotAscending,
    ParseError,
    VersionMismatch,
)

NATIVE_VERSION = "ZPC1"
ODLYZKO_ABS_ERROR = 4e-9
# Two real parts closer than this are treated as the same line.
BETA_TOL = 1e-12


class Source(str, Enum):
    COMPUTED = "computed"
    INGESTED = "ingested"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class ZeroRecord:
    gamma: float
    beta: float = 0.5
    multiplicity: int = 1
    abs_error: float = 0.0
    source: Source = Source.COMPUTED

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "abs_error", float(self.abs_error))
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvariantViolation(f"ordinate must be positive, got {self.gamma!r}")
        if not (0 < self.beta < 1):
            raise InvariantViolation(f"real part {self.beta!r} outside the critical strip")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise InvariantViolation(f"multiplicity must be a positive integer, got {self.multiplicity!r}")
        if not self.abs_error >= 0:
            raise InvariantViolation("abs_error must be non-negative")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))
        object.__setattr__(self, "source", Source(self.source))

    @property
    def on_line(self) -> bool:
        return abs(self.beta - 0.5) <= BETA_TOL


@dataclass(frozen=True)
class CountCertificate:
    """Outcome of comparing a found zero count with the Gram/theta count."""

    window: tuple
    found: int
    formula_count: float
    certified: bool
    residual: float
    theta_count: float = math.nan
    anchors: Optional[tuple] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        d["anchors"] = list(self.anchors) if self.anchors is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CountCertificate":
        d = dict(d)
        d["window"] = tuple(d["window"])
        if d.get("anchors") is not None:
            d["anchors"] = tuple(d["anchors"])
        return cls(**d)


@dataclass(frozen=True)
class ZeroSet:
    records: tuple
    t_min: float
    t_max: float
    metadata: str = ""
    complete: bool = False
    certificate: Optional[CountCertificate] = field(default=None)

    def __post_init__(self):
        recs = tuple(self.records)
        object.__setattr__(self, "records", recs)
        if not self.t_min < self.t_max:
            raise InvariantViolation(f"empty window ({self.t_min}, {self.t_max}]")
        prev = None
        for r in recs:
            if not (self.t_min < r.gamma <= self.t_max):
                raise InvariantViolation(f"ordinate {r.gamma} outside ({self.t_min}, {self.t_max}]")
            if prev is not None:
                if r.gamma < prev.gamma:
                    raise InvariantViolation("records not sorted by ordinate")
                if r.gamma == prev.gamma and r.beta <= prev.beta:
                    raise InvariantViolation(
                        f"records at ordinate {r.gamma} must have distinct, increasing real parts")
            prev = r

    @classmethod
    def from_records(cls, records: Iterable[ZeroRecord], t_min: float, t_max: float, **kw) -> "ZeroSet":
        return cls(tuple(sorted(records, key=lambda r: (r.gamma, r.beta))), t_min, t_max, **kw)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @cached_property
    def gammas(self) -> np.ndarray:
        return np.array([r.gamma for r in self.records], dtype=float)

    @cached_property
    def betas(self) -> np.ndarray:
        return np.array([r.beta for r in self.records], dtype=float)

    @cached_property
    def multiplicities(self) -> np.ndarray:
        return np.array([r.multiplicity for r in self.records], dtype=np.int64)

    def weighted_count(self) -> int:
        """Zeros counted with multiplicity."""
        return sum(r.multiplicity for r in self.records)

    def count(self, t: float) -> int:
        """N(t) restricted to this set: sum of multiplicities with gamma <= t."""
        return sum(r.multiplicity for r in self.records if r.gamma <= t)

    def covers(self, lo: float, hi: float) -> bool:
        """True when the set is complete and its window contains (lo, hi].

        A window starting at or below 14 counts as starting at 0, since no
        zero lies below height 14.
        """
        start_ok = self.t_min <= lo or (lo <= 14.0 and self.t_min <= 14.0)
        return self.complete and start_ok and self.t_max >= hi

    def select(self, lo: float, hi: float) -> "ZeroSet":
        """Records with lo < gamma <= hi, as a set over that window."""
        recs = [r for r in self.records if lo < r.gamma <= hi]
        return ZeroSet(tuple(recs), lo, hi, self.metadata, self.covers(lo, hi), None)

    def truncate(self, n: int) -> "ZeroSet":
        """The first n records, over (t_min, gamma_n]."""
        if not 0 < n <= len(self.records):
            raise InvariantViolation(f"cannot take {n} of {len(self.records)} records")
        recs = self.records[:n]
        return ZeroSet(recs, self.t_min, recs[-1].gamma,
                       f"{self.metadata} [first {n}]".strip(), self.complete, None)


# ---------------------------------------------------------------- native format

def _native_payload(zs: ZeroSet) -> bytes:
    meta = {
        "t_min": zs.t_min,
        "t_max": zs.t_max,
        "metadata": zs.metadata,
        "complete": zs.complete,
        "certificate": zs.certificate.to_dict() if zs.certificate else None,
        "count": len(zs),
    }
    buf = io.StringIO()
    buf.write(NATIVE_VERSION + "\n")
    buf.write("meta " + json.dumps(meta, sort_keys=True) + "\n")
    for r in zs.records:
        buf.write(f"{r.gamma!r} {r.beta!r} {r.multiplicity} {r.abs_error!r} {r.source.value}\n")
    return buf.getvalue().encode("utf-8")


def save_native(zs: ZeroSet, path) -> None:
    """Write the versioned text format with a trailing CRC-32 line."""
    payload = _native_payload(zs)
    with open(path, "wb") as fh:
        fh.write(payload)
        fh.write(b"crc32 %08x\n" % (zlib.crc32(payload) & 0xFFFFFFFF))


def load_native(path) -> ZeroSet:
    data = Path(path).read_bytes()
    first = data.split(b"\n", 1)[0].decode("utf-8", "replace").strip()
    if first != NATIVE_VERSION:
        raise VersionMismatch(f"expected header {NATIVE_VERSION!r}, found {first!r}")
    body = data[:-1] if data.endswith(b"\n") else data
    cut = body.rfind(b"\n")
    tail = body[cut + 1:].decode("utf-8", "replace")
    payload = data[:cut + 1]
    if not tail.startswith("crc32 ") or cut < 0:
        raise ChecksumMismatch("missing checksum line (file truncated?)")
    if tail.split()[1] != "%08x" % (zlib.crc32(payload) & 0xFFFFFFFF):
        raise ChecksumMismatch("checksum does not match payload")
    lines = payload.decode("utf-8").splitlines()
    meta = json.loads(lines[1][len("meta "):])
    recs = []
    for line in lines[2:]:
        g, b, m, e, src = line.split()
        recs.append(ZeroRecord(float(g), float(b), int(m), float(e), Source(src)))
    if len(recs) != meta["count"]:
        raise ChecksumMismatch("record count does not match header")
    cert = CountCertificate.from_dict(meta["certificate"]) if meta["certificate"] else None
    return ZeroSet(tuple(recs), meta["t_min"], meta["t_max"], meta["metadata"], meta["complete"], cert)


# ---------------------------------------------------------------- Odlyzko text

def ingest_odlyzko(path, t_max_hint: Optional[float] = None, abs_error: float = ODLYZKO_ABS_ERROR) -> ZeroSet:
    """Read one ascending ordinate per line ('#' comments and blanks skipped).

    The file is taken to list every zero from the first one on, so the set
    covers ``(0, t_max]`` and is marked complete.
    """
    recs = []
    prev = -math.inf
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            try:
                g = float(text)
            except ValueError:
                raise ParseError(lineno, text) from None
            if not math.isfinite(g) or g <= 0:
                raise ParseError(lineno, text)
            if g <= prev:
                raise NotAscending(lineno)
            prev = g
            recs.append(ZeroRecord(g, 0.5, 1, abs_error, Source.INGESTED))
    if not recs:
        raise EmptyFile(f"{path}: no ordinates")
    t_max = max(prev, t_max_hint or prev)
    return ZeroSet(tuple(recs), 0.0, t_max, f"ingested from {Path(path).name}", True, None)


def write_odlyzko(zs: ZeroSet, path, decimals: int = 9) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in zs.records:
            fh.write(f"{r.gamma:.{decimals}f}\n")


# ---------------------------------------------------------------- exports

def to_csv(zs: ZeroSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "beta", "multiplicity"])
    for r in zs.records:
        w.writerow([repr(r.gamma), repr(r.beta), r.multiplicity])
    return buf.getvalue()


def to_json_records(zs: ZeroSet) -> list:
    return [{"gamma": r.gamma, "beta": r.beta, "multiplicity": r.multiplicity,
             "abs_error": r.abs_error, "source": r.source.value} for r in zs.records]


# ---------------------------------------------------------------- synthetic

@dataclass(frozen=True)
class SyntheticSpec:
    seeds: tuple
    symmetry_completion: bool = True

    @classmethod
    def from_json(cls, obj) -> "SyntheticSpec":
        if isinstance(obj, list):
            obj = {"seeds": obj}
        seeds = tuple((float(b), float(g), int(m)) for b, g, m in obj["seeds"])
        return cls(seeds, bool(obj.get("symmetry_completion", True)))


def _merge(acc: dict, beta: float, gamma: float, m: int) -> None:
    row = acc.setdefault(gamma, [])
    for cell in row:
        if abs(cell[0] - beta) <= BETA_TOL:
            cell[1] += m
            return
    row.append([beta, m])


def build_synthetic(spec: SyntheticSpec) -> ZeroSet:
    """Records for the seeds plus, when requested, each off-line partner.

    The partner of (beta, gamma, m) is (1 - beta, gamma, m); a partner
    already present among the seeds is not added again.  Repeated seeds
    merge by summing multiplicity.
    """
    acc: dict = {}
    for beta, gamma, m in spec.seeds:
        ZeroRecord(gamma, beta, m)  # validates
        _merge(acc, beta, gamma, m)
    if spec.symmetry_completion:
        for gamma, row in acc.items():
            for beta, m in [tuple(c) for c in row]:
                if abs(beta - 0.5) <= BETA_TOL:
                    continue
                partner = 1.0 - beta
                hit = [c for c in row if abs(c[0] - partner) <= BETA_TOL]
                if not hit:
                    row.append([partner, m])
                elif hit[0][1] < m:
                    hit[0][1] = m
    recs = [ZeroRecord(g, b, m, 0.0, Source.SYNTHETIC)
            for g, row in acc.items() for b, m in row]
    return ZeroSet.from_records(recs, 0.0, math.inf, metadata="synthetic", complete=True)
