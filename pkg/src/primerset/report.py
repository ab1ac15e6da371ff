"""Solution reports and their JSON/CSV serialization.

JSON schema (``format: primerset-report/1``)::

    {
      "format": "primerset-report/1",
      "algorithm": "gpot",
      "primers": ["acgtacgtac", ...],         # selection order
      "count": 12,
      "seconds": 0.031,                      # wall clock, the only timing field
      "seed": 7 | null,
      "parameters": {"n": .., "L": .., "k": .., "delta": ..},
      "instance_sha256": "..." | null,
      "witnesses": [
        {"target": 1, "forward_primer": "..", "t": 950, "reverse_primer": "..",
         "t_prime": 600, "amplicon_length": 451, "satisfying_pairs": 3}, ...
      ]
    }

CSV: one ``witness`` row per target followed by one ``summary`` row.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

REPORT_FORMAT = "primerset-report/1"
TIMING_FIELDS = ("seconds",)
CSV_COLUMNS = (
    "row", "algorithm", "target", "forward_primer", "t", "reverse_primer", "t_prime",
    "amplicon_length", "satisfying_pairs", "count", "seconds", "seed",
)


@dataclass(frozen=True)
class Witness:
    target: int
    forward_primer: str
    t: int
    reverse_primer: str
    t_prime: int
    amplicon_length: int
    satisfying_pairs: int = 1


@dataclass
class SolutionReport:
    algorithm: str
    primers: list[str]
    witnesses: list[Witness]
    seconds: float = 0.0
    seed: int | None = None
    parameters: dict = field(default_factory=dict)
    instance_sha256: str | None = None
    # potential (G-POT) or covered-string count (G-FIX/G-VAR) after each pick
    progress: list[int] = field(default_factory=list, repr=False)

    @property
    def count(self) -> int:
        return len(self.primers)

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "algorithm": self.algorithm,
            "primers": list(self.primers),
            "count": self.count,
            "seconds": round(self.seconds, 3),
            "seed": self.seed,
            "parameters": dict(self.parameters),
            "instance_sha256": self.instance_sha256,
            "witnesses": [asdict(w) for w in self.witnesses],
        }

    @classmethod
    def from_dict(cls, data: dict) -> SolutionReport:
        if data.get("format") != REPORT_FORMAT:
            raise ValueError(f"not a {REPORT_FORMAT} document (format={data.get('format')!r})")
        return cls(
            algorithm=data["algorithm"],
            primers=list(data["primers"]),
            witnesses=[Witness(**w) for w in data["witnesses"]],
            seconds=float(data.get("seconds", 0.0)),
            seed=data.get("seed"),
            parameters=dict(data.get("parameters", {})),
            instance_sha256=data.get("instance_sha256"),
        )


def write_report(report: SolutionReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for w in report.witnesses:
        writer.writerow([
            "witness", report.algorithm, w.target, w.forward_primer, w.t, w.reverse_primer,
            w.t_prime, w.amplicon_length, w.satisfying_pairs, "", "", "",
        ])
    seed = "" if report.seed is None else report.seed
    writer.writerow(["summary", report.algorithm, "", "", "", "", "", "", "",
                     report.count, f"{report.seconds:.3f}", seed])
    return buf.getvalue().encode()


def read_report(data: bytes | str) -> SolutionReport:
    if isinstance(data, bytes):
        data = data.decode()
    return SolutionReport.from_dict(json.loads(data))


def strip_timing(doc: dict) -> dict:
    """Copy of a report dict with timing fields removed (for determinism checks)."""
    return {key: value for key, value in doc.items() if key not in TIMING_FIELDS}
