"""Instance files, random instances, FASTA genomes and locus extraction.

Instance file (UTF-8, LF)::

    MPSSL 1 n=<n> L=<L> k=<k> delta=<d>
    <id>\t<forward>\t<reverse>[\t<locus length>]     # n records

The locus length column is written only when it differs from 1.

Random instances use numpy's PCG64 bit generator seeded through
``SeedSequence(seed)``. Each raw 64-bit output yields 32 bases, low bits
first (a=0, c=1, g=2, t=3), consumed in the order f^1, r^1, f^2, r^2, ...
Only raw outputs are used, so instances do not depend on numpy's
distribution code.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Iterable

import numpy as np

from .seq import ALPHABET, Instance, SequenceFormatError, TargetPair, normalize_dna, reverse_complement

MAGIC = "MPSSL"
FORMAT_VERSION = 1


class InstanceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class LocusError(ValueError):
    def __init__(self, message: str, shortfalls: dict[int, int]):
        super().__init__(message)
        self.shortfalls = shortfalls


def generate_random_instance(n: int, L: int, k: int, seed: int, delta: int = 1) -> Instance:
    if n < 1 or not 1 <= k <= L:
        raise ValueError(f"need n >= 1 and 1 <= k <= L (n={n}, L={L}, k={k})")
    total = 2 * n * L
    words = np.random.PCG64(seed).random_raw(-(-total // 32))
    shifts = 2 * np.arange(32, dtype=np.uint64)
    codes = ((words[:, None] >> shifts) & np.uint64(3)).astype(np.uint8).ravel()[:total]
    text = np.frombuffer(ALPHABET.encode(), dtype=np.uint8)[codes].tobytes().decode()
    targets = []
    for i in range(n):
        base = 2 * i * L
        targets.append(TargetPair(i + 1, text[base : base + L], text[base + L : base + 2 * L]))
    return Instance(tuple(targets), k=k, delta=delta)


def extract_from_genome(
    genome: str, loci: Iterable[tuple[int, int]], L: int, k: int, delta: int = 1
) -> Instance:
    """Build target pairs from 1-based locus ``(position, length)`` entries.

    forward = the L bases before the locus; reverse = reverse complement of the
    L bases after it. Both therefore end adjacent to the locus.
    """
    genome = normalize_dna(genome, label="genome")
    targets, short = [], {}
    for idx, (pos, length) in enumerate(loci, 1):
        start = pos - 1
        left = start
        right = len(genome) - (start + length)
        if left < L or right < L:
            short[idx] = max(L - left, L - right, 0)
            continue
        fwd = genome[start - L : start]
        rev = reverse_complement(genome[start + length : start + length + L])
        targets.append(TargetPair(idx, fwd, rev, locus_length=length))
    if short:
        detail = ", ".join(f"locus {i} short by {s} bases" for i, s in short.items())
        raise LocusError(f"loci too close to a genome end: {detail}", short)
    return Instance(tuple(targets), k=k, delta=delta, L=L)


def write_instance(instance: Instance) -> bytes:
    lines = [f"{MAGIC} {FORMAT_VERSION} n={instance.n} L={instance.L} k={instance.k} delta={instance.delta}"]
    for t in instance.targets:
        fields = [str(t.id), t.forward, t.reverse]
        if t.locus_length != 1:
            fields.append(str(t.locus_length))
        lines.append("\t".join(fields))
    return ("\n".join(lines) + "\n").encode()


def _parse_header(line: str) -> dict[str, int]:
    parts = line.split()
    if len(parts) != 6 or parts[0] != MAGIC:
        raise InstanceFormatError(f"expected header '{MAGIC} {FORMAT_VERSION} n=.. L=.. k=.. delta=..'", 1)
    if parts[1] != str(FORMAT_VERSION):
        raise InstanceFormatError(f"unsupported format version {parts[1]} (expected {FORMAT_VERSION})", 1)
    out = {}
    for part, name in zip(parts[2:], ("n", "L", "k", "delta")):
        key, _, value = part.partition("=")
        if key != name or not value.isdigit():
            raise InstanceFormatError(f"malformed header field {part!r} (expected {name}=<int>)", 1)
        out[name] = int(value)
    return out


def parse_instance(data: bytes | str) -> Instance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InstanceFormatError("empty instance file", 1)
    hdr = _parse_header(lines[0])
    n, L = hdr["n"], hdr["L"]
    records = lines[1:]
    if len(records) != n:
        raise InstanceFormatError(f"expected {n} records, found {len(records)}")
    targets, seen = [], set()
    for lineno, line in enumerate(records, 2):
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise InstanceFormatError(f"expected 3 or 4 tab-separated fields, found {len(fields)}", lineno)
        if not fields[0].isdigit() or int(fields[0]) < 1:
            raise InstanceFormatError(f"bad target id {fields[0]!r}", lineno)
        tid = int(fields[0])
        if tid in seen:
            raise InstanceFormatError(f"duplicate target id {tid}", lineno)
        seen.add(tid)
        seqs = []
        for name, seq in (("forward", fields[1]), ("reverse", fields[2])):
            if len(seq) != L:
                raise InstanceFormatError(f"{name} sequence has length {len(seq)}, expected L={L}", lineno)
            try:
                seqs.append(normalize_dna(seq, label=name))
            except SequenceFormatError as exc:
                raise InstanceFormatError(str(exc), lineno) from None
        x = 1
        if len(fields) == 4:
            if not fields[3].isdigit() or int(fields[3]) < 1:
                raise InstanceFormatError(f"bad locus length {fields[3]!r}", lineno)
            x = int(fields[3])
        targets.append(TargetPair(tid, seqs[0], seqs[1], locus_length=x))
    try:
        return Instance(tuple(targets), k=hdr["k"], delta=hdr["delta"], L=L)
    except ValueError as exc:
        raise InstanceFormatError(str(exc), 1) from None


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_bytes())


def instance_sha256(instance: Instance) -> str:
    return hashlib.sha256(write_instance(instance)).hexdigest()


def read_fasta(text: str) -> tuple[str, str]:
    """Single-record FASTA -> (header, sequence)."""
    header, chunks, records = None, [], 0
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            records += 1
            if records > 1:
                raise ValueError("multi-record FASTA is not supported; supply one genome record")
            header = line[1:].strip()
        else:
            chunks.append("".join(line.split()))
    if records == 0:
        raise ValueError("no FASTA header ('>') found")
    return header, normalize_dna("".join(chunks), label="genome")


def parse_loci(text: str) -> list[tuple[int, int]]:
    """Loci list: one ``position[<whitespace>length]`` per line, '#' comments."""
    loci = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            pos = int(parts[0])
            length = int(parts[1]) if len(parts) > 1 else 1
        except (ValueError, IndexError):
            raise InstanceFormatError(f"bad locus line {raw!r}", lineno) from None
        if pos < 1 or length < 1 or len(parts) > 2:
            raise InstanceFormatError(f"bad locus line {raw!r}", lineno)
        loci.append((pos, length))
    return loci
