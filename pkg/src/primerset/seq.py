"""DNA alphabet, (degenerate) primers, target pairs and hybridization.

Positions are 1-based throughout the public API: a primer that covers
string ``s`` at position ``t`` matches the window ``s[t..t+k-1]``.

Non-degenerate k-mers are packed into integers, two bits per base with the
first base most significant (a=0, c=1, g=2, t=3), so integer order equals
lexicographic order of the primer strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

ALPHABET = "acgt"
FORWARD, REVERSE = 0, 1
STRAND_NAMES = ("forward", "reverse")
MAX_PACKED_K = 31

IUPAC = {
    "a": "a", "c": "c", "g": "g", "t": "t",
    "r": "ag", "y": "ct", "s": "cg", "w": "at", "k": "gt", "m": "ac",
    "b": "cgt", "d": "agt", "h": "act", "v": "acg", "n": "acgt",
}
_IUPAC_BY_SET = {frozenset(bases): code for code, bases in IUPAC.items()}
_COMPLEMENT = str.maketrans("acgt", "tgca")
_NON_ACGT = re.compile(r"[^acgt]")

_CODE_OF = np.full(256, 255, dtype=np.uint8)
for _i, _b in enumerate(ALPHABET):
    _CODE_OF[ord(_b)] = _i
    _CODE_OF[ord(_b.upper())] = _i


class SequenceFormatError(ValueError):
    """Invalid nucleotide data; ``index`` is the 1-based offending position."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


def normalize_dna(seq: str, *, label: str = "sequence") -> str:
    s = seq.lower()
    bad = _NON_ACGT.search(s)
    if bad is not None:
        pos = bad.start() + 1
        raise SequenceFormatError(
            f"{label}: invalid character {seq[pos - 1]!r} at position {pos}", pos
        )
    return s


def complement(base: str) -> str:
    return normalize_dna(base, label="base").translate(_COMPLEMENT)


def reverse_complement(seq: str) -> str:
    if not seq:
        raise SequenceFormatError("cannot reverse-complement an empty sequence")
    return normalize_dna(seq).translate(_COMPLEMENT)[::-1]


@dataclass(frozen=True)
class Primer:
    """A length-k string of degenerate nucleotides (non-empty base sets)."""

    positions: tuple[frozenset[str], ...]

    def __post_init__(self):
        if not self.positions:
            raise ValueError("primer must have length >= 1")
        for i, d in enumerate(self.positions, 1):
            if not d or not d <= set(ALPHABET):
                raise ValueError(f"position {i}: invalid degenerate nucleotide {set(d)}")

    @classmethod
    def parse(cls, text: str | Primer) -> Primer:
        """Parse an IUPAC primer string such as ``"aNgNc"``."""
        if isinstance(text, Primer):
            return text
        if not text:
            raise SequenceFormatError("empty primer")
        sets = []
        for i, ch in enumerate(text.lower(), 1):
            if ch not in IUPAC:
                raise SequenceFormatError(f"invalid primer character {text[i - 1]!r} at position {i}", i)
            sets.append(frozenset(IUPAC[ch]))
        return cls(tuple(sets))

    @property
    def k(self) -> int:
        return len(self.positions)

    @property
    def degeneracy(self) -> int:
        return degeneracy(self)

    @property
    def is_degenerate(self) -> bool:
        return any(len(d) > 1 for d in self.positions)

    def expand(self) -> Iterator[str]:
        """Yield the non-degenerate primers this primer represents, in lexicographic order."""
        for bases in product(*(sorted(d) for d in self.positions)):
            yield "".join(bases)

    def __str__(self) -> str:
        return "".join(_IUPAC_BY_SET[d] for d in self.positions)


PrimerLike = Union[str, Primer]


def degeneracy(p: PrimerLike) -> int:
    p = Primer.parse(p)
    out = 1
    for d in p.positions:
        out *= len(d)
    return out


def primer_matches_window(p: Primer, window: str) -> bool:
    """Hybridization predicate: ``window`` is the reverse complement of some expansion of ``p``.

    This is the only place the match model lives; a mismatch-tolerant model
    would replace this function (and the packed-code path in :func:`build_index`).
    """
    k = p.k
    for j in range(k):
        if window[j].translate(_COMPLEMENT) not in p.positions[k - 1 - j]:
            return False
    return True


def hybridization_position(p: PrimerLike, s: str) -> int | None:
    """Largest 1-based position at which ``p`` covers ``s``, or None."""
    p = Primer.parse(p)
    if p.k > len(s):
        raise ValueError(f"primer length {p.k} exceeds string length {len(s)}")
    for i in range(len(s) - p.k, -1, -1):
        if primer_matches_window(p, s[i : i + p.k]):
            return i + 1
    return None


def encode_kmer(kmer: str) -> int:
    kmer = normalize_dna(kmer, label="k-mer")
    if len(kmer) > MAX_PACKED_K:
        raise ValueError(f"k-mers longer than {MAX_PACKED_K} cannot be packed")
    code = 0
    for ch in kmer:
        code = (code << 2) | ALPHABET.index(ch)
    return code


def decode_kmers(codes: np.ndarray, k: int) -> list[str]:
    codes = np.asarray(codes, dtype=np.int64)
    shifts = 2 * np.arange(k - 1, -1, -1, dtype=np.int64)
    digits = (codes[:, None] >> shifts) & 3
    letters = np.frombuffer(ALPHABET.encode(), dtype=np.uint8)[digits]
    raw = letters.astype(np.uint8).tobytes()
    return [raw[i * k : (i + 1) * k].decode() for i in range(len(codes))]


@dataclass(frozen=True)
class TargetPair:
    """One amplification locus: the L bases on each side, both read toward the locus."""

    id: int
    forward: str
    reverse: str
    locus_length: int = 1

    def __post_init__(self):
        object.__setattr__(self, "forward", normalize_dna(self.forward, label=f"target {self.id} forward"))
        object.__setattr__(self, "reverse", normalize_dna(self.reverse, label=f"target {self.id} reverse"))
        if len(self.forward) != len(self.reverse):
            raise ValueError(
                f"target {self.id}: forward/reverse lengths differ ({len(self.forward)} != {len(self.reverse)})"
            )
        if self.locus_length < 1:
            raise ValueError(f"target {self.id}: locus length must be >= 1")

    def strand(self, strand: int) -> str:
        return self.reverse if strand == REVERSE else self.forward


@dataclass(frozen=True)
class Instance:
    targets: tuple[TargetPair, ...]
    k: int
    delta: int = 1
    L: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("instance needs at least one target")
        lengths = {len(t.forward) for t in self.targets}
        if len(lengths) != 1:
            raise ValueError(f"targets have differing lengths {sorted(lengths)}")
        (length,) = lengths
        if self.L == 0:
            object.__setattr__(self, "L", length)
        elif self.L != length:
            raise ValueError(f"declared L={self.L} but sequences have length {length}")
        if not 1 <= self.k <= self.L:
            raise ValueError(f"need 1 <= k <= L, got k={self.k}, L={self.L}")
        if self.delta < 1:
            raise ValueError("degeneracy bound must be >= 1")

    @property
    def n(self) -> int:
        return len(self.targets)

    @cached_property
    def symbols(self) -> np.ndarray:
        """(2n, L) uint8 base codes; row 2i is f^(i+1), row 2i+1 is r^(i+1)."""
        raw = "".join(t.forward + t.reverse for t in self.targets).encode()
        return _CODE_OF[np.frombuffer(raw, dtype=np.uint8)].reshape(2 * self.n, self.L)


class CandidateSet(Sequence[str]):
    """A sorted, deduplicated set of length-k primers.

    Non-degenerate sets are stored as packed codes; iteration yields primer
    strings in lexicographic order, which is also the greedy tie-break order.
    """

    def __init__(self, k: int, codes: np.ndarray | None = None, primers: Sequence[Primer] | None = None):
        self.k = k
        if primers is not None:
            uniq = {str(p): p for p in primers}
            self._primers: tuple[Primer, ...] | None = tuple(uniq[s] for s in sorted(uniq))
            self.codes = None
        else:
            self._primers = None
            self.codes = np.unique(np.asarray(codes if codes is not None else [], dtype=np.int64))

    @classmethod
    def from_primers(cls, primers: Iterable[PrimerLike], k: int | None = None) -> CandidateSet:
        parsed = [Primer.parse(p) for p in primers]
        ks = {p.k for p in parsed}
        if k is None:
            if len(ks) > 1:
                raise ValueError(f"candidates have mixed lengths {sorted(ks)}")
            k = ks.pop() if ks else 1
        elif ks - {k}:
            raise ValueError(f"candidate lengths {sorted(ks)} differ from k={k}")
        if k <= MAX_PACKED_K and not any(p.is_degenerate for p in parsed):
            return cls(k, codes=np.array([encode_kmer(str(p)) for p in parsed], dtype=np.int64))
        return cls(k, primers=parsed)

    @property
    def is_packed(self) -> bool:
        return self.codes is not None

    def __len__(self) -> int:
        return len(self.codes) if self.codes is not None else len(self._primers)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if self.codes is not None:
            return decode_kmers(self.codes[i : i + 1] if i >= 0 else self.codes[[i]], self.k)[0]
        return str(self._primers[i])

    def __iter__(self) -> Iterator[str]:
        if self.codes is not None:
            yield from decode_kmers(self.codes, self.k)
        else:
            yield from (str(p) for p in self._primers)

    def labels(self, ids: Iterable[int]) -> list[str]:
        ids = np.asarray(list(ids), dtype=np.int64)
        if self.codes is not None:
            return decode_kmers(self.codes[ids], self.k)
        return [str(self._primers[i]) for i in ids]

    def primer(self, i: int) -> Primer:
        return Primer.parse(self[i])

    def index(self, p: PrimerLike, *args) -> int:
        text = str(Primer.parse(p))
        if self.codes is not None:
            if len(text) != self.k or any(ch not in ALPHABET for ch in text):
                raise ValueError(f"{text} is not in the candidate set")
            code = encode_kmer(text)
            i = int(np.searchsorted(self.codes, code))
            if i < len(self.codes) and self.codes[i] == code:
                return i
            raise ValueError(f"{text} is not in the candidate set")
        for i, q in enumerate(self._primers):
            if str(q) == text:
                return i
        raise ValueError(f"{text} is not in the candidate set")

    def __contains__(self, p) -> bool:
        try:
            self.index(p)
        except (ValueError, SequenceFormatError):
            return False
        return True

    def expansions(self) -> tuple[np.ndarray, np.ndarray]:
        """Packed codes of every expansion and the candidate id each belongs to."""
        if self.codes is not None:
            return self.codes, np.arange(len(self.codes), dtype=np.int64)
        if self.k > MAX_PACKED_K:
            raise ValueError(f"primers longer than {MAX_PACKED_K} are not supported by the index")
        codes, ids = [], []
        for i, p in enumerate(self._primers):
            for e in p.expand():
                codes.append(encode_kmer(e))
                ids.append(i)
        return np.array(codes, dtype=np.int64), np.array(ids, dtype=np.int64)

    def max_degeneracy(self) -> int:
        if self.codes is not None:
            return 1
        return max((p.degeneracy for p in self._primers), default=1)

    def __repr__(self) -> str:
        return f"CandidateSet(k={self.k}, size={len(self)})"


def window_primer_codes(symbols: np.ndarray, k: int) -> np.ndarray:
    """Packed code of the primer that covers each window.

    ``out[s, t-1]`` is the code of reverse_complement(string_s[t..t+k-1]).
    """
    if k > MAX_PACKED_K:
        raise ValueError(f"k={k} exceeds the packed limit {MAX_PACKED_K}")
    comp = (3 - symbols).astype(np.int64)
    width = symbols.shape[1] - k + 1
    out = np.zeros((symbols.shape[0], width), dtype=np.int64)
    # primer base j complements window base k-1-j, so window offset m weighs 4**m
    for m in range(k):
        out |= comp[:, m : m + width] << (2 * m)
    return out


def enumerate_candidates(instance: Instance, window: str = "full") -> CandidateSet:
    """Non-degenerate primers covering some f^i or r^i.

    ``window="half"`` keeps only primers covering a string at t >= ceil(L/2),
    i.e. binding within L/2 bases of the locus.
    """
    if window not in ("full", "half"):
        raise ValueError(f"window must be 'full' or 'half', not {window!r}")
    codes = window_primer_codes(instance.symbols, instance.k)
    if window == "half":
        codes = codes[:, half_threshold(instance.L) - 1 :]
    return CandidateSet(instance.k, codes=codes.ravel())


def half_threshold(L: int) -> int:
    return -(-L // 2)


@dataclass(frozen=True, eq=False)
class HybridizationIndex:
    """Primer-major occurrence lists in CSR layout.

    For candidate ``p`` the slice ``offsets[p]:offsets[p+1]`` holds one entry per
    string it covers, sorted by (target, strand); ``targets`` are 0-based
    internally, ``positions`` are the 1-based largest covering positions.
    """

    candidates: CandidateSet
    offsets: np.ndarray
    targets: np.ndarray
    strands: np.ndarray
    positions: np.ndarray
    n: int
    L: int

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def k(self) -> int:
        return self.candidates.k

    def occurrences(self, p: PrimerLike | int) -> list[tuple[int, str, int]]:
        """(1-based target id, strand name, position) triples for one primer."""
        i = p if isinstance(p, (int, np.integer)) else self.candidates.index(p)
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return [
            (int(self.targets[j]) + 1, STRAND_NAMES[self.strands[j]], int(self.positions[j]))
            for j in range(lo, hi)
        ]

    def position(self, p: PrimerLike | int, target_id: int, strand: str | int) -> int | None:
        if isinstance(strand, str):
            strand = STRAND_NAMES.index(strand)
        for tid, sname, t in self.occurrences(p):
            if tid == target_id and STRAND_NAMES.index(sname) == strand:
                return t
        return None

    def max_positions(self) -> np.ndarray:
        """(n, 2) best position any candidate reaches on each string (0 if none)."""
        out = np.zeros(2 * self.n, dtype=np.int64)
        np.maximum.at(out, 2 * self.targets.astype(np.int64) + self.strands, self.positions)
        return out.reshape(self.n, 2)


def build_index(instance: Instance, candidates: CandidateSet | Iterable[PrimerLike]) -> HybridizationIndex:
    if not isinstance(candidates, CandidateSet):
        candidates = CandidateSet.from_primers(candidates, k=instance.k)
    if candidates.k != instance.k:
        raise ValueError(f"candidate length {candidates.k} != instance k={instance.k}")
    n, L, k = instance.n, instance.L, instance.k
    n_strings = 2 * n
    if len(candidates) == 0:
        empty = np.zeros(0, dtype=np.int32)
        return HybridizationIndex(candidates, np.zeros(1, dtype=np.int64), empty,
                                  np.zeros(0, dtype=np.int8), empty, n, L)

    flat = window_primer_codes(instance.symbols, k).ravel()
    width = L - k + 1
    exp_codes, exp_ids = candidates.expansions()
    order = np.argsort(exp_codes, kind="stable")
    exp_codes, exp_ids = exp_codes[order], exp_ids[order]

    if len(np.unique(exp_codes)) == len(exp_codes):
        slot = np.searchsorted(exp_codes, flat)
        slot_c = np.minimum(slot, len(exp_codes) - 1)
        hit = exp_codes[slot_c] == flat
        win = np.flatnonzero(hit)
        cand = exp_ids[slot_c[hit]]
    else:
        # several degenerate candidates share an expansion: many-to-many join
        lo = np.searchsorted(exp_codes, flat, side="left")
        hi = np.searchsorted(exp_codes, flat, side="right")
        counts = hi - lo
        win = np.repeat(np.arange(len(flat), dtype=np.int64), counts)
        start = np.repeat(lo, counts)
        within = np.arange(len(win)) - np.repeat(np.cumsum(counts) - counts, counts)
        cand = exp_ids[start + within]
    del flat

    string = win // width
    pos = win % width + 1
    key = cand * n_strings + string
    order = np.argsort(key * (L + 1) + pos)
    key, pos = key[order], pos[order]
    last = np.ones(len(key), dtype=bool)
    last[:-1] = key[1:] != key[:-1]
    key, pos = key[last], pos[last]

    cand = key // n_strings
    string = key % n_strings
    offsets = np.zeros(len(candidates) + 1, dtype=np.int64)
    np.cumsum(np.bincount(cand, minlength=len(candidates)), out=offsets[1:])
    return HybridizationIndex(
        candidates,
        offsets,
        (string // 2).astype(np.int32),
        (string % 2).astype(np.int8),
        pos.astype(np.int32),
        n,
        L,
    )
