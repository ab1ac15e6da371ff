import random
from collections import Counter

import pytest

from primerset.instances import (
    InstanceFormatError,
    LocusError,
    extract_from_genome,
    generate_random_instance,
    instance_sha256,
    parse_instance,
    parse_loci,
    read_fasta,
    write_instance,
)
from primerset.seq import reverse_complement


def rand_dna(rng, n):
    return "".join(rng.choice("acgt") for _ in range(n))


def test_generation_is_deterministic():
    a = write_instance(generate_random_instance(1, 8, 3, 42))
    b = write_instance(generate_random_instance(1, 8, 3, 42))
    assert a == b
    assert a != write_instance(generate_random_instance(1, 8, 3, 43))


def test_generation_is_prefix_stable():
    # strings are laid out f1, r1, f2, r2, ... from one stream
    small = generate_random_instance(2, 50, 5, 9)
    big = generate_random_instance(3, 50, 5, 9)
    assert small.targets == big.targets[:2]


def test_base_frequencies_are_uniform():
    inst = generate_random_instance(1000, 1000, 10, 2024)
    counts = Counter()
    for t in inst.targets:
        counts.update(t.forward)
        counts.update(t.reverse)
    total = sum(counts.values())
    assert total == 2 * 1000 * 1000
    for base in "acgt":
        assert abs(counts[base] / total - 0.25) <= 0.01


def test_generated_instance_is_valid():
    inst = generate_random_instance(100, 1000, 10, 1)
    assert inst.n == 100 and inst.L == 1000 and inst.k == 10 and inst.delta == 1
    assert [t.id for t in inst.targets] == list(range(1, 101))
    assert all(len(t.forward) == len(t.reverse) == 1000 for t in inst.targets)


def test_generation_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_random_instance(0, 10, 3, 0)
    with pytest.raises(ValueError):
        generate_random_instance(1, 3, 4, 0)


def test_extraction_round_trip():
    rng = random.Random(5)
    L = 30
    f, r = rand_dna(rng, L), rand_dna(rng, L)
    genome = f + "g" + reverse_complement(r)
    inst = extract_from_genome(genome, [(L + 1, 1)], L, 4)
    assert inst.targets[0].forward == f
    assert inst.targets[0].reverse == r


def test_extraction_with_long_locus_and_overlap():
    rng = random.Random(6)
    L = 20
    genome = rand_dna(rng, 200)
    inst = extract_from_genome(genome, [(60, 5), (70, 1)], L, 4)
    assert inst.n == 2
    a, b = inst.targets
    assert a.locus_length == 5 and b.locus_length == 1
    assert a.forward == genome[39:59]
    assert b.forward == genome[49:69]
    assert reverse_complement(a.reverse) == genome[64:84]


def test_amplicon_coordinates_in_genome():
    """A primer pair at (t, t') spans (2L + x) - (t + t') + 2 genome bases including both landing sites."""
    rng = random.Random(8)
    L, k, x = 40, 5, 3
    genome = rand_dna(rng, 200)
    pos = 90
    inst = extract_from_genome(genome, [(pos, x)], L, k)
    tp = inst.targets[0]
    for t in (1, 17, L - k + 1):
        for u in (1, 9, L - k + 1):
            # forward primer binds genome window starting at pos - L + t - 1 (0-based)
            left = pos - 1 - L + (t - 1)
            assert genome[left : left + k] == tp.forward[t - 1 : t - 1 + k]
            # reverse primer is the genome window ending at pos - 1 + x + L - (u - 1)
            right_end = pos - 1 + x + L - (u - 1)
            assert reverse_complement(genome[right_end - k : right_end]) == tp.reverse[u - 1 : u - 1 + k]
            assert right_end - left == (2 * L + x) - (t + u) + 2


def test_extraction_locus_too_close_to_end():
    genome = "a" * 50
    with pytest.raises(LocusError) as exc:
        extract_from_genome(genome, [(5, 1), (25, 1), (45, 1)], 10, 3)
    assert exc.value.shortfalls == {1: 6, 3: 5}


def test_instance_round_trip():
    inst = generate_random_instance(7, 25, 4, 3, delta=2)
    assert parse_instance(write_instance(inst)) == inst
    rng = random.Random(1)
    genome = rand_dna(rng, 120)
    ext = extract_from_genome(genome, [(50, 3)], 20, 4)
    assert parse_instance(write_instance(ext)) == ext
    assert instance_sha256(ext) == instance_sha256(parse_instance(write_instance(ext)))


def test_truncated_file_reports_record_counts():
    text = write_instance(generate_random_instance(4, 10, 3, 0)).decode()
    truncated = "\n".join(text.splitlines()[:3]) + "\n"
    with pytest.raises(InstanceFormatError, match="expected 4 records, found 2"):
        parse_instance(truncated)


def test_short_sequence_cites_line():
    lines = write_instance(generate_random_instance(4, 10, 3, 0)).decode().splitlines()
    fields = lines[3].split("\t")
    fields[1] = fields[1][:-1]
    lines[3] = "\t".join(fields)
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance("\n".join(lines))
    assert exc.value.line == 4
    assert "line 4" in str(exc.value)


@pytest.mark.parametrize(
    "mutate, line",
    [
        (lambda ls: ["MPSSL 2" + ls[0][7:]] + ls[1:], 1),
        (lambda ls: [ls[0]] + [ls[1].replace("\t", "\tx", 1)[:-1]] + ls[2:], 2),
        (lambda ls: ls[:2] + [ls[1]], 3),
    ],
)
def test_format_errors(mutate, line):
    lines = write_instance(generate_random_instance(2, 10, 3, 0)).decode().splitlines()
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance("\n".join(mutate(lines)))
    assert exc.value.line == line


def test_read_fasta():
    header, seq = read_fasta(">chr1 test\nACGT\nacg t\n\n")
    assert header == "chr1 test" and seq == "acgtacgt"
    with pytest.raises(ValueError):
        read_fasta(">a\nac\n>b\ngt\n")
    with pytest.raises(ValueError):
        read_fasta("acgt\n")


def test_parse_loci():
    assert parse_loci("# loci\n10\n20 3  # indel\n\n") == [(10, 1), (20, 3)]
    with pytest.raises(InstanceFormatError) as exc:
        parse_loci("10\nfoo\n")
    assert exc.value.line == 2
