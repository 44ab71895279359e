import random
from fractions import Fraction

import pytest

from cubecover import certify, lp
from cubecover.certify import (
    CertificateEntry,
    CertificateFile,
    ParseError,
    VersionMismatch,
    check_entry,
    check_tiling,
    parse,
    read_certificates,
    serialize,
    shard_starts,
    stats,
    write_certificates,
)
from cubecover.config import box_from_indices, box_indices, count_boxes
from cubecover.cover import enumerate_taus
from cubecover.search import random_grid_index, split


def random_entry(rng, M=10):
    P = box_from_indices(random_grid_index(M, rng), M)
    for _ in range(rng.randint(0, 7)):
        P = split(P)[rng.randint(0, 1)]
    tau = rng.choice(enumerate_taus(True))
    w = tuple(Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6)) for _ in range(60))
    return CertificateEntry(P, tau, w)


def test_round_trip_is_byte_identical():
    rng = random.Random(0)
    entries = [random_entry(rng) for _ in range(1000)]
    cf = CertificateFile(10, 17, (2, 5), entries)
    text = serialize(cf)
    back = parse(text)
    assert back.entries == entries and (back.M, back.region, back.shard) == (10, 17, (2, 5))
    assert serialize(back) == text


def test_file_round_trip(tmp_path, leaf_entry):
    cf = CertificateFile(10, 0, (0, 1), [leaf_entry])
    path = tmp_path / "a.cert"
    write_certificates(cf, path)
    raw = path.read_bytes()
    write_certificates(read_certificates(path), path)
    assert path.read_bytes() == raw


def corrupt(text, line_no, old, new):
    lines = text.split("\n")
    assert old in lines[line_no - 1]
    lines[line_no - 1] = lines[line_no - 1].replace(old, new, 1)
    return "\n".join(lines)


@pytest.fixture
def good_text(leaf_entry):
    return serialize(CertificateFile(10, 0, (0, 1), [leaf_entry, leaf_entry]))


def test_zero_denominator_rejected_with_line(good_text):
    bad = corrupt(good_text, 6, "/40", "/0")
    with pytest.raises(ParseError) as exc:
        parse(bad)
    assert exc.value.line == 6


def test_non_lowest_terms_rejected(good_text):
    with pytest.raises(ParseError):
        parse(corrupt(good_text, 5, "1/40", "2/80"))


def test_repeated_edge_rejected(good_text, leaf_entry):
    tau = " ".join(map(str, leaf_entry.tau))
    dup = " ".join(map(str, (leaf_entry.tau[1],) + leaf_entry.tau[1:]))
    with pytest.raises(ParseError, match="injective"):
        parse(corrupt(good_text, 5, tau, dup))


def test_header_problems(good_text):
    with pytest.raises(VersionMismatch):
        parse(good_text.replace("cubecover-certificate 1", "cubecover-certificate 2"))
    with pytest.raises(ParseError, match="count"):
        parse(good_text.replace("count 2", "count 3"))
    with pytest.raises(ParseError):
        parse(good_text.replace("region 0", "region 600"))
    with pytest.raises(ParseError):
        parse("")


def test_out_of_grid_box_rejected(good_text):
    with pytest.raises(ParseError, match="dyadic"):
        parse(corrupt(good_text, 5, "1/40 1/40", "1/30 1/40"))


def test_check_entry_accepts_fresh_entry(leaf_entry):
    assert check_entry(leaf_entry)


def test_check_entry_rejects_perturbed_witness(leaf_entry, leaf_q):
    from cubecover.cover import build_lp
    S = build_lp(leaf_entry.box, leaf_entry.tau, leaf_q)
    w = list(leaf_entry.witness)
    # tightest row touching a translate coordinate, pushed just past its slack
    best = None
    for row, rhs in zip(S.rows, S.rhs):
        slack = rhs - sum(a * x for a, x in zip(row, w))
        j = next((j for j in range(42) if row[j]), None)
        if j is not None and (best is None or slack < best[0]):
            best = (slack, row, j)
    slack, row, j = best
    w[j] += (slack + Fraction(1, 10**6)) / row[j]
    assert not check_entry(CertificateEntry(leaf_entry.box, leaf_entry.tau, tuple(w)))


def test_checker_independent_of_simplex(monkeypatch, leaf_entry):
    """A simplex that always says Feasible must not let a bad entry through."""
    def liar(S, hint=()):
        return lp.FeasReport(True, lp.Witness((Fraction(0),) * S.n), 0, "exact")

    monkeypatch.setattr(lp, "feasible_exact", liar)
    monkeypatch.setattr(lp, "maximize", lambda *a, **k: lp.LPResult("optimal", Fraction(0)))
    monkeypatch.setattr(lp, "max_margin", lambda *a, **k: lp.LPResult("optimal", Fraction(1)))
    bad = CertificateEntry(leaf_entry.box, leaf_entry.tau, (Fraction(0),) * 60)
    assert not check_entry(bad)
    assert check_entry(leaf_entry)


def grid_entries(M, leaf_entry):
    """One dummy entry per starting box plus a split one (tiling only looks at boxes)."""
    out = []
    for i, k in enumerate(box_indices(M)):
        P = box_from_indices(k, M)
        if i == 0:
            a, b = split(P)
            out += [CertificateEntry(a, leaf_entry.tau, leaf_entry.witness),
                    CertificateEntry(b, leaf_entry.tau, leaf_entry.witness)]
        else:
            out.append(CertificateEntry(P, leaf_entry.tau, leaf_entry.witness))
    return out


def test_tiling_complete(leaf_entry):
    rep = check_tiling(grid_entries(1, leaf_entry), 1)
    assert rep and rep.start_boxes == count_boxes(1)


def test_tiling_detects_drop_and_duplicate(leaf_entry):
    es = grid_entries(1, leaf_entry)
    dropped = check_tiling(es[1:], 1)
    assert not dropped and "deficit" in dropped.problem
    dup = check_tiling(es + [es[0]], 1)
    assert not dup and "excess" in dup.problem
    missing = check_tiling(es[2:], 1)
    assert not missing and "missing" in missing.problem


def test_tiling_detects_overlap_with_equal_volume(leaf_entry):
    es = grid_entries(1, leaf_entry)
    a, b = es[0].box, es[1].box
    # replace the two halves by the lower half twice: same volume, wrong cover
    bad = [es[0], CertificateEntry(a, es[1].tau, es[1].witness)] + es[2:]
    rep = check_tiling(bad, 1)
    assert not rep


def test_shards_partition_region():
    starts = shard_starts(2, None, (0, 1))
    parts = [shard_starts(2, None, (i, 3)) for i in range(3)]
    assert sorted(sum(parts, [])) == sorted(starts) and len(starts) == count_boxes(2)
    per_region = sum(len(shard_starts(2, r, (0, 1))) for r in range(512))
    assert per_region == count_boxes(2)


def test_stats(leaf_entry):
    empty = stats([], 10)
    assert empty["entries"] == 0 and empty["max_depth"] == 0 and not empty["per_region"]
    s = stats([leaf_entry], 10, [{"seconds": 2.0}])
    assert s["entries"] == 1 and s["depth_histogram"] == {2: 1} and s["seconds_total"] == 2.0
