from fractions import Fraction

import pytest

from cubecover import search
from cubecover.certify import check_entry, check_tiling, read_certificates
from cubecover.config import Box6, box_from_indices
from cubecover.cover import BoxVerdict, enumerate_taus
from cubecover.search import LongList, SearchConfig, load_shortlist, search_box, search_starts, split

EASY = [(0, 0, 2, 2, 1, 4), (0, 0, 4, 2, 4, 4), (0, 1, 2, 3, 4, 3)]
F = Fraction


def test_split_examples():
    P = Box6.make([0] * 6, [F(1, 20)] * 6)
    lo, hi = split(P)
    assert lo.hi[0] == F(1, 40) and hi.lo[0] == F(1, 40)
    assert lo.hi[1:] == P.hi[1:] and hi.lo[1:] == P.lo[1:]
    Q = Box6.make([0] * 6, [F(1, 40)] + [F(1, 20)] * 5)
    assert split(Q)[0].hi[1] == F(1, 40)
    assert lo.volume + hi.volume == P.volume


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(max_depth=6)
    with pytest.raises(ValueError):
        SearchConfig(shard=(3, 3))


def test_long_list_move_to_front():
    L = LongList()
    assert len(L) == 1496 and sorted(L.items) == sorted(enumerate_taus(True))
    t = L.items[100]
    L.move_to_front(100)
    assert L.items[0] == t and sorted(L.items) == sorted(enumerate_taus(True))


def test_bundled_shortlist():
    short = load_shortlist()
    assert len(short) == 16 == len(set(short))
    assert set(short) <= set(enumerate_taus(True))


def test_shortlist_file_validation(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("0 1 2 3 4 5\n")
    with pytest.raises(ValueError):
        load_shortlist(p)


def test_search_box_recurses_and_tiles():
    from tests.conftest import LEAF
    parent = Box6.make([0] * 6, [F(1, 40)] + [F(1, 20)] * 5)
    r = search_box(parent, load_shortlist(), LongList(), SearchConfig())
    assert not r.unresolved
    assert sum(e.box.volume for e in r.entries) == parent.volume
    assert all(check_entry(e) for e in r.entries)
    assert r.box_stats[0]["leaves"] == len(r.entries)


def test_unresolved_boxes_are_reported(monkeypatch):
    monkeypatch.setattr(search, "verify_with_q", lambda *a, **k: BoxVerdict("infeasible"))
    monkeypatch.setattr(search, "q_polytope", lambda P: None)
    monkeypatch.setattr(search, "FloatCover", lambda P, Q: None)
    P = box_from_indices((0,) * 6, 10)
    r = search_box(P, [], LongList(enumerate_taus(True)[:1]), SearchConfig(max_depth=7))
    assert not r.entries and len(r.unresolved) == 2 ** 7
    assert all(u.depth == 7 and u.reason == "max depth" for u in r.unresolved)
    assert sum(u.box.volume for u in r.unresolved) == P.volume


def test_bootstrap_validation_and_determinism(monkeypatch):
    with pytest.raises(ValueError):
        search.bootstrap_shortlist(0)
    monkeypatch.setattr(search, "enumerate_taus", lambda restricted=True: enumerate_taus(True)[::50])
    a = search.bootstrap_shortlist(1, seed=3)
    assert a == search.bootstrap_shortlist(1, seed=3)
    assert len(a) <= 16 and len(set(a)) == len(a)


def run(tmp_path, name, starts, **kw):
    out = tmp_path / name
    res = search_starts(starts, SearchConfig(), load_shortlist(), out, region=0, **kw)
    return res, out / "region000_shard0of1.cert"


def test_checkpoint_resume_and_determinism(tmp_path):
    full, path_a = run(tmp_path, "a", EASY)
    assert not full.unresolved
    again, path_b = run(tmp_path, "b", EASY)
    assert path_a.read_bytes() == path_b.read_bytes()

    # interrupted after one starting box, then resumed
    run(tmp_path, "c", EASY[:1])
    resumed, path_c = run(tmp_path, "c", EASY, resume=True)
    assert path_c.read_bytes() == path_a.read_bytes()
    assert len(resumed.entries) == len(full.entries)

    cf = read_certificates(path_a)
    assert check_tiling(cf.entries, 10, EASY)
    assert all(check_entry(e) for e in cf.entries)


def test_resume_rejects_foreign_checkpoint(tmp_path):
    run(tmp_path, "d", EASY[:1])
    with pytest.raises(ValueError):
        search_starts(EASY, SearchConfig(M=9), [], tmp_path / "d", region=0, resume=True)
