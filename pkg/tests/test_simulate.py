from pathlib import Path

import pytest

from emotrail.errors import UnknownProfile
from emotrail.simulate import PROFILE_PAPER_2019, simulate
from emotrail.store import SessionStore


def tree_snapshot(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


def test_seeded_determinism(catalog, tmp_path):
    stores = []
    for name in ("a", "b"):
        store = SessionStore(tmp_path / name)
        simulate(store, catalog, n_sessions=4, seed=7)
        stores.append(tree_snapshot(tmp_path / name))
    assert stores[0] == stores[1]


def test_different_seeds_differ(catalog, tmp_path):
    a = SessionStore(tmp_path / "a")
    b = SessionStore(tmp_path / "b")
    simulate(a, catalog, n_sessions=4, seed=7)
    simulate(b, catalog, n_sessions=4, seed=8)
    assert tree_snapshot(tmp_path / "a") != tree_snapshot(tmp_path / "b")


def test_zero_sessions(catalog, tmp_path):
    store = SessionStore(tmp_path)
    report = simulate(store, catalog, n_sessions=0, seed=1)
    assert report.complete == report.partial == 0
    assert store.session_ids() == []


def test_unknown_profile(catalog, tmp_path):
    store = SessionStore(tmp_path)
    with pytest.raises(UnknownProfile):
        simulate(store, catalog, profile="nope")


def test_paper_profile_headline_counts(catalog, tmp_path):
    store = SessionStore(tmp_path)
    report = simulate(store, catalog, profile=PROFILE_PAPER_2019, seed=0)
    assert report.complete == 132
    assert report.partial == 65
    assert report.donated == 131
    assert report.withheld == 1
    assert len(store.donated_ids()) == 131
    assert store.partial_count() == 65
    assert store.withheld_completed_count == 1
