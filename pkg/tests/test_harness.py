import json

import numpy as np
import pytest

from weaklp import io
from weaklp.core import AtomicVector, make_params, weak_norm
from weaklp.embeddings import yk_check
from weaklp.harness import (
    SUITES,
    TrialConfig,
    chain_report,
    gen_atoms,
    gen_stack,
    oracle_norm,
    run_suite,
)

P2 = make_params(2.0)


def test_gen_atoms_contract():
    assert len(gen_atoms(1, 0, "uniform")) == 0
    for dist in ("uniform", "heavy_tail", "sparse"):
        assert gen_atoms(5, 30, dist) == gen_atoms(5, 30, dist)
    assert np.count_nonzero(gen_atoms(7, 5, "sparse").atoms) <= 2
    heavy = gen_atoms(3, 10_000, "heavy_tail").atoms
    assert np.abs(heavy).min() >= 1.0 and np.abs(heavy).max() <= 100.0
    with pytest.raises(ValueError):
        gen_atoms(0, 3, "gaussian")


def test_gen_stack_contract():
    x = gen_stack(1, 3, 0, "uniform")
    assert x.N == 0 and x.levels[0].shape == (3,)
    assert gen_stack(2, 2, 4, "heavy_tail") == gen_stack(2, 2, 4, "heavy_tail")
    y = gen_stack(2, 2, 4, "heavy_tail", params=P2, in_yk=True)
    assert yk_check(y, P2).max_violation <= 1e-12
    with pytest.raises(ValueError):
        gen_stack(0, 1, 2, in_yk=True)


def test_oracle_examples():
    assert oracle_norm(AtomicVector([3, 1, 1]), P2) == 3.0
    assert oracle_norm(AtomicVector([1, 1, 1, 1]), P2) == pytest.approx(2.0, rel=1e-15)
    assert oracle_norm(AtomicVector([-4.5]), P2) == 4.5
    with pytest.raises(ValueError):
        oracle_norm(AtomicVector(np.ones(21)), P2)


def test_oracle_agrees_with_weak_norm():
    for seed in range(200):
        a = gen_atoms(seed, 1 + seed % 12, ("uniform", "heavy_tail", "sparse")[seed % 3])
        for p in (1.5, 2.0, 3.0):
            o = oracle_norm(a, make_params(p))
            assert abs(weak_norm(a, make_params(p)) - o) <= 1e-9 * max(1.0, o)


def test_unknown_suite():
    with pytest.raises(ValueError, match="valid suites"):
        run_suite(TrialConfig("nope"))


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig("sandwich", trials=0)
    with pytest.raises(ValueError):
        TrialConfig("sandwich", p_values=(1.0,))


def _strip(report):
    d = report.to_dict()
    d.pop("wall_time")
    return d


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_suite_records_and_determinism(suite):
    config = TrialConfig(suite, p_values=(1.5, 3.0), trials=6, seed=11)
    first, second = run_suite(config), run_suite(config)
    assert len(first.records) == 6
    assert [r["p"] for r in first.records] == [1.5, 3.0] * 3
    assert io.dumps(_strip(first)) == io.dumps(_strip(second))
    assert first.pass_count == sum(r["pass"] for r in first.records)
    assert first.min_margin == min(r["margin"] for r in first.records)


def test_seeds_change_trials():
    a = run_suite(TrialConfig("sandwich", trials=5, seed=1))
    b = run_suite(TrialConfig("sandwich", trials=5, seed=2))
    assert [r["seed"] for r in a.records] != [r["seed"] for r in b.records]


def test_norm_oracle_suite():
    report = run_suite(TrialConfig("norm_oracle", p_values=(2.0,), trials=1000, seed=0, max_atoms=12))
    assert report.passed
    assert report.max_ratio <= 1e-9


def test_sandwich_suite_ratio_bounded_by_q():
    report = run_suite(TrialConfig("sandwich", p_values=(2.0,), trials=200, seed=3))
    assert report.passed
    assert 1.0 <= report.max_ratio <= 2.0 + 1e-9


def test_p_project_suite_ratio():
    report = run_suite(TrialConfig("p_project", p_values=(2.0,), trials=100, seed=3))
    assert report.passed
    assert report.max_ratio <= 4.0 + 1e-9


def test_failing_trials_are_recorded_not_dropped():
    # the 2^(1/p) complement bound is violated on some random stacks
    report = run_suite(TrialConfig("parts", p_values=(1.5,), trials=80, seed=1))
    assert len(report.records) == 80
    bad = [r for r in report.records if not r["pass"]]
    assert bad and not report.passed
    assert report.pass_count == 80 - len(bad)
    assert all(c["name"] == "norm_Ac <= 2^(1/p) ||x||" for r in bad for c in r["checks"] if not c["pass"])


def test_report_json_shape():
    d = json.loads(io.dumps(run_suite(TrialConfig("tower", trials=3)).to_dict()))
    for key in ("suite", "p", "seed", "trials", "pass", "max_ratio", "min_margin", "records"):
        assert key in d
    assert d["p"] == 2.0 and d["trials"] == 3


def test_chain_report_small():
    report = chain_report(2.0, [2, 4], seed=0, trials=8)
    links = report["links"]
    assert report["tower_roundtrip"]
    assert set(links) == {"T_k distortion", "P_k norm", "R distortion", "W projection norm", "S isometry"}
    assert links["R distortion"]["bound"] == pytest.approx(2 ** 1.5)
    for link in links.values():
        assert link["within_bound"] and link["max"] <= link["bound"] + 1e-9
        assert link["uniform"] == (link["max"] <= link["by_size"]["2"] + 1e-9)
    # the R constant still grows between N=2 and N=4, so this range is not uniform
    assert not links["R distortion"]["uniform"] and not report["pass"]
    assert io.dumps(report) == io.dumps(chain_report(2.0, [4, 2], seed=0, trials=8))


def test_chain_report_zero_level():
    report = chain_report(3.0, [0], trials=4)
    assert report["pass"]
    assert report["sizes"] == [0]
