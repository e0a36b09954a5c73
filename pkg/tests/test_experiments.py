import csv
import io
import json
import math
from fractions import Fraction

import pytest

from genericity import automaton as au
from genericity import counting as C
from genericity import experiments as E
from genericity import freegroup as F
from genericity import psl2z as P
from genericity.experiments import ExperimentConfig


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(mode="lazy")
    with pytest.raises(ValueError):
        ExperimentConfig(lmin=5, lmax=4)
    with pytest.raises(ValueError):
        ExperimentConfig(mode="sample", samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(workers=0)


def test_config_hash_ignores_outputs_and_workers():
    a = ExperimentConfig(json_out="x.json", workers=3)
    b = ExperimentConfig()
    assert a.digest() == b.digest()
    assert ExperimentConfig(seed=1).digest() != b.digest()


def test_resolve_backend(tmp_path):
    assert E.resolve_backend("psl2z").action is not None
    assert E.resolve_backend("braid:3").action is None
    assert E.resolve_backend("free:3").automaton.n_states == 8
    path = tmp_path / "f2.json"
    au.save(F.build_automaton(2), path)
    assert E.resolve_backend(str(path)).automaton == F.build_automaton(2)
    for bad in ("braid:x", "nothing", "free:"):
        with pytest.raises(au.AutomatonError):
            E.resolve_backend(bad)


def test_free_group_census_matches_closed_form():
    report = E.run_genericity(ExperimentConfig(backend="free:2", lmax=7))
    aut = F.build_automaton(2)
    for row in report["rows"]:
        l = row["l"]
        cyclic = sum(1 for w in C.enumerate_sphere(aut, l) if F.is_cyclically_reduced(w))
        assert row["sphere"] == 4 * 3 ** (l - 1)
        assert row["rigid"] == cyclic == row["rigid_loxodromic"]
        assert row["violations"] == []
    assert report["summary"]["violations"] == 0


def test_psl_census(tmp_path):
    cfg = ExperimentConfig(backend="psl2z", lmax=7, json_out=str(tmp_path / "r.json"), csv_out=str(tmp_path / "r.csv"))
    report = E.run_genericity(cfg)
    E.write_outputs(report, cfg)
    aut = P.build_automaton()
    for row in report["rows"]:
        assert row["sphere"] == C.count_sphere(aut, row["l"])
        assert row["rigid"] == C.rigid_sphere_count(aut, row["l"])
        assert row["rigid_loxodromic"] <= row["rigid"] <= row["sphere"]
        assert Fraction(row["p_rigid"]) == Fraction(row["rigid"], row["sphere"])
        assert row["p_rigid_decimal"] == round(row["rigid"] / row["sphere"], 12)
        if row["l"] >= 2:
            assert row["rigid_loxodromic"] > 0
        assert not row["violations"]
    saved = json.loads((tmp_path / "r.json").read_text())
    assert saved["rows"] == report["rows"]
    rows = list(csv.DictReader(io.StringIO((tmp_path / "r.csv").read_text())))
    assert [int(r["l"]) for r in rows] == list(range(1, 8))
    assert rows[0]["violations"] == "0"
    asym = report["asymptotics"]
    assert asym["recurrence_index"] == 5 and asym["dominated"]


def test_braid_census_has_no_loxodromy_column():
    report = E.run_genericity(ExperimentConfig(backend="braid:3", lmax=10))
    for row in report["rows"]:
        assert row["rigid_loxodromic"] is None and row["p_rigid_lox"] is None
        assert row["rigid"] > 0
    assert "rigid_loxodromic" in E.report_csv(report).splitlines()[0]
    assert report["summary"]["min_p_rigid_lox_from_l2"] is None


def test_ball_columns_are_weighted_sphere_averages():
    report = E.run_genericity(ExperimentConfig(backend="psl2z", lmax=6))
    rows = report["rows"]
    for k, row in enumerate(rows):
        spheres = rows[: k + 1]
        assert row["ball"] == sum(r["sphere"] for r in spheres)
        p = Fraction(row["p_ball_rigid"])
        assert p == Fraction(sum(r["rigid"] for r in spheres), row["ball"])
        props = [Fraction(r["p_rigid"]) for r in spheres]
        assert min(props) <= p <= max(props)


def test_determinism_modulo_volatile_fields():
    cfg = ExperimentConfig(backend="psl2z", lmax=5, mode="sample", samples=300, seed=4)
    a, b = E.run_genericity(cfg), E.run_genericity(cfg)
    assert E.report_json(E.strip_volatile(a)) == E.report_json(E.strip_volatile(b))
    assert E.report_csv(a) == E.report_csv(b)
    assert a["metadata"]["config_hash"] == cfg.digest()
    c = E.run_genericity(ExperimentConfig(backend="psl2z", lmax=5, mode="sample", samples=300, seed=5))
    assert c["rows"] != a["rows"]


def test_workers_do_not_change_results():
    one = E.run_genericity(ExperimentConfig(backend="free:2", lmax=4))
    two = E.run_genericity(ExperimentConfig(backend="free:2", lmax=4, workers=2))
    assert one["rows"] == two["rows"]


def test_sample_mode_converges_to_exhaustive():
    exact = E.run_genericity(ExperimentConfig(backend="psl2z", lmin=6, lmax=6))["rows"][0]
    n = 4000
    sampled = E.run_genericity(ExperimentConfig(backend="psl2z", lmin=6, lmax=6, mode="sample", samples=n, seed=9))
    row = sampled["rows"][0]
    assert row["samples"] == n
    for key in ("p_rigid_decimal", "p_rigid_lox_decimal"):
        p = exact[key]
        se = math.sqrt(p * (1 - p) / n)
        assert abs(row[key] - p) <= 3 * se


def test_budget_refusal():
    with pytest.raises(E.BudgetExceeded, match="needs 164 words"):
        E.run_genericity(ExperimentConfig(backend="psl2z", lmax=5, budget=100))


def test_asymptotics_psl():
    cfg = ExperimentConfig(backend="psl2z", lmax=30, prefix="B", w_far="Ab" * 6)
    out = E.run_asymptotics(cfg)
    assert abs(out["lambda"] - (1 + math.sqrt(2))) < 1e-9
    assert out["dominated"] and out["recurrence_index"] == 5
    bounds = out["bounds"]
    assert bounds["prefix"] == "B" and bounds["end_state"] == "X¬A B"
    assert [c["l"] for c in bounds["at"]] == [30, 40]
    assert abs(bounds["bound"] - 1 / (16 * math.sqrt(2))) < 1e-6
    assert abs(bounds["at"][0]["prefix_proportion"] - 0.25) < 1e-3
    assert out["avoidance"]["margin"] > 1e-6


def test_asymptotics_braid_and_bad_prefix():
    out = E.run_asymptotics(ExperimentConfig(backend="braid:3", lmax=10))
    assert out["dominated"] and out["lambda"] > 1
    assert out["bounds"]["prefix"] == "213"
    with pytest.raises(au.AutomatonError):
        E.run_asymptotics(ExperimentConfig(backend="braid:3", prefix="231"))
