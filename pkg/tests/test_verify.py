import json

import numpy as np
import pytest

from sumnorm import NSeq
from sumnorm.nseq import diagonal
from sumnorm.seqclass import LP, Kind, class_norm, strong
from sumnorm.spaces import FiniteSpace, InputError, scalar_field
from sumnorm.verify import MUTANTS, CheckConfig, CheckReport, PropertyId, check, parse_property, replay, run_suite


def test_config_validation_and_roundtrip():
    with pytest.raises(InputError):
        CheckConfig(samples=0)
    with pytest.raises(InputError):
        CheckConfig.from_json({"samples": 4, "colour": "red"})
    with pytest.raises(InputError):
        CheckConfig(families=("nope",))
    cfg = CheckConfig(samples=3, seed=9, engines=(Kind.WEAK,), families=("summing",))
    assert CheckConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg


def test_parse_property():
    assert parse_property("ch1") is PropertyId.CH1
    with pytest.raises(InputError):
        parse_property("CH9")


def test_unit_norm_on_scalar_and_l1():
    cfg = CheckConfig(samples=20, spaces=(scalar_field(), FiniteSpace(3, 1.0)))
    rep = check(PropertyId.UNIT_NORM, cfg)
    assert rep.passed and rep.worst_margin >= -1e-9


def test_lemma_pa_is_exact():
    rep = check(PropertyId.LEMMA_PA, CheckConfig(samples=100))
    assert rep.passed and rep.worst_margin >= -1e-12


def test_seq_compat_equality_case():
    x = NSeq.scalars(np.eye(2))
    assert class_norm(LP(2), diagonal(x)).value == pytest.approx(class_norm(LP(2), x).value)
    cfg = CheckConfig(samples=20, engines=(Kind.LP,), spaces=(scalar_field(),), p_grid=(2.0,))
    assert check(PropertyId.SEQ_COMPAT, cfg).passed


def test_broken_engine_is_caught_and_replayable():
    cfg = CheckConfig(samples=8, families=("summing",))
    with MUTANTS["strong_exponent_one"]():
        rep = check(PropertyId.MULT1, cfg)
        assert not rep.passed
        cex = rep.counterexample
        assert cex["property"] == "MULT1" and cex["margin"] < -cex["tolerance"]
        assert replay(cex, cfg) == pytest.approx(cex["margin"])
    # the hook is restored on exit
    assert strong.lp_exponent(3.0) == 3.0
    assert replay(cex, cfg) >= -cfg.exact_tol


def test_report_is_reproducible():
    cfg = CheckConfig(samples=2, seed=5)
    a = run_suite(cfg, [PropertyId.SYMMETRY, PropertyId.CH3])
    b = run_suite(cfg, [PropertyId.SYMMETRY, PropertyId.CH3])
    assert a.dumps() == b.dumps()
    assert "runtime" not in a.dumps()
    assert a.table().splitlines()[0] == "seed 5"
    assert [c["property"] for c in json.loads(a.dumps())["checks"]] == ["SYMMETRY", "CH3"]


def test_threads_do_not_change_results(monkeypatch):
    cfg = CheckConfig(samples=3, seed=2)
    one = check(PropertyId.FIN_DET, cfg).dumps()
    monkeypatch.setenv("SUMNORM_THREADS", "3")
    assert check(PropertyId.FIN_DET, cfg).dumps() == one


def test_bad_thread_count(monkeypatch):
    monkeypatch.setenv("SUMNORM_THREADS", "many")
    with pytest.raises(InputError):
        check(PropertyId.UNIT_NORM, CheckConfig(samples=2))


def test_seed_changes_samples():
    a = check(PropertyId.MULT1, CheckConfig(samples=4, seed=1))
    b = check(PropertyId.MULT1, CheckConfig(samples=4, seed=2))
    assert a.passed and b.passed and a.worst_margin != b.worst_margin


def test_report_json_fields():
    rep = CheckReport("X", False, float("inf"), 0, None)
    assert rep.to_json()["worst_margin"] == 1e300
    assert "runtime" in rep.to_json(include_runtime=True)


@pytest.mark.parametrize("name", sorted(MUTANTS))
def test_mutants_restore_hooks(name):
    from sumnorm import operators
    from sumnorm.seqclass import cohen, mixed, weak

    before = (strong.lp_exponent, weak.functional_exponent, cohen.constraint_exponent,
              mixed.multiplier_exponent, operators.symmetrization_divisor, operators.extension_divisor)
    with MUTANTS[name]():
        pass
    after = (strong.lp_exponent, weak.functional_exponent, cohen.constraint_exponent,
             mixed.multiplier_exponent, operators.symmetrization_divisor, operators.extension_divisor)
    assert before == after
