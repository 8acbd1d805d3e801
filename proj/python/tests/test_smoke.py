import math

import pytest

import hardcore_trees as ht


def test_hinge_transition():
    assert len(ht.ti_solutions("hinge", 2.0)) == 1
    sols = ht.ti_solutions("hinge", 4.0)
    assert [s.kind for s in sols].count("symmetric") == 1
    assert len(sols) == 3
    assert ht.critical_lambda("hinge", 2) == pytest.approx(2.25)
    with pytest.raises(ValueError):
        ht.critical_lambda("pipe", 2)


def test_pipe_and_envelopes():
    assert len(ht.ti_solutions("pipe", 5.0, 3)) == 1
    assert ht.pipe_certificate(5.0, 3)
    envs = ht.envelopes("hinge", 4.0, 2)
    assert len(envs) == 3
    assert all(e.symmetry_check() for e in envs)
    assert envs[0].z_minus == pytest.approx(ht.z_minus(4.0))


def test_period_doubling():
    assert ht.period_doubling_window(5) is None
    lo, hi = ht.period_doubling_window(6)
    assert lo == pytest.approx(2048 / 729)
    assert hi == pytest.approx(729 / 64)
    assert len(ht.gamma2_fixed_points(5.0, 6)) == 3
    assert ht.kesten_condition(5.0, 6)


def test_path_fields():
    lo, hi = ht.contraction_window()
    assert lo == 2.25 and hi == pytest.approx(2.4721359549995796)
    field = ht.solve_path_field(0.5, 2.35, 3)
    assert field.converged
    assert len(field.log_field()) == 1 + 3 + 6 + 12
    assert field.to_csv().startswith("vertex_address,h1,h2,split_tag")
    assert ht.distinguish(0.3, 0.3, 2.35, 3) is None
    assert ht.distinguish(0.0, 1.0, 2.35, 3) is not None
    with pytest.raises(ValueError):
        ht.solve_path_field(0.5, 3.0, 3)


def test_oracle():
    assert ht.count_admissible("hinge", 2, 1) == 43
    assert ht.count_admissible("hinge", 2, 8) > 2**64
    report = ht.oracle_check("hinge", 2.25, n=2)
    assert report["defect"] <= 1e-12
    assert math.isclose(sum(report["marginals"]), 1.0)
    with pytest.raises(ValueError):
        ht.oracle_check("hinge", 4.0, n=1, solution=9)
