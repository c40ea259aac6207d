import math

import numpy as np
import pytest

import focalfree as ff


@pytest.fixture(scope="module")
def hyp():
    return ff.Metric.hyperbolic()


@pytest.fixture(scope="module")
def mu(hyp):
    return ff.ps_measure(hyp, r_out=10, width=3)


def test_closed_form_oracles(hyp):
    assert ff.distance(hyp, (0, 0), (0.5, 0)) == pytest.approx(2 * math.atanh(0.5), abs=1e-12)
    x, y, _ = ff.flow(hyp, (0, 0, 0), 1.0)
    assert (x, y) == pytest.approx((math.tanh(0.5), 0.0), abs=1e-12)
    assert ff.endpoint(hyp, (0, 0, 1.0), 1) == pytest.approx(1.0, abs=1e-9)
    # b_0(q, xi) for q on the ray towards xi is -d(0, q).
    assert ff.busemann(hyp, (0, 0), (0.5, 0), 0.0) == pytest.approx(-2 * math.atanh(0.5), abs=1e-9)
    assert ff.gromov_product(hyp, (0, 0), 0.0, math.pi) == pytest.approx(0.0, abs=1e-9)


def test_generic_path_matches_closed_form(hyp):
    g = hyp.generic()
    assert not g.closed_form
    assert ff.distance(g, (0.1, 0.2), (-0.3, 0.1)) == pytest.approx(ff.distance(hyp, (0.1, 0.2), (-0.3, 0.1)), abs=1e-6)


def test_cross_ratio_orthogonal_diameters(hyp):
    r = ff.cross_ratio(hyp, math.pi, 0.0, 1.5 * math.pi, 0.5 * math.pi)
    assert r.limit == pytest.approx(2 * math.log(2), abs=1e-4)
    assert r.spread < 1e-4


def test_certification():
    bump = ff.Metric.bump(0.3, (0.05, 0.02), 1.2)
    assert ff.Metric.hyperbolic().curvature((0.3, 0.1)) == pytest.approx(-1.0)
    assert bump.curvature((0.65, 0.02)) == pytest.approx(-1.0)  # 1.45 from the centre, outside every copy
    assert bump.curvature((0.05, 0.02)) != pytest.approx(-1.0)
    status = ff.certify(ff.Metric.bump(0.5, (0.05, 0.02), 1.2), vectors=5)
    assert not status.certified
    assert status.witness_time > 0
    assert ff.certified(ff.Metric.hyperbolic(), vectors=10).certified_no_focal


def test_entropy_and_measure(hyp, mu):
    e = ff.critical_exponent(hyp)
    assert e.h == pytest.approx(1.0, abs=0.05)
    assert mu.total() == pytest.approx(1.0)
    assert len(mu.theta) == len(mu.weight) == len(mu)
    assert mu.s == pytest.approx(mu.exponent + 0.05)
    assert all(b > 0 for b in mu.binned(16))


def test_sampler(hyp, mu):
    a = ff.sample_mme(hyp, mu, 200, 3)
    b = ff.sample_mme(hyp, mu, 200, 3)
    assert a.shape == (200, 4)
    np.testing.assert_array_equal(a, b)
    assert np.all(a[:, 0] ** 2 + a[:, 1] ** 2 < 1)
    assert np.all(a[:, 3] > 0)
    assert ff.sample_liouville(hyp, 50, 1).shape == (50, 4)


def test_statistics(hyp, mu):
    f = ff.angular_harmonic()
    assert ff.Observable("angular_harmonic").name == f.name
    assert f(hyp, (0.1, 0.0, 0.3)) == pytest.approx(f(hyp, (0.1, 0.0, 0.3 + 2 * math.pi)))
    c = ff.mixing_curve(hyp, f, f, [0, 2, 4], mu, 500, 7)
    assert c["t"] == [0, 2, 4] and c["N"] == 500 and c["seed"] == 7
    assert c["estimate"][0] > 0 and all(s > 0 for s in c["stderr"])
    avg, err = ff.birkhoff_average(hyp, ff.constant_observable(2.5), (0, 0, 0.4), 10.0)
    assert avg == pytest.approx(2.5) and err == pytest.approx(0.0, abs=1e-12)
    samples = ff.sample_mme(hyp, mu, 100, 1)
    mean, _ = ff.space_average(hyp, ff.constant_observable(1.0), samples)
    assert mean == pytest.approx(1.0)
    d = ff.stable_contraction(hyp, 0.0, math.pi, 2.5, list(range(0, 13, 2)))
    assert all(x > y for x, y in zip(d, d[1:])) and d[-1] < 1e-3


def test_errors(hyp):
    with pytest.raises(ValueError):
        ff.distance(hyp, (0, 0), (1.5, 0))
    with pytest.raises(ValueError):
        ff.Observable("no_such_observable")
    with pytest.raises(ValueError):
        ff.disk_indicator(1.4, 0.3)


def test_scenario_and_regress(tmp_path):
    config = tmp_path / "s.ini"
    config.write_text("[run]\nseed = 3\noutput = out\ncommands = geodesic, crossratio\n")
    report = ff.run_scenario(config)
    assert report["artifacts"] == ["geodesic.csv", "crossratio.json"]
    assert report["certified_no_focal"] and not report["errors"]
    assert report["config_hash"] == ff.config_hash(config)
    out = tmp_path / "out"
    assert (out / "geodesic.csv").read_text().splitlines()[1] == "t,x,y,angle"
    assert ff.regress(out, out, tol=0)["passed"]
    config.write_text("[metric]\namplitude = oops\n")
    with pytest.raises(ff.ConfigError, match="metric.amplitude"):
        ff.run_scenario(config)
