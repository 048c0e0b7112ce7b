import math

import pytest

import doubling as d

FREE = d.PotentialSpec(1.0, d.SamplingFunction.table([0.0], allow_constant=True))


def test_encode_and_digits():
    third = d.encode(1, 3)
    assert third.periodic_form() == ([], [0, 1])
    assert third.window(1, 6) == [0, 1, 0, 1, 0, 1]
    assert abs(third.value() - 1 / 3) < 1e-15
    assert d.doubling_map(0.375) == 0.75


def test_free_lyapunov_exponent():
    est = d.estimate_gamma(FREE, 3.0, n=20000, samples=2, seed=1, threads=1)
    assert abs(est["mean"] - math.log((3 + math.sqrt(5)) / 2)) < 1e-3
    assert est["stderr"] == 0.0


def test_curve_is_thread_independent():
    spec = d.PotentialSpec(2.0)
    a = d.lyapunov_curve(spec, -3, 3, 7, n=2000, samples=4, seed=5, threads=1)
    b = d.lyapunov_curve(spec, -3, 3, 7, n=2000, samples=4, seed=5, threads=4)
    assert a == b
    assert all(p["mean"] > 0 for p in a)


def test_bands_alternating():
    spec = d.PotentialSpec(1.0, d.SamplingFunction.parse("table:1,-1"))
    bands = d.periodic_bands(spec, d.encode(1, 3))
    expected = [(-math.sqrt(5), -1.0), (1.0, math.sqrt(5))]
    for (lo, hi), (elo, ehi) in zip(bands, expected):
        assert abs(lo - elo) < 1e-8 and abs(hi - ehi) < 1e-8


def test_eigenvalues_and_localization():
    ev = d.eigenvalues(FREE, d.DigitSequence.seeded(1), 5)
    expected = sorted(2 * math.cos(k * math.pi / 6) for k in range(1, 6))
    assert max(abs(a - b) for a, b in zip(ev, expected)) < 1e-10
    prs = d.participation_ratios(d.PotentialSpec(2.0), d.DigitSequence.seeded(3), 400)
    assert len(prs) == 400 and min(prs) >= 1.0


def test_restriction_identity():
    spec = d.PotentialSpec(1.5)
    whole = d.wholeline_potentials(spec, 9, 1, 500)
    assert len(whole) == 500


def test_run_config_and_errors():
    out = d.run({"command": "bands", "theta": {"kind": "rational", "p": 1, "q": 3},
                 "f": {"kind": "table", "values": [1, -1]}})
    assert out["columns"][0] == "band_index"
    assert len(out["rows"]) == 2
    with pytest.raises(ValueError):
        d.PotentialSpec(-1.0)
    with pytest.raises(d.ValidationError):
        d.run({"lamda": 1})
    with pytest.raises(ValueError):
        d.SamplingFunction.table([1.0, 1.0])
