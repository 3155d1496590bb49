import pytest
from hypothesis import given, settings, strategies as st

from qogyro.scenario import Scenario, ScenarioError, format_value, parse_text

BASIC = """\
# comment
[spectral]
eta = 0.05   # inline comment
omega_c = 25

[probe]
Omega = 0.01
N = 100

[grid]
t_max = 500
converge = false

[run]
pipeline = exact
name = demo
"""


def test_parse_basic():
    sc = parse_text(BASIC)
    assert (sc.eta, sc.omega_c, sc.s) == (0.05, 25.0, 1.0)
    assert sc.N == 100 and sc.converge is False and sc.name == "demo"
    assert sc.probe().omega1 == 1.01


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("[run]\npipeline = exact\n[spectral]\neta = x\n", 4, "bad value"),
        ("[run]\npipeline = ideal\nfoo = 1\n", 3, "unknown key"),
        ("[bogus]\n", 1, "unknown section"),
        ("eta = 1\n", 1, "outside"),
        ("[run]\npipeline = ideal\npipeline = exact\n", 3, "duplicate"),
        ("[run\n", 1, "malformed"),
        ("[run]\njust words\n", 2, "expected key"),
        ("[grid]\nt_max = inf\n[run]\npipeline = ideal\n", 2, "bad value"),
    ],
)
def test_parse_errors_locate_line(text, line, fragment):
    with pytest.raises(ScenarioError, match=fragment) as info:
        parse_text(text, path="x.ini")
    assert info.value.line == line
    assert f"x.ini:{line}:" in str(info.value)


@pytest.mark.parametrize(
    "kw",
    [
        dict(pipeline="nope"),
        dict(pipeline="exact"),
        dict(pipeline="ideal", N=10.0, r=1.0),
        dict(pipeline="exact", eta=0.1, omega_c=2.0, kappa=0.2),
        dict(pipeline="ideal", measure="max"),
        dict(pipeline="ideal", stride=0),
        dict(pipeline="ideal", sweep_param="dt", sweep_values=(1.0,)),
    ],
)
def test_invalid_scenarios(kw):
    with pytest.raises(ScenarioError):
        Scenario(**kw)


def test_missing_pipeline():
    with pytest.raises(ScenarioError, match="pipeline"):
        parse_text("[grid]\nt_max = 3\n")


def test_meta_section_is_ignored():
    sc = parse_text(BASIC + "\n[meta]\nanything = goes\nversion = 9\n")
    assert sc == parse_text(BASIC)


def test_round_trip_through_text():
    sc = Scenario(pipeline="markovian", kappa=0.2, Omega=1.0, N=100.0, t_max=50.0, dt=0.001,
                  sweep_param="N", sweep_values=(25.0, 50.0))
    assert parse_text(sc.to_text([("note", "x")])) == sc


@settings(max_examples=50, deadline=None)
@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_value(x)) == x


def test_with_value_swaps_photon_inputs():
    sc = Scenario(pipeline="ideal", r=1.0)
    n = sc.with_value("N", 50.0)
    assert n.r is None and n.photons == 50.0
    assert sc.with_value("r", 0.0).photons == 0.0
    with pytest.raises(ScenarioError):
        sc.with_value("pipeline", 1.0)
