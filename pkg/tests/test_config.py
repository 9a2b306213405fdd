import pytest

from _support import REGRESSION_TOML
from qutrit_otto.config import parse_config, validate, with_override
from qutrit_otto.correlators import default_epsilon
from qutrit_otto.errors import ParseError, ValidationError

MINIMAL = """
omega01_i = 1.0
omega12_i = 1.2
omega01_ii = 0.8
omega12_ii = 0.9
[switching]
sigma = 4.0
[correlator_i]
kind = "inertial_vacuum"
[correlator_ii]
kind = "accelerated_vacuum"
acceleration = 2.0
"""


def test_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert (cfg.coupling, cfg.rel_tol, cfg.max_depth) == (1e-2, 1e-4, 30)
    assert cfg.switching_i.shape == "smooth_bump"
    assert cfg.correlator_i.epsilon is None  # filled per stage
    # default stage-II window starts one sigma after stage I ends
    assert cfg.switching_ii.support()[0] - cfg.switching_i.support()[1] == pytest.approx(4.0)
    assert default_epsilon(4.0, 2.2) == pytest.approx(1e-3 / 2.2)


def test_regression_config_parses():
    cfg = parse_config(REGRESSION_TOML)
    assert cfg.gaps.delta01 == pytest.approx(0.2) and cfg.gaps.delta12 == pytest.approx(0.3)
    assert cfg.correlator_ii.temperature == 0.5


def test_all_violations_reported():
    bad = "bogus = 1\n" + MINIMAL.replace("sigma = 4.0", "sigma = -4.0").replace(
        "omega12_ii = 0.9", "") + "\n[quad]\nmax_depth = 0\n"
    with pytest.raises(ValidationError) as exc:
        parse_config(bad)
    paths = {p for p, _ in exc.value.violations}
    assert {"switching.sigma", "omega12_ii", "bogus", "quad.max_depth"} <= paths


def test_overlap_names_rule():
    text = MINIMAL + "\n[switching.ii]\ncenter = 3.0\n"
    with pytest.raises(ValidationError) as exc:
        parse_config(text)
    assert any("disjoint" in m for _, m in exc.value.violations)


def test_parse_error():
    with pytest.raises(ParseError):
        parse_config("omega01_i = = 1")


def test_sweep_axes_and_override():
    cfg = parse_config(MINIMAL + '\n[sweep]\n"correlator_ii.acceleration" = {start = 1, stop = 3, num = 3}\n'
                       'lambda = [0.01, 0.02]\n')
    assert cfg.sweep == {"correlator_ii.acceleration": [1.0, 2.0, 3.0], "lambda": [0.01, 0.02]}
    raw = with_override(cfg.raw, "correlator_ii.acceleration", 5.0)
    assert validate(raw).correlator_ii.acceleration == 5.0
    assert cfg.raw["correlator_ii"]["acceleration"] == 2.0
