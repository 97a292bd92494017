import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurigreen.config import RunConfig, SearchBudget, default_seed, load_config
from plurigreen.intervals import BoundInterval, SoundnessError, decode_real, encode_real, pole_interval

reals = st.floats(min_value=-50, max_value=50, allow_nan=False)


@given(reals, reals, reals, reals)
def test_merge_keeps_best_sides(a, b, c, d):
    x = BoundInterval(min(a, b), max(a, b), "x", "x", True)
    y = BoundInterval(min(c, d), max(c, d), "y", "y", True)
    m = x.merge(y)
    assert m.lo == max(x.lo, y.lo)
    assert m.hi == min(x.hi, y.hi)


def test_checked_raises_on_crossing():
    with pytest.raises(SoundnessError):
        BoundInterval(0.1, 0.0, "a", "b", True).checked()
    # within tolerance the interval collapses
    iv = BoundInterval(1e-12, 0.0, "a", "b", True).checked()
    assert iv.lo <= iv.hi


def test_json_roundtrip_with_infinities():
    iv = BoundInterval(-math.inf, 0.5, "none", "disk", True, "certified_lo", "certified_hi")
    back = BoundInterval.from_json(json.loads(json.dumps(iv.to_json())))
    assert back == iv
    assert pole_interval().to_json()["lo"] == "-inf"
    assert decode_real(encode_real(math.inf)) == math.inf


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(restarts=0)
    with pytest.raises(ValueError):
        SearchBudget(hits=3)
    with pytest.raises(ValueError):
        SearchBudget(degree=2, hits=2)


def test_seed_env(monkeypatch):
    monkeypatch.setenv("PLURIGREEN_SEED", "17")
    assert default_seed() == 17
    monkeypatch.delenv("PLURIGREEN_SEED")
    assert default_seed() == RunConfig().seed


def test_config_file_overrides(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"seed": 5, "budget": {"restarts": 3}}))
    cfg = load_config(str(p), RunConfig())
    assert cfg.seed == 5 and cfg.budget.restarts == 3 and cfg.budget.degree == SearchBudget().degree
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
