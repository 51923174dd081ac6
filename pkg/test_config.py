import pytest
from pydantic import ValidationError

from app.core.config import Settings, settings
from app.models.tolerance import ToleranceConfig


def test_default_tolerances():
    tol = settings.tolerance()
    assert (tol.zero, tol.distinct, tol.rank, tol.match) == (1e-8, 1e-6, 1e-9, 1e-7)


def test_tolerance_overrides():
    tol = settings.tolerance({"distinct": 1e-4, "zero": 1e-10})
    assert tol.distinct == 1e-4
    assert tol.zero == 1e-10
    assert tol.rank == settings.TOL_RANK


@pytest.mark.parametrize("overrides", [{"zero": 0.0}, {"rank": 1.5}, {"match": 1e-3}])
def test_invalid_tolerances_rejected(overrides):
    with pytest.raises(ValidationError):
        settings.tolerance(overrides)


def test_tolerance_is_frozen():
    tol = ToleranceConfig()
    with pytest.raises(ValidationError):
        tol.zero = 1e-3


def test_is_zero_scales():
    tol = ToleranceConfig()
    assert tol.is_zero(1e-9, 0.5)
    assert tol.is_zero(1e-3, 1e6)
    assert not tol.is_zero(1e-3, 1.0)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TOL_DISTINCT", "1e-5")
    monkeypatch.setenv("CAMPAIGN_WORKERS", "4")
    monkeypatch.setenv("LOG_LEVEL", "debug")
    configured = Settings()
    assert configured.tolerance().distinct == 1e-5
    assert configured.CAMPAIGN_WORKERS == 4
    assert configured.LOG_LEVEL == "DEBUG"


def test_unknown_log_level_rejected(monkeypatch):
    monkeypatch.setenv("LOG_LEVEL", "chatty")
    with pytest.raises(ValidationError):
        Settings()
