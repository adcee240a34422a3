import logging

import pytest
from pydantic import ValidationError

from digraph_perf.core import config
from digraph_perf.core.config import Settings, apply_overrides
from digraph_perf.utils.logger import logger, set_level


class TestSettings:
    """Test defaults, validation and tolerance overrides."""

    def test_defaults(self):
        s = Settings()
        assert s.THREADS >= 1
        assert s.REPEATED_ROOT_TOL == 1e-9
        assert s.ORACLE_RTOL == 1e-8
        assert s.RK4_MAX_STEPS == 10_000_000
        assert s.CSV_DIGITS == 17
        assert s.CANCELLATION_MAX == 1e4

    def test_log_level_normalized(self):
        assert Settings(LOG_LEVEL=" info ").LOG_LEVEL == "INFO"

    def test_unknown_log_level_raises_error(self):
        with pytest.raises(ValidationError):
            Settings(LOG_LEVEL="verbose")

    def test_threads_from_environment(self, monkeypatch):
        monkeypatch.setenv("DIGRAPH_PERF_THREADS", "8")
        assert Settings().THREADS == 8

    def test_threads_out_of_range(self):
        with pytest.raises(ValidationError):
            Settings(THREADS=0)


class TestOverride:
    def test_override_returns_copy(self, test_settings):
        local = test_settings.override({"residual_tol": 1e-7})
        assert local.RESIDUAL_TOL == 1e-7
        assert test_settings.RESIDUAL_TOL == 1e-8

    def test_override_unknown_key(self, test_settings):
        with pytest.raises(ValidationError):
            test_settings.override({"NOT_A_TOLERANCE": 1.0})

    def test_override_out_of_range(self, test_settings):
        with pytest.raises(ValidationError):
            test_settings.override({"COMPARE_TOL": -1.0})

    def test_apply_overrides_updates_global(self, monkeypatch):
        monkeypatch.setattr(config, "settings", Settings())
        apply_overrides({"OBSV_TOL": 1e-6})
        assert config.settings.OBSV_TOL == 1e-6


class TestLogger:
    def test_stream_handler_without_propagation(self):
        assert logger.name == "digraph_perf"
        assert logger.propagate is False
        assert any(type(h) is logging.StreamHandler for h in logger.handlers)

    def test_set_level(self):
        previous = logger.level
        try:
            set_level("info")
            assert logger.level == logging.INFO
            assert logging.getLogger("digraph_perf.core.spectral").getEffectiveLevel() == logging.INFO
        finally:
            logger.setLevel(previous)

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            set_level("verbose")
