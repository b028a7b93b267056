"""설정 / 로깅 / 예외 계층 테스트"""

import logging

import pytest


# ---------------------------------------------------------------------------
# read_config / load_config
# ---------------------------------------------------------------------------

class TestReadConfig:
    def test_read_yaml(self, tmp_path):
        from dmcut.config import read_config

        path = tmp_path / "c.yaml"
        path.write_text("capacity:\n  max_deletable: 5\n", encoding="utf-8")
        assert read_config(str(path)) == {"capacity": {"max_deletable": 5}}

    def test_read_json(self, tmp_path):
        from dmcut.config import read_config

        path = tmp_path / "c.json"
        path.write_text('{"augmentation": {"q": 3}}', encoding="utf-8")
        assert read_config(str(path)) == {"augmentation": {"q": 3}}

    def test_empty_yaml_is_empty_dict(self, tmp_path):
        from dmcut.config import read_config

        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert read_config(str(path)) == {}

    def test_missing_file(self, tmp_path):
        from dmcut.config import read_config

        with pytest.raises(FileNotFoundError):
            read_config(str(tmp_path / "nope.yaml"))

    def test_unsupported_extension(self, tmp_path):
        from dmcut.config import read_config

        path = tmp_path / "c.toml"
        path.write_text("x = 1", encoding="utf-8")
        with pytest.raises(ValueError):
            read_config(str(path))

    def test_non_mapping_root(self, tmp_path):
        from dmcut.config import read_config

        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ValueError):
            read_config(str(path))


class TestLoadConfig:
    def test_shipped_file_matches_defaults(self):
        from dmcut.config import DEFAULT_CONFIG, load_config

        config = load_config()
        for section in ("capacity", "augmentation", "shadow_removal", "irrelevant_vertex"):
            assert config[section] == DEFAULT_CONFIG[section]

    def test_partial_file_is_merged_with_defaults(self, tmp_path):
        from dmcut.config import load_config

        path = tmp_path / "c.yaml"
        path.write_text("capacity:\n  max_subsets: 10\n", encoding="utf-8")
        config = load_config(str(path))
        assert config["capacity"]["max_subsets"] == 10
        assert config["capacity"]["max_deletable"] == 20
        assert config["augmentation"] == {"q": 2, "p": 1, "c_cap": 64, "q_depth": None}

    def test_explicit_missing_path_raises(self, tmp_path):
        from dmcut.config import load_config

        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "missing.yaml"))

    def test_env_substitution(self, tmp_path, monkeypatch):
        from dmcut.config import load_config

        monkeypatch.setenv("MY_LEVEL", "DEBUG")
        path = tmp_path / "c.yaml"
        path.write_text('logging:\n  level: "${MY_LEVEL}"\n', encoding="utf-8")
        assert load_config(str(path))["logging"]["level"] == "DEBUG"

    def test_unset_env_resolves_to_empty(self, tmp_path):
        from dmcut.config import load_config

        path = tmp_path / "c.yaml"
        path.write_text('logging:\n  level: "${DMCUT_UNSET_VARIABLE_X}"\n', encoding="utf-8")
        assert load_config(str(path))["logging"]["level"] == ""


# ---------------------------------------------------------------------------
# 타입 있는 설정
# ---------------------------------------------------------------------------

class TestSettings:
    def test_settings_from_config(self):
        from dmcut.config import DEFAULT_CONFIG, settings_from_config

        settings = settings_from_config(DEFAULT_CONFIG)
        assert settings.capacity.max_deletable == 20
        assert settings.augmentation.q == 2
        assert settings.shadow_removal.strategy == "oracle"
        assert settings.irrelevant_vertex.rho == 8

    def test_unknown_key_is_input_error(self):
        from dmcut.config import DEFAULT_CONFIG, settings_from_config
        from dmcut.errors import InputError

        config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
        config["capacity"]["bogus"] = 1
        with pytest.raises(InputError):
            settings_from_config(config)

    def test_get_settings_is_cached(self):
        from dmcut.config import get_settings

        assert get_settings() is get_settings()

    def test_negative_q_depth(self):
        from dmcut.config import AugmentationSettings
        from dmcut.errors import InputError

        with pytest.raises(InputError):
            AugmentationSettings(q_depth=-1)

    @pytest.mark.parametrize("zeta,rho", [(0, 4), (2, 3), (3, 5)])
    def test_irrelevant_vertex_config_bounds(self, zeta, rho):
        from dmcut.config import IrrelevantVertexConfig
        from dmcut.errors import InputError

        with pytest.raises(InputError):
            IrrelevantVertexConfig(zeta=zeta, rho=rho)

    def test_irrelevant_vertex_config_minimum(self):
        from dmcut.config import IrrelevantVertexConfig

        cfg = IrrelevantVertexConfig(zeta=1, rho=2)
        assert (cfg.zeta, cfg.rho) == (1, 2)


class TestCapacityLimits:
    def test_within_limit(self, limits):
        limits.check("max_deletable", 20)

    def test_exceeds_limit(self, limits):
        from dmcut.errors import CapacityError

        with pytest.raises(CapacityError) as exc:
            limits.check("max_deletable", 21)
        assert exc.value.guard == "max_deletable"
        assert (exc.value.value, exc.value.limit) == (21, 20)

    def test_relaxed_only_warns(self, limits, caplog):
        relaxed = limits.relaxed()
        assert relaxed.enforce is False
        with caplog.at_level(logging.WARNING, logger="dmcut.config"):
            relaxed.check("max_subsets", 10**9)
        assert "overridden" in caplog.text

    def test_unknown_guard(self, limits):
        from dmcut.errors import InputError

        with pytest.raises(InputError):
            limits.check("max_everything", 1)


# ---------------------------------------------------------------------------
# 예외 계층
# ---------------------------------------------------------------------------

class TestErrors:
    def test_hierarchy(self):
        from dmcut.errors import CapacityError, DmcutError, ExtractionError, InputError

        assert issubclass(InputError, DmcutError)
        assert issubclass(InputError, ValueError)
        assert issubclass(CapacityError, DmcutError)
        assert issubclass(ExtractionError, InputError)

    def test_capacity_message(self):
        from dmcut.errors import CapacityError

        e = CapacityError("max_subsets", 11, 10)
        assert "max_subsets" in str(e)
        assert "11 > 10" in str(e)


# ---------------------------------------------------------------------------
# 로깅
# ---------------------------------------------------------------------------

class TestObservability:
    def test_env_defaults_do_not_overwrite(self, monkeypatch):
        from dmcut.observability import configure_env_defaults

        monkeypatch.setenv("DMCUT_LOG_LEVEL", "WARNING")
        assert configure_env_defaults()["DMCUT_LOG_LEVEL"] == "WARNING"

    def test_env_defaults_fill_missing(self, monkeypatch):
        import os

        from dmcut.observability import configure_env_defaults

        # setenv 로 원래 상태를 기록해 두어야 teardown 에서 복원됩니다
        monkeypatch.setenv("DMCUT_LOG_LEVEL", "placeholder")
        monkeypatch.delenv("DMCUT_LOG_LEVEL")
        configured = configure_env_defaults()
        assert configured["DMCUT_LOG_LEVEL"] == "INFO"
        assert os.environ["DMCUT_LOG_LEVEL"] == "INFO"

    def test_resolve_precedence(self, monkeypatch):
        from dmcut.observability import resolve_log_level

        monkeypatch.setenv("DMCUT_LOG_LEVEL", "ERROR")
        assert resolve_log_level("debug") == logging.DEBUG
        assert resolve_log_level() == logging.ERROR

    def test_resolve_falls_back_to_info(self):
        from dmcut.observability import resolve_log_level

        assert resolve_log_level() == logging.INFO
        assert resolve_log_level("not-a-level") == logging.INFO

    def test_single_handler(self):
        from dmcut.observability import configure_logging

        root = configure_logging("WARNING")
        configure_logging("DEBUG")
        named = [h for h in root.handlers if h.get_name() == "dmcut"]
        assert len(named) == 1
        assert root.level == logging.DEBUG
        root.removeHandler(named[0])
        root.setLevel(logging.WARNING)
