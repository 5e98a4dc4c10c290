"""
Configuration tests - file parsing, overrides, validation and scenario resolution
"""
import pytest

from ..Models.config_model import RunConfig, StudyConfig, StudyMode, default_cfl
from ..harness import config_loader
from ..harness.config_loader import load_run_config, load_study_config, merge_settings
from ..harness.validation.validation import (is_valid_bool, is_valid_float, is_valid_int,
                                             is_valid_int_list, is_valid_key, is_valid_scenario)
from ..solver.errors import ConfigError
from ..solver.maxwell_operator import MaxwellFluxKind
from ..solver.vlasov_operator import MappingKind


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)
    return write


class TestValidation:
    @pytest.mark.parametrize("value,expected", [("3", True), ("-2", True), ("3.0", False), ("x", False)])
    def test_int(self, value, expected):
        """Test integer strings"""
        assert is_valid_int(value) is expected

    def test_int_list(self):
        """Test comma separated resolutions"""
        assert is_valid_int_list("16, 16")
        assert not is_valid_int_list("16,,16")

    def test_float_and_bool(self):
        """Test numbers and booleans"""
        assert is_valid_float("1e-3") and not is_valid_float("fast")
        assert is_valid_bool("Yes") and not is_valid_bool("maybe")

    def test_keys_and_scenarios(self):
        """Test key syntax and catalog membership"""
        assert is_valid_key("n_x") and not is_valid_key("N-x")
        assert is_valid_scenario("weibel_1d2v") and not is_valid_scenario("weibel")


class TestMergeSettings:
    def test_file_values_are_parsed(self, config_file):
        """Test a flat key = value file with comments"""
        path = config_file("# ladder\nscenario = maxwell_vacuum_1d\nk = 1\nn_v = 4\ncfl = 0.05\n"
                           "adaptive_dt = on  # per step\n")
        settings = merge_settings(path)
        assert settings == {"scenario": "maxwell_vacuum_1d", "k": 1, "n_v": [4], "cfl": 0.05,
                            "adaptive_dt": True}

    def test_overrides_win_over_file(self, config_file):
        """Test CLI values replace file values, None overrides are ignored"""
        path = config_file("k = 1\nn_x = 8\n")
        settings = merge_settings(path, {"k": "3", "n_x": None})
        assert settings["k"] == 3 and settings["n_x"] == 8

    def test_unknown_key(self, config_file):
        """Test a key outside the recognised set"""
        with pytest.raises(ConfigError) as exc:
            merge_settings(config_file("colour = blue\n"))
        assert exc.value.key == "colour"

    def test_bad_value_is_logged_and_rejected(self, monkeypatch):
        """Test a non-integer degree raises and emits config_rejected"""
        logged = []
        monkeypatch.setattr(config_loader, "log_event", lambda *a, **kw: logged.append(kw))
        with pytest.raises(ConfigError):
            merge_settings(None, {"k": "two"})
        assert logged and logged[0]["event"] == "config_rejected" and logged[0]["key"] == "k"

    def test_missing_file(self, tmp_path):
        """Test a config path that does not exist"""
        with pytest.raises(ConfigError):
            merge_settings(str(tmp_path / "nope.cfg"))

    def test_malformed_line(self, config_file):
        """Test a line without '='"""
        with pytest.raises(ConfigError):
            merge_settings(config_file("k 2\n"))


class TestRunConfig:
    def test_defaults_from_scenario(self):
        """Test unset fields are filled from the catalog entry"""
        config = load_run_config(None, {"scenario": "free_streaming"})
        assert config.n_x == 8 and config.n_v == [8]
        assert config.t_final == 1.0
        assert config.mapping == MappingKind.CLASSICAL
        assert config.flux == MaxwellFluxKind.UPWIND
        assert config.cfl_number == pytest.approx(default_cfl(2))

    def test_single_n_v_is_duplicated_for_two_velocity_axes(self):
        """Test n_v = 8 becomes [8, 8] for a 1D2V scenario"""
        config = load_run_config(None, {"scenario": "weibel_1d2v", "n_v": "8"})
        assert config.n_v == [8, 8]

    def test_wrong_number_of_velocity_resolutions(self):
        """Test three n_v entries for a 1D1V scenario"""
        with pytest.raises(ConfigError) as exc:
            load_run_config(None, {"scenario": "free_streaming", "n_v": "4,4,4"})
        assert exc.value.key == "n_v"

    def test_mapping_mismatch(self):
        """Test asking for the relativistic mapping on a classical scenario"""
        with pytest.raises(ConfigError) as exc:
            load_run_config(None, {"scenario": "free_streaming", "mapping": "relativistic"})
        assert exc.value.key == "mapping"

    @pytest.mark.parametrize("key,value", [("k", "-1"), ("n_x", "0"), ("cfl", "0"),
                                           ("t_final", "-1"), ("flux", "lax"), ("mode", "both")])
    def test_invalid_values(self, key, value):
        """Test out-of-range and unknown values"""
        with pytest.raises(ConfigError):
            load_study_config(None, {key: value})

    def test_low_degree_warns(self, monkeypatch):
        """Test k = 0 runs but logs a low-degree warning"""
        logged = []
        monkeypatch.setattr(config_loader, "log_event", lambda *a, **kw: logged.append(kw))
        config = load_run_config(None, {"k": "0"})
        assert config.k == 0 and not config.in_convergence_regime
        assert any(entry["event"] == "low_degree_warning" for entry in logged)

    def test_config_is_frozen(self):
        """Test resolved configs cannot be mutated"""
        config = RunConfig()
        with pytest.raises(Exception):
            config.k = 5


class TestStudyConfig:
    def test_study_from_overrides(self):
        """Test levels and mode are read alongside the base run"""
        study = load_study_config(None, {"scenario": "maxwell_vacuum_1d", "levels": "3",
                                         "mode": "temporal", "flux": "central"})
        assert study.levels == 3 and study.mode == StudyMode.TEMPORAL
        assert study.base.flux == MaxwellFluxKind.CENTRAL
        assert study.assertable

    def test_two_levels_are_not_assertable(self):
        """Test a two-level ladder still runs but cannot be asserted"""
        study = StudyConfig(base=RunConfig(), levels=2)
        assert not study.assertable

    def test_one_level_is_rejected(self):
        """Test levels < 2"""
        with pytest.raises(ConfigError):
            load_study_config(None, {"levels": "1"})


class TestGrowthWindow:
    def test_window_is_parsed(self):
        """Test two comma separated times"""
        config = load_run_config(None, {"scenario": "weibel_1d2v", "growth_window": "2, 8"})
        assert config.growth_window == (2.0, 8.0)

    @pytest.mark.parametrize("value", ["8,2", "5", "a,b"])
    def test_bad_window(self, value):
        """Test reversed, single and non-numeric windows"""
        with pytest.raises(ConfigError) as exc:
            load_run_config(None, {"growth_window": value})
        assert exc.value.key == "growth_window"
