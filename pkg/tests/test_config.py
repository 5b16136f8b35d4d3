#!/usr/bin/env python3
"""
Unit tests for experiment configuration
"""

import pytest

from shrinkage import config
from shrinkage.config import ExperimentConfig, SkippedCell
from shrinkage.errors import DomainViolation
from shrinkage.estimators import CoefficientConvention


def make(**overrides):
    values = {"p_list": [14], "omega_list": [0.0], "lambda_list": [1.0], "degrees": ["JS"]}
    values.update(overrides)
    return ExperimentConfig(**values)


@pytest.mark.unit
class TestParsing:
    """Test value coercion helpers"""

    @pytest.mark.parametrize("text,degree", [("MLE", 0), ("mle", 0), ("JS", 1), (" js ", 1), ("2", 2), ("4", 4)])
    def test_parse_degree(self, text, degree):
        assert config.parse_degree(text) == degree

    @pytest.mark.parametrize("text", ["5", "poly2", "", "1"])
    def test_parse_degree_rejects(self, text):
        with pytest.raises(DomainViolation):
            config.parse_degree(text)

    def test_as_list_from_string(self):
        assert config.as_list("1, 2,3") == ["1", "2", "3"]

    def test_as_list_from_configobj_list(self):
        assert config.as_list(["0.1", " 0.2"]) == ["0.1", "0.2"]

    def test_as_list_drops_empty_items(self):
        assert config.as_list("1,,2,") == ["1", "2"]

    def test_as_list_none(self):
        assert config.as_list(None) == []

    @pytest.mark.parametrize("value,expected", [("yes", True), ("True", True), ("1", True), ("no", False),
                                                ("off", False), (True, True), (0, False)])
    def test_as_bool(self, value, expected):
        assert config.as_bool(value) is expected


@pytest.mark.unit
class TestExperimentConfig:
    """Test grid validation"""

    def test_coerces_values(self):
        exp = make(p_list=["14", "18"], omega_list=["0.1"], lambda_list=["5.0019"], degrees=["JS", "2"],
                   convention="Simulation")
        assert exp.p_list == [14, 18]
        assert exp.omega_list == [0.1]
        assert exp.degrees == [1, 2]
        assert exp.convention is CoefficientConvention.SIMULATION

    def test_defaults(self):
        exp = make()
        assert exp.method == "exact"
        assert exp.convention is CoefficientConvention.THEOREM
        assert exp.replications == config.DEFAULT_REPLICATIONS
        assert exp.skipped == []

    @pytest.mark.parametrize("overrides", [
        {"p_list": []},
        {"p_list": [0]},
        {"p_list": ["3.5"]},
        {"omega_list": [1.0]},
        {"omega_list": [-0.1]},
        {"lambda_list": [-1.0]},
        {"lambda_list": ["inf"]},
        {"lambda_list": ["abc"]},
        {"degrees": [7]},
        {"method": "bootstrap"},
        {"replications": 0},
        {"seed": -5},
        {"workers": 0},
        {"convention": "halved"},
    ])
    def test_rejects_invalid(self, overrides):
        with pytest.raises(DomainViolation):
            make(**overrides)

    def test_skipped_pairs_are_recorded(self):
        exp = make(p_list=[8, 14], degrees=["JS", "3"])
        assert exp.skipped == [SkippedCell(3, 8, "degree 3 requires p > 10")]
        assert exp.pairs() == [(8, 1), (14, 1), (14, 3)]
        assert exp.degrees_for(8) == [1]
        assert exp.degrees_for(14) == [1, 3]

    def test_james_stein_skip_reason(self):
        exp = make(p_list=[2, 5], degrees=["JS"])
        assert exp.skipped[0].reason == "James-Stein requires p > 2"

    def test_nothing_defined(self):
        with pytest.raises(DomainViolation) as exc:
            make(p_list=[8], degrees=["4"])
        assert "degree 4 requires p > 14 (got p=8)" in str(exc.value)

    def test_from_mapping(self):
        exp = ExperimentConfig.from_mapping({
            "p": "14, 18", "omega": ["0.0", "0.5"], "lambda": "1.2418", "degrees": "MLE,JS,2",
            "method": "MC", "replications": "5000", "seed": "42", "workers": "2",
        })
        assert exp.p_list == [14, 18]
        assert exp.omega_list == [0.0, 0.5]
        assert exp.degrees == [0, 1, 2]
        assert exp.method == "mc"
        assert (exp.replications, exp.seed, exp.workers) == (5000, 42, 2)

    def test_from_mapping_scientific_replications(self):
        exp = ExperimentConfig.from_mapping({"p": "10", "lambda": "1", "replications": "1e6"})
        assert exp.replications == 1_000_000

    def test_from_mapping_bad_integer(self):
        with pytest.raises(DomainViolation):
            ExperimentConfig.from_mapping({"p": "10", "lambda": "1", "seed": "twelve"})


@pytest.mark.unit
class TestConfigFile:
    """Test loading, merging and the output directory"""

    def test_load_file(self, config_file):
        path = config_file("p = 14, 18\nomega = 0.1\nlambda = 1.2418\ndegrees = JS, 2\nconvention = simulation\n")
        values = config.load_file(path)
        assert values["p"] == ["14", "18"]
        assert values["omega"] == "0.1"
        assert values["convention"] == "simulation"

    def test_hyphenated_keys(self, config_file):
        values = config.load_file(config_file("chunk-size = 512\n"))
        assert values == {"chunk_size": "512"}

    def test_unknown_keys_ignored(self, config_file):
        values = config.load_file(config_file("p = 10\ncolour = blue\n"))
        assert values == {"p": "10"}

    def test_sections_rejected(self, config_file):
        with pytest.raises(DomainViolation):
            config.load_file(config_file("[grid]\np = 10\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DomainViolation):
            config.load_file(str(tmp_path / "missing.cfg"))

    def test_flags_win(self):
        merged = config.merge({"p": "10", "omega": "0.1"}, {"p": 14, "omega": None, "seed": 3})
        assert merged == {"p": 14, "omega": "0.1", "seed": 3}

    def test_output_dir_precedence(self, monkeypatch):
        monkeypatch.delenv(config.OUTPUT_DIR_ENV, raising=False)
        assert config.output_dir() == "."
        monkeypatch.setenv(config.OUTPUT_DIR_ENV, "/tmp/results")
        assert config.output_dir() == "/tmp/results"
        assert config.output_dir("explicit") == "explicit"
