"""CSV round trips and run-configuration parsing."""

import numpy as np
import pytest

from deepmh import ChainRecord, ConfigError, ValidationError
from deepmh.config import cfg_get, load_config, parse_config
from deepmh.data import (
    group_by_case,
    read_cases_csv,
    read_chain_csv,
    read_dataset_csv,
    write_cases_csv,
    write_chain_csv,
    write_dataset_csv,
)


class TestDatasetCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        X, Y = rng.standard_normal((7, 3)), rng.standard_normal((7, 2))
        path = tmp_path / "d.csv"
        write_dataset_csv(path, X, Y)
        X2, Y2 = read_dataset_csv(path)
        assert np.array_equal(X, X2) and np.array_equal(Y, Y2)

    def test_header_required(self, tmp_path):
        (tmp_path / "d.csv").write_text("1.0,2.0\n")
        with pytest.raises(ValidationError, match="header"):
            read_dataset_csv(tmp_path / "d.csv")

    def test_unexpected_column_named(self, tmp_path):
        (tmp_path / "d.csv").write_text("x0,z0\n1.0,2.0\n")
        with pytest.raises(ValidationError, match="z0"):
            read_dataset_csv(tmp_path / "d.csv")

    def test_ragged_row_rejected(self, tmp_path):
        (tmp_path / "d.csv").write_text("x0,y0\n1.0,2.0\n3.0\n")
        with pytest.raises(ValidationError, match="row 3"):
            read_dataset_csv(tmp_path / "d.csv")


class TestCasesCsv:
    def test_round_trip_with_repeats(self, tmp_path):
        ids = ["a", "a", "b"]
        vals = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        path = tmp_path / "c.csv"
        write_cases_csv(path, ids, vals)
        ids2, vals2 = read_cases_csv(path)
        assert ids2 == ids and np.array_equal(vals, vals2)
        groups = group_by_case(ids2, vals2)
        assert list(groups) == ["a", "b"]
        assert groups["a"].shape == (2, 2)

    def test_missing_case_column(self, tmp_path):
        (tmp_path / "c.csv").write_text("y0\n1.0\n")
        with pytest.raises(ValidationError, match="case"):
            read_cases_csv(tmp_path / "c.csv")

    def test_wrong_value_column_named(self, tmp_path):
        (tmp_path / "c.csv").write_text("case,z0\na,1.0\n")
        with pytest.raises(ValidationError, match="y0"):
            read_cases_csv(tmp_path / "c.csv")


class TestChainCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        rec = ChainRecord(
            samples=rng.standard_normal((6, 2)),
            accept_flags=np.array([False, True, False, True, True, False]),
            energies=rng.uniform(0, 1, 6),
            burn_in=2,
            seed=0,
        )
        path = tmp_path / "chain.csv"
        write_chain_csv(path, rec)
        steps, flags, energies, samples = read_chain_csv(path)
        assert np.array_equal(steps, np.arange(6))
        assert np.array_equal(flags, rec.accept_flags)
        assert np.array_equal(energies, rec.energies)
        assert np.array_equal(samples, rec.samples)


class TestConfig:
    def test_scalar_types(self):
        cfg = parse_config(
            "task = synthetic_bimodal\n"
            "seed = 7\n"
            "likelihood.beta = 1e4\n"
            "flag = true\n"
        )
        assert cfg["task"] == "synthetic_bimodal"
        assert cfg["seed"] == 7 and isinstance(cfg["seed"], int)
        assert cfg["likelihood.beta"] == 10000.0
        assert cfg["flag"] is True

    def test_lists_and_comments(self):
        cfg = parse_config(
            "# a comment\n"
            "sampler.proposal_sigma = 0.1 2\n"
            "net.hidden = 32, 16  # trailing comment\n"
            "\n"
        )
        assert cfg["sampler.proposal_sigma"] == [0.1, 2]
        assert cfg["net.hidden"] == [32, 16]

    def test_errors_carry_line_numbers(self):
        with pytest.raises(ConfigError, match=":2:"):
            parse_config("a = 1\nnonsense\n")
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("a = 1\na = 2\n")
        with pytest.raises(ConfigError, match="empty value"):
            parse_config("a =\n")

    def test_cfg_get_coercions(self):
        cfg = parse_config("a = 3\nb = 2.5\nc = 1 2\nd = text\n")
        assert cfg_get(cfg, "a", "int") == 3
        assert cfg_get(cfg, "a", "float") == 3.0
        assert cfg_get(cfg, "b", "float") == 2.5
        assert cfg_get(cfg, "c", "floats") == [1.0, 2.0]
        assert cfg_get(cfg, "a", "floats") == [3.0]
        assert cfg_get(cfg, "d", "str") == "text"
        assert cfg_get(cfg, "missing", "int", 9) == 9

    def test_cfg_get_errors_name_key(self):
        cfg = parse_config("a = text\n")
        with pytest.raises(ConfigError, match="a:"):
            cfg_get(cfg, "a", "int")
        with pytest.raises(ConfigError, match="missing required config key 'missing.key'"):
            cfg_get(cfg, "missing.key", "int")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.cfg")
