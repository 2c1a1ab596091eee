#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test the pulsemetro.exporter module
"""

import logging
import math
import numpy as np
from pulsemetro import __version__
from pulsemetro.config import RunConfig, config_from_mapping
from pulsemetro.exporter import Exporter, cell, plain
import pytest

logger = logging.getLogger(__file__)


class TestCell:
    def test_float_digits(self):
        assert cell(0.1) == "0.10000000000000001"
        assert float(cell(1.0 / 3.0)) == 1.0 / 3.0
        assert cell(np.float64(2.5)) == "2.5"

    def test_missing(self):
        assert cell(None) == ""
        assert cell(math.nan) == ""

    def test_other(self):
        assert cell(np.int64(7)) == "7"
        assert cell(True) == "true"
        assert cell("ok") == "ok"


class TestPlain:
    def test_nested(self):
        value = plain({"a": np.array([1.0, math.inf]), "b": (np.int32(2), math.nan)})
        assert value == {"a": [1.0, None], "b": [2, None]}


class TestExporter:
    def test_header(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), theta=0.5)
        header = Exporter(config, "qfi").header()
        assert header["artifact"] == "pulsemetro"
        assert header["version"] == __version__
        assert header["command"] == "qfi"
        assert config_from_mapping(header["config"]) == config
        assert header["resolved"]["tau"] == pytest.approx(2.0 * math.pi / (0.5e6 * 4.0))

    def test_csv_layout(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path / "runs")), "evolve")
        filepath = e.export("csv", ["k4", "n1"], columns=["n", "qq"], rows=[[0, 100.5], [1, None]])
        assert filepath == tmp_path / "runs" / "evolve_k4_n1.csv"
        lines = filepath.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# {")
        assert lines[1:] == ["n,qq", "0,100.5", "1,"]

    def test_deterministic(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path)), "qfi")
        rows = [[n, n / 7.0] for n in range(1, 20)]
        first = e.export("csv", ["k4"], columns=["n", "F"], rows=rows).read_bytes()
        second = e.export("csv", ["k4"], columns=["n", "F"], rows=rows).read_bytes()
        assert first == second

    def test_json(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path)), "validate")
        filepath = e.export("json", ["k4"], payload={"spectral_radius": np.float64(0.99)})
        assert filepath.suffix == ".json"
        assert '"spectral_radius": 0.99' in filepath.read_text(encoding="utf-8")

    def test_unsupported(self, tmp_path):
        with pytest.raises(NotImplementedError):
            Exporter(RunConfig(out_dir=str(tmp_path)), "qfi").export("xlsx", ["k4"])
