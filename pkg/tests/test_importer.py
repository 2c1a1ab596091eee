#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test the pulsemetro.importer module
"""

import logging
import math
from pulsemetro.config import RunConfig
from pulsemetro.exporter import Exporter
from pulsemetro.importer import Importer, ImporterError
from pathlib import Path
import pytest

logger = logging.getLogger(__file__)


class TestInit:
    def test_init_no_args(self):
        Importer()


class TestImportCSV:
    def test_import_exported(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path)), "qfi")
        filepath = e.export(
            "csv",
            ["k4", "n3"],
            columns=["n", "F", "phi_rad", "note"],
            rows=[[1, 0.25, None, "a"], [2, 1e-05, math.nan, "b"], [3, 4.0, 0.5, "c"]],
        )
        data = Importer().import_data(filepath)
        assert data["header"]["command"] == "qfi"
        assert data["columns"] == ["n", "F", "phi_rad", "note"]
        assert len(data["rows"]) == 3
        row = data["rows"][1]
        assert row["n"] == 2
        assert row["F"] == 1e-05
        assert math.isnan(row["phi_rad"])
        assert row["note"] == "b"

    def test_import_string_path(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path)), "evolve")
        filepath = e.export("csv", ["n1"], columns=["n", "qq"], rows=[[0, 100.5]])
        data = Importer().import_data(str(filepath))
        assert data["rows"] == [{"n": 0, "qq": 100.5}]

    def test_missing_header(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("n,F\n1,2.0\n", encoding="utf-8")
        with pytest.raises(ImporterError):
            Importer().import_data(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "broken.csv"
        path.write_text("# {not json\nn,F\n", encoding="utf-8")
        with pytest.raises(ImporterError):
            Importer().import_data(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImporterError):
            Importer().import_data(tmp_path / "absent.csv")


class TestImportJSON:
    def test_import_exported(self, tmp_path):
        e = Exporter(RunConfig(out_dir=str(tmp_path)), "fit")
        filepath = e.export("json", ["k4"], payload={"fit": {"alpha": 2.5}, "saturation_n": None})
        data = Importer().import_data(filepath)
        assert data["header"]["artifact"] == "pulsemetro"
        assert data["fit"] == {"alpha": 2.5}
        assert data["saturation_n"] is None

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bare.json"
        path.write_text('{"fit": {}}\n', encoding="utf-8")
        with pytest.raises(ImporterError):
            Importer().import_data(path)


class TestUnsupported:
    def test_suffix(self):
        with pytest.raises(NotImplementedError):
            Importer().import_data(Path("tests/data/default.cfg"))

    def test_type(self):
        with pytest.raises(TypeError):
            Importer().import_data(42)
