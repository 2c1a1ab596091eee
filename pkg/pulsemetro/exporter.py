#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exporter: CSV and JSON files with an embedded provenance header
"""

import csv
import jsonpickle
import logging
import math
import numpy as np
from pathlib import Path
from slugify import slugify
from pulsemetro import __version__
from pulsemetro.config import RunConfig

logger = logging.getLogger(__name__)

ARTIFACT = "pulsemetro"


def plain(value):
    """Python scalars and lists for JSON; NaN and infinities become None."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def cell(value):
    """CSV text for one value; floats carry 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return ""
        return f"{value:.17g}"
    return str(value)


class Exporter:
    def __init__(self, config: RunConfig, command: str):
        self.config = config
        self.command = command

    def header(self):
        return {
            "artifact": ARTIFACT,
            "version": __version__,
            "command": self.command,
            "config": plain(self.config.as_dict()),
            "resolved": plain(self.config.resolved()),
        }

    def export(self, format: str, name_parts, **kwargs):
        try:
            func = getattr(self, f"_export_{format}")
        except AttributeError:
            raise NotImplementedError(f"unsupported export format {format}")
        filepath = self._export_filepath(name_parts).with_suffix(f".{format}")
        func(filepath, **kwargs)
        logger.info(f"wrote {filepath}")
        return filepath

    def _export_csv(self, filepath: Path, columns, rows):
        header = jsonpickle.encode(self.header(), unpicklable=False)
        count = 0
        with open(filepath, "w", encoding="utf-8", newline="") as fp:
            fp.write(f"# {header}\n")
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([cell(v) for v in row])
                count += 1
        del fp
        logger.debug(f"{count} rows in {filepath.name}")

    def _export_json(self, filepath: Path, payload: dict):
        data = {"header": self.header()}
        data.update(plain(payload))
        with open(filepath, "w", encoding="utf-8") as fp:
            fp.write(jsonpickle.encode(data, unpicklable=False, indent=2))
            fp.write("\n")
        del fp

    def _export_filepath(self, name_parts):
        dirpath = Path(self.config.out_dir)
        dirpath.mkdir(parents=True, exist_ok=True)
        fn = slugify(" ".join([self.command, *[str(p) for p in name_parts]]), separator="_")
        return dirpath / fn
