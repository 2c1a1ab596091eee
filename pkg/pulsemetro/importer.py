#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Importer for files written by the exporter
"""

import csv
import jsonpickle
import logging
import math
from pathlib import Path

logger = logging.getLogger(__name__)


class ImporterError(RuntimeError):
    def __init__(self, filepath, message: str):
        self.message = f"Cannot import {filepath}: {message}"
        super().__init__(self.message)


def number(text: str):
    if text == "":
        return math.nan
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class Importer:
    def __init__(self):
        pass

    def import_data(self, filepath):
        """
        Read a CSV or JSON output file; returns its header and content
        """
        if isinstance(filepath, Path):
            path = filepath
        elif isinstance(filepath, str):
            path = Path(filepath)
        else:
            raise TypeError(type(filepath))
        path = path.expanduser().resolve()
        ext = path.suffix[1:].lower()
        try:
            func = getattr(self, f"_import_{ext}")
        except AttributeError:
            raise NotImplementedError(f"Import from {ext} file {str(path)}.")
        try:
            return func(path)
        except OSError as err:
            raise ImporterError(path, err.strerror)

    def _import_csv(self, path: Path):
        with open(path, "r", encoding="utf-8", newline="") as fp:
            first = fp.readline()
            if not first.startswith("#"):
                raise ImporterError(path, "missing provenance header line")
            header = self._decode(path, first[1:])
            reader = csv.reader(fp)
            try:
                columns = next(reader)
            except StopIteration:
                raise ImporterError(path, "missing column line")
            rows = [dict(zip(columns, [number(v) for v in r])) for r in reader if r]
        del fp
        logger.debug(f"read {len(rows)} rows from {path.name}")
        return {"header": header, "columns": columns, "rows": rows}

    def _import_json(self, path: Path):
        data = self._decode(path, path.read_text(encoding="utf-8"))
        try:
            header = data.pop("header")
        except KeyError:
            raise ImporterError(path, "missing provenance header")
        return {"header": header, **data}

    def _decode(self, path, text):
        try:
            data = jsonpickle.decode(text.strip())
        except ValueError as err:
            raise ImporterError(path, f"malformed JSON ({err})")
        if not isinstance(data, dict):
            raise ImporterError(path, "expected a JSON object")
        return data
