"""Result tables on disk: CSV with a JSON metadata sidecar, or plain JSON.

Outputs carry no timestamps, so identical runs produce identical bytes.
"""

import csv
import json
import math
import os

import numpy as np

from . import __version__

VERSION_STRING = f"semicircle-lab v{__version__}"


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _json_safe(v):
    v = _plain(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


class Emitter:
    """Writes named tables into ``out`` in ``fmt`` ("csv" or "json")."""

    def __init__(self, out, fmt="csv", command="", config=None):
        if fmt not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        os.makedirs(out, exist_ok=True)
        self.out = out
        self.fmt = fmt
        self.command = command
        self.config = dict(config or {})
        self.written = []

    def _meta(self, name, columns):
        return {
            "version": VERSION_STRING,
            "command": self.command,
            "table": name,
            "columns": list(columns),
            "config": self.config,
        }

    def table(self, name, columns, rows):
        rows = [[_plain(v) for v in r] for r in rows]
        if self.fmt == "csv":
            path = os.path.join(self.out, name + ".csv")
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(columns)
                w.writerows(rows)
            with open(path + ".meta.json", "w") as fh:
                json.dump(self._meta(name, columns), fh, indent=1, sort_keys=True)
                fh.write("\n")
        else:
            path = os.path.join(self.out, name + ".json")
            doc = {"meta": self._meta(name, columns),
                   "rows": [[_json_safe(v) for v in r] for r in rows]}
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
                fh.write("\n")
        self.written.append(path)
        return path
