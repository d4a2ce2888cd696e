"""Sampled simulation output and its CSV / report serialization."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch

SCHEMA_VERSION = "dobac-runlog/1"


def column_names(n, m_V, m_W):
    """Fixed column order for a plant of dimension n with basis sizes m_V, m_W."""
    idx = lambda p, k: [f"{p}{i + 1}" for i in range(k)]
    return (["t"] + idx("x", n) + idx("xr", n) + idx("e", n) + ["e_norm"]
            + idx("kx", n) + ["kr"] + idx("V", m_V) + idx("W", m_W)
            + ["r", "u", "u_drj", "mode", "d"]
            + idx("du", n) + idx("du_hat", n) + idx("edu", n) + ["edu_norm"]
            + ["d_hat", "e_d", "eta", "phi_drj", "f_drj", "d_hat_dot_star", "d_hat_dot",
               "e_dhatdot_cf", "u_tilde_adp", "lyap_V", "beta_adp",
               "f_x", "f_r", "f_V", "f_W", "decomp_resid", "error_dyn_resid"])


class RunLog:
    """Column store of uniformly sampled signals.

    ``meta`` carries scenario information (name, step, rejection mode,
    substitutions) that is written to the CSV header.
    """

    def __init__(self, columns, meta=None):
        self.columns = {k: np.asarray(v, dtype=float) for k, v in columns.items()}
        lengths = {v.shape[0] for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("all columns must have equal length")
        self.meta = dict(meta or {})

    def __getitem__(self, name):
        return self.columns[name]

    def __contains__(self, name):
        return name in self.columns

    def __len__(self):
        return len(self.columns["t"])

    @property
    def t(self):
        return self.columns["t"]

    @property
    def names(self):
        return list(self.columns)

    def stack(self, prefix, k):
        """Vector signal ``prefix1..prefixk`` as an (N, k) array."""
        if k == 0:
            return np.zeros((len(self), 0))
        return np.column_stack([self.columns[f"{prefix}{i + 1}"] for i in range(k)])

    def equals(self, other):
        return (self.names == other.names
                and all(np.array_equal(self[c], other[c], equal_nan=True) for c in self.names))

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write(f"# schema: {SCHEMA_VERSION}\n")
            fh.write(f"# meta: {json.dumps(self.meta, sort_keys=True)}\n")
            w = csv.writer(fh)
            w.writerow(self.names)
            data = np.column_stack([self.columns[c] for c in self.names])
            for row in data:
                w.writerow([format(v, ".17g") for v in row])
        return path

    @classmethod
    def from_csv(cls, path):
        text = Path(path).read_text()
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# schema:"):
            raise SchemaMismatch(f"{path}: missing schema header")
        version = lines[0].split(":", 1)[1].strip()
        if version != SCHEMA_VERSION:
            raise SchemaMismatch(f"{path}: schema {version!r}, expected {SCHEMA_VERSION!r}")
        meta = {}
        body_start = 1
        if len(lines) > 1 and lines[1].startswith("# meta:"):
            meta = json.loads(lines[1].split(":", 1)[1])
            body_start = 2
        reader = csv.reader(io.StringIO("\n".join(lines[body_start:])))
        header = next(reader)
        rows = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
        rows = rows.reshape(-1, len(header))
        return cls({h: rows[:, i] for i, h in enumerate(header)}, meta)


def write_report(path, entries, header_lines=()):
    """Key-value text report: one ``key = value`` per line, ``#`` comments."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# schema: {SCHEMA_VERSION}-report\n")
        for line in header_lines:
            fh.write(f"# {line}\n")
        for k, v in entries.items():
            if isinstance(v, float):
                v = format(v, ".17g")
            fh.write(f"{k} = {v}\n")
    return path


def read_report(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        k, _, v = line.partition("=")
        v = v.strip()
        try:
            out[k.strip()] = float(v)
        except ValueError:
            out[k.strip()] = v
    return out
