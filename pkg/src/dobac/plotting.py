"""Static figure files from one or more run logs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError, SchemaMismatch  # noqa: E402


def _label(log, i):
    m = log.meta
    mode = m.get("rejection_mode", f"run{i}")
    if mode == "integrating":
        return f"integrating, k_eta={m.get('k_eta')}"
    return {"direct": "direct", "off": "no rejection"}.get(mode, mode)


def _tracking(ax, logs):
    for i, log in enumerate(logs):
        ax.plot(log.t, log["x1"], label=f"x1 ({_label(log, i)})")
    ax.plot(logs[0].t, logs[0]["xr1"], "k--", label="x1r")
    ax.set_ylabel("x1")


def _error(ax, logs):
    for i, log in enumerate(logs):
        ax.plot(log.t, log["e_norm"], label=_label(log, i))
    ax.set_ylabel("||e||")


def _udrj(ax, logs):
    for i, log in enumerate(logs):
        ax.plot(log.t, log["u_drj"], label=f"u_drj ({_label(log, i)})")
        ax.plot(log.t, -log["d_hat"], "--", label=f"-d_hat ({_label(log, i)})")
    u_bar = logs[0].meta.get("u_bar")
    if u_bar:
        for s in (1, -1):
            ax.axhline(s * u_bar, color="k", lw=0.8, ls=":")
    ax.set_ylabel("u_drj")


def _disturbance(ax, logs):
    ax.plot(logs[0].t, logs[0]["d"], "k--", label="d")
    for i, log in enumerate(logs):
        ax.plot(log.t, log["d_hat"], label=f"d_hat ({_label(log, i)})")
    ax.set_ylabel("d")


def _eta(ax, logs):
    for i, log in enumerate(logs):
        ax.plot(log.t, log["eta"], label=_label(log, i))
    ax.set_ylabel("eta")


def _lumped(ax, logs):
    n = int(logs[0].meta.get("n", 2))
    for i, log in enumerate(logs):
        ax.plot(log.t, log[f"du{n}"], label=f"d_u{n} ({_label(log, i)})")
    ax.set_ylabel("d_u")


PLOTS = {"tracking": _tracking, "error": _error, "udrj": _udrj,
         "disturbance": _disturbance, "eta": _eta, "lumped": _lumped}


def plot(logs, spec, out):
    """Draw ``spec`` for ``logs`` into ``out`` (format from the suffix, SVG by default)."""
    if spec not in PLOTS:
        raise ConfigError(f"unknown plot spec {spec!r}; known: {sorted(PLOTS)}")
    if not logs:
        raise ConfigError("no logs to plot")
    cols = set(logs[0].names)
    for log in logs[1:]:
        if set(log.names) != cols:
            raise SchemaMismatch("logs do not share a column layout")
    out = Path(out)
    if not out.suffix:
        out = out.with_suffix(".svg")
    fig, ax = plt.subplots(figsize=(7, 3.5))
    PLOTS[spec](ax, logs)
    ax.set_xlabel("t [s]")
    ax.grid(True, lw=0.3)
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out
