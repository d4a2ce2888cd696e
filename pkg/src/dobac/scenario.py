"""Scenario presets, YAML loading and ``--set`` style overrides.

A scenario is described by a nested mapping (see ``PRESETS`` for the full
key set). Loading merges, in order: an optional ``preset`` named in the
file, the file itself, then dotted ``key=value`` overrides.
"""
from __future__ import annotations

import copy
from pathlib import Path

import numpy as np
import yaml

from .adaptive import AdaptationGains, ProjectionSet, ProjectionSets
from .config import InitialConditions, ScenarioConfig
from .errors import ConfigError, DobacError
from .observer import ObserverConfig
from .plant import Basis, PlantParams, Signal
from .reference import ReferenceConfig
from .rejection import RejectionConfig

# Mass-spring-damper with cubic spring. Coefficient ranges:
# a1, a2, damping in [-0.5, 1.5], Lambda in [1, 1.4].
_MSD_CUBIC_STUDY = {
    "name": "msd-cubic-paper",
    "plant": {"preset": "msd-cubic", "a1": 0.5, "a2": 0.5, "damping": 0.5, "Lambda": 1.2},
    "reference": {
        "A_r": [[0.0, 1.0], [-1.0, -1.0]],
        "Lambda_r": 1.0,
        "V_r": [1.0],
        "r_kind": "feedback-plus-sinusoid",
        "c_r": [1.0, 1.0],
        "excitation": {"amplitudes": [-1.0], "frequencies": [1.0], "phases": [0.0]},
    },
    "adaptation": {
        "Gamma_x": [[1.0, 0.0], [0.0, 1.0]],
        "gamma_r": 1.0,
        "Gamma_V": [[1.0]],
        "Gamma_W": [],
        "P": [[1.5, 0.5], [0.5, 1.0]],
    },
    "projection": {
        "margin": 0.1,
        "offset": -1.0,
        "k_x": {"lo": [-1.5 / 1.4, -1.5 / 1.4], "hi": [0.5, 0.5]},
        "k_r": {"lo": [1.0 / 1.4], "hi": [1.0]},
        "V": {"lo": [-0.5 / 1.4], "hi": [1.5]},
    },
    "observer": {"gain": 50.0},
    "rejection": {"mode": "integrating", "u_bar": 10.0, "f_bar": 5.0, "k_eta": 1.0},
    "disturbance": {"kind": "sinusoid", "amplitude": 5.0, "frequency": 0.5},
    # x_r(0) = [0, 1] makes x_1r = sin t exactly
    "initial": {"x": [0.0, 1.0], "x_r": [0.0, 1.0], "d_u_hat": [0.0, 0.0], "u_drj": 0.0},
    "sim": {"t_end": 50.0, "h": 1e-3, "decimation": 1, "guard": 1e6},
}

PRESETS = {"msd-cubic-paper": _MSD_CUBIC_STUDY}

SUBSTITUTIONS = (
    "observer: first-order extended-state observer, full-state measurement, gain l",
    "initial conditions: x(0) = x_r(0) = [0, 1], adaptive parameters at set centres, d_u_hat(0) = 0",
    "true V = -a2/Lambda so the cubic spring term is -a2 x1^3",
    "guards evaluated once per step, mode frozen across RK4 stages",
)


def msd_cubic_plant(a1, a2, damping, Lambda):
    """Plant x1' = x2, x2' = -a1 x1 - damping x2 - a2 x1^3 + Lambda (u + d).

    In the structured form the cubic term is Lambda V x1^3, so V = -a2 / Lambda.
    """
    return PlantParams(
        A=np.array([[0.0, 1.0], [-a1, -damping]]),
        b=np.array([0.0, 1.0]),
        Lambda=Lambda,
        V=np.array([-a2 / Lambda]),
        W=np.zeros(0),
        basis_V=Basis.parse(["x1^3"], 2),
        basis_W=Basis.zero(2),
        name="msd-cubic",
    )


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for k, v in (override or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def apply_override(cfg, assignment):
    """Apply one ``dotted.key=value`` assignment (value parsed as YAML)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse value in {assignment!r}: {exc}") from None
    return set_key(cfg, key.strip(), value)


def set_key(cfg, key, value):
    cfg = copy.deepcopy(cfg)
    node = cfg
    parts = key.split(".")
    for p in parts[:-1]:
        nxt = node.get(p)
        if nxt is None:
            nxt = node[p] = {}
        elif not isinstance(nxt, dict):
            raise ConfigError(f"cannot set {key!r}: {p!r} is not a section")
        node = nxt
    node[parts[-1]] = value
    return cfg


def get_key(cfg, key):
    node = cfg
    for p in key.split("."):
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"unknown configuration key {key!r}")
        node = node[p]
    return node


def resolve(source=None, overrides=(), preset=None):
    """Merged raw mapping from a preset name, a YAML path or a mapping."""
    raw = {}
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    elif source is not None:
        name = str(source)
        if name in PRESETS:
            raw = {"preset": name}
        else:
            try:
                raw = yaml.safe_load(Path(name).read_text()) or {}
            except OSError as exc:
                raise ConfigError(f"cannot read scenario file {name}: {exc}") from None
            except yaml.YAMLError as exc:
                raise ConfigError(f"{name}: invalid YAML: {exc}") from None
            if not isinstance(raw, dict):
                raise ConfigError(f"{name}: top level must be a mapping")
    preset = preset or raw.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
        raw = deep_merge(PRESETS[preset], raw)
    for ov in overrides:
        raw = apply_override(raw, ov)
    return raw


def load_scenario(source=None, overrides=(), preset=None):
    """Fully validated ScenarioConfig from a preset name, YAML file or mapping."""
    return build(resolve(source, overrides, preset))


# -- mapping -> dataclasses -------------------------------------------------

def _req(d, key, section):
    if not isinstance(d, dict) or key not in d or d[key] is None:
        raise ConfigError(f"{section}.{key} is required")
    return d[key]


def _arr(v, what):
    try:
        a = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be numeric") from None
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{what} must be finite")
    return a


def _signal(d, section):
    if d is None:
        return Signal.zero()
    if not isinstance(d, dict):
        raise ConfigError(f"{section} must be a mapping")
    kind = d.get("kind", "sum-of-sinusoids")
    if kind == "zero":
        return Signal.zero()
    if kind == "constant":
        return Signal.constant(float(_req(d, "value", section)))
    if kind == "sinusoid":
        return Signal.sinusoid(float(_req(d, "amplitude", section)),
                               float(_req(d, "frequency", section)),
                               float(d.get("phase", 0.0)), float(d.get("offset", 0.0)))
    if kind == "sum-of-sinusoids":
        return Signal(tuple(d.get("amplitudes", ())), tuple(d.get("frequencies", ())),
                      tuple(d.get("phases", ())), float(d.get("offset", 0.0)))
    raise ConfigError(f"{section}.kind {kind!r} unknown")


def _plant(d):
    if not isinstance(d, dict):
        raise ConfigError("plant section is required")
    if d.get("preset") == "msd-cubic":
        return msd_cubic_plant(*(float(_req(d, k, "plant")) for k in ("a1", "a2", "damping", "Lambda")))
    if d.get("preset") is not None:
        raise ConfigError(f"unknown plant preset {d['preset']!r}")
    b = _arr(_req(d, "b", "plant"), "plant.b").reshape(-1)
    n = b.size
    basis_V = Basis.parse(d.get("basis_V"), n)
    basis_W = Basis.parse(d.get("basis_W"), n)
    return PlantParams(_arr(_req(d, "A", "plant"), "plant.A"), b, float(_req(d, "Lambda", "plant")),
                       _arr(d.get("V", []), "plant.V"), _arr(d.get("W", []), "plant.W"),
                       basis_V, basis_W)


def _square(v, m, what):
    a = _arr(v if v is not None else [], what)
    if m == 0:
        return np.zeros((0, 0))
    return np.atleast_2d(a).reshape(m, m) if a.size == m * m else np.atleast_2d(a)


def _sets(d, n, m_V, m_W):
    if not isinstance(d, dict):
        raise ConfigError("projection section is required")
    margin = float(d.get("margin", 0.1))
    offset = float(d.get("offset", -1.0))

    def one(key, m):
        if m == 0:
            return None
        sd = _req(d, key, "projection")
        lo = _arr(_req(sd, "lo", f"projection.{key}"), f"projection.{key}.lo").reshape(-1)
        hi = _arr(_req(sd, "hi", f"projection.{key}"), f"projection.{key}.hi").reshape(-1)
        if lo.size != m or hi.size != m:
            raise ConfigError(f"projection.{key} bounds must have length {m}")
        return ProjectionSet.from_interval(lo, hi, float(sd.get("margin", margin)), offset)

    return ProjectionSets(one("k_x", n), one("k_r", 1), one("V", m_V), one("W", m_W))


def build(raw):
    """Construct and validate a ScenarioConfig from a merged mapping."""
    try:
        plant = _plant(raw.get("plant"))
        n, m_V, m_W = plant.n, plant.basis_V.size, plant.basis_W.size
        rd = raw.get("reference") or {}
        ref = ReferenceConfig(
            A_r=_arr(_req(rd, "A_r", "reference"), "reference.A_r"),
            b=plant.b,
            Lambda_r=float(_req(rd, "Lambda_r", "reference")),
            V_r=_arr(rd.get("V_r", [0.0] * m_V), "reference.V_r"),
            c_r=_arr(rd.get("c_r", [0.0] * n), "reference.c_r"),
            excitation=_signal(rd.get("excitation"), "reference.excitation"),
            r_kind=rd.get("r_kind", "feedback-plus-sinusoid"),
        )
        ad = raw.get("adaptation") or {}
        gains = AdaptationGains(
            Gamma_x=_square(_req(ad, "Gamma_x", "adaptation"), n, "adaptation.Gamma_x"),
            gamma_r=float(_req(ad, "gamma_r", "adaptation")),
            Gamma_V=_square(ad.get("Gamma_V"), m_V, "adaptation.Gamma_V"),
            Gamma_W=_square(ad.get("Gamma_W"), m_W, "adaptation.Gamma_W"),
            P=_square(_req(ad, "P", "adaptation"), n, "adaptation.P"),
        )
        sets = _sets(raw.get("projection"), n, m_V, m_W)
        od = raw.get("observer") or {}
        observer = ObserverConfig(gain=float(_req(od, "gain", "observer")))
        jd = raw.get("rejection") or {}
        mode = _req(jd, "mode", "rejection")
        if mode is False:  # bare `off` in YAML 1.1
            mode = "off"
        rejection = RejectionConfig(
            mode=mode,
            u_bar=_opt_float(jd, "u_bar", "rejection", mode != "off"),
            f_bar=_opt_float(jd, "f_bar", "rejection", mode == "integrating"),
            k_eta=_opt_float(jd, "k_eta", "rejection", mode == "integrating"),
        )
        disturbance = _signal(raw.get("disturbance"), "disturbance")
        idd = raw.get("initial") or {}
        initial = InitialConditions(**{k: idd.get(k) for k in
                                       ("x", "x_r", "k_x", "k_r", "V", "W", "d_u_hat")},
                                    u_drj=float(idd.get("u_drj", 0.0)))
        sd = raw.get("sim") or {}
        return ScenarioConfig(
            plant, ref, gains, sets, observer, rejection, disturbance, initial,
            t_end=float(sd.get("t_end", 50.0)), h=float(sd.get("h", 1e-3)),
            decimation=int(sd.get("decimation", 1)), guard=float(sd.get("guard", 1e6)),
            name=str(raw.get("name", "custom")),
        )
    except ConfigError:
        raise
    except DobacError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def _opt_float(d, key, section, required):
    if d.get(key) is None:
        if required:
            raise ConfigError(f"{section}.{key} is required when mode is {d.get('mode')!r}")
        return None
    return float(d[key])


def dump(raw):
    return yaml.safe_dump(raw, sort_keys=False)
