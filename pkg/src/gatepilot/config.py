"""Run configuration: one YAML document wiring every module's knobs.

A config file is a mapping of named sections (camera, color, detector,
drag, ekf, race, track, noise, corpus) plus top-level seed and out keys.
Every key has a default, so the empty document is a valid config and any
file only needs the keys it changes.

Validation is collected rather than fail-fast: resolve_config gathers
every violated invariant across every section and reports them all in a
single ConfigError. The fully resolved document (defaults applied) is
kept on the RunConfig so commands can echo the exact configuration they
ran with.
"""

import copy
import math
import os
from dataclasses import dataclass

import numpy as np
import yaml

from .camera import CameraModel
from .detect import DetectorParams
from .ekf import DragParams, default_p0, default_q, default_r
from .errors import ConfigError
from .imaging import ColorBounds
from .racesim import RaceConfig, SimNoise, TrackSpec, build_snake_track

_DEFAULTS = {
    "seed": 0,
    "out": "out",
    "camera": {
        "f_x": 150.0, "f_y": 150.0, "c_x": 175.0, "c_y": 80.0,
        "width": 350, "height": 160, "k_fish": 0.0,
    },
    "color": {
        "space": "ycbcr", "lo": [40, 0, 160], "hi": [235, 100, 255],
    },
    "detector": {
        "sigma_l": 25.0, "sigma_cf": 0.5, "max_samples": 512,
        "refine_patch_frac": 0.2, "merge_radius_frac": 0.1,
    },
    "drag": {"k_x": -0.57, "k_y": -1.0, "k_z": -1.0},
    "ekf": {
        "q_diag": None,        # None -> module defaults
        "r_diag": None,
        "p0_diag": None,
    },
    "race": {
        "dt_dyn": 0.001, "dt_ekf": 0.01, "dt_cam": 0.05, "tau_att": 0.1,
        "k_p": 0.6, "k_d": 0.4, "theta_0_deg": -5.0, "k_alt": 2.0,
        "k_vz": 3.0, "switch_dist": 1.2, "delay_dist": 0.5, "debounce": 3,
        "residual_tol": 0.3, "drone_radius": 0.15, "arena_margin": 10.0,
        "t_max": 60.0,
    },
    "track": {
        "n_gates": 5, "approach": 4.0, "radius": 1.5, "gate_size": 1.0,
        "bar_width": 0.1, "altitude": -1.5, "delay_dist": 0.5,
        "pattern": "alternate",
    },
    "noise": {
        "accel_sigma": 0.15, "gyro_sigma": 0.01, "att_sigma": 0.004,
        "accel_bias": [0.08, -0.06, 0.04], "render_sigma": 4.0,
        "exposure_range": [0.9, 1.1],
    },
    "corpus": {
        "n_images": 600, "distance_range": [1.0, 5.5],
        "gate_free_frac": 1.0 / 6.0, "clutter_count": 10,
        "clutter_target_prob": 0.25, "clutter_size_range": [4, 20],
        "noise_sigma": 6.0, "exposure_range": [0.85, 1.35],
    },
}


@dataclass
class RunConfig:
    """Everything a command needs, already validated and constructed."""

    seed: int
    out: str
    camera: CameraModel
    bounds: ColorBounds
    detector: DetectorParams
    drag: DragParams
    q_diag: np.ndarray
    r_diag: np.ndarray
    p0_diag: np.ndarray
    race: RaceConfig
    track: TrackSpec
    noise: SimNoise
    corpus: dict
    resolved: dict

    def q_matrix(self):
        return np.diag(self.q_diag)

    def r_matrix(self):
        return np.diag(self.r_diag)

    def p0_matrix(self):
        return np.diag(self.p0_diag)


def _merge(doc, errs):
    """Overlay doc onto the defaults, flagging unknown keys."""
    resolved = copy.deepcopy(_DEFAULTS)
    if not isinstance(doc, dict):
        errs.append("top level must be a mapping of sections")
        return resolved
    for key, val in doc.items():
        if key not in _DEFAULTS:
            errs.append(f"unknown section or key {key!r}")
            continue
        base = _DEFAULTS[key]
        if isinstance(base, dict):
            if not isinstance(val, dict):
                errs.append(f"{key}: must be a mapping")
                continue
            for k2, v2 in val.items():
                if k2 not in base:
                    errs.append(f"{key}: unknown key {k2!r}")
                else:
                    resolved[key][k2] = v2
        else:
            resolved[key] = val
    return resolved


def _diag(section, key, raw, default, size, errs):
    if raw is None:
        return default
    arr = np.asarray(raw, dtype=float).ravel()
    if arr.shape != (size,):
        errs.append(f"{section}: {key} needs {size} entries, got {arr.size}")
        return default
    if not (arr >= 0).all():
        errs.append(f"{section}: {key} entries must be >= 0")
        return default
    return arr


def resolve_config(doc):
    """Build a RunConfig from a parsed document; raise ConfigError listing
    every violation when anything is invalid."""
    errs = []
    r = _merge(doc or {}, errs)

    seed = r["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        errs.append(f"seed must be a non-negative integer: {seed!r}")
        seed = 0
    out = r["out"]
    if not isinstance(out, str) or not out:
        errs.append(f"out must be a non-empty path string: {out!r}")
        out = "out"

    def build(section, ctor, kwargs):
        try:
            return ctor(**kwargs)
        except (ValueError, TypeError) as e:
            errs.append(f"{section}: {e}")
            return None

    camera = build("camera", CameraModel, r["camera"])
    bounds = build("color", ColorBounds, {
        "lo": r["color"]["lo"], "hi": r["color"]["hi"],
        "space": r["color"]["space"]})
    det = r["detector"]
    detector = build("detector", DetectorParams, {
        "sigma_L": det["sigma_l"], "sigma_cf": det["sigma_cf"],
        "max_samples": det["max_samples"],
        "refine_patch_frac": det["refine_patch_frac"],
        "merge_radius_frac": det["merge_radius_frac"]})
    drag = build("drag", DragParams, r["drag"])

    q_diag = _diag("ekf", "q_diag", r["ekf"]["q_diag"],
                   np.diag(default_q()), 7, errs)
    r_diag = _diag("ekf", "r_diag", r["ekf"]["r_diag"],
                   np.diag(default_r()), 3, errs)
    p0_diag = _diag("ekf", "p0_diag", r["ekf"]["p0_diag"],
                    np.diag(default_p0()), 7, errs)

    rc = dict(r["race"])
    theta_deg = rc.pop("theta_0_deg")
    race = build("race", RaceConfig,
                 {**rc, "theta_0": math.radians(theta_deg)})
    if race is not None:
        if not 0 < race.dt_dyn <= race.dt_ekf <= race.dt_cam:
            errs.append("race: need 0 < dt_dyn <= dt_ekf <= dt_cam")
        if race.t_max <= 0:
            errs.append(f"race: t_max must be positive: {race.t_max}")
        if race.debounce < 0:
            errs.append(f"race: debounce must be >= 0: {race.debounce}")

    noise = build("noise", SimNoise, {
        **{k: v for k, v in r["noise"].items()
           if k not in ("accel_bias", "exposure_range")},
        "accel_bias": tuple(r["noise"]["accel_bias"]),
        "exposure_range": tuple(r["noise"]["exposure_range"])})

    track = None
    if camera is not None and bounds is not None and detector is not None:
        track = build("track", build_snake_track, {
            **r["track"], "camera": camera, "bounds": bounds,
            "detector": detector})

    corpus = dict(r["corpus"])
    if corpus["n_images"] < 0:
        errs.append(f"corpus: n_images must be >= 0: {corpus['n_images']}")
    if not 0.0 <= corpus["gate_free_frac"] <= 1.0:
        errs.append("corpus: gate_free_frac must be in [0, 1]")
    if corpus["clutter_count"] < 0:
        errs.append("corpus: clutter_count must be >= 0")
    if corpus["noise_sigma"] < 0:
        errs.append("corpus: noise_sigma must be >= 0")
    for key in ("distance_range", "clutter_size_range", "exposure_range"):
        pair = corpus[key]
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            errs.append(f"corpus: {key} must be a [lo, hi] pair")
        elif not (0 < pair[0] <= pair[1]):
            errs.append(f"corpus: bad {key} ({pair[0]}, {pair[1]})")

    if errs:
        raise ConfigError("invalid configuration:\n  - "
                          + "\n  - ".join(errs))
    return RunConfig(seed=seed, out=out, camera=camera, bounds=bounds,
                     detector=detector, drag=drag, q_diag=q_diag,
                     r_diag=r_diag, p0_diag=p0_diag, race=race,
                     track=track, noise=noise, corpus=corpus, resolved=r)


def load_config(path=None, overrides=None):
    """Read a YAML config file (or start empty) and resolve it.

    overrides is a shallow {key: value} mapping applied on top of the
    document before resolution, used for command-line --seed/--out; the
    echoed config reflects them.
    """
    if path is None:
        doc = {}
    else:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            try:
                doc = yaml.safe_load(fh)
            except yaml.YAMLError as e:
                raise ConfigError(f"{path}: not valid YAML: {e}")
        if doc is None:
            doc = {}
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    if overrides:
        doc = {**doc, **{k: v for k, v in overrides.items()
                         if v is not None}}
    return resolve_config(doc)


def echo_config(cfg, out_dir):
    """Write the resolved document the run actually used."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "config_used.yaml")
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.resolved, fh, sort_keys=True,
                       default_flow_style=False)
    return path
