"""Experiment configuration: schema-validated JSON with provenance hashing.

Unknown keys are rejected everywhere so a typo cannot silently disable an
option, and a frozen canonical copy of the config is embedded in every
output file for provenance.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .curve import Curve, load_curve
from .errors import ConfigError
from .oscquad import CutoffSpec

_TOP_KEYS = {"curve", "seed", "out_dir", "workers", "gq", "envelope",
             "witness", "fit"}
_GQ_KEYS = {"q", "r_exponents", "r_values", "cutoff", "grid", "tol",
            "check_resolution_at"}
_CUTOFF_KEYS = {"center", "half_width", "family"}
_ENV_KEYS = {"r_values", "order", "cutoff"}
_WIT_KEYS = {"mode", "k", "t0", "epsilon", "delta", "r_values", "n", "j",
             "verify", "cutoff_half_width_fraction", "tau1", "tau2"}
_FIT_KEYS = {"force_beta"}
_GRID_CHOICES = {"auto", "product", "polar", "mc"}


def _check_keys(doc: dict, allowed: set, where: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _cutoff_from(doc: dict | None, default: CutoffSpec) -> CutoffSpec:
    if doc is None:
        return default
    _check_keys(doc, _CUTOFF_KEYS, "cutoff")
    return CutoffSpec(center=float(doc.get("center", default.center)),
                      half_width=float(doc.get("half_width", default.half_width)),
                      family=str(doc.get("family", default.family)))


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    path: Path | None
    curve_path: Path
    seed: int = 0
    workers: int = 1
    out_dir: str | None = None

    @property
    def canonical(self) -> str:
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))

    @property
    def config_hash(self) -> str:
        return "sha256:" + hashlib.sha256(self.canonical.encode()).hexdigest()[:16]

    def load_curve(self) -> Curve:
        return load_curve(self.curve_path)

    def default_cutoff(self, curve: Curve) -> CutoffSpec:
        lo, hi = curve.interval
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return CutoffSpec(center=mid, half_width=0.9 * half, family="bump")

    def section(self, name: str) -> dict:
        doc = self.raw.get(name)
        if doc is None:
            raise ConfigError(f"config has no [{name}] section")
        return doc

    def gq_params(self, curve: Curve) -> dict:
        doc = self.section("gq")
        _check_keys(doc, _GQ_KEYS, "gq")
        if "r_values" in doc:
            r_values = [float(r) for r in doc["r_values"]]
        else:
            lo, hi = doc.get("r_exponents", [4, 12])
            r_values = [float(2 ** j) for j in range(int(lo), int(hi) + 1)]
        qs = [float(q) for q in doc.get("q", [2.0])]
        grid = str(doc.get("grid", "auto"))
        if grid not in _GRID_CHOICES:
            raise ConfigError(f"grid must be one of {sorted(_GRID_CHOICES)}")
        return {
            "qs": qs, "r_values": r_values, "grid": grid,
            "cutoff": _cutoff_from(doc.get("cutoff"), self.default_cutoff(curve)),
            "tol": doc.get("tol"),
            "check_resolution_at": doc.get("check_resolution_at"),
        }

    def envelope_params(self, curve: Curve) -> dict:
        doc = self.section("envelope")
        _check_keys(doc, _ENV_KEYS, "envelope")
        return {
            "r_values": [float(r) for r in doc.get("r_values", [64, 256, 1024])],
            "order": int(doc.get("order", curve.dim)),
            "cutoff": _cutoff_from(doc.get("cutoff"), self.default_cutoff(curve)),
        }

    def witness_params(self) -> dict:
        doc = self.section("witness")
        _check_keys(doc, _WIT_KEYS, "witness")
        mode = str(doc.get("mode", "cap"))
        if mode not in ("cap", "dyadic"):
            raise ConfigError("witness mode must be 'cap' or 'dyadic'")
        r_values = [float(r) for r in doc.get("r_values", [1e3, 1e4, 1e5, 1e6])]
        n = doc.get("n", 200_000)
        ns = [int(v) for v in n] if isinstance(n, list) else [int(n)] * len(r_values)
        if len(ns) != len(r_values):
            raise ConfigError("witness n list must match r_values")
        return {
            "mode": mode,
            "k": int(doc.get("k", 3)),
            "t0": float(doc.get("t0", 0.0)),
            "radius": float(doc.get("epsilon", doc.get("delta", 0.05))),
            "r_values": r_values,
            "ns": ns,
            "j": [int(v) for v in doc.get("j", [])],
            "verify": bool(doc.get("verify", True)),
            "half_width_fraction": float(doc.get("cutoff_half_width_fraction", 0.05)),
            "tau1": doc.get("tau1"),
            "tau2": doc.get("tau2"),
        }

    def fit_params(self) -> dict:
        doc = self.raw.get("fit", {})
        _check_keys(doc, _FIT_KEYS, "fit")
        fb = doc.get("force_beta")
        return {"force_beta": None if fb is None else float(fb)}


def load_config(path, seed_override=None, workers_override=None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    if "curve" not in raw:
        raise ConfigError("config needs a 'curve' path")
    curve_path = Path(raw["curve"])
    if not curve_path.is_absolute():
        curve_path = path.parent / curve_path
    if not curve_path.exists():
        raise ConfigError(f"curve file not found: {curve_path}")
    seed = int(raw.get("seed", 0)) if seed_override is None else int(seed_override)
    workers = int(raw.get("workers", 1)) if workers_override is None \
        else int(workers_override)
    return ExperimentConfig(raw=raw, path=path, curve_path=curve_path,
                            seed=seed, workers=workers,
                            out_dir=raw.get("out_dir"))


def resolve_out_dir(cli_out: str | None, cfg: ExperimentConfig | None) -> Path:
    if cli_out:
        out = Path(cli_out)
    elif cfg is not None and cfg.out_dir:
        out = Path(cfg.out_dir)
    elif os.environ.get("CURVEDECAY_OUT"):
        out = Path(os.environ["CURVEDECAY_OUT"])
    else:
        out = Path("curvedecay_out")
    out.mkdir(parents=True, exist_ok=True)
    return out
