"""JSON run-configuration parsing for the command-line interface.

A config document carries a model parameter block, a hatch-response
block, optional grid / simulation / initial-condition blocks and an
output directory.  Everything user-facing is validated here and surfaced
as ConfigError so the CLI can distinguish bad input (exit 2) from
numerical failure (exit 3).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .equilibria import calibrate_c
from .hatch import HatchFunction, hatch_from_dict
from .params import ReducedParams, StageParams, ThreeStageParams
from .sweep import ArctanGrid, HillGrid, J_DEFAULT, SimSettings

__all__ = ["ConfigError", "RunConfig", "load_config"]


class ConfigError(ValueError):
    pass


def _require(doc: dict, key: str, context: str):
    if key not in doc:
        raise ConfigError(f"{context} is missing required field {key!r}")
    return doc[key]


def _floats(doc: dict, keys: tuple[str, ...], context: str) -> dict[str, float]:
    out = {}
    for key in keys:
        try:
            out[key] = float(_require(doc, key, context))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{context} field {key!r} must be a number") from exc
    return out


def parse_hatch(doc: dict) -> HatchFunction:
    try:
        return hatch_from_dict(doc)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_model(doc: dict, hatch: HatchFunction | None = None,
                L_bar: float | None = None):
    """Build a parameter object from the model block.

    A reduced model may omit "c" when a hatch response and L_bar are
    available; competition is then calibrated to pin the steady state.
    """
    kind = _require(doc, "kind", "model block")
    try:
        if kind == "reduced":
            vals = _floats(doc, ("b_E", "d_E", "d_L"), "reduced model")
            if "c" in doc:
                c = float(doc["c"])
            elif hatch is not None and L_bar is not None:
                c = calibrate_c(vals["b_E"], vals["d_E"], vals["d_L"], hatch, L_bar)
            else:
                raise ConfigError(
                    "reduced model needs either 'c' or a hatch block plus 'L_bar' "
                    "to calibrate it"
                )
            return ReducedParams(b_E=vals["b_E"], d_E=vals["d_E"],
                                 d_L=vals["d_L"], c=c)
        if kind == "three_stage":
            vals = _floats(doc, ("beta_E", "delta_E", "delta_L", "delta_A",
                                 "tau_L", "c"), "three-stage model")
            tau_LA = float(doc.get("tau_LA", vals["tau_L"]))
            return ThreeStageParams(tau_LA=tau_LA, **vals)
        if kind == "four_stage":
            vals = _floats(doc, ("beta_E", "delta_E", "delta_L", "delta_P",
                                 "delta_A", "tau_L", "tau_P", "c"),
                           "four-stage model")
            return StageParams(**vals)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid model parameters: {exc}") from exc
    raise ConfigError(
        f"unknown model kind {kind!r} (expected reduced, three_stage or four_stage)"
    )


def parse_sim(doc: dict | None) -> SimSettings:
    if doc is None:
        return SimSettings()
    try:
        t_span = doc.get("t_span")
        if t_span is not None:
            t_span = (float(t_span[0]), float(t_span[1]))
        return SimSettings(
            rtol=float(doc.get("rtol", 1e-8)),
            atol=float(doc.get("atol", 1e-10)),
            t_span=t_span,
            transient_fraction=float(doc.get("transient_fraction", 0.5)),
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"invalid sim block: {exc}") from exc


def parse_grid(doc: dict) -> ArctanGrid | HillGrid:
    kind = _require(doc, "kind", "grid block")
    try:
        if kind == "arctan":
            i_range = doc.get("i_range", list(range(1, 10)))
            if len(i_range) == 2 and i_range != sorted(set(i_range)):
                raise ConfigError("i_range must be a list of distinct indices")
            return ArctanGrid(
                i_range=tuple(int(i) for i in i_range),
                j_set=tuple(float(j) for j in doc.get("j_set", J_DEFAULT)),
            )
        if kind == "hill":
            return HillGrid(
                p=float(_require(doc, "p", "hill grid")),
                k=float(_require(doc, "k", "hill grid")),
                iota_set=tuple(float(v) for v in _require(doc, "iota_set", "hill grid")),
                zeta_set=tuple(float(v) for v in _require(doc, "zeta_set", "hill grid")),
                dimension=int(doc.get("dimension", 2)),
            )
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid grid block: {exc}") from exc
    raise ConfigError(f"unknown grid kind {kind!r} (expected arctan or hill)")


@dataclass(frozen=True)
class RunConfig:
    doc: dict
    path: Path

    @property
    def out_dir(self) -> Path:
        return Path(self.doc.get("out_dir", "out"))

    def hatch(self) -> HatchFunction:
        return parse_hatch(_require(self.doc, "hatch", "config"))

    def L_bar(self, required: bool = True) -> float | None:
        if "L_bar" not in self.doc:
            if required:
                raise ConfigError("config is missing required field 'L_bar'")
            return None
        value = float(self.doc["L_bar"])
        if value <= 0.0:
            raise ConfigError("'L_bar' must be positive")
        return value

    def model(self, hatch: HatchFunction | None = None,
              L_bar: float | None = None):
        return parse_model(_require(self.doc, "model", "config"), hatch, L_bar)

    def sim(self) -> SimSettings:
        return parse_sim(self.doc.get("sim"))

    def grid(self) -> ArctanGrid | HillGrid:
        return parse_grid(_require(self.doc, "grid", "config"))


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return RunConfig(doc=doc, path=p)
