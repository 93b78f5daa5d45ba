"""JSON structure configuration for the command-line tools."""

from __future__ import annotations

import json
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from .drude import DrudeParams, permittivity
from .errors import ConfigError
from .layered import LayeredSphere
from .nanoshell import ConcentricStructure
from .sphere import SphereScene

UNIT_SCALE = {"m": 1.0, "um": 1e-6, "nm": 1e-9}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DrudeSpec(_Strict):
    eps0: float
    omega_p: float
    tau: float = 0.0

    def params(self) -> DrudeParams:
        return DrudeParams(self.eps0, self.omega_p, self.tau)


class MaterialSpec(_Strict):
    """Either a fixed permittivity (real, or ``[re, im]``) or a Drude model."""

    eps: Optional[Union[float, tuple[float, float]]] = None
    drude: Optional[DrudeSpec] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.eps is None) == (self.drude is None):
            raise ValueError("material needs exactly one of 'eps' or 'drude'")
        return self

    def at(self, omega: Optional[float]) -> complex:
        if self.drude is not None:
            if omega is None:
                raise ValueError("a Drude material needs a drive frequency")
            return permittivity(self.drude.params(), omega)
        if isinstance(self.eps, tuple):
            return complex(*self.eps)
        return complex(self.eps)


class GeometrySpec(_Strict):
    radii: list[float]
    units: Literal["m", "um", "nm"] = "m"

    @property
    def radii_m(self) -> list[float]:
        return [r * UNIT_SCALE[self.units] for r in self.radii]


class MaterialsSpec(_Strict):
    host: Optional[MaterialSpec] = None
    particle: Optional[MaterialSpec] = None
    core: Optional[MaterialSpec] = None
    shell: Optional[MaterialSpec] = None
    regions: Optional[list[MaterialSpec]] = None


class DriveSpec(_Strict):
    e0: tuple[float, float, float] = (0.0, 0.0, 1.0)
    omega: Optional[Union[float, Literal["resonance"]]] = None
    omega_grid: Optional[list[float]] = None
    tau_grid: Optional[list[float]] = None
    r_grid: Optional[list[float]] = None
    speed: float = 299_792_458.0
    mode_index: Optional[int] = None


class HeatSpec(_Strict):
    sigma_matrix: float
    sigma_np: float
    q: Optional[float] = None


class StructureConfig(_Strict):
    kind: Literal["sphere", "nanoshell", "layered"]
    geometry: GeometrySpec
    materials: MaterialsSpec = MaterialsSpec()
    drive: DriveSpec = DriveSpec()
    heat: Optional[HeatSpec] = None

    @model_validator(mode="after")
    def _kind_layout(self):
        m, n = self.materials, len(self.geometry.radii)
        allowed = {
            "sphere": {"host", "particle"},
            "nanoshell": {"core", "shell"},
            "layered": {"regions"},
        }[self.kind]
        extra = {k for k, v in m if v is not None} - allowed
        if extra:
            raise ValueError(f"materials {sorted(extra)} not valid for kind '{self.kind}'")
        if self.kind == "sphere":
            if n != 1:
                raise ValueError("a sphere takes exactly one radius")
            if m.host is None or m.particle is None:
                raise ValueError("a sphere needs materials.host and materials.particle")
            if m.host.drude is not None:
                raise ValueError("the sphere host must have a fixed permittivity")
        elif self.kind == "nanoshell":
            if n != 4:
                raise ValueError("a nanoshell takes exactly four radii")
            if m.core is not None and m.core.drude is not None:
                raise ValueError("the nanoshell core must have a fixed permittivity")
        else:
            if m.regions is not None and len(m.regions) != n + 1:
                raise ValueError(f"{n} radii need {n + 1} region materials")
        return self


def _error_location(text: str, exc: json.JSONDecodeError) -> str:
    return f"line {exc.lineno}, column {exc.colno}: {exc.msg}"


def parse_config(text: str, source: str = "<config>") -> StructureConfig:
    """Parse and validate a JSON configuration document.

    Raises ConfigError with a line (for JSON syntax) or field path
    (for schema violations) in the message.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: {_error_location(text, exc)}") from exc
    try:
        return StructureConfig.model_validate(raw)
    except ValidationError as exc:
        parts = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "<root>"
            parts.append(f"{loc}: {err['msg']}")
        raise ConfigError(f"{source}: " + "; ".join(parts)) from exc


def load_config(path: str) -> StructureConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return parse_config(text, source=path)


def dump_config(cfg: StructureConfig) -> str:
    return json.dumps(cfg.model_dump(mode="json", exclude_none=True), sort_keys=True, indent=2)


def drive_omega(cfg: StructureConfig) -> Optional[float]:
    omega = cfg.drive.omega
    if omega == "resonance":
        drude = cfg.materials.particle.drude if cfg.kind == "sphere" else None
        if drude is None:
            raise ConfigError("drive.omega = 'resonance' needs a Drude sphere particle")
        return drude.omega_p / 3**0.5
    return omega


def build_scene(cfg: StructureConfig):
    """Construct the runtime scene described by ``cfg``."""
    radii = cfg.geometry.radii_m
    m = cfg.materials
    try:
        if cfg.kind == "sphere":
            omega = drive_omega(cfg)
            return SphereScene(
                r_np=radii[0],
                eps_matrix=m.host.at(omega),
                eps_particle=m.particle.at(omega),
                e0=cfg.drive.e0,
            )
        if cfg.kind == "nanoshell":
            core = m.core.at(None) if m.core is not None else 1.0
            shell = None
            if m.shell is not None and (m.shell.eps is not None or cfg.drive.omega is not None):
                shell = m.shell.at(drive_omega(cfg))
            return ConcentricStructure(tuple(radii), core, shell)
        if m.regions is None:
            raise ConfigError("materials.regions is required to build a layered scene")
        omega = drive_omega(cfg)
        return LayeredSphere(tuple(radii), tuple(r.at(omega) for r in m.regions))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
