"""
Command-line front end.

    plasmod sphere-resonance --config cfg.json --out sweep.csv
    plasmod shell-modes --config cfg.json --format json
    plasmod heat-profile --config cfg.json
    plasmod blowup-scan --config cfg.json

CSV output starts with ``#``-prefixed metadata lines followed by a header and
data rows. Exit codes: 0 success, 2 config error, 3 numerical singularity,
4 theorem-hypothesis violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, heat, layered, nanoshell, sphere
from .config import StructureConfig, build_scene, drive_omega, load_config
from .drude import permittivity
from .errors import (
    ConfigError,
    EigenvalueHit,
    ExactResonanceSingularity,
    HypothesisViolated,
    NoRealFrequency,
    SingularMatrix,
)

SINGULAR_RTOL = 1e-12
EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_HYPOTHESIS = 0, 2, 3, 4


@dataclass
class SweepResult:
    schema: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.schema):
                raise ValueError(f"row {row} does not match schema {self.schema}")


def _threads() -> int:
    raw = os.environ.get("PLASMOD_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"PLASMOD_THREADS must be an integer, got {raw!r}") from None
    return max(n, 1)


def _pmap(fn, items):
    """Ordered parallel map; results follow the order of ``items``."""
    items = list(items)
    workers = min(_threads(), max(len(items), 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _metadata(cfg: StructureConfig, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "tool": "plasmod",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.model_dump(mode="json", exclude_none=True),
    }
    meta.update(extra)
    return meta


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _loglog_slope(x, y) -> list[float]:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size < 2:
        return [math.nan] * x.size
    return list(np.gradient(np.log(y), np.log(x)))


# --- commands ----------------------------------------------------------------


def cmd_sphere_resonance(cfg: StructureConfig) -> SweepResult:
    _require(cfg.kind == "sphere", "sphere-resonance needs kind 'sphere'")
    particle = cfg.materials.particle
    _require(particle.drude is not None, "sphere-resonance needs a Drude particle")
    drude = particle.drude.params()
    eps_host = cfg.materials.host.at(None)
    r_np = cfg.geometry.radii_m[0]
    omegas = sorted(cfg.drive.omega_grid or [])
    taus = sorted(cfg.drive.tau_grid or [drude.tau])

    def point(args):
        omega, tau = args
        eps1 = permittivity(drude.with_tau(tau), omega)
        if abs(2 * eps_host + eps1) <= SINGULAR_RTOL * abs(eps_host):
            return (omega, tau, math.nan, math.nan, "singular")
        scene = sphere.SphereScene(r_np, eps_host, eps1, cfg.drive.e0)
        energy = sphere.sphere_energy(scene)
        return (omega, tau, energy, tau * energy, "")

    rows = _pmap(point, [(w, t) for w in omegas for t in taus])
    wavelength = sphere.resonance_wavelength(drude, cfg.drive.speed)
    return SweepResult(
        schema=["omega", "tau", "energy", "tau_times_energy", "flag"],
        rows=rows,
        metadata=_metadata(
            cfg,
            "sphere-resonance",
            resonance_wavelength=wavelength,
            resonance_omega=drude.omega_p / math.sqrt(3.0),
        ),
    )


def cmd_shell_modes(cfg: StructureConfig) -> SweepResult:
    _require(cfg.kind in ("nanoshell", "layered"), "shell-modes needs kind 'nanoshell' or 'layered'")
    radii = cfg.geometry.radii_m
    m = cfg.materials

    if cfg.kind == "layered":
        host = m.regions[-1].at(None) if m.regions is not None else 1.0
        metal = next((r.drude for r in (m.regions or []) if r.drude is not None), None)
        ratios = layered.mode_count_scan(radii, eps_dielectric=host.real)
        rows = []
        for q in ratios:
            omega = math.nan
            if metal is not None and q * host.real < metal.eps0:
                omega = metal.params().omega_p / math.sqrt(1.0 - q * host.real / metal.eps0)
            rows.append((q, omega))
        return SweepResult(
            schema=["eps_ratio", "omega_if_drude"],
            rows=rows,
            metadata=_metadata(cfg, "shell-modes", n_modes=len(rows)),
        )

    core = m.core.at(None).real if m.core is not None else 1.0
    structure = nanoshell.ConcentricStructure(tuple(radii), core)
    if m.shell is not None and m.shell.drude is not None:
        freqs = nanoshell.mode_frequencies(structure, m.shell.drude.params(), core)
    else:
        freqs = [nanoshell.ModeFrequency(mode, None) for mode in nanoshell.resonance_modes(structure).modes]
    rows = [
        (
            f.mode.lambda1,
            f.mode.eps_ratio,
            f.mode.e_overlap,
            f.mode.upsilon_overlap,
            math.nan if f.omega is None else f.omega,
        )
        for f in freqs
    ]
    return SweepResult(
        schema=["lambda1", "eps_ratio", "e_overlap", "upsilon_overlap", "omega_if_drude"],
        rows=rows,
        metadata=_metadata(cfg, "shell-modes", n_modes=len(rows)),
    )


def cmd_heat_profile(cfg: StructureConfig) -> SweepResult:
    _require(cfg.kind == "sphere", "heat-profile needs kind 'sphere'")
    _require(cfg.heat is not None, "heat-profile needs a 'heat' block")
    unit = cfg.geometry.radii_m[0] / cfg.geometry.radii[0]
    r_np = cfg.geometry.radii_m[0]

    if cfg.heat.q is not None:
        q = cfg.heat.q
    else:
        omega = drive_omega(cfg)
        _require(omega is not None, "heat-profile needs drive.omega or heat.q")
        scene = build_scene(cfg)
        e2 = sphere.sphere_response(scene).e2
        q = heat.heat_intensity(omega, scene.eps_particle, float(np.sum(np.abs(e2) ** 2)))

    hs = heat.HeatScene(cfg.heat.sigma_matrix, cfg.heat.sigma_np, r_np, q)
    profile = heat.steady_profile(hs)
    if cfg.drive.r_grid is not None:
        grid = sorted(cfg.drive.r_grid)
    else:
        r0 = cfg.geometry.radii[0]
        grid = sorted(set(np.linspace(0.0, 3.0 * r0, 301).tolist()) | {r0})
    temps = heat.temperature_at(profile, np.array(grid) * unit)
    rows = [(r, float(t)) for r, t in zip(grid, np.atleast_1d(temps))]
    return SweepResult(
        schema=["r", "T"],
        rows=rows,
        metadata=_metadata(cfg, "heat-profile", Q=q, A=profile.a_coeff, B=profile.b_coeff),
    )


def cmd_blowup_scan(cfg: StructureConfig) -> SweepResult:
    _require(cfg.kind in ("sphere", "nanoshell"), "blowup-scan needs kind 'sphere' or 'nanoshell'")
    _require(bool(cfg.drive.tau_grid), "blowup-scan needs drive.tau_grid")
    taus = sorted(cfg.drive.tau_grid)
    descending = taus[::-1]
    extra = {}

    if cfg.kind == "sphere":
        drude = cfg.materials.particle.drude
        _require(drude is not None, "blowup-scan needs a Drude particle")
        omega = drive_omega(cfg)
        _require(omega is not None, "blowup-scan needs drive.omega")
        pairs = sphere.resonance_blowup_scan(
            drude.params(), omega, cfg.geometry.radii_m[0], cfg.drive.e0, descending
        )
    else:
        m = cfg.materials
        _require(m.shell is not None and m.shell.drude is not None, "blowup-scan needs a Drude shell")
        p = m.shell.drude.params()
        core = m.core.at(None).real if m.core is not None else 1.0
        structure = nanoshell.ConcentricStructure(tuple(cfg.geometry.radii_m), core)
        a0 = sphere.driving_coefficients(cfg.drive.e0)
        if cfg.drive.mode_index is not None:
            freqs = nanoshell.mode_frequencies(structure, p, core)
            _require(0 <= cfg.drive.mode_index < len(freqs), f"mode_index must be in 0..{len(freqs) - 1}")
            pairs = nanoshell.resonance_blowup_shell(structure, p, cfg.drive.mode_index, descending, a0, core)
            extra["omega"] = freqs[cfg.drive.mode_index].omega
        else:
            omega = drive_omega(cfg)
            _require(omega is not None, "blowup-scan on a nanoshell needs drive.mode_index or drive.omega")
            pairs = nanoshell.shell_energy_scan(structure, p, omega, descending, a0, core)

    pairs = pairs[::-1]
    energies = [te / t for t, te in pairs]
    slopes = _loglog_slope(taus, energies)
    rows = [(t, e, te, s) for (t, te), e, s in zip(pairs, energies, slopes)]
    return SweepResult(
        schema=["tau", "energy", "tau_times_energy", "local_loglog_slope"],
        rows=rows,
        metadata=_metadata(cfg, "blowup-scan", **extra),
    )


COMMANDS = {
    "sphere-resonance": cmd_sphere_resonance,
    "shell-modes": cmd_shell_modes,
    "heat-profile": cmd_heat_profile,
    "blowup-scan": cmd_blowup_scan,
}


# --- output ------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    return repr(float(v))


def csv_body(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.schema)
    for row in result.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render(result: SweepResult, fmt: str) -> str:
    if fmt == "json":
        rows = [[v if isinstance(v, str) else (None if math.isnan(v) else float(v)) for v in row] for row in result.rows]
        return json.dumps({"schema": result.schema, "rows": rows, "metadata": result.metadata}, indent=2) + "\n"
    meta = json.dumps(result.metadata, sort_keys=True)
    return f"# {meta}\n" + csv_body(result)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plasmod", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"plasmod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON structure configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _error_record(kind: str, exc: Exception) -> str:
    return json.dumps({"error": kind, "message": str(exc)})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        result = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolated as exc:
        print(_error_record("HypothesisViolated", exc), file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (SingularMatrix, ExactResonanceSingularity, EigenvalueHit, NoRealFrequency) as exc:
        print(_error_record(type(exc).__name__, exc), file=sys.stderr)
        return EXIT_SINGULAR
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = render(result, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
