"""Run orchestration: execute a subcommand, persist outputs, write a manifest.

Data files are deterministic for a fixed (config, seed, version): floats
are serialized with shortest round-trip repr, JSON keys are sorted, and
no timestamps enter data files.  The manifest carries the config hash,
tool version, creation time, and a checksum per emitted file; if a
handler fails after partial writes, the manifest is still written with
status "incomplete" and the error note attached.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import OUTPUT_SCHEMA_ID, RunConfig
from .errors import ConfigError, NumericalError
from .presets import (
    BEAM_FLUX_DISCREPANCY_NOTE,
    REFERENCE_BEAM_FLUX_W_M2,
    ROW4_SCALING_NOTE,
    beam_flux,
    current_scaled_power,
    jonsson_current,
    tonomura_current,
)
from .radiance import (
    LAMBDA_CONVENTION_NOTE,
    copenhagen_emission_power,
    ensemble_mean_power,
    simulation_valley_inputs,
    spectrum_step,
)
from .trajectories import integrate_trajectory, run_ensemble
from .wavefield import cross_section_scan

SUBCOMMANDS = ("quantum-potential", "simulate-trajectories", "valley-report",
               "spectrum", "table1", "detectability", "compare")


@dataclass
class RunManifest:
    subcommand: str
    constants: str
    mode: str
    config_sha256: str
    created_utc: str
    status: str = "complete"
    files: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "schema": OUTPUT_SCHEMA_ID,
            "kind": "manifest",
            "tool": "bohm-radiance",
            "version": __version__,
            "created_utc": self.created_utc,
            "subcommand": self.subcommand,
            "constants": self.constants,
            "mode": self.mode,
            "config_sha256": self.config_sha256,
            "status": self.status,
            "files": self.files,
            "notes": self.notes,
        }


def _fmt(x) -> str:
    """Shortest round-trip decimal form of a number (deterministic)."""
    if isinstance(x, (int,)) or (hasattr(x, "dtype") and
                                 x.dtype.kind in "iu"):
        return str(int(x))
    return repr(float(x))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Emitter:
    """Collects written files and their checksums for the manifest."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.records: list[dict] = []

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8")
        self.records.append({
            "path": name,
            "sha256": _sha256(path),
            "bytes": path.stat().st_size,
        })
        return path

    def write_json(self, name: str, doc: dict) -> Path:
        text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
        return self.write_text(name, text + "\n")

    def write_csv(self, name: str, header: list[str],
                  rows: list[list]) -> Path:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(
                cell if isinstance(cell, str) else _fmt(cell)
                for cell in row))
        return self.write_text(name, "\n".join(lines) + "\n")


def _doc(cfg: RunConfig, kind: str, body: dict) -> dict:
    doc = {"schema": OUTPUT_SCHEMA_ID, "kind": kind,
           "constants": cfg.constants_preset}
    doc.update(body)
    return doc


def _valley_inputs(cfg: RunConfig):
    """Reproduction mode uses configured inputs; simulation derives them."""
    if cfg.mode == "reproduction":
        return list(cfg.valleys)
    return simulation_valley_inputs(
        cfg.experiment, cfg.consts,
        y_half_range_cm=cfg.scan.y_half_range_cm,
        n_samples=cfg.scan.n_samples)


def _cmd_quantum_potential(cfg: RunConfig, em: _Emitter) -> None:
    scan = cross_section_scan(cfg.experiment, cfg.consts,
                              cfg.experiment.cross_section_x_cm,
                              cfg.scan.y_half_range_cm, cfg.scan.n_samples)
    rows = []
    for i in range(len(scan.y)):
        singular = bool(scan.singular[i])
        rows.append([
            scan.y[i], scan.t_s, scan.r[i],
            "nan" if singular else _fmt(scan.s[i]),
            "nan" if singular else _fmt(scan.q[i]),
            "nan" if singular else _fmt(scan.grad_q[i]),
            "singular" if singular else "ok",
        ])
    em.write_csv("quantum_potential.csv",
                 ["y_cm", "t_s", "R", "S_eVs", "Q_eV", "gradQ_eV_per_cm",
                  "flag"],
                 rows)


def _cmd_valley_report(cfg: RunConfig, em: _Emitter) -> None:
    scan = cross_section_scan(cfg.experiment, cfg.consts,
                              cfg.experiment.cross_section_x_cm,
                              cfg.scan.y_half_range_cm, cfg.scan.n_samples)
    em.write_json("valley_report.json", _doc(cfg, "valley_report", {
        "x_cm": scan.x_cm,
        "t_s": scan.t_s,
        "valleys": [v.as_dict() for v in scan.valleys],
        "diagnostics": scan.diagnostics,
    }))


def _cmd_simulate_trajectories(cfg: RunConfig, em: _Emitter) -> None:
    exp, consts = cfg.experiment, cfg.consts
    t_end = cfg.ensemble.t_end_s or exp.time_of_flight_s
    halted = []
    for k, y0 in enumerate(cfg.trajectories.y0_list_cm, start=1):
        traj = integrate_trajectory(exp, consts, y0, t_end,
                                    tol=cfg.trajectories.tol,
                                    n_samples=cfg.trajectories.n_samples)
        rows = list(zip(traj.t_s, traj.y_cm, traj.vy_cm_s,
                        traj.ay_field, traj.ay_numeric))
        em.write_csv(f"trajectory_{k:03d}.csv",
                     ["t_s", "y_cm", "vy_cm_s", "ay_field", "ay_numeric"],
                     [list(r) for r in rows])
        if traj.halted:
            halted.append(traj.halt_reason)
    result = run_ensemble(exp, consts, cfg.ensemble.n, cfg.ensemble.seed,
                          t_end, tol=cfg.trajectories.tol)
    em.write_json("ensemble_summary.json", _doc(cfg, "ensemble_summary", {
        "n": result.n,
        "seed": result.seed,
        "t_end_s": result.t_end_s,
        "ks_statistic": result.ks_statistic,
        "n_failed": result.n_failed,
        "valid": result.valid,
    }))
    if halted:
        raise NumericalError("; ".join(halted))
    if not result.valid:
        raise NumericalError(
            f"ensemble invalid: {result.n_failed} of {result.n} "
            "trajectories failed to propagate")


def _cmd_spectrum(cfg: RunConfig, em: _Emitter) -> None:
    steps = [spectrum_step(cfg.consts, vi) for vi in _valley_inputs(cfg)]
    em.write_json("spectrum.json", _doc(cfg, "spectrum", {
        "mode": cfg.mode,
        "steps": [s.as_dict() for s in steps],
        "notes": [LAMBDA_CONVENTION_NOTE],
    }))
    em.write_csv("spectrum.csv",
                 ["valley", "grad_q_ev_per_cm", "tau_s", "delta_v_cm_s",
                  "power_w", "omega_c_hz", "lambda_c_cm", "i0_ev_per_hz",
                  "photon_energy_j", "photon_frequency_hz"],
                 [[s.valley_index, s.grad_q_ev_per_cm, s.tau_s,
                   s.delta_v_cm_s, s.power_w, s.omega_c_hz, s.lambda_c_cm,
                   s.i0_ev_per_hz, s.photon_energy_j, s.photon_frequency_hz]
                  for s in steps])


def _table_rows(cfg: RunConfig):
    consts = cfg.consts
    j_current = jonsson_current(consts)
    rows = []
    for vi in _valley_inputs(cfg):
        step = spectrum_step(consts, vi)
        p_j = current_scaled_power(step.power_w, j_current)
        flag = ""
        if cfg.mode == "reproduction" and step.valley_index == 4:
            flag = ROW4_SCALING_NOTE
        rows.append({
            "valley": step.valley_index,
            "omega_c_hz": step.omega_c_hz,
            "lambda_c_cm": step.lambda_c_cm,
            "i0_ev_per_hz": step.i0_ev_per_hz,
            "p_tonomura_w": step.power_w,
            "p_jonsson_w": p_j,
            "flag": flag,
        })
    return rows


def _cmd_table1(cfg: RunConfig, em: _Emitter) -> None:
    rows = _table_rows(cfg)
    em.write_json("table1.json", _doc(cfg, "table1", {
        "mode": cfg.mode,
        "rows": rows,
        "notes": [LAMBDA_CONVENTION_NOTE],
    }))
    em.write_csv("table1.csv",
                 ["valley", "omega_c_hz", "lambda_c_cm", "i0_ev_per_hz",
                  "p_tonomura_w", "p_jonsson_w", "flag"],
                 [[r["valley"], r["omega_c_hz"], r["lambda_c_cm"],
                   r["i0_ev_per_hz"], r["p_tonomura_w"], r["p_jonsson_w"],
                   r["flag"]] for r in rows])


def _cmd_detectability(cfg: RunConfig, em: _Emitter) -> None:
    consts = cfg.consts
    inputs = _valley_inputs(cfg)
    step = spectrum_step(consts, inputs[0])
    p_scaled = current_scaled_power(step.power_w, jonsson_current(consts))
    fc = beam_flux(p_scaled)
    em.write_json("detectability.json", _doc(cfg, "detectability", {
        "scaled_power_w": p_scaled,
        "beam_flux_w_m2": fc.beam_flux_w_m2,
        "cmbr_flux_w_m2": fc.cmbr_flux_w_m2,
        "patch_width_m": fc.patch_width_m,
        "patch_height_m": fc.patch_height_m,
        "reference_beam_flux_w_m2": REFERENCE_BEAM_FLUX_W_M2,
        "notes": [BEAM_FLUX_DISCREPANCY_NOTE],
    }))


def _cmd_compare(cfg: RunConfig, em: _Emitter) -> None:
    consts = cfg.consts
    j_current = jonsson_current(consts)
    t_current = tonomura_current(consts)
    rows = []
    for vi in _valley_inputs(cfg):
        step = spectrum_step(consts, vi)
        rows.append({
            "valley": step.valley_index,
            "copenhagen_power_w": copenhagen_emission_power(),
            "bdb_power_tonomura_w": current_scaled_power(step.power_w,
                                                         t_current),
            "bdb_power_jonsson_w": current_scaled_power(step.power_w,
                                                        j_current),
        })
    mean_power = ensemble_mean_power(
        cfg.experiment, consts,
        cfg.experiment.section_time_s(cfg.experiment.cross_section_x_cm))
    em.write_json("compare.json", _doc(cfg, "compare", {
        "mode": cfg.mode,
        "rows": rows,
        "ensemble_mean_power_w": mean_power,
        "notes": [
            "the free-electron prediction is exactly zero at every point "
            "between slit plane and screen; the per-trajectory prediction "
            "is nonzero valley by valley, yet its |psi|^2 ensemble average "
            "vanishes",
        ],
    }))
    em.write_csv("compare.csv",
                 ["valley", "copenhagen_power_w", "bdb_power_tonomura_w",
                  "bdb_power_jonsson_w"],
                 [[r["valley"], r["copenhagen_power_w"],
                   r["bdb_power_tonomura_w"], r["bdb_power_jonsson_w"]]
                  for r in rows])


_HANDLERS = {
    "quantum-potential": _cmd_quantum_potential,
    "valley-report": _cmd_valley_report,
    "simulate-trajectories": _cmd_simulate_trajectories,
    "spectrum": _cmd_spectrum,
    "table1": _cmd_table1,
    "detectability": _cmd_detectability,
    "compare": _cmd_compare,
}


def run(subcommand: str, cfg: RunConfig) -> RunManifest:
    """Execute one subcommand and persist outputs plus manifest.json.

    On a handler error the partial outputs stay on disk, the manifest is
    written with status "incomplete", and the error is re-raised for the
    CLI to map onto an exit code.
    """
    if subcommand not in _HANDLERS:
        raise ConfigError(
            f"unknown subcommand {subcommand!r}; expected one of "
            f"{sorted(_HANDLERS)}")
    out_dir = cfg.output_dir
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}")
    em = _Emitter(out_dir)
    manifest = RunManifest(
        subcommand=subcommand,
        constants=cfg.constants_preset,
        mode=cfg.mode,
        config_sha256=cfg.sha256(),
        created_utc=datetime.now(timezone.utc).isoformat(),
    )
    try:
        _HANDLERS[subcommand](cfg, em)
    except Exception as exc:
        manifest.status = "incomplete"
        manifest.notes.append(f"{type(exc).__name__}: {exc}")
        manifest.files = em.records
        _write_manifest(em, manifest)
        raise
    manifest.files = em.records
    _write_manifest(em, manifest)
    return manifest


def _write_manifest(em: _Emitter, manifest: RunManifest) -> None:
    text = json.dumps(manifest.as_dict(), indent=2, sort_keys=True,
                      allow_nan=False)
    (em.out_dir / "manifest.json").write_text(text + "\n", encoding="utf-8")
