"""Run reports: a stable key set per command, a deterministic JSON
serializer (floats at 17 significant digits), and an aligned text table.

Report keys:
    version, command, config_hash, config (inline echo), energy
    (E_c, dE, E, deltaE, iterations, residual), controversy (compare/scan),
    identity_residuals, scan (scan only: rows, fitted_exponent, r_squared,
    failures), oracle_energy, timings_ms.

Two runs of the same config differ only inside timings_ms.
"""

from __future__ import annotations

import math

from .config import RunConfig, config_hash, emit_config

VERSION = "0.1.0"


def _check_finite(obj, path="report"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite value at {path}: {obj}")


def _jsonify(obj, out):
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(f'"{k}":')
            _jsonify(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _jsonify(v, out)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, float):
        out.append(format(obj, ".17g"))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif obj is None:
        out.append("null")
    else:
        escaped = str(obj).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        out.append(f'"{escaped}"')


def render_json(report: dict) -> str:
    _check_finite({k: v for k, v in report.items() if k != "failures"})
    out = []
    _jsonify(report, out)
    return "".join(out)


def base_report(command: str, cfg: RunConfig) -> dict:
    return {
        "version": VERSION,
        "command": command,
        "config_hash": config_hash(cfg),
        "config": emit_config(cfg),
    }


def energy_section(ledger) -> dict:
    return {
        "E_c": ledger.E_c,
        "dE": list(ledger.dE),
        "E": ledger.E,
        "deltaE": ledger.deltaE,
        "iterations": ledger.iterations,
        "residual": ledger.residual,
    }


def controversy_section(rep) -> dict:
    return {
        "dE1_direct": rep.dE1_direct,
        "dE2b_direct": rep.dE2b_direct,
        "combined_lindgren": rep.combined_lindgren,
        "combined_dkz": rep.combined_dkz,
        "combined_dkz_dc_approx": rep.combined_dkz_dc_approx,
        "difference": rep.difference,
        "predicted_difference": rep.predicted_difference,
        "dm1_error_term": rep.dm1_error_term,
    }


def render_table(report: dict) -> str:
    """Aligned plain-text rendering of the scalar report content."""
    lines = [f"bwlab {report['command']}  (version {report['version']})",
             f"config {report['config_hash'][:16]}"]

    def block(title, mapping):
        lines.append("")
        lines.append(title)
        width = max(len(k) for k in mapping)
        for k, v in mapping.items():
            if isinstance(v, float):
                lines.append(f"  {k:<{width}}  {v: .12e}")
            elif isinstance(v, list):
                body = ", ".join(f"{x: .6e}" for x in v)
                lines.append(f"  {k:<{width}}  [{body}]")
            else:
                lines.append(f"  {k:<{width}}  {v}")

    if "energy" in report:
        block("energies", report["energy"])
    if "controversy" in report:
        block("convention comparison", report["controversy"])
    if "oracle_energy" in report:
        block("model oracle", {"oracle_energy": report["oracle_energy"]})
    if "identity_residuals" in report:
        block("identity residuals", report["identity_residuals"])
    if "scan" in report:
        sc = report["scan"]
        lines.append("")
        lines.append("coupling scan")
        lines.append(f"  {'lambda':>10}  {'difference':>16}  {'predicted':>16}  {'ratio':>10}")
        for lam, diff, pred, ratio in sc["rows"]:
            lines.append(f"  {lam:>10.5f}  {diff:>16.8e}  {pred:>16.8e}  {ratio:>10.6f}")
        lines.append(f"  fitted_exponent  {sc['fitted_exponent']: .6f}")
        lines.append(f"  r_squared        {sc['r_squared']: .8f}")
        for lam, msg in sc.get("failures", []):
            lines.append(f"  FAILED lambda={lam}: {msg}")
    if "timings_ms" in report:
        block("timings [ms]", report["timings_ms"])
    lines.append("")
    return "\n".join(lines)


def write_csv(path, rows):
    """Scan rows as CSV: header lambda,difference,predicted,ratio."""
    with open(path, "w") as fh:
        fh.write("lambda,difference,predicted,ratio\n")
        for lam, diff, pred, ratio in rows:
            fh.write(f"{lam:.17g},{diff:.17g},{pred:.17g},{ratio:.17g}\n")
