"""Batch scenario execution and canonical report serialization.

Reports are plain dicts whose floats are normalized to 12 significant digits
at assembly time, so emitting canonical JSON and parsing it back reproduces
the in-memory report exactly.  Each report carries a determinism hash over
its canonical JSON with the timestamp removed; two runs with the same
scenario file and seeds must agree hash-for-hash regardless of parallelism.
Individual scenario failures (a system that is not a frame, a malformed
candidate family, an escaping carrier) are captured in the report's "error"
field and never abort the batch.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from framecert import __version__
from framecert.amalgam import GroupFunction, sampling_bound_check
from framecert.comparison import ComparisonScenario, comparison_run, density_report
from framecert.frames import analyze_frame, bessel_bound_check, verify_dual
from framecert.groups import PointSet, separation_constant
from framecert.hap import HapScenario, find_L
from framecert.scenarios import (
    Scenario,
    build_frame,
    build_group,
    build_points,
    build_reference,
    build_vector,
)

_TAIL_CONVENTION = "squared"
_VOLATILE_KEYS = ("timestamp", "determinism_sha256")


def _canon(obj):
    """Canonical JSON-ready form: sorted-key dicts, lists, %.12g floats."""
    if isinstance(obj, dict):
        return {str(k): _canon(obj[k]) for k in obj}
    if isinstance(obj, (list, tuple)):
        return [_canon(x) for x in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, np.ndarray):
        return [_canon(x) for x in obj.tolist()]
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def determinism_sha256(report: dict) -> str:
    stripped = {k: v for k, v in report.items() if k not in _VOLATILE_KEYS}
    return hashlib.sha256(canonical_json(stripped).encode("utf-8")).hexdigest()


def _summary(cells: int, passed: int, failed: int, boundary: int) -> dict:
    return {
        "cell_count": cells,
        "pass_total": passed,
        "fail_total": failed,
        "boundary_total": boundary,
    }


def _run_sampling_bound(spec: dict, seed: int) -> dict:
    group = build_group(spec["group"])
    rng = np.random.default_rng(seed)
    max_radius = spec["max_radius"]
    rows = []
    passed = 0
    for t in range(spec["trials"]):
        values = rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order)
        f = GroupFunction(group, values)
        size = int(rng.integers(1, group.order + 1))
        points = tuple(group.carrier[i] for i in rng.integers(0, group.order, size))
        X = PointSet(group, points)
        u_radius = int(rng.integers(0, max_radius + 1))
        k_radius = int(rng.integers(0, max_radius + 1))
        check = sampling_bound_check(f, X, group.ball(k_radius), group.ball(u_radius))
        passed += bool(check.holds)
        rows.append(
            {
                "instance": t,
                "points": size,
                "u_radius": u_radius,
                "k_radius": k_radius,
                "lhs": check.lhs,
                "rhs": check.rhs,
                "C": check.C,
                "C0": check.C0,
                "holds": check.holds,
            }
        )
    total = len(rows)
    return {
        "table": rows,
        "summary": _summary(total, passed, total - passed, 0),
    }


def _run_frame_analysis(spec: dict, seed: int) -> dict:
    frame = build_frame(spec["frame"])
    analysis = analyze_frame(frame)
    u_radius = spec.get("u_radius", 1)
    c0 = separation_constant(frame.points, frame.rep.group.ball(u_radius))

    rng = np.random.default_rng(seed)
    worst_rel = 0.0
    for _ in range(20):
        f = rng.standard_normal(frame.rep.dim) + 1j * rng.standard_normal(frame.rep.dim)
        energy = float(np.sum(np.abs(frame.synthesis.conj().T @ f) ** 2))
        norm_sq = float(np.linalg.norm(f) ** 2)
        worst_rel = max(
            worst_rel,
            (analysis.A * norm_sq - energy) / (analysis.A * norm_sq),
            (energy - analysis.B * norm_sq) / (analysis.B * norm_sq),
        )
    dual_check = verify_dual(frame, analysis.canonical_dual)
    bessel = bessel_bound_check(analysis.canonical_dual, analysis.A)
    checks = [
        {"check": "frame_bounds", "A": analysis.A, "B": analysis.B, "ok": True},
        {"check": "frame_inequality", "trials": 20, "max_rel_violation": worst_rel,
         "ok": worst_rel <= 1e-9},
        {"check": "dual_reconstruction", "max_error": dual_check.max_error, "ok": dual_check.ok},
        {"check": "bessel_dual", "empirical": bessel.empirical_B_dual, "bound": bessel.bound,
         "ok": bool(bessel.ok)},
        {"check": "separation_constant", "u_radius": u_radius, "C0": c0, "ok": True},
    ]
    passed = sum(1 for c in checks if c["ok"])
    return {
        "checks": checks,
        "summary": _summary(len(checks), passed, len(checks) - passed, 0),
    }


def _radius_families(group, spec):
    U = group.ball(spec["u_radius"])
    K_family = [group.ball(r) for r in spec["k_radii"]]
    L_family = [group.ball(r) for r in spec["l_radii"]]
    return U, K_family, L_family


def _run_hap(spec: dict, seed: int) -> dict:
    frame = build_frame(spec["frame"])
    analysis = analyze_frame(frame)
    group = frame.rep.group
    f = build_vector(spec["f"], frame.rep.dim)
    U, K_family, L_family = _radius_families(group, spec)
    scenario = HapScenario(
        frame=frame,
        duals=analysis.canonical_dual,
        lower_bound=analysis.A,
        f=f,
        epsilon=spec["epsilon"],
        U=U,
        K_family=K_family,
        L_family=L_family,
        k_labels=list(spec["k_radii"]),
        l_labels=list(spec["l_radii"]),
    )
    cert = find_L(scenario)
    table = [
        {
            "y": cell.y,
            "K_radius": cell.k_label,
            "L_radius": cell.l_label,
            "error": cell.error,
            "boundary": cell.boundary,
        }
        for cell in cert.table
    ]
    chosen_rows = [row for row in table if row["L_radius"] == cert.chosen_l_label]
    boundary = sum(1 for row in chosen_rows if row["boundary"])
    passed = sum(
        1 for row in chosen_rows if not row["boundary"] and row["error"] < cert.epsilon
    )
    failed = len(chosen_rows) - passed - boundary
    certificate = {
        "chosen_L_radius": cert.chosen_l_label,
        "worst_error": cert.worst_error,
        "epsilon": cert.epsilon,
        "theoretical_bound": cert.theoretical_bound,
        "C0": cert.separation,
        "dual": cert.dual_label,
        "eq42_convention": _TAIL_CONVENTION,
        "candidates": [
            {
                "L_radius": cand.l_label,
                "worst_error": cand.worst_error,
                "theoretical_bound": cand.theoretical_bound,
                "passed": cand.passed,
                "domination_ok": cand.domination_ok,
            }
            for cand in cert.candidates
        ],
        "table": table,
    }
    return {
        "certificate": certificate,
        "summary": _summary(len(chosen_rows), passed, failed, boundary),
    }


def _run_comparison(spec: dict, seed: int) -> dict:
    frame = build_frame(spec["frame"])
    given_analysis = analyze_frame(frame)
    reference = build_reference(spec["reference"], frame.rep)
    reference_analysis = analyze_frame(reference)
    group = frame.rep.group
    U, K_family, L_family = _radius_families(group, spec)
    scenario = ComparisonScenario(
        given=frame,
        given_analysis=given_analysis,
        reference=reference,
        reference_analysis=reference_analysis,
        epsilon=spec["epsilon"],
        U=U,
        K_family=K_family,
        L_family=L_family,
        k_labels=list(spec["k_radii"]),
        l_labels=list(spec["l_radii"]),
        b_convention=spec.get("b_convention", "reference"),
    )
    certificates = comparison_run(scenario)
    hap = scenario.hap_choice
    rows = [
        {
            "y": cert.y,
            "K_radius": cert.k_label,
            "L_radius": cert.l_label,
            "trace_T": cert.trace_T,
            "rank_P": cert.rank_P,
            "card_X": cert.card_x_in_ykl,
            "card_Y": cert.card_y_in_yk,
            "lhs": cert.lhs,
            "B_used": cert.b_used,
            "B_provenance": cert.b_provenance,
            "B_alternative": cert.b_alternative,
            "epsilon": cert.epsilon,
            "chain_ok": cert.chain_ok,
            "final_ok": cert.final_ok,
            "restricted_sum": cert.restricted_sum,
            "restricted_sum_ok": cert.restricted_sum_ok,
            "identity_error": cert.projected_sum_identity_error,
            "identity_ok": cert.identity_ok,
            "star_signed": cert.star_signed,
            "star_bound": cert.star_bound,
            "star_ok": cert.star_ok,
            "trace_lemma_ok": cert.trace_lemma_ok,
            "trace_lower_ok": cert.trace_lower_ok,
            "boundary": cert.boundary,
            "ok": cert.ok,
        }
        for cert in certificates
    ]
    boundary = sum(1 for c in certificates if c.boundary)
    passed = sum(1 for c in certificates if c.ok)
    failed = len(certificates) - passed - boundary
    return {
        "hap_precondition": {
            "chosen_L_radius": hap.chosen_l_label,
            "worst_error": hap.worst_error,
            "threshold": hap.epsilon,
        },
        "certificates": rows,
        "summary": _summary(len(rows), passed, failed, boundary),
    }


def _run_density(spec: dict, seed: int) -> dict:
    group = build_group(spec["group"])
    X = build_points(spec["points"], group)
    K_family = [group.ball(r) for r in spec["k_radii"]]
    y_sample = spec.get("y_sample")
    if y_sample is not None:
        y_sample = [tuple(y) if isinstance(y, list) else y for y in y_sample]
    report = density_report(X, K_family, y_sample=y_sample, k_labels=list(spec["k_radii"]))
    rows = [
        {
            "y": row.y,
            "K_radius": row.k_label,
            "count": row.count,
            "measure": row.measure,
            "ratio": row.ratio,
            "boundary": row.boundary,
        }
        for row in report.rows
    ]
    summary_rows = [
        {"K_radius": s.k_label, "min_ratio": s.min_ratio, "max_ratio": s.max_ratio}
        for s in report.summary
    ]
    boundary = sum(1 for row in rows if row["boundary"])
    return {
        "table": rows,
        "ratio_summary": summary_rows,
        "summary": _summary(len(rows), len(rows) - boundary, 0, boundary),
    }


_EVALUATORS = {
    "sampling_bound": _run_sampling_bound,
    "frame_analysis": _run_frame_analysis,
    "hap": _run_hap,
    "comparison": _run_comparison,
    "density": _run_density,
}


def _evaluate(scenario: Scenario, seed_override: int | None) -> dict:
    seed = scenario.seed if seed_override is None else seed_override
    error = None
    payload: dict = {}
    try:
        payload = _EVALUATORS[scenario.kind](scenario.spec, seed)
    except Exception as exc:  # captured per-report, the batch continues
        error = {"type": type(exc).__name__, "message": str(exc)}
        payload = {"summary": _summary(0, 0, 0, 0)}
    report = {
        "scenario_id": scenario.id,
        "kind": scenario.kind,
        "version": __version__,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "error": error,
        **payload,
    }
    report["ok"] = error is None and report["summary"]["fail_total"] == 0
    report = _canon(report)
    report["determinism_sha256"] = determinism_sha256(report)
    return report


def run(
    scenarios: list[Scenario], parallelism: int = 1, seed_override: int | None = None
) -> list[dict]:
    """Evaluate all scenarios; output is ordered by scenario id and is
    byte-identical for fixed seeds regardless of the parallelism level."""
    if parallelism > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            reports = list(pool.map(lambda s: _evaluate(s, seed_override), scenarios))
    else:
        reports = [_evaluate(s, seed_override) for s in scenarios]
    return sorted(reports, key=lambda r: r["scenario_id"])


_CSV_COLUMNS = {
    "sampling_bound": ("instance", "u_radius", "k_radius", "lhs", "rhs", "C", "C0", "holds"),
    "hap": ("y", "K_radius", "L_radius", "error"),
    "comparison": (
        "y",
        "K_radius",
        "L_radius",
        "trace_T",
        "rank_P",
        "card_X",
        "card_Y",
        "chain_ok",
        "final_ok",
    ),
    "density": ("y", "K_radius", "count", "measure", "ratio"),
}


def _csv_rows(report: dict) -> list[dict]:
    kind = report["kind"]
    if kind == "sampling_bound" or kind == "density":
        return report.get("table", [])
    if kind == "hap":
        return report.get("certificate", {}).get("table", [])
    if kind == "comparison":
        return report.get("certificates", [])
    return report.get("checks", [])


def _csv_cell(value):
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return value


def _emit_csv(reports: list[dict]) -> str:
    blocks = []
    kinds_in_order = []
    for report in reports:
        if report["kind"] not in kinds_in_order:
            kinds_in_order.append(report["kind"])
    for kind in kinds_in_order:
        buffer = io.StringIO()
        if kind == "frame_analysis":
            columns = ("check", "ok")
        else:
            columns = _CSV_COLUMNS[kind]
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("scenario_id",) + columns)
        for report in reports:
            if report["kind"] != kind:
                continue
            for row in _csv_rows(report):
                writer.writerow(
                    [report["scenario_id"]] + [_csv_cell(row.get(c)) for c in columns]
                )
        blocks.append(buffer.getvalue())
    return "\n".join(blocks)


def _emit_text(reports: list[dict]) -> str:
    lines = []
    for report in reports:
        summary = report["summary"]
        status = "PASS" if report["ok"] else "FAIL"
        lines.append(
            f"scenario {report['scenario_id']} [{report['kind']}]: {status} "
            f"(cells={summary['cell_count']}, pass={summary['pass_total']}, "
            f"fail={summary['fail_total']}, boundary={summary['boundary_total']})"
        )
        if report["error"] is not None:
            lines.append(f"  error: {report['error']['type']}: {report['error']['message']}")
    counts = (
        f"{sum(1 for r in reports if r['ok'])}/{len(reports)} scenarios passed"
        if reports
        else "no scenarios"
    )
    lines.append(counts)
    return "\n".join(lines) + "\n"


def emit(reports: list[dict], format: str = "json") -> bytes:
    """Serialize reports: canonical JSON, flattened CSV, or a text summary."""
    if format == "json":
        return canonical_json(reports).encode("utf-8")
    if format == "csv":
        return _emit_csv(reports).encode("utf-8")
    if format == "text":
        return _emit_text(reports).encode("utf-8")
    raise ValueError(f"unknown format {format!r}")
