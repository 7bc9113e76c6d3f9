"""Check-suite orchestration.

Checks run in dependency order.  A check whose prerequisite failed is
reported as ``skipped``; a check whose mathematical hypothesis (Kaehler
total space, slant fibers, parallel omega) is not satisfied is reported as
``hypothesis-not-met`` rather than pass/fail.  The suite exit code is 0
exactly when no check failed.

Per-point work (building the point frames) can be dispatched over threads,
capped by the SLANTLAB_THREADS environment variable; results are reduced
in point order, so reports do not depend on the thread count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import conditions as cond
from . import submersion as subm
from .geometry import (SingularMetricError, kaehler_check, metric_pd_check,
                       validate_almost_hermitian)
from .jets import DomainError
from .manifest import Manifest
from .report import (CheckResult, FAIL, HYPOTHESIS_NOT_MET, PASS, SKIPPED,
                     ResidualTracker, SuiteReport)
from .sampling import check_rng, halton_points
from .submersion import NOT_SLANT, PROPER_SLANT

# numerical errors that must surface as check failures, never as crashes
_CAPTURED = (SingularMetricError, DomainError, subm.RankDeficientError,
             subm.DegenerateAngleError, subm.InstanceInconsistentError,
             ZeroDivisionError)

CHECK_NAMES = (
    "metric-positive-definite",
    "almost-hermitian",
    "kaehler",
    "submersion-axioms",
    "slant-scan",
    "phi-squared",
    "metric-relations",
    "adapted-frame",
    "tension-routes",
    "structural-identities",
    "phi-omega-identities",
    "omega-parallel-scan",
    "harmonicity",
    "parallel-omega-identities",
    "vertical-foliation",
    "horizontal-foliation",
    "totally-geodesic",
    "product-structure",
)


def _thread_cap() -> int:
    raw = os.environ.get("SLANTLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    cap = _thread_cap()
    if cap == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))


def _skip(name: str, reason: str) -> CheckResult:
    return CheckResult(name=name, status=SKIPPED, detail=reason)


def _hyp(name: str, reason: str) -> CheckResult:
    return CheckResult(name=name, status=HYPOTHESIS_NOT_MET, detail=reason)


def run_suite(manifest: Manifest) -> SuiteReport:
    inst = manifest.instance()
    tol = manifest.tolerances
    seed = manifest.seed
    points = halton_points(manifest.region, manifest.points, seed)
    directions = manifest.directions
    selected = set(manifest.checks) if manifest.checks and "all" not in manifest.checks \
        else set(CHECK_NAMES)
    unknown = selected - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown check name(s): {sorted(unknown)}")

    results: dict = {}
    order: list = []

    # gating checks always compute (their outcome steers everything else);
    # they are merely omitted from the report when not selected
    gating = {"metric-positive-definite", "almost-hermitian", "kaehler",
              "submersion-axioms", "slant-scan", "omega-parallel-scan"}

    def record(result: CheckResult, started: float):
        result.wall_time = time.perf_counter() - started
        results[result.name] = result
        if result.name in selected:
            order.append(result)

    def run(name: str, producer):
        if name not in selected and name not in gating:
            return
        started = time.perf_counter()
        try:
            result = producer()
        except _CAPTURED as err:
            result = CheckResult(name=name, status=FAIL,
                                 detail=f"{type(err).__name__}: {err}")
        record(result, started)

    def status(name: str) -> str:
        result = results.get(name)
        return result.status if result else SKIPPED

    # 1. metric positive definiteness of both charts
    def pd_check():
        total_result = metric_pd_check(inst.total.chart, points, tol)
        base_points = [inst.map_at(p) for p in points]
        base_result = metric_pd_check(inst.base, base_points, tol, name="base")
        merged = total_result
        merged.extras = {
            "total_min_eigenvalue": total_result.extras["min_eigenvalue"],
            "base_min_eigenvalue": base_result.extras["min_eigenvalue"],
        }
        if base_result.status == FAIL:
            merged.status = FAIL
            merged.detail += "; base metric fails positive definiteness"
        return merged

    run("metric-positive-definite", pd_check)
    metrics_ok = status("metric-positive-definite") == PASS

    # 2. almost Hermitian conditions
    if metrics_ok:
        run("almost-hermitian",
            lambda: validate_almost_hermitian(
                inst.total, points, directions, tol,
                rng=check_rng(seed, "almost-hermitian")))
    else:
        run("almost-hermitian",
            lambda: _skip("almost-hermitian", "metric gate failed"))
    hermitian_ok = status("almost-hermitian") == PASS

    # 3. Kaehler condition
    if hermitian_ok:
        run("kaehler",
            lambda: kaehler_check(inst.total, points, directions, tol,
                                  rng=check_rng(seed, "kaehler")))
    else:
        run("kaehler", lambda: _skip("kaehler", "almost-hermitian check did not pass"))
    kaehler_ok = status("kaehler") == PASS
    kaehler_ran = status("kaehler") in (PASS, FAIL)

    # 4. submersion axioms (needs the metric, not J)
    frames = []
    if metrics_ok:
        try:
            frames = _parallel_map(inst.frame, list(points))
        except _CAPTURED as err:
            frames = []
            run("submersion-axioms", lambda: CheckResult(
                name="submersion-axioms", status=FAIL,
                detail=f"point frame construction failed: {err}"))
        else:
            run("submersion-axioms",
                lambda: subm.check_axioms(frames, directions,
                                          check_rng(seed, "submersion-axioms"),
                                          tol))
    else:
        run("submersion-axioms", lambda: _skip("submersion-axioms", "metric gate failed"))
    axioms_ok = status("submersion-axioms") == PASS
    split_frames = [fr for fr in frames if fr.rank_ok] if axioms_ok else []

    # 5. slant scan
    scan = None
    if hermitian_ok and axioms_ok:
        started = time.perf_counter()
        scan = subm.slant_scan(split_frames, directions,
                               check_rng(seed, "slant-scan"), tol)
        result = CheckResult(
            name="slant-scan",
            status=FAIL if scan.classification == NOT_SLANT else PASS,
            residual_max=scan.deviation,
            residual_mean=scan.deviation,
            count=scan.count,
            detail=f"{scan.classification}, angle {scan.angle:.9f} rad "
                   f"(spread {scan.deviation:.3e})",
            extras={"classification": scan.classification,
                    "angle": scan.angle,
                    "angle_min": scan.min_angle,
                    "angle_max": scan.max_angle,
                    "deviation": scan.deviation,
                    "witness_point": list(scan.witness_point),
                    "witness_vector": list(scan.witness_vector)},
        )
        record(result, started)
    else:
        run("slant-scan", lambda: _skip(
            "slant-scan", "requires almost-hermitian and submersion axioms"))
    slant_ok = scan is not None and scan.classification != NOT_SLANT
    theta = scan.angle if scan is not None else float("nan")
    proper = scan is not None and scan.classification == PROPER_SLANT

    # 6-8. slant consequences
    if slant_ok:
        run("phi-squared",
            lambda: subm.phi_squared_check(split_frames, theta, tol))
        run("metric-relations",
            lambda: subm.metric_relation_check(
                split_frames, directions, theta,
                check_rng(seed, "metric-relations"), tol))
        if proper:
            def adapted():
                tracker = ResidualTracker()
                for fr in split_frames:
                    af = subm.adapted_frame(fr)
                    k = af.gram_vertical.shape[0]
                    res_v = float(np.max(np.abs(af.gram_vertical - np.eye(k))))
                    res_o = float(np.max(np.abs(af.gram_omega - np.eye(len(af.e)))))
                    tracker.add(res_v, point=fr.p, label="vertical frame Gram")
                    tracker.add(res_o, point=fr.p, label="omega frame Gram")
                return CheckResult.from_tracker(
                    "adapted-frame", tracker, tracker.max < tol.alg,
                    detail=f"theta {theta:.6f} rad")
            run("adapted-frame", adapted)
        else:
            run("adapted-frame", lambda: _skip(
                "adapted-frame",
                "degenerate angle: frame needs a proper slant instance"))
    else:
        reason = ("slant scan classified the instance as NotSlant"
                  if scan is not None else "slant scan unavailable")
        for name in ("phi-squared", "metric-relations", "adapted-frame"):
            run(name, lambda name=name: _skip(name, reason))

    # 9-10. connection-level identities (no Kaehler assumption)
    if axioms_ok:
        run("tension-routes",
            lambda: cond.tension_route_check(split_frames, tol))
        run("structural-identities",
            lambda: cond.structural_identity_check(
                split_frames, check_rng(seed, "structural-identities"), tol))
    else:
        for name in ("tension-routes", "structural-identities"):
            run(name, lambda name=name: _skip(name, "submersion axioms did not pass"))

    # 11. Kaehler-conditional phi/omega identities
    if axioms_ok and hermitian_ok and kaehler_ran:
        if kaehler_ok:
            run("phi-omega-identities",
                lambda: cond.phi_omega_identity_check(
                    split_frames, check_rng(seed, "phi-omega-identities"), tol))
        else:
            run("phi-omega-identities", lambda: _hyp(
                "phi-omega-identities", "total space is not Kaehler"))
    else:
        run("phi-omega-identities", lambda: _skip(
            "phi-omega-identities", "prerequisite checks did not run"))

    # 12. omega parallelism scan
    parallel = False
    if slant_ok:
        started = time.perf_counter()
        omega_result = subm.omega_parallel_scan(
            split_frames, directions, check_rng(seed, "omega-parallel-scan"), tol)
        parallel = bool(omega_result.extras.get("parallel"))
        record(omega_result, started)
    else:
        run("omega-parallel-scan", lambda: _skip(
            "omega-parallel-scan", "requires a slant instance"))

    # 13-14. harmonicity package (Kaehler + slant + parallel omega)
    def theorem_gate(name: str):
        if not (axioms_ok and hermitian_ok):
            return _skip(name, "prerequisite checks did not pass")
        if not kaehler_ok:
            return _hyp(name, "total space is not Kaehler")
        if not slant_ok:
            return _hyp(name, "instance is not slant")
        return None

    def harmonicity():
        gate = theorem_gate("harmonicity")
        if gate is not None:
            return gate
        if not parallel:
            return _hyp("harmonicity", "omega is not parallel")
        return cond.harmonicity_check(split_frames, theta,
                                      scan.classification, tol, proper)

    run("harmonicity", harmonicity)

    def parallel_identities():
        gate = theorem_gate("parallel-omega-identities")
        if gate is not None:
            return gate
        if not parallel:
            return _hyp("parallel-omega-identities", "omega is not parallel")
        return cond.parallel_omega_identity_check(
            split_frames, theta, check_rng(seed, "parallel-omega-identities"), tol)

    run("parallel-omega-identities", parallel_identities)

    # 15-18. foliation and totally geodesic conditions
    def foliation(name, producer):
        gate = theorem_gate(name)
        if gate is not None:
            return gate
        return producer()

    run("vertical-foliation",
        lambda: foliation("vertical-foliation",
                          lambda: cond.vertical_foliation_check(
                              split_frames, check_rng(seed, "vertical-foliation"),
                              tol)))
    run("horizontal-foliation",
        lambda: foliation("horizontal-foliation",
                          lambda: cond.horizontal_foliation_check(
                              split_frames, check_rng(seed, "horizontal-foliation"),
                              tol)))
    run("totally-geodesic",
        lambda: foliation("totally-geodesic",
                          lambda: cond.totally_geodesic_check(
                              split_frames, check_rng(seed, "totally-geodesic"),
                              tol)))

    def product():
        gate = theorem_gate("product-structure")
        if gate is not None:
            return gate
        vertical_result = results.get("vertical-foliation")
        horizontal_result = results.get("horizontal-foliation")
        if (vertical_result is None or horizontal_result is None
                or vertical_result.status not in (PASS, FAIL)
                or horizontal_result.status not in (PASS, FAIL)):
            return _skip("product-structure", "foliation checks unavailable")
        return cond.product_condition_check(vertical_result, horizontal_result, tol)

    run("product-structure", product)

    metadata = {
        "tool": "slantlab",
        "version": __version__,
        "schema_notes": "wall times appear only in text output",
        "seed": seed,
        "points": manifest.points,
        "directions": directions,
        "params": dict(sorted(manifest.params.items())),
        "tolerances": {
            "alg": tol.alg, "diff": tol.diff, "angle": tol.angle,
            "angle_guard": tol.angle_guard, "pd": tol.pd,
            "rank": tol.rank, "cond_max": tol.cond_max,
        },
        "region": {"min": list(manifest.region.lows),
                   "max": list(manifest.region.highs)},
    }
    if scan is not None:
        metadata["classification"] = scan.classification
        metadata["slant_angle"] = scan.angle
    return SuiteReport(instance=manifest.name, checks=order, metadata=metadata)
