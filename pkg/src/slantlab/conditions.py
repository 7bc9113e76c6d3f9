"""Map-level conditions: second fundamental form, tension, harmonicity,
totally geodesic foliations and totally geodesic maps.

All conditions are multilinear in their vector arguments, so the suite
checks evaluate them on every combination of splitting-basis vectors
(complete coverage) plus a few random combinations as a smoke test.

The second fundamental form of the map is

    sff(X, Y) = pullback-nabla_X (F_* Y) - F_* (nabla_X Y),

a base-tangent vector along the map; its trace over a metric-orthonormal
frame is the tension field.  The tension is computed by two independent
routes (full-frame trace versus minus the pushforward of the fiber trace of
the fundamental tensor T) and their discrepancy is reported, never hidden.

Foliation checks pair each condition with the direct total-geodesy
statement it is equivalent to, and verify that the two Boolean outcomes
agree; the conditions themselves assume a Kaehler total space, which the
suite runner gates on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Tolerances
from .geometry import ConstantField, inner, norm
from .report import CheckResult, FAIL, PASS, ResidualTracker
from .submersion import (PointFrame, SubmersionInstance, adapted_frame,
                         hat_nabla, nabla_omega, nabla_phi, oneill_a,
                         oneill_t, random_vertical)

__all__ = [
    "TensionValue", "second_fundamental_form", "tension_field",
    "tension_route_check", "structural_identity_check",
    "phi_omega_identity_check", "harmonicity_check",
    "parallel_omega_identity_check",
    "vertical_foliation_residual", "horizontal_foliation_residual",
    "totally_geodesic_residuals",
    "vertical_foliation_check", "horizontal_foliation_check",
    "totally_geodesic_check", "product_condition_check",
]


@dataclass(frozen=True)
class TensionValue:
    """Tension of the map at a point, by both computation routes."""

    point: tuple
    general_route: np.ndarray   # trace of sff over a full orthonormal frame
    fiber_route: np.ndarray     # minus pushforward of the fiber T-trace
    discrepancy: float          # base-metric distance between the routes
    horizontal_max: float       # max ||sff(h, h)|| over the horizontal basis


def _as_field(obj):
    if hasattr(obj, "value_and_jacobian"):
        return obj
    return ConstantField(np.asarray(obj, dtype=float))


def _sff_fields(fr: PointFrame, x_field, y_field) -> np.ndarray:
    """sff(X, Y) at fr.p for arbitrary vector field specs."""
    p = fr.p
    xv = x_field.value(p)
    yv, yjac = y_field.value_and_jacobian(p)
    # F_* Y as a field along the map: W^a(q) = dF(q)[a, i] Y^i(q)
    w = fr.jac @ yv
    dw = np.einsum("ail,i->al", np.array([jt.hess for jt in fr.map_jets]), yv)
    dw += fr.jac @ yjac  # (a, l) += A[a, i] dY^i/dq_l
    _, gammas2 = fr.base_data
    fx = fr.jac @ xv
    pullback = dw @ xv + np.einsum("abc,b,c->a", gammas2.gamma, fx, w)
    nabla_xy = fr.cov(yv, yjac, xv)
    return pullback - fr.jac @ nabla_xy


def second_fundamental_form(inst: SubmersionInstance, p, x_field, y_field) -> np.ndarray:
    return _sff_fields(inst.frame(p), _as_field(x_field), _as_field(y_field))


def _sff_const(fr: PointFrame, x, y) -> np.ndarray:
    """sff on constant-coefficient extensions (tensoriality makes this generic)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hess = np.array([jt.hess for jt in fr.map_jets])
    dw_x = np.einsum("ail,i,l->a", hess, y, x)
    _, gammas2 = fr.base_data
    fx = fr.jac @ x
    fy = fr.jac @ y
    pullback = dw_x + np.einsum("abc,b,c->a", gammas2.gamma, fx, fy)
    nabla_xy = np.einsum("kij,i,j->k", fr.gammas.gamma, x, y)
    return pullback - fr.jac @ nabla_xy


def _tension(fr: PointFrame) -> TensionValue:
    m = fr.m
    # full orthonormal frame from the Cholesky factor of the metric
    frame_cols = np.linalg.solve(fr.chol.T, np.eye(m))
    general = np.zeros(fr.n)
    for i in range(m):
        general += _sff_const(fr, frame_cols[:, i], frame_cols[:, i])
    s = fr.require_split()
    g2, _ = fr.base_data
    fiber = np.zeros(fr.n)
    for v in s.vertical:
        fiber -= fr.jac @ oneill_t(fr, v, v)
    horizontal_max = max(
        (norm(g2, _sff_const(fr, h, h)) for h in s.horizontal), default=0.0)
    disc = norm(g2, general - fiber)
    return TensionValue(tuple(fr.p.tolist()), general, fiber, disc, horizontal_max)


def tension_field(inst: SubmersionInstance, p) -> TensionValue:
    return _tension(inst.frame(p))


def tension_route_check(frames, tol: Tolerances,
                        route_tol: float | None = None) -> CheckResult:
    """Route agreement plus vanishing of the horizontal sff terms."""
    route_tol = route_tol if route_tol is not None else 10.0 * tol.diff
    tracker = ResidualTracker()
    max_disc = 0.0
    max_horiz = 0.0
    for fr in frames:
        tv = _tension(fr)
        max_disc = max(max_disc, tv.discrepancy)
        max_horiz = max(max_horiz, tv.horizontal_max)
        tracker.add(tv.discrepancy, point=fr.p, label="route discrepancy")
        tracker.add(tv.horizontal_max, point=fr.p, label="horizontal sff")
    passed = max_disc < route_tol and max_horiz < tol.diff
    return CheckResult.from_tracker(
        "tension-routes", tracker, passed,
        detail=f"max discrepancy {max_disc:.3e}; max horizontal sff {max_horiz:.3e}",
        extras={"max_discrepancy": max_disc, "max_horizontal_sff": max_horiz,
                "route_tolerance": route_tol})


# -- structural identities of the fundamental tensors -------------------------


def _bracket_projected(fr: PointFrame, part: str, x, y) -> np.ndarray:
    """Coordinate bracket of the two reprojection fields at fr.p."""
    word = "PV" if part == "vertical" else "PH"
    xv, xjac = fr.field(word, x)
    yv, yjac = fr.field(word, y)
    return yjac @ xv - xjac @ yv


def structural_identity_check(frames, rng: np.random.Generator,
                              tol: Tolerances) -> CheckResult:
    """T symmetry, A alternation and bracket form, connection reconstruction,
    and skew-symmetry of T_E and A_E."""
    tracker = ResidualTracker()
    for fr in frames:
        s = fr.require_split()
        verts, horizs = s.vertical, s.horizontal
        # T symmetric on vertical pairs
        for i in range(len(verts)):
            for j in range(i, len(verts)):
                res = fr.gnorm(oneill_t(fr, verts[i], verts[j])
                               - oneill_t(fr, verts[j], verts[i]))
                tracker.add(res, point=fr.p, vectors=(verts[i], verts[j]),
                            label="T symmetry")
        # A alternating and equal to half the vertical bracket part
        for i in range(len(horizs)):
            for j in range(len(horizs)):
                axy = oneill_a(fr, horizs[i], horizs[j])
                res_alt = fr.gnorm(axy + oneill_a(fr, horizs[j], horizs[i]))
                half_bracket = 0.5 * (s.p_v @ _bracket_projected(
                    fr, "horizontal", horizs[i], horizs[j]))
                res_br = fr.gnorm(axy - half_bracket)
                tracker.add(res_alt, point=fr.p, vectors=(horizs[i], horizs[j]),
                            label="A alternation")
                tracker.add(res_br, point=fr.p, vectors=(horizs[i], horizs[j]),
                            label="A bracket form")
        # connection reconstruction through the four decompositions
        for v in verts:
            for w in verts:
                full = fr.cov_field("PV", w, v)
                rhs = oneill_t(fr, v, w) + hat_nabla(fr, v, w)
                tracker.add(fr.gnorm(full - rhs), point=fr.p, vectors=(v, w),
                            label="vertical-vertical reconstruction")
            for h in horizs:
                full = fr.cov_field("PH", h, v)
                rhs = s.p_h @ full + oneill_t(fr, v, h)
                tracker.add(fr.gnorm(full - rhs), point=fr.p, vectors=(v, h),
                            label="vertical-horizontal reconstruction")
        for h in horizs:
            for v in verts:
                full = fr.cov_field("PV", v, h)
                rhs = oneill_a(fr, h, v) + s.p_v @ full
                tracker.add(fr.gnorm(full - rhs), point=fr.p, vectors=(h, v),
                            label="horizontal-vertical reconstruction")
            for h2 in horizs:
                full = fr.cov_field("PH", h2, h)
                rhs = s.p_h @ full + oneill_a(fr, h, h2)
                tracker.add(fr.gnorm(full - rhs), point=fr.p, vectors=(h, h2),
                            label="horizontal-horizontal reconstruction")
        # skew-symmetry of T_E and A_E as operators
        for _ in range(4):
            e = rng.standard_normal(fr.m)
            f1 = rng.standard_normal(fr.m)
            f2 = rng.standard_normal(fr.m)
            res_t = abs(inner(fr.g, oneill_t(fr, e, f1), f2)
                        + inner(fr.g, f1, oneill_t(fr, e, f2)))
            res_a = abs(inner(fr.g, oneill_a(fr, e, f1), f2)
                        + inner(fr.g, f1, oneill_a(fr, e, f2)))
            tracker.add(res_t, point=fr.p, vectors=(e, f1, f2), label="T skew")
            tracker.add(res_a, point=fr.p, vectors=(e, f1, f2), label="A skew")
    passed = tracker.max < tol.diff
    return CheckResult.from_tracker("structural-identities", tracker, passed)


def phi_omega_identity_check(frames, rng: np.random.Generator,
                             tol: Tolerances) -> CheckResult:
    """Kaehler-conditional identities linking nabla-omega/nabla-phi to T."""
    tracker = ResidualTracker()
    for fr in frames:
        s = fr.require_split()
        verts = s.vertical
        pair_list = [(x, y) for x in verts for y in verts]
        pair_list += [(random_vertical(fr, rng), random_vertical(fr, rng))
                      for _ in range(4)]
        for x, y in pair_list:
            txy = oneill_t(fr, x, y)
            c_txy = s.p_h @ (fr.jmat @ txy)
            b_txy = s.p_v @ (fr.jmat @ txy)
            res_omega = fr.gnorm(nabla_omega(fr, x, y)
                                 - (c_txy - oneill_t(fr, x, fr.phi(y))))
            res_phi = fr.gnorm(nabla_phi(fr, x, y)
                               - (b_txy - oneill_t(fr, x, fr.omega(y))))
            tracker.add(res_omega, point=fr.p, vectors=(x, y),
                        label="nabla-omega identity")
            tracker.add(res_phi, point=fr.p, vectors=(x, y),
                        label="nabla-phi identity")
    passed = tracker.max < tol.diff
    return CheckResult.from_tracker("phi-omega-identities", tracker, passed)


# -- harmonicity ---------------------------------------------------------------


def harmonicity_check(frames, theta: float, classification: str,
                      tol: Tolerances, proper: bool) -> CheckResult:
    """With omega parallel, the tension must vanish; for proper slant the
    adapted-frame cancellation of the fiber trace is checked as well."""
    tracker = ResidualTracker()
    max_tau = 0.0
    max_cancel = 0.0
    for fr in frames:
        g2, _ = fr.base_data
        tv = _tension(fr)
        res = norm(g2, tv.general_route)
        max_tau = max(max_tau, res)
        tracker.add(res, point=fr.p, label="tension norm")
        if proper:
            af = adapted_frame(fr)
            total = np.zeros(fr.n)
            for e, partner in zip(af.e, af.phi_partners):
                total += fr.jac @ (oneill_t(fr, e, e)
                                   + oneill_t(fr, partner, partner))
            res_c = norm(g2, total)
            max_cancel = max(max_cancel, res_c)
            tracker.add(res_c, point=fr.p, label="adapted-frame cancellation")
    passed = tracker.max < tol.diff
    detail = f"max ||tension|| {max_tau:.3e}"
    if proper:
        detail += f"; adapted-frame cancellation max {max_cancel:.3e}"
    return CheckResult.from_tracker(
        "harmonicity", tracker, passed, detail=detail,
        extras={"max_tension": max_tau, "max_cancellation": max_cancel,
                "classification": classification, "theta": theta})


def parallel_omega_identity_check(frames, theta: float,
                                  rng: np.random.Generator,
                                  tol: Tolerances) -> CheckResult:
    """Identities satisfied by T when omega is parallel:
    T_{phi X} phi X = -cos^2(theta) T_X X and T_X phi Y = T_Y phi X."""
    tracker = ResidualTracker()
    cos2 = math.cos(theta) ** 2
    for fr in frames:
        s = fr.require_split()
        verts = list(s.vertical)
        singles = verts + [random_vertical(fr, rng) for _ in range(3)]
        for x in singles:
            px = fr.phi(x)
            res = fr.gnorm(oneill_t(fr, px, px) + cos2 * oneill_t(fr, x, x))
            tracker.add(res, point=fr.p, vectors=(x,), label="T phi-square identity")
        pair_list = [(x, y) for x in verts for y in verts]
        pair_list += [(random_vertical(fr, rng), random_vertical(fr, rng))
                      for _ in range(3)]
        for x, y in pair_list:
            res = fr.gnorm(oneill_t(fr, x, fr.phi(y)) - oneill_t(fr, y, fr.phi(x)))
            tracker.add(res, point=fr.p, vectors=(x, y), label="T phi exchange")
    passed = tracker.max < tol.diff
    return CheckResult.from_tracker("parallel-omega-identities", tracker, passed)


# -- foliation and totally geodesic conditions ---------------------------------


def vertical_foliation_residual(fr: PointFrame, x, y, z) -> float:
    """Condition for the fibers to form a totally geodesic foliation:
    g(H nabla_X omega phi Y, Z) = g(H nabla_X omega Y, CZ) + g(T_X omega Y, BZ)."""
    s = fr.require_split()
    jz = fr.jmat @ np.asarray(z, dtype=float)
    bz, cz = s.p_v @ jz, s.p_h @ jz
    lhs = inner(fr.g, s.p_h @ fr.cov_field("PH@J@PV@J@PV", y, x), z)
    rhs1 = inner(fr.g, s.p_h @ fr.cov_field("PH@J@PV", y, x), cz)
    rhs2 = inner(fr.g, oneill_t(fr, x, fr.omega(y)), bz)
    return abs(lhs - rhs1 - rhs2)


def _vertical_direct(fr: PointFrame, x, y) -> float:
    """Direct total-geodesy of the fibers: horizontal part of nabla_X Y."""
    s = fr.require_split()
    return fr.gnorm(s.p_h @ fr.cov_field("PV", y, x))


def horizontal_foliation_residual(fr: PointFrame, x, z1, z2) -> float:
    """Condition for the horizontal distribution to foliate totally geodesically:
    g(H nabla_Z1 Z2, omega phi X) = g(A_Z1 B Z2 + H nabla_Z1 C Z2, omega X)."""
    s = fr.require_split()
    omega_phi_x = fr.omega(fr.phi(x))
    omega_x = fr.omega(x)
    lhs = inner(fr.g, s.p_h @ fr.cov_field("PH", z2, z1), omega_phi_x)
    bz2 = s.p_v @ (fr.jmat @ np.asarray(z2, dtype=float))
    term = oneill_a(fr, z1, bz2) + s.p_h @ fr.cov_field("PH@J@PH", z2, z1)
    rhs = inner(fr.g, term, omega_x)
    return abs(lhs - rhs)


def _horizontal_direct(fr: PointFrame, z1, z2) -> float:
    s = fr.require_split()
    return fr.gnorm(s.p_v @ fr.cov_field("PH", z2, z1))


def totally_geodesic_residuals(fr: PointFrame, x, y, z1, z2) -> tuple:
    """The two conditions characterizing a totally geodesic map."""
    s = fr.require_split()
    cond1 = vertical_foliation_residual(fr, x, y, z1)
    omega_phi_field = "PH@J@PV@J@PV"
    bz2 = s.p_v @ (fr.jmat @ np.asarray(z2, dtype=float))
    term = oneill_a(fr, z1, bz2) + s.p_h @ fr.cov_field("PH@J@PH", z2, z1)
    lhs = inner(fr.g, term, fr.omega(x))
    rhs = -inner(fr.g, s.p_h @ fr.cov_field(omega_phi_field, x, z1), z2)
    cond2 = abs(lhs - rhs)
    return cond1, cond2


def vertical_foliation_check(frames, rng: np.random.Generator,
                             tol: Tolerances) -> CheckResult:
    tracker = ResidualTracker()
    direct_max = 0.0
    for fr in frames:
        s = fr.require_split()
        for x in s.vertical:
            for y in s.vertical:
                direct_max = max(direct_max, _vertical_direct(fr, x, y))
                for z in s.horizontal:
                    res = vertical_foliation_residual(fr, x, y, z)
                    tracker.add(res, point=fr.p, vectors=(x, y, z))
        for _ in range(8):
            x = random_vertical(fr, rng)
            y = random_vertical(fr, rng)
            z = s.horizontal[rng.integers(len(s.horizontal))]
            tracker.add(vertical_foliation_residual(fr, x, y, z),
                        point=fr.p, vectors=(x, y, z), label="random smoke")
    cond_holds = tracker.max < tol.diff
    direct_holds = direct_max < tol.diff
    passed = cond_holds == direct_holds
    detail = (f"condition {'holds' if cond_holds else 'violated'}; "
              f"direct total-geodesy {'holds' if direct_holds else 'violated'}")
    return CheckResult.from_tracker(
        "vertical-foliation", tracker, passed, detail=detail,
        extras={"condition_holds": cond_holds, "direct_holds": direct_holds,
                "direct_max": direct_max})


def horizontal_foliation_check(frames, rng: np.random.Generator,
                               tol: Tolerances) -> CheckResult:
    tracker = ResidualTracker()
    direct_max = 0.0
    for fr in frames:
        s = fr.require_split()
        for z1 in s.horizontal:
            for z2 in s.horizontal:
                direct_max = max(direct_max, _horizontal_direct(fr, z1, z2))
                for x in s.vertical:
                    res = horizontal_foliation_residual(fr, x, z1, z2)
                    tracker.add(res, point=fr.p, vectors=(x, z1, z2))
        for _ in range(8):
            x = random_vertical(fr, rng)
            i = rng.integers(len(s.horizontal))
            j = rng.integers(len(s.horizontal))
            tracker.add(horizontal_foliation_residual(
                fr, x, s.horizontal[i], s.horizontal[j]),
                point=fr.p, vectors=(x,), label="random smoke")
    cond_holds = tracker.max < tol.diff
    direct_holds = direct_max < tol.diff
    passed = cond_holds == direct_holds
    detail = (f"condition {'holds' if cond_holds else 'violated'}; "
              f"direct total-geodesy {'holds' if direct_holds else 'violated'}")
    return CheckResult.from_tracker(
        "horizontal-foliation", tracker, passed, detail=detail,
        extras={"condition_holds": cond_holds, "direct_holds": direct_holds,
                "direct_max": direct_max})


def totally_geodesic_check(frames, rng: np.random.Generator,
                           tol: Tolerances) -> CheckResult:
    tracker = ResidualTracker()
    direct_max = 0.0
    for fr in frames:
        s = fr.require_split()
        g2, _ = fr.base_data
        for x in s.vertical:
            for y in s.vertical:
                for z1 in s.horizontal:
                    c1, _ = totally_geodesic_residuals(fr, x, y, z1, s.horizontal[0])
                    tracker.add(c1, point=fr.p, vectors=(x, y, z1),
                                label="vertical-argument condition")
            for z1 in s.horizontal:
                for z2 in s.horizontal:
                    _, c2 = totally_geodesic_residuals(fr, x, s.vertical[0], z1, z2)
                    tracker.add(c2, point=fr.p, vectors=(x, z1, z2),
                                label="horizontal-argument condition")
        # direct: sff over all splitting-basis pairs plus random tangent pairs
        basis = np.vstack([s.vertical, s.horizontal])
        for e1 in basis:
            for e2 in basis:
                direct_max = max(direct_max, norm(g2, _sff_const(fr, e1, e2)))
        for _ in range(8):
            e1 = rng.standard_normal(fr.m)
            e2 = rng.standard_normal(fr.m)
            direct_max = max(direct_max, norm(g2, _sff_const(fr, e1, e2)))
    cond_holds = tracker.max < tol.diff
    direct_holds = direct_max < tol.diff
    passed = cond_holds == direct_holds
    detail = (f"conditions {'hold' if cond_holds else 'violated'}; "
              f"direct ||sff|| {'vanishes' if direct_holds else 'is nonzero'}")
    return CheckResult.from_tracker(
        "totally-geodesic", tracker, passed, detail=detail,
        extras={"condition_holds": cond_holds, "direct_holds": direct_holds,
                "direct_max": direct_max})


def product_condition_check(vertical_result: CheckResult,
                            horizontal_result: CheckResult,
                            tol: Tolerances) -> CheckResult:
    """Both foliation conditions together (pointwise product criterion)."""
    both_cond = (vertical_result.extras.get("condition_holds", False)
                 and horizontal_result.extras.get("condition_holds", False))
    both_direct = (vertical_result.extras.get("direct_holds", False)
                   and horizontal_result.extras.get("direct_holds", False))
    res_max = max(vertical_result.residual_max or 0.0,
                  horizontal_result.residual_max or 0.0)
    passed = both_cond == both_direct
    witness = (vertical_result.witness
               if (vertical_result.residual_max or 0.0)
               >= (horizontal_result.residual_max or 0.0)
               else horizontal_result.witness)
    return CheckResult(
        name="product-structure",
        status=PASS if passed else FAIL,
        residual_max=res_max,
        residual_mean=0.5 * ((vertical_result.residual_mean or 0.0)
                             + (horizontal_result.residual_mean or 0.0)),
        count=vertical_result.count + horizontal_result.count,
        witness=witness,
        detail=("both foliations totally geodesic (pointwise)" if both_cond
                else "at least one foliation condition is violated"),
        extras={"both_conditions_hold": both_cond,
                "both_direct_hold": both_direct},
    )
