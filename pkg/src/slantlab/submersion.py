"""Smooth map analysis between charts: splitting, slant data, fundamental tensors.

Core objects
------------

``SubmersionInstance`` bundles the total almost Hermitian chart, the base
chart, the map components, a sampling region, a seed and tolerances.

``PointFrame`` caches everything expensive at one sampled point: metric and
complex-structure values, the map Jacobian, the metric-orthogonal
vertical/horizontal splitting, Christoffel symbols, and jet-valued operator
matrices used to differentiate projector-extended vector fields.

Splitting convention: the kernel of the differential is computed by a
singular value decomposition of the Jacobian pre-whitened by a Cholesky
factor of the metric, so the rank test and the orthonormality are both
metric-correct.  Basis vectors are sign-fixed (largest-magnitude component
made positive) and the horizontal block is ordered by ascending singular
value, making the splitting a deterministic function of the point.

Point vectors are extended to fields by reprojection, V(q) = P(q) v, which
keeps vertical extensions vertical everywhere (this is what makes the
fundamental tensors' algebraic identities hold pointwise).  A second,
"tapered" extension rule multiplies the same field by a scalar that is 1 at
the anchor point with nonzero gradient; tensor-valued operations must give
identical output under both rules, and the test suite checks that they do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import jets
from .config import Region, Tolerances
from .geometry import (Chart, HermitianChart, SingularMetricError,
                       christoffel, inner, norm)
from .report import CheckResult, ResidualTracker

__all__ = [
    "RankDeficientError", "NotVerticalError", "NotHorizontalError",
    "ZeroVectorError", "DegenerateAngleError", "InstanceInconsistentError",
    "Splitting", "PhiOmega", "BC", "SlantReport", "AdaptedFrame",
    "ProjectedVector", "SubmersionInstance", "PointFrame",
    "HERMITIAN", "ANTI_INVARIANT", "PROPER_SLANT", "NOT_SLANT",
]


class RankDeficientError(RuntimeError):
    """The differential drops rank at a point (axiom S1 fails there)."""


class NotVerticalError(ValueError):
    """A vector required to be vertical has a horizontal component."""


class NotHorizontalError(ValueError):
    """A vector required to be horizontal has a vertical component."""


class ZeroVectorError(ValueError):
    """A direction argument must be nonzero."""


class DegenerateAngleError(RuntimeError):
    """Slant angle too close to 0 or pi/2 for secant/cosecant frames."""


class InstanceInconsistentError(RuntimeError):
    """Structural impossibility, e.g. odd vertical dimension with proper slant."""


HERMITIAN = "Hermitian"
ANTI_INVARIANT = "AntiInvariant"
PROPER_SLANT = "ProperSlant"
NOT_SLANT = "NotSlant"


@dataclass(frozen=True)
class Splitting:
    """Metric-orthonormal bases of the vertical and horizontal spaces.

    ``vertical`` has shape (m-n, m) and spans ker dF(p); ``horizontal``
    has shape (n, m).  Rows are vectors.  ``p_v`` and ``p_h`` are the
    metric-orthogonal projector matrices (p_v + p_h = Id exactly).
    """

    point: tuple
    singular_values: tuple
    vertical: np.ndarray
    horizontal: np.ndarray
    p_v: np.ndarray
    p_h: np.ndarray


@dataclass(frozen=True)
class PhiOmega:
    """Vertical and horizontal parts of J applied to a vertical vector."""

    x: np.ndarray
    phi: np.ndarray
    omega: np.ndarray


@dataclass(frozen=True)
class BC:
    """Vertical and horizontal parts of J applied to a horizontal vector."""

    z: np.ndarray
    b: np.ndarray
    c: np.ndarray


@dataclass(frozen=True)
class SlantReport:
    classification: str
    angle: float
    min_angle: float
    max_angle: float
    deviation: float
    count: int
    angles: np.ndarray  # shape (points, directions)
    witness_point: tuple
    witness_vector: tuple


@dataclass(frozen=True)
class AdaptedFrame:
    """Frame {e_i, sec(theta) phi e_i} plus {csc(theta) omega e_i}."""

    theta: float
    e: np.ndarray
    phi_partners: np.ndarray
    omega_frame: np.ndarray
    gram_vertical: np.ndarray
    gram_omega: np.ndarray


def _sign_fix(rows: np.ndarray) -> np.ndarray:
    out = rows.copy()
    for i, row in enumerate(out):
        k = int(np.argmax(np.abs(row)))
        if row[k] < 0:
            out[i] = -row
    return out


def _mgs(rows: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with respect to the metric g."""
    out = []
    for v in rows:
        w = v.astype(float).copy()
        for u in out:
            w -= inner(g, u, w) * u
        nrm = norm(g, w)
        if nrm < 1e-12:
            raise RankDeficientError("degenerate basis during orthonormalization")
        out.append(w / nrm)
    return np.array(out)


class PointFrame:
    """Everything the checks need at one sampled point (lazy where possible)."""

    def __init__(self, inst: "SubmersionInstance", p):
        self.inst = inst
        self.p = np.asarray(p, dtype=float)
        total = inst.total
        self.m = total.dim
        self.n = inst.base.dim
        self.g = total.metric_at(self.p)
        cond = np.linalg.cond(self.g)
        if not np.isfinite(cond) or cond > inst.tol.cond_max:
            raise SingularMetricError(
                f"total metric condition number {cond:.3e} at {self.p.tolist()}")
        try:
            self.chol = np.linalg.cholesky(self.g)
        except np.linalg.LinAlgError as err:
            raise SingularMetricError(
                f"total metric not positive definite at {self.p.tolist()}") from err
        self.g_inv = np.linalg.inv(self.g)
        self.jmat = total.j_at(self.p)
        self.map_jets = [c.jet(self.p) for c in inst.components]
        self.base_point = np.array([jt.value for jt in self.map_jets])
        self.jac = np.array([jt.grad for jt in self.map_jets])
        self._build_splitting()
        self._gammas = None
        self._base = None
        self._ops: dict = {}

    def _build_splitting(self):
        m, n = self.m, self.n
        white = np.linalg.solve(self.chol, self.jac.T).T
        _, s, vt = np.linalg.svd(white, full_matrices=True)
        self.singular_values = s
        self.rank_ok = bool(s[0] > 0.0 and s[-1] > self.inst.tol.rank * s[0])
        self.splitting = None
        if not self.rank_ok:
            return
        vert_w = _sign_fix(vt[n:])
        horiz_w = _sign_fix(vt[:n][::-1])  # ascending singular value
        vertical = np.linalg.solve(self.chol.T, vert_w.T).T
        horizontal = np.linalg.solve(self.chol.T, horiz_w.T).T
        stacked = _mgs(np.vstack([vertical, horizontal]), self.g)
        vertical, horizontal = stacked[: m - n], stacked[m - n:]
        p_v = vertical.T @ vertical @ self.g
        p_h = np.eye(m) - p_v
        self.splitting = Splitting(
            point=tuple(self.p.tolist()),
            singular_values=tuple(float(x) for x in s),
            vertical=vertical,
            horizontal=horizontal,
            p_v=p_v,
            p_h=p_h,
        )

    def require_split(self) -> Splitting:
        if self.splitting is None:
            raise RankDeficientError(
                f"differential rank deficient at {self.p.tolist()}: "
                f"singular values {self.singular_values.tolist()}")
        return self.splitting

    @property
    def gammas(self):
        if self._gammas is None:
            self._gammas = christoffel(self.inst.total.chart, self.p,
                                       cond_max=self.inst.tol.cond_max)
        return self._gammas

    @property
    def base_data(self):
        """(metric, christoffels) of the base chart at the image point."""
        if self._base is None:
            g2 = self.inst.base.metric_at(self.base_point)
            gammas2 = christoffel(self.inst.base, self.base_point,
                                  cond_max=self.inst.tol.cond_max)
            self._base = (g2, gammas2)
        return self._base

    # -- jet-valued operator matrices -------------------------------------

    def op(self, word: str):
        """Jet matrix for an operator word like "PH@J@PV" (cached)."""
        if word in self._ops:
            return self._ops[word]
        if "@" in word:
            parts = word.split("@")
            mat = self.op(parts[0])
            for part in parts[1:]:
                mat = jets.matmul(mat, self.op(part))
        elif word == "G":
            mat = self.inst.total.chart.metric_jets_at(self.p)
        elif word == "Ginv":
            mat = jets.inv(self.op("G"))
        elif word == "J":
            mat = self.inst.total.j_jets_at(self.p)
        elif word == "A":
            zero = np.zeros((self.m, self.m))
            mat = [[jets.Jet2(self.map_jets[a].grad[i],
                              self.map_jets[a].hess[i].copy(), zero)
                    for i in range(self.m)] for a in range(self.n)]
        elif word == "PH":
            a = self.op("A")
            at = jets.transpose(a)
            ginv_at = jets.matmul(self.op("Ginv"), at)
            gram = jets.matmul(a, ginv_at)
            try:
                gram_inv = jets.inv(gram)
            except ZeroDivisionError as err:
                raise RankDeficientError(
                    f"projector field undefined: differential rank deficient "
                    f"at {self.p.tolist()}") from err
            mat = jets.matmul(jets.matmul(ginv_at, gram_inv), a)
        elif word == "PV":
            ph = self.op("PH")
            iden = jets.identity(self.m)
            mat = [[iden[i][j] - ph[i][j] for j in range(self.m)]
                   for i in range(self.m)]
        else:
            raise KeyError(f"unknown operator word {word!r}")
        self._ops[word] = mat
        return mat

    def field(self, word: str, vec, taper: float = 0.0):
        """Value and Jacobian at p of the field q -> Op(q) vec.

        Only values and first derivatives of the jets are read here; the
        tapered variant multiplies by a scalar equal to 1 at p with
        gradient ``taper`` in every coordinate.
        """
        w = jets.matvec(self.op(word), [float(x) for x in vec])
        value = jets.values_of(w)
        jac = jets.jacobian_of(w, self.m)
        if taper:
            jac = jac + taper * np.outer(value, np.ones(self.m))
        return value, jac

    def cov(self, value: np.ndarray, jac: np.ndarray, x) -> np.ndarray:
        """Covariant derivative at p from a field's pointwise (value, jac)."""
        x = np.asarray(x, dtype=float)
        return jac @ x + np.einsum("kij,i,j->k", self.gammas.gamma, x, value)

    def cov_field(self, word: str, vec, x, taper: float = 0.0) -> np.ndarray:
        value, jac = self.field(word, vec, taper)
        return self.cov(value, jac, x)

    # -- pointwise helpers --------------------------------------------------

    def gnorm(self, x) -> float:
        return norm(self.g, x)

    def check_vertical(self, x):
        s = self.require_split()
        if self.gnorm(s.p_h @ x) > self.inst.tol.alg * (1.0 + self.gnorm(x)):
            raise NotVerticalError(f"vector {np.asarray(x).tolist()} is not vertical")

    def check_horizontal(self, z):
        s = self.require_split()
        if self.gnorm(s.p_v @ z) > self.inst.tol.alg * (1.0 + self.gnorm(z)):
            raise NotHorizontalError(f"vector {np.asarray(z).tolist()} is not horizontal")

    def phi(self, x) -> np.ndarray:
        s = self.require_split()
        return s.p_v @ (self.jmat @ np.asarray(x, dtype=float))

    def omega(self, x) -> np.ndarray:
        s = self.require_split()
        return s.p_h @ (self.jmat @ np.asarray(x, dtype=float))

    def slant_angle(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.gnorm(x) == 0.0:
            raise ZeroVectorError("slant angle of the zero vector is undefined")
        self.check_vertical(x)
        jx = self.jmat @ x
        denom = self.gnorm(jx)
        ratio = min(self.gnorm(self.require_split().p_v @ jx) / denom, 1.0)
        return math.acos(ratio)

    def phi_matrix(self) -> np.ndarray:
        """phi restricted to the vertical space, in the splitting basis."""
        s = self.require_split()
        k = self.m - self.n
        out = np.empty((k, k))
        for j in range(k):
            image = self.phi(s.vertical[j])
            for i in range(k):
                out[i, j] = inner(self.g, s.vertical[i], image)
        return out


class _TaperedField:
    """Internal: reprojection field with optional anchored taper factor."""

    def __init__(self, inst, coeffs, part: str, anchor=None, taper: float = 0.0):
        self.inst = inst
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.part = part
        self.anchor = None if anchor is None else np.asarray(anchor, dtype=float)
        self.taper = float(taper)

    def _word(self) -> str:
        return "PV" if self.part == "vertical" else "PH"

    def _factor(self, q: np.ndarray) -> float:
        if self.anchor is None or self.taper == 0.0:
            return 1.0
        return 1.0 + self.taper * float(np.sum(q - self.anchor))

    def value(self, q) -> np.ndarray:
        fr = self.inst.frame(q)
        s = fr.require_split()
        proj = s.p_v if self.part == "vertical" else s.p_h
        return self._factor(np.asarray(q, dtype=float)) * (proj @ self.coeffs)

    def value_and_jacobian(self, q):
        fr = self.inst.frame(q)
        base_value, base_jac = fr.field(self._word(), self.coeffs)
        q = np.asarray(q, dtype=float)
        f = self._factor(q)
        if self.taper == 0.0 or self.anchor is None:
            return base_value, base_jac
        jac = f * base_jac + self.taper * np.outer(base_value, np.ones(fr.m))
        return f * base_value, jac


class ProjectedVector(_TaperedField):
    """Point vector extended by pointwise reprojection: V(q) = P(q) v."""


@dataclass(frozen=True, eq=False)
class SubmersionInstance:
    """A map between charts plus sampling region, seed and tolerances."""

    total: HermitianChart
    base: Chart
    components: tuple
    region: Region
    seed: int = 0
    tol: Tolerances = dc_field(default_factory=Tolerances)
    name: str = "instance"

    def __post_init__(self):
        if self.base.dim >= self.total.dim:
            raise ValueError("base dimension must be smaller than total dimension")
        if len(self.components) != self.base.dim:
            raise ValueError("one map component per base coordinate required")
        if self.region.dim != self.total.dim:
            raise ValueError("region dimension must match the total chart")

    # -- basics ---------------------------------------------------------

    def map_at(self, p) -> np.ndarray:
        return np.array([c.eval(p) for c in self.components])

    def jacobian_at(self, p) -> np.ndarray:
        return np.array([c.jet(p).grad for c in self.components])

    def pushforward(self, p, x) -> np.ndarray:
        return self.jacobian_at(p) @ np.asarray(x, dtype=float)

    def frame(self, p) -> PointFrame:
        return PointFrame(self, p)

    def frames(self, points) -> list:
        return [self.frame(p) for p in points]

    def split(self, p) -> Splitting:
        return self.frame(p).require_split()

    # -- extensions -------------------------------------------------------

    def vertical_extension(self, p, v, taper: float = 0.0) -> ProjectedVector:
        self.frame(p).check_vertical(v)
        return ProjectedVector(self, v, "vertical", anchor=p, taper=taper)

    def horizontal_extension(self, p, z, taper: float = 0.0) -> ProjectedVector:
        self.frame(p).check_horizontal(z)
        return ProjectedVector(self, z, "horizontal", anchor=p, taper=taper)

    # -- pointwise decompositions ------------------------------------------

    def phi_omega(self, p, x) -> PhiOmega:
        fr = self.frame(p)
        fr.check_vertical(x)
        return PhiOmega(np.asarray(x, dtype=float), fr.phi(x), fr.omega(x))

    def b_c(self, p, z) -> BC:
        fr = self.frame(p)
        fr.check_horizontal(z)
        s = fr.require_split()
        jz = fr.jmat @ np.asarray(z, dtype=float)
        return BC(np.asarray(z, dtype=float), s.p_v @ jz, s.p_h @ jz)

    def slant_angle(self, p, x) -> float:
        return self.frame(p).slant_angle(x)

    # -- fundamental tensors -------------------------------------------------

    def oneill_t(self, p, e, w, taper: float = 0.0) -> np.ndarray:
        return oneill_t(self.frame(p), e, w, taper)

    def oneill_a(self, p, e, w, taper: float = 0.0) -> np.ndarray:
        return oneill_a(self.frame(p), e, w, taper)

    def nabla_omega(self, p, x, y, taper: float = 0.0) -> np.ndarray:
        return nabla_omega(self.frame(p), x, y, taper)

    def nabla_phi(self, p, x, y, taper: float = 0.0) -> np.ndarray:
        return nabla_phi(self.frame(p), x, y, taper)

    def adapted_frame(self, p) -> AdaptedFrame:
        return adapted_frame(self.frame(p))

    # -- scans ---------------------------------------------------------------

    def slant_scan(self, points, directions: int,
                   rng: np.random.Generator | None = None) -> SlantReport:
        return slant_scan(self.frames(points), directions,
                          rng or np.random.default_rng(self.seed), self.tol)


# -- frame-level tensor operations (reused by the suite runner) --------------


def oneill_t(fr: PointFrame, e, w, taper: float = 0.0) -> np.ndarray:
    """T_E W = H nabla_{VE} (VW) + V nabla_{VE} (HW) with reprojection fields."""
    s = fr.require_split()
    ve = s.p_v @ np.asarray(e, dtype=float)
    vw = s.p_v @ np.asarray(w, dtype=float)
    hw = s.p_h @ np.asarray(w, dtype=float)
    d_vw = fr.cov_field("PV", vw, ve, taper)
    d_hw = fr.cov_field("PH", hw, ve, taper)
    return s.p_h @ d_vw + s.p_v @ d_hw


def oneill_a(fr: PointFrame, e, w, taper: float = 0.0) -> np.ndarray:
    """A_E W = H nabla_{HE} (VW) + V nabla_{HE} (HW) with reprojection fields."""
    s = fr.require_split()
    he = s.p_h @ np.asarray(e, dtype=float)
    vw = s.p_v @ np.asarray(w, dtype=float)
    hw = s.p_h @ np.asarray(w, dtype=float)
    d_vw = fr.cov_field("PV", vw, he, taper)
    d_hw = fr.cov_field("PH", hw, he, taper)
    return s.p_h @ d_vw + s.p_v @ d_hw


def hat_nabla(fr: PointFrame, x, y, taper: float = 0.0) -> np.ndarray:
    """Fiber connection: vertical part of nabla_X (vertical extension of Y)."""
    s = fr.require_split()
    return s.p_v @ fr.cov_field("PV", y, x, taper)


def nabla_omega(fr: PointFrame, x, y, taper: float = 0.0) -> np.ndarray:
    """(nabla_X omega) Y = H nabla_X (omega Y) - omega(hat-nabla_X Y)."""
    fr.check_vertical(x)
    fr.check_vertical(y)
    s = fr.require_split()
    t1 = s.p_h @ fr.cov_field("PH@J@PV", y, x, taper)
    t2 = s.p_h @ (fr.jmat @ hat_nabla(fr, x, y, taper))
    return t1 - t2


def nabla_phi(fr: PointFrame, x, y, taper: float = 0.0) -> np.ndarray:
    """(nabla_X phi) Y = hat-nabla_X (phi Y) - phi(hat-nabla_X Y)."""
    fr.check_vertical(x)
    fr.check_vertical(y)
    s = fr.require_split()
    t1 = s.p_v @ fr.cov_field("PV@J@PV", y, x, taper)
    t2 = s.p_v @ (fr.jmat @ hat_nabla(fr, x, y, taper))
    return t1 - t2


def adapted_frame(fr: PointFrame) -> AdaptedFrame:
    """Greedy construction of {e_i, sec(theta) phi e_i} and {csc(theta) omega e_i}."""
    s = fr.require_split()
    tol = fr.inst.tol
    k = fr.m - fr.n
    if k % 2:
        raise InstanceInconsistentError(
            "odd vertical dimension admits no full adapted frame")
    theta = fr.slant_angle(s.vertical[0])
    if theta < tol.angle_guard or theta > math.pi / 2 - tol.angle_guard:
        raise DegenerateAngleError(
            f"slant angle {theta:.6f} too close to 0 or pi/2")
    sec_t = 1.0 / math.cos(theta)
    csc_t = 1.0 / math.sin(theta)
    es, partners, span = [], [], []
    for cand in s.vertical:
        w = cand.copy()
        for u in span:
            w -= inner(fr.g, u, w) * u
        nrm = fr.gnorm(w)
        if nrm < 1e-8:
            continue
        e = w / nrm
        partner = sec_t * fr.phi(e)
        es.append(e)
        partners.append(partner)
        span.extend([e, partner])
        if len(es) == k // 2:
            break
    if len(es) < k // 2:
        raise InstanceInconsistentError(
            "could not complete an adapted frame from the splitting basis")
    es = np.array(es)
    partners = np.array(partners)
    omega_frame = np.array([csc_t * fr.omega(e) for e in es])
    frame_rows = np.empty((k, fr.m))
    frame_rows[0::2] = es
    frame_rows[1::2] = partners
    gram_v = frame_rows @ fr.g @ frame_rows.T
    gram_o = omega_frame @ fr.g @ omega_frame.T
    return AdaptedFrame(theta, es, partners, omega_frame, gram_v, gram_o)


# -- scans (CheckResult producers) -------------------------------------------


def check_axioms(frames, directions: int, rng: np.random.Generator,
                 tol: Tolerances) -> CheckResult:
    """S1: full rank everywhere; S2: horizontal lengths preserved."""
    tracker = ResidualTracker()
    min_ratio = np.inf
    max_s2 = 0.0
    rank_fail = 0
    for fr in frames:
        s_vals = fr.singular_values
        ratio = float(s_vals[-1] / s_vals[0]) if s_vals[0] > 0 else 0.0
        min_ratio = min(min_ratio, ratio)
        if not fr.rank_ok:
            rank_fail += 1
            tracker.add(1.0, point=fr.p, label="rank deficiency")
            continue
        s = fr.splitting
        g2, _ = fr.base_data
        for _ in range(directions):
            coeffs = rng.standard_normal(fr.n)
            coeffs /= np.linalg.norm(coeffs)
            x = coeffs @ s.horizontal
            fx = fr.jac @ x
            res = abs(norm(g2, fx) - fr.gnorm(x))
            max_s2 = max(max_s2, res)
            tracker.add(res, point=fr.p, vectors=(x,), label="S2 length")
    passed = rank_fail == 0 and max_s2 < tol.alg
    detail = (f"S1 min ratio {min_ratio:.3e}; S2 max {max_s2:.3e}"
              if rank_fail == 0 else
              f"rank deficient at {rank_fail} point(s)")
    return CheckResult.from_tracker(
        "submersion-axioms", tracker, passed, detail=detail,
        extras={"s1_min_ratio": float(min_ratio), "s2_max_residual": max_s2,
                "rank_deficient_points": rank_fail})


def random_vertical(fr: PointFrame, rng: np.random.Generator) -> np.ndarray:
    s = fr.require_split()
    coeffs = rng.standard_normal(fr.m - fr.n)
    coeffs /= np.linalg.norm(coeffs)
    return coeffs @ s.vertical


def slant_scan(frames, directions: int, rng: np.random.Generator,
               tol: Tolerances) -> SlantReport:
    angles = np.empty((len(frames), directions))
    witness = (frames[0].p, np.zeros(frames[0].m))
    extreme = -1.0
    vectors = []
    for i, fr in enumerate(frames):
        row_vectors = []
        for j in range(directions):
            x = random_vertical(fr, rng)
            angles[i, j] = fr.slant_angle(x)
            row_vectors.append(x)
        vectors.append(row_vectors)
    mean = float(np.mean(angles))
    for i, fr in enumerate(frames):
        for j in range(directions):
            dev = abs(angles[i, j] - mean)
            if dev > extreme:
                extreme = dev
                witness = (fr.p, vectors[i][j])
    lo, hi = float(np.min(angles)), float(np.max(angles))
    deviation = hi - lo
    if deviation > tol.angle:
        classification = NOT_SLANT
    elif mean < tol.angle:
        classification = HERMITIAN
    elif abs(mean - math.pi / 2) < tol.angle:
        classification = ANTI_INVARIANT
    else:
        classification = PROPER_SLANT
    return SlantReport(
        classification=classification,
        angle=mean,
        min_angle=lo,
        max_angle=hi,
        deviation=deviation,
        count=angles.size,
        angles=angles,
        witness_point=tuple(witness[0].tolist()),
        witness_vector=tuple(np.asarray(witness[1]).tolist()),
    )


def phi_squared_check(frames, theta: float, tol: Tolerances) -> CheckResult:
    """phi^2 must equal -cos^2(theta) Id on the vertical space."""
    tracker = ResidualTracker()
    lam_expected = -math.cos(theta) ** 2
    eig_all = []
    for fr in frames:
        phi2 = fr.phi_matrix() @ fr.phi_matrix()
        k = phi2.shape[0]
        res = float(np.max(np.abs(phi2 - lam_expected * np.eye(k))))
        eig = np.linalg.eigvalsh(0.5 * (phi2 + phi2.T))
        eig_all.extend(float(x) for x in eig)
        tracker.add(res, point=fr.p, label="phi^2 + cos^2(theta) Id")
    lam_fitted = float(np.mean(eig_all)) if eig_all else float("nan")
    passed = tracker.max < tol.alg
    return CheckResult.from_tracker(
        "phi-squared", tracker, passed,
        detail=f"lambda fitted {lam_fitted:.9f} (expected {lam_expected:.9f})",
        extras={"lambda_fitted": lam_fitted, "lambda_expected": lam_expected,
                "eigenvalue_min": min(eig_all), "eigenvalue_max": max(eig_all)})


def metric_relation_check(frames, pairs: int, theta: float,
                          rng: np.random.Generator, tol: Tolerances) -> CheckResult:
    """g(phi X, phi Y) = cos^2(theta) g(X, Y) and the sine analogue for omega."""
    tracker = ResidualTracker()
    cos2, sin2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    for fr in frames:
        s = fr.require_split()
        k = fr.m - fr.n
        pair_list = [(s.vertical[i], s.vertical[j])
                     for i in range(k) for j in range(i, k)]
        pair_list += [(random_vertical(fr, rng), random_vertical(fr, rng))
                      for _ in range(pairs)]
        for x, y in pair_list:
            gxy = inner(fr.g, x, y)
            res_phi = abs(inner(fr.g, fr.phi(x), fr.phi(y)) - cos2 * gxy)
            res_omega = abs(inner(fr.g, fr.omega(x), fr.omega(y)) - sin2 * gxy)
            tracker.add(res_phi, point=fr.p, vectors=(x, y), label="phi relation")
            tracker.add(res_omega, point=fr.p, vectors=(x, y), label="omega relation")
    passed = tracker.max < tol.alg
    return CheckResult.from_tracker("metric-relations", tracker, passed)


def omega_parallel_scan(frames, pairs: int, rng: np.random.Generator,
                        tol: Tolerances) -> CheckResult:
    """Max of ||(nabla_X omega) Y|| over vertical pairs; parallel iff small."""
    tracker = ResidualTracker()
    for fr in frames:
        s = fr.require_split()
        k = fr.m - fr.n
        pair_list = [(s.vertical[i], s.vertical[j])
                     for i in range(k) for j in range(k)]
        pair_list += [(random_vertical(fr, rng), random_vertical(fr, rng))
                      for _ in range(pairs)]
        for x, y in pair_list:
            res = fr.gnorm(nabla_omega(fr, x, y))
            tracker.add(res, point=fr.p, vectors=(x, y))
    parallel = tracker.max < tol.diff
    result = CheckResult.from_tracker("omega-parallel-scan", tracker, True)
    result.detail = "omega is parallel" if parallel else "omega is not parallel"
    result.extras = {"parallel": parallel}
    return result
