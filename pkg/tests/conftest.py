import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from slantlab.config import Region, Tolerances
from slantlab.expressions import ScalarField
from slantlab.fixtures import load_fixture
from slantlab.geometry import Chart, HermitianChart
from slantlab.submersion import SubmersionInstance

COORDS4 = ("x1", "x2", "x3", "x4")
BASE2 = ("y1", "y2")

STANDARD_J = (
    ("0", "-1", "0", "0"),
    ("1", "0", "0", "0"),
    ("0", "0", "0", "-1"),
    ("0", "0", "1", "0"),
)


def fields(rows, coords, bindings=None):
    return tuple(tuple(ScalarField.from_text(text, coords, bindings or {})
                       for text in row) for row in rows)


def flat_hermitian(coords=COORDS4, j_rows=STANDARD_J):
    chart = Chart.euclidean(coords)
    return HermitianChart(chart, fields(j_rows, coords))


def conformal_chart(coords, factor="exp(2*x1)"):
    m = len(coords)
    rows = [[factor if i == j else "0" for j in range(m)] for i in range(m)]
    return Chart.from_fields(coords, fields(rows, coords))


def make_instance(components, total=None, base=None, region=None,
                  bindings=None, seed=11, tol=None, name="test"):
    total = total or flat_hermitian()
    base = base or Chart.euclidean(BASE2)
    comp_fields = tuple(ScalarField.from_text(c, total.coords, bindings or {})
                        for c in components)
    region = region or Region.from_bounds([-1] * total.dim, [1] * total.dim)
    return SubmersionInstance(total=total, base=base, components=comp_fields,
                              region=region, seed=seed,
                              tol=tol or Tolerances(), name=name)


@pytest.fixture(scope="session")
def inst_pi4():
    """Skew projection with slant angle pi/4 on flat space."""
    return make_instance(["(x1 - x4)/sqrt(2)", "x2"], name="pi4")


@pytest.fixture(scope="session")
def inst_alpha():
    """Rotation projection with slant angle alpha = pi/3."""
    return make_instance(["x1*sin(alpha) - x3*cos(alpha)", "x4"],
                         bindings={"alpha": math.pi / 3}, name="alpha")


@pytest.fixture(scope="session")
def inst_hermitian():
    """Projection with J-invariant fibers (angle 0)."""
    return make_instance(["x1", "x2"], name="hermitian")


@pytest.fixture(scope="session")
def inst_anti():
    """Projection with anti-invariant fibers (angle pi/2)."""
    return make_instance(["x1", "x3"], name="anti")


@pytest.fixture(scope="session")
def inst_curved():
    """Conformally curved, non-Kaehler total space over a matching base.

    The conformal factor depends only on the first coordinate, which the map
    passes through, so the submersion axioms hold while the Kaehler
    condition fails.
    """
    total = HermitianChart(conformal_chart(COORDS4), fields(STANDARD_J, COORDS4))
    base = conformal_chart(BASE2, factor="exp(2*y1)")
    return make_instance(["x1", "x2"], total=total, base=base,
                         region=Region.from_bounds([-0.8] * 4, [0.8] * 4),
                         name="curved")


@pytest.fixture(scope="session")
def inst_curved_flatbase():
    """Same curved total space onto a flat base (S2 fails away from x1=0).

    Used only for pointwise tensor evaluations at the origin, where the two
    metrics agree; the instance is not a Riemannian submersion globally.
    """
    total = HermitianChart(conformal_chart(COORDS4), fields(STANDARD_J, COORDS4))
    return make_instance(["x1", "x2"], total=total, name="curved-flatbase")


@pytest.fixture(scope="session")
def inst_twisted():
    """Flat Kaehler total space with a position-dependent kernel.

    F = (x1 + x2*x3, x2) has full rank everywhere but does not preserve
    horizontal lengths; it exercises nonzero derivatives of the projector
    fields and a point-dependent slant angle.  Its fibers are affine
    planes, so T vanishes and omega stays parallel.
    """
    return make_instance(["x1 + x2*x3", "x2"], name="twisted")


@pytest.fixture(scope="session")
def inst_paraboloid():
    """Flat Kaehler total space with curved (paraboloid) fibers.

    F = (x1 + (x3^2 + x4^2)/2, x2): full rank everywhere, fibers are not
    totally geodesic, so T is nonzero and omega is not parallel.  The
    Kaehler-conditional identities must still hold with nonzero sides.
    """
    return make_instance(["x1 + (x3^2 + x4^2)/2", "x2"], name="paraboloid")


@pytest.fixture(scope="session")
def fixture_manifests():
    overrides = {"points": 50}
    return {name: load_fixture(name, overrides)
            for name in ("hermitian-projection", "anti-invariant", "slant-alpha",
                         "slant-pi4", "curved-non-kahler", "rank-deficient")}


def sample_points(inst, count, seed=123):
    from slantlab.sampling import halton_points
    return halton_points(inst.region, count, seed)
