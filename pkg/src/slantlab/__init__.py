"""slantlab: numerical verification of slant Riemannian submersions.

Given chart-level descriptions of an almost Hermitian total space, a
Riemannian base and a smooth map between them, the toolkit computes the
vertical/horizontal splitting, slant angles, the fundamental tensors of the
submersion, and the tension field, and checks every identity and
equivalence the theory predicts, at deterministic sample points.
"""

__version__ = "0.1.0"

from .config import Region, Tolerances
from .expressions import ScalarField
from .geometry import Chart, HermitianChart
from .manifest import Manifest, ManifestError, load_manifest
from .submersion import SubmersionInstance

__all__ = [
    "__version__", "Region", "Tolerances", "ScalarField", "Chart",
    "HermitianChart", "Manifest", "ManifestError", "load_manifest",
    "SubmersionInstance",
]
