"""Value objects shared by the sigma-lagrangian modules.

The classes here carry the results of pointwise evaluations (frames, curvature
coefficients), the parameters and states of the Hamiltonian-stationary ODE, phase
integrals, verification reports, meshes and the run configuration. They are plain
dataclasses; the ones read from configuration expose ``from_dict`` and the ones written
to reports expose ``to_dict``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from sigma_lagrangian.exceptions import ArtifactIOError, ValidationError

logger = logging.getLogger(__name__)


def _as_vector(value: Any, name: str) -> np.ndarray:
    array = np.array(value, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional vector")
    return array


@dataclass(frozen=True)
class ProfileState:
    """Pointwise state of a profile curve gamma(s) = r(s) exp(i phi(s)).

    :ivar s: Arclength parameter.
    :type s: float
    :ivar r: Radius of the spherical leaf.
    :type r: float
    :ivar phi: Phase angle.
    :type phi: float
    :ivar theta: Tangent angle, ``theta = phi + alpha``.
    :type theta: float
    :ivar alpha: Angle between tangent and radial direction.
    :type alpha: float
    :ivar k: Curvature ``d theta / ds``.
    :type k: float
    :ivar dr: First derivative of r (equals ``cos alpha`` at unit speed).
    :type dr: float
    :ivar dphi: First derivative of phi (equals ``sin alpha / r`` at unit speed).
    :type dphi: float
    :ivar dk: Derivative of the curvature, NaN when the curve has no third jet.
    :type dk: float
    """

    s: float
    r: float
    phi: float
    theta: float
    alpha: float
    k: float
    dr: float
    dphi: float
    dk: float = math.nan

    @property
    def dalpha(self) -> float:
        """Derivative of alpha, ``k - sin(alpha) / r``."""
        return self.k - math.sin(self.alpha) / self.r


@dataclass(frozen=True, eq=False)
class ComplexPoint:
    """Point or vector of C^n stored as real and imaginary parts.

    The complex structure acts as ``J(re, im) = (-im, re)`` and the symplectic form is
    ``omega(u, v) = Im sum(conj(u) v)``.
    """

    re: np.ndarray
    im: np.ndarray

    @classmethod
    def from_complex(cls, z: Any) -> "ComplexPoint":
        """Build from a complex array."""
        values = np.asarray(z, dtype=complex)
        return cls(re=values.real.copy(), im=values.imag.copy())

    @classmethod
    def from_real(cls, vector: Any) -> "ComplexPoint":
        """Build from a real 2n-vector laid out as ``(re, im)``."""
        values = _as_vector(vector, "vector")
        if values.size % 2:
            raise ValueError("A real vector of C^n must have even length")
        half = values.size // 2
        return cls(re=values[:half].copy(), im=values[half:].copy())

    @property
    def n(self) -> int:
        """Complex dimension."""
        return int(self.re.size)

    def as_complex(self) -> np.ndarray:
        """Return the point as a complex array."""
        return self.re + 1j * self.im

    def as_real(self) -> np.ndarray:
        """Return the point as the real 2n-vector ``(re, im)``."""
        return np.concatenate([self.re, self.im])

    def J(self) -> "ComplexPoint":
        """Apply the complex structure (multiplication by i)."""
        return ComplexPoint(re=-self.im, im=self.re.copy())

    def inner(self, other: "ComplexPoint") -> float:
        """Real Euclidean inner product on R^{2n}."""
        return float(self.re @ other.re + self.im @ other.im)

    def omega(self, other: "ComplexPoint") -> float:
        """Symplectic pairing with ``other``."""
        return float(self.re @ other.im - self.im @ other.re)

    def norm(self) -> float:
        """Euclidean norm."""
        return math.sqrt(self.inner(self))

    def __add__(self, other: "ComplexPoint") -> "ComplexPoint":
        return ComplexPoint(re=self.re + other.re, im=self.im + other.im)

    def __sub__(self, other: "ComplexPoint") -> "ComplexPoint":
        return ComplexPoint(re=self.re - other.re, im=self.im - other.im)

    def __mul__(self, scalar: float) -> "ComplexPoint":
        return ComplexPoint(re=scalar * self.re, im=scalar * self.im)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SphereDirection:
    """Unit vector x of the sphere S^{n-1}."""

    x: np.ndarray

    def __post_init__(self) -> None:
        vector = _as_vector(self.x, "x")
        if abs(float(np.linalg.norm(vector)) - 1.0) > 1e-12:
            raise ValidationError("Sphere direction must have unit length")
        object.__setattr__(self, "x", vector)

    @property
    def n(self) -> int:
        """Dimension of the ambient R^n."""
        return int(self.x.size)


@dataclass(frozen=True, eq=False)
class TangentFrame:
    """Orthonormal completion ``(x, v_2, ..., v_n)`` of a sphere direction.

    :ivar x: The sphere direction.
    :type x: SphereDirection
    :ivar v: Array of shape ``(n - 1, n)`` whose rows span the tangent space at x.
    :type v: np.ndarray
    """

    x: SphereDirection
    v: np.ndarray

    def basis(self) -> np.ndarray:
        """Return the ``n x n`` matrix whose rows are ``x, v_2, ..., v_n``."""
        return np.vstack([self.x.x, self.v])


@dataclass(frozen=True, eq=False)
class FrameData:
    """Induced metric and orthonormal frame at a point (s, x).

    Metric components are taken in the basis ``(d/ds, v_2, ..., v_n)``. The frame is
    ``e_1 = A d/ds + sum B_j v_j`` and ``e_j = v_j / r``; A and B_j are ``None`` when
    only the metric part was requested.

    :ivar g11: Component ``g(d/ds, d/ds)``.
    :type g11: float
    :ivar g1j: Components ``g(d/ds, v_j)``.
    :type g1j: np.ndarray
    :ivar gjj: Diagonal value ``g(v_j, v_j) = r^2``.
    :type gjj: float
    :ivar r: Leaf radius at s.
    :type r: float
    :ivar ell_s: Pushforward of ``d/ds``.
    :type ell_s: ComplexPoint
    :ivar ell_v: Pushforwards of the ``v_j``.
    :type ell_v: List[ComplexPoint]
    :ivar A: Frame coefficient A.
    :type A: Optional[float]
    :ivar Bj: Frame coefficients B_j.
    :type Bj: Optional[np.ndarray]
    """

    g11: float
    g1j: np.ndarray
    gjj: float
    r: float
    ell_s: ComplexPoint
    ell_v: List[ComplexPoint]
    A: Optional[float] = None
    Bj: Optional[np.ndarray] = None

    def metric_matrix(self) -> np.ndarray:
        """Return the full ``n x n`` metric matrix."""
        size = self.g1j.size + 1
        metric = np.eye(size) * self.gjj
        metric[0, 0] = self.g11
        metric[0, 1:] = self.g1j
        metric[1:, 0] = self.g1j
        return metric

    def frame_coefficients(self) -> np.ndarray:
        """Return the rows ``e_a`` expressed in the basis ``(d/ds, v_j)``."""
        if self.A is None or self.Bj is None:
            raise ValueError("Frame coefficients were not computed for this point")
        size = self.g1j.size + 1
        frame = np.zeros((size, size))
        frame[0, 0] = self.A
        frame[0, 1:] = self.Bj
        frame[1:, 1:] = np.eye(size - 1) / self.r
        return frame

    def orthonormality_defect(self) -> float:
        """Return ``max |g(e_a, e_b) - delta_ab|``."""
        frame = self.frame_coefficients()
        gram = frame @ self.metric_matrix() @ frame.T
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))

    def pushforward_frame(self) -> List[ComplexPoint]:
        """Return the pushforwards ``ell_* e_a`` of the orthonormal frame."""
        if self.A is None or self.Bj is None:
            raise ValueError("Frame coefficients were not computed for this point")
        first = self.ell_s * self.A
        for coefficient, pushed in zip(self.Bj, self.ell_v):
            first = first + pushed * float(coefficient)
        return [first] + [pushed * (1.0 / self.r) for pushed in self.ell_v]


@dataclass(frozen=True, eq=False)
class CurvatureData:
    """Curvature scalar, mean-curvature coefficients and the Laplacian polynomial.

    ``n J H = a ell_* e_1 + sum a_j ell_* e_j``; ``f`` is the value of ``A^-6 Delta
    beta`` and ``blocks`` its four summands.
    """

    B: float
    A: float
    a: Optional[float] = None
    aj: Optional[np.ndarray] = None
    f: Optional[float] = None
    blocks: Optional[Tuple[float, float, float, float]] = None

    @property
    def delta_beta(self) -> float:
        """Laplacian of the Lagrangian angle, ``A^6 f``."""
        if self.f is None:
            raise ValueError("The Laplacian polynomial was not evaluated")
        return self.A**6 * self.f

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain Python types."""
        data: Dict[str, Any] = {"B": self.B, "A": self.A}
        if self.a is not None:
            data["a"] = self.a
        if self.aj is not None:
            data["aj"] = [float(value) for value in self.aj]
        if self.f is not None:
            data["f"] = self.f
            data["delta_beta"] = self.delta_beta
        if self.blocks is not None:
            data["blocks"] = list(self.blocks)
        return data


@dataclass(frozen=True)
class HSParams:
    """Parameters of the Hamiltonian-stationary profile ODE.

    :ivar n: Half-dimension of the ambient space, at least 3.
    :type n: int
    :ivar C: Flux constant ``r^{n-1}(n phi' + alpha')``.
    :type C: float
    """

    n: int
    C: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"n: must be an integer >= 3, got {self.n!r}")
        if not math.isfinite(self.C):
            raise ValidationError(f"C: must be finite, got {self.C!r}")

    def normalized(self) -> Tuple["HSParams", bool]:
        """Return parameters with ``C >= 0`` and whether an s-reversal was applied."""
        if self.C < 0:
            return HSParams(n=self.n, C=-self.C), True
        return self, False

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "HSParams":
        """Create HSParams from a dictionary with keys ``n`` and ``C``."""
        if isinstance(data, dict):
            return cls(n=int(data["n"]), C=float(data["C"]))
        raise ValueError("Invalid input data. Expected a dictionary.")


@dataclass(frozen=True)
class HSState:
    """Phase-plane state ``(alpha, r)`` of the profile ODE."""

    alpha: float
    r: float

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "HSState":
        """Create an HSState from a dictionary with keys ``alpha`` and ``r``."""
        if isinstance(data, dict):
            return cls(alpha=float(data["alpha"]), r=float(data["r"]))
        raise ValueError("Invalid input data. Expected a dictionary.")


class EnergyTag(str, Enum):
    """Orbit classes of the phase portrait."""

    FIXED_POINT = "FixedPoint"
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"
    CRITICAL = "Critical"


@dataclass(frozen=True)
class EnergyClass:
    """Classification of an energy level (or of a state on it).

    :ivar tag: Class of the level.
    :type tag: EnergyTag
    :ivar energy: The energy that was classified.
    :type energy: float
    :ivar E0: Energy of the fixed point.
    :type E0: float
    :ivar components: Orbit types present on the level; for E in (E0, 0) these are the
        bounded type III and the unbounded type I components.
    :type components: Tuple[EnergyTag, ...]
    :ivar piece: ``"bounded"`` or ``"unbounded"`` when a state pinned the component.
    :type piece: Optional[str]
    :ivar asymptotic: Whether a critical state lies within 1e-6 of the fixed point.
    :type asymptotic: bool
    """

    tag: EnergyTag
    energy: float
    E0: float
    components: Tuple[EnergyTag, ...]
    piece: Optional[str] = None
    asymptotic: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain Python types."""
        return {
            "tag": self.tag.value,
            "energy": self.energy,
            "E0": self.E0,
            "components": [component.value for component in self.components],
            "piece": self.piece,
            "asymptotic": self.asymptotic,
        }


@dataclass(frozen=True)
class PhaseResult:
    """Total variation of phase along an orbit, or a divergence marker.

    :ivar value: Phase variation in radians, ``inf`` when divergent.
    :type value: float
    :ivar error_estimate: Accumulated quadrature error estimate.
    :type error_estimate: float
    :ivar divergent: Whether the integral diverges.
    :type divergent: bool
    :ivar plus: Positive contribution, when the orbit splits into pieces.
    :type plus: Optional[float]
    :ivar minus: Negative contribution, when the orbit splits into pieces.
    :type minus: Optional[float]
    :ivar reason: Why divergence was declared.
    :type reason: Optional[str]
    """

    value: float
    error_estimate: float
    divergent: bool = False
    plus: Optional[float] = None
    minus: Optional[float] = None
    reason: Optional[str] = None

    @classmethod
    def divergence(
        cls, reason: str, minus: Optional[float] = None
    ) -> "PhaseResult":
        """Return a divergence marker."""
        return cls(
            value=math.inf,
            error_estimate=math.inf,
            divergent=True,
            plus=math.inf if minus is not None else None,
            minus=minus,
            reason=reason,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain Python types."""
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "divergent": self.divergent,
            "plus": self.plus,
            "minus": self.minus,
            "reason": self.reason,
        }


class Family(str, Enum):
    """Families of Hamiltonian-stationary sphere-foliated immersions."""

    STANDARD_EMBEDDING = "StandardEmbedding"
    BOUNDED_SPIRALOID = "BoundedSpiraloid"
    UNBOUNDED_SPIRALOID = "UnboundedSpiraloid"
    CATENOID_TYPE = "CatenoidType"
    CLOSED_NON_STANDARD = "ClosedNonStandard"


@dataclass(frozen=True)
class CatalogEntry:
    """Catalog classification of a Hamiltonian-stationary solution.

    :ivar family: The family the orbit belongs to.
    :type family: Family
    :ivar energy: Energy of the orbit.
    :type energy: float
    :ivar embedded: Whether the profile curve is embedded, ``None`` when unknown.
    :type embedded: Optional[bool]
    :ivar phi: Total variation of phase.
    :type phi: PhaseResult
    :ivar energy_class: Underlying energy classification.
    :type energy_class: EnergyClass
    :ivar self_intersections: Number of crossings found on the computed span.
    :type self_intersections: int
    :ivar closure: Closure verdict for bounded orbits.
    :type closure: Optional[str]
    """

    family: Family
    energy: float
    embedded: Optional[bool]
    phi: PhaseResult
    energy_class: EnergyClass
    self_intersections: int = 0
    closure: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain Python types."""
        return {
            "family": self.family.value,
            "energy": self.energy,
            "embedded": self.embedded,
            "phi": self.phi.to_dict(),
            "class": self.energy_class.to_dict(),
            "self_intersections": self.self_intersections,
            "closure": self.closure,
        }


@dataclass(frozen=True)
class FDConfig:
    """Finite-difference steps (second-order central schemes)."""

    h_first: float = 1e-5
    h_second: float = 1e-3

    def __post_init__(self) -> None:
        if not 0 < self.h_first < 1e-2:
            raise ValidationError(f"h_first: must lie in (0, 1e-2), got {self.h_first}")
        if not self.h_second > 0:
            raise ValidationError(f"h_second: must be positive, got {self.h_second}")

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "FDConfig":
        """Create an FDConfig from a dictionary."""
        if isinstance(data, dict):
            return cls(
                h_first=float(data.get("h_first", 1e-5)),
                h_second=float(data.get("h_second", 1e-3)),
            )
        raise ValueError("Invalid input data. Expected a dictionary.")


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic low-discrepancy sampling of ``(s, x)`` points.

    :ivar count: Number of points.
    :type count: int
    :ivar seed: Seed of the scrambled Halton sequence.
    :type seed: int
    :ivar margin: Fraction of the domain length kept clear at each end.
    :type margin: float
    """

    count: int = 20
    seed: int = 0
    margin: float = 0.1

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValidationError(f"samples: must be positive, got {self.count}")
        if not 0 <= self.margin < 0.5:
            raise ValidationError(f"margin: must lie in [0, 0.5), got {self.margin}")

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "SamplePlan":
        """Create a SamplePlan from a dictionary."""
        if isinstance(data, dict):
            return cls(
                count=int(data.get("count", 20)),
                seed=int(data.get("seed", 0)),
                margin=float(data.get("margin", 0.1)),
            )
        raise ValueError("Invalid input data. Expected a dictionary.")


@dataclass(frozen=True, eq=False)
class StarInstance:
    """Vector b and symmetric matrix B of the leaf-isotropy condition.

    :ivar b: Vector of R^n.
    :type b: np.ndarray
    :ivar bmat: Symmetric ``n x n`` matrix.
    :type bmat: np.ndarray
    """

    b: np.ndarray
    bmat: np.ndarray

    def __post_init__(self) -> None:
        vector = _as_vector(self.b, "b")
        matrix = np.array(self.bmat, dtype=float)
        if matrix.shape != (vector.size, vector.size):
            raise ValueError("bmat must be a square matrix matching b")
        if np.max(np.abs(matrix - matrix.T), initial=0.0) > 1e-12:
            raise ValidationError("bmat: must be symmetric")
        object.__setattr__(self, "b", vector)
        object.__setattr__(self, "bmat", matrix)

    @property
    def n(self) -> int:
        """Dimension of R^n."""
        return int(self.b.size)

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "StarInstance":
        """Create a StarInstance from a dictionary with keys ``b`` and ``bmat``."""
        if isinstance(data, dict):
            return cls(b=np.array(data["b"]), bmat=np.array(data["bmat"]))
        raise ValueError("Invalid input data. Expected a dictionary.")


@dataclass(frozen=True, eq=False)
class StarVerdict:
    """Outcome of sampling the leaf-isotropy condition."""

    holds: bool
    max_violation: float
    samples: int
    witness: Optional[Tuple[np.ndarray, np.ndarray]] = None


@dataclass(frozen=True)
class ResidualReport:
    """Supremum and root-mean-square of a residual over a sample set.

    :ivar sup_norm: Largest residual.
    :type sup_norm: float
    :ivar rms: Root mean square of the residuals.
    :type rms: float
    :ivar witness: ``(s, x)`` attaining the supremum.
    :type witness: Optional[Tuple[float, Tuple[float, ...]]]
    :ivar samples: Number of evaluated samples.
    :type samples: int
    :ivar skipped: Samples where the residual was undefined.
    :type skipped: int
    """

    sup_norm: float
    rms: float
    witness: Optional[Tuple[float, Tuple[float, ...]]] = None
    samples: int = 0
    skipped: int = 0

    def __post_init__(self) -> None:
        if self.rms > self.sup_norm * (1 + 1e-12) + 1e-300:
            raise ValueError("rms cannot exceed the supremum")

    @classmethod
    def from_values(
        cls,
        values: Sequence[float],
        points: Sequence[Tuple[float, np.ndarray]],
        skipped: int = 0,
    ) -> "ResidualReport":
        """Summarise residual magnitudes evaluated at ``points``."""
        if not values:
            return cls(sup_norm=0.0, rms=0.0, samples=0, skipped=skipped)
        magnitudes = np.abs(np.asarray(values, dtype=float))
        worst = int(np.argmax(magnitudes))
        s, x = points[worst]
        return cls(
            sup_norm=float(magnitudes[worst]),
            rms=float(np.sqrt(np.mean(magnitudes**2))),
            witness=(float(s), tuple(float(c) for c in np.ravel(x))),
            samples=len(values),
            skipped=skipped,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Serialise to plain Python types."""
        return {
            "sup": self.sup_norm,
            "rms": self.rms,
            "witness": (
                None
                if self.witness is None
                else {"s": self.witness[0], "x": list(self.witness[1])}
            ),
            "samples": self.samples,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class CheckResult:
    """One row of a verification report."""

    check: str
    passed: bool
    sup: float
    rms: float
    tol: float
    witness: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        """Serialise using the report field names."""
        return {
            "check": self.check,
            "pass": self.passed,
            "sup": self.sup,
            "rms": self.rms,
            "tol": self.tol,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class ArclengthReport:
    """Largest deviation from unit speed over a set of samples."""

    max_deviation: float
    worst_s: float
    samples: int
    passed: bool


@dataclass(frozen=True)
class LeadingTermFit:
    """Fitted top coefficient of the Laplacian polynomial along a scale ladder.

    :ivar coefficient: Fitted coefficient of t^5.
    :type coefficient: float
    :ivar expected: Closed-form value ``(-n^2 + n + 2) sin(alpha) <w, x>^5 / r^2``.
    :type expected: float
    :ivar relative_error: ``|coefficient - expected| / |expected|``.
    :type relative_error: float
    :ivar fit_residual: Largest fit residual relative to the largest sample.
    :type fit_residual: float
    :ivar condition_number: Condition number of the scaled Vandermonde matrix.
    :type condition_number: float
    """

    coefficient: float
    expected: float
    relative_error: float
    fit_residual: float
    condition_number: float


@dataclass(frozen=True, eq=False)
class FDTangents:
    """Finite-difference tangents ``(ell_s, ell_* v_j)`` as rows of 2n-vectors."""

    vectors: np.ndarray
    one_sided: bool = False

    def as_points(self) -> List[ComplexPoint]:
        """Return the tangent vectors as complex points."""
        return [ComplexPoint.from_real(row) for row in self.vectors]


@dataclass(frozen=True, eq=False)
class OracleCurvature:
    """Mean-curvature coefficients recovered by finite differences.

    :ivar a: Coefficient of ``ell_* e_1`` in ``n J H``.
    :type a: float
    :ivar aj: Coefficients of ``ell_* e_j`` in ``n J H``.
    :type aj: np.ndarray
    :ivar mean_curvature: The mean curvature vector H.
    :type mean_curvature: ComplexPoint
    :ivar symmetry_defect: Largest asymmetry of the tensor ``<h(e_a, e_b), J e_c>``.
    :type symmetry_defect: float
    :ivar frame: Finite-difference orthonormal frame pushforwards.
    :type frame: List[ComplexPoint]
    """

    a: float
    aj: np.ndarray
    mean_curvature: ComplexPoint
    symmetry_defect: float
    frame: List[ComplexPoint] = field(default_factory=list)


@dataclass(frozen=True)
class LaplacianEstimate:
    """Finite-difference Laplace-Beltrami value with its Richardson ingredients."""

    value: float
    coarse: float
    fine: float
    condition: float


@dataclass(frozen=True)
class InflectionReport:
    """Sign changes of the profile curvature along a trajectory."""

    s_values: List[float]
    identically_zero: bool
    max_abs_curvature: float


@dataclass(frozen=True)
class Crossing:
    """Transverse self-intersection ``gamma(s1) = gamma(s2)`` with ``s1 < s2``."""

    s1: float
    s2: float
    point: complex


@dataclass(frozen=True)
class SelfIntersectionReport:
    """Crossings found on a polyline sampling of a profile curve."""

    crossings: List[Crossing]
    resolution: float
    samples: int


@dataclass(frozen=True, eq=False)
class Mesh:
    """Sampled immersion.

    :ivar vertices: Array ``(N, 2n)`` of real coordinates.
    :type vertices: np.ndarray
    :ivar faces: Array ``(F, 3)`` of vertex indices, empty for point tables.
    :type faces: np.ndarray
    :ivar s: Arclength parameter per vertex.
    :type s: np.ndarray
    :ivar beta: Lagrangian angle per vertex (NaN where undefined).
    :type beta: np.ndarray
    """

    vertices: np.ndarray
    faces: np.ndarray
    s: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        count = len(self.vertices)
        if faces.size and (faces.min() < 0 or faces.max() >= count):
            raise ValueError("Face index out of range")
        object.__setattr__(self, "faces", faces)

    @classmethod
    def empty(cls, n: int) -> "Mesh":
        """Return a mesh with no vertices."""
        return cls(
            vertices=np.zeros((0, 2 * n)),
            faces=np.zeros((0, 3), dtype=np.int64),
            s=np.zeros(0),
            beta=np.zeros(0),
        )

    @property
    def dimension(self) -> int:
        """Real dimension 2n of the ambient space."""
        return int(self.vertices.shape[1])


@dataclass(frozen=True, eq=False)
class PhasePortrait:
    """Contour polylines of the first integral in the ``(alpha, r)`` plane.

    :ivar levels: Map from energy level to the polylines, each an ``(m, 2)`` array of
        ``(alpha, r)`` points.
    :type levels: Dict[float, List[np.ndarray]]
    :ivar fixed_point: Fixed point ``(alpha, r)``.
    :type fixed_point: Tuple[float, float]
    :ivar E0: Fixed-point energy.
    :type E0: float
    """

    levels: Dict[float, List[np.ndarray]]
    fixed_point: Tuple[float, float]
    E0: float


_CONFIG_TYPES: Dict[str, Any] = {
    "command": str,
    "preset": str,
    "n": int,
    "C": float,
    "s": float,
    "alpha0": float,
    "r0": float,
    "smax": float,
    "E": float,
    "table": str,
    "tol": float,
    "seed": int,
    "samples": int,
    "s_steps": int,
    "sphere_steps": int,
    "format": str,
    "out": str,
    "log_level": str,
    "lam": float,
}


@dataclass
class RunConfig:
    """Every parameter settable from the command line, with defaults.

    Config files use one ``key=value`` pair per line, keys mirroring the long CLI
    flags. Preset parameters are given as ``param=name=value`` lines and sphere
    directions as comma separated floats.
    """

    command: Optional[str] = None
    preset: str = "standard_circle"
    params: Dict[str, float] = field(default_factory=dict)
    n: int = 3
    C: float = 3.0
    s: float = 0.0
    x: Optional[List[float]] = None
    alpha0: float = math.pi / 2
    r0: float = 1.0
    smax: float = 10.0
    E: Optional[float] = None
    table: Optional[str] = None
    tol: float = 1e-12
    seed: int = 0
    samples: int = 20
    s_steps: int = 16
    sphere_steps: int = 12
    format: str = "ply_ascii"
    out: Optional[str] = None
    log_level: Optional[str] = None
    lam: float = 1.0

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], None]) -> "RunConfig":
        """Create a RunConfig from a mapping of field names to raw values.

        :param data: Mapping whose keys are RunConfig field names (dashes allowed).
        :type data: Dict[str, Any]
        :return: A new RunConfig.
        :rtype: RunConfig
        """
        if not isinstance(data, dict):
            raise ValueError("Invalid input data. Expected a dictionary.")
        known = {f.name for f in fields(cls)}
        values: Dict[str, Any] = {}
        for raw_key, raw_value in data.items():
            key = raw_key.replace("-", "_")
            if key not in known:
                raise ValidationError(f"{raw_key}: unknown configuration key")
            values[key] = _coerce(key, raw_value)
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        """Read a ``key=value`` configuration file."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as error:
            raise ArtifactIOError(str(path), str(error)) from error
        data: Dict[str, Any] = {}
        params: Dict[str, float] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            key, sep, value = stripped.partition("=")
            if not sep:
                raise ValidationError(
                    f"line {number}: expected key=value, got {line!r}"
                )
            key = key.strip()
            if key == "param":
                name, _, param_value = value.partition("=")
                params[name.strip()] = _coerce_float("param", param_value)
            else:
                data[key] = value.strip()
        if params:
            data["params"] = params
        logger.debug("Read %d configuration keys from %s", len(data), path)
        return cls.from_dict(data)

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Return a copy where the non-``None`` overrides replace current values."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in overrides.items():
            if value is None or key not in values:
                continue
            if key == "params":
                values["params"] = {**values["params"], **value}
            else:
                values[key] = value
        return RunConfig(**values)

    def validate(self) -> "RunConfig":
        """Reject invalid combinations, naming the offending field."""
        if self.n < 3:
            raise ValidationError(
                f"n: must be >= 3 (sphere-foliated Lagrangians need n >= 3), "
                f"got {self.n}"
            )
        if self.tol < 1e-12:
            raise ValidationError(f"tol: must be >= 1e-12, got {self.tol}")
        if self.samples < 1:
            raise ValidationError(f"samples: must be positive, got {self.samples}")
        if self.s_steps < 2:
            raise ValidationError(f"s_steps: must be >= 2, got {self.s_steps}")
        if self.sphere_steps < 3:
            raise ValidationError(
                f"sphere_steps: must be >= 3, got {self.sphere_steps}"
            )
        if self.format not in ("ply_ascii", "csv"):
            raise ValidationError(
                f"format: must be ply_ascii or csv, got {self.format}"
            )
        if self.r0 <= 0:
            raise ValidationError(f"r0: must be positive, got {self.r0}")
        if self.x is not None and len(self.x) != self.n:
            raise ValidationError(f"x: expected {self.n} components, got {len(self.x)}")
        return self


def _coerce_float(key: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError) as error:
        raise ValidationError(f"{key}: expected a number, got {value!r}") from error


def _coerce(key: str, value: Any) -> Any:
    if key == "params":
        if not isinstance(value, dict):
            raise ValidationError("params: expected a mapping")
        return {name: _coerce_float(f"param {name}", v) for name, v in value.items()}
    if key == "x":
        if value is None:
            return None
        items = value.split(",") if isinstance(value, str) else list(value)
        return [_coerce_float("x", item) for item in items]
    kind = _CONFIG_TYPES[key]
    if value is None:
        return None
    if kind is float:
        return _coerce_float(key, value)
    if kind is int:
        try:
            return int(value)
        except (TypeError, ValueError) as error:
            raise ValidationError(
                f"{key}: expected an integer, got {value!r}"
            ) from error
    return str(value)
