"""Profile curves, center-velocity curves and the foliated immersion data.

A sphere-foliated immersion is described by a planar profile curve
``gamma(s) = r(s) exp(i phi(s))`` parametrised by arclength, a center-velocity curve
``W(s)`` in R^n and a base point ``s0``. Curves are exposed through a uniform jet
interface: presets use closed forms, trajectories of the Hamiltonian-stationary ODE
use the integrator's dense output.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad_vec

from sigma_lagrangian.exceptions import (
    ConstructionError,
    DomainError,
    QuadratureError,
    SingularityError,
    ValidationError,
)
from sigma_lagrangian.hs_dynamics import HSTrajectory
from sigma_lagrangian.models import ArclengthReport, ProfileState

logger = logging.getLogger(__name__)

ARCLENGTH_TOL = 1e-8
CENTER_NODE_SPACING = 0.125

Interval = Tuple[float, float]


@dataclass(frozen=True)
class CurveJet:
    """Radius and phase with their first three arclength derivatives."""

    r: float
    dr: float
    ddr: float
    dddr: float
    phi: float
    dphi: float
    ddphi: float
    dddphi: float

    def speed_defect(self) -> float:
        """Return ``dr^2 + r^2 dphi^2 - 1``."""
        return self.dr**2 + (self.r * self.dphi) ** 2 - 1.0

    def curvature(self) -> Tuple[float, float]:
        """Return the curvature of gamma and its arclength derivative.

        Uses the rotated jet ``P = gamma' exp(-i phi)``, so the formulas hold for any
        regular parametrisation.
        """
        P = complex(self.dr, self.r * self.dphi)
        dP = complex(self.ddr, self.dr * self.dphi + self.r * self.ddphi)
        ddP = complex(
            self.dddr,
            self.ddr * self.dphi + 2 * self.dr * self.ddphi + self.r * self.dddphi,
        )
        Q2 = dP + 1j * self.dphi * P
        Q3 = ddP + 1j * self.ddphi * P + 2j * self.dphi * dP - self.dphi**2 * P
        M = abs(P) ** 2
        if M == 0.0:
            raise SingularityError("curvature of a stationary curve", math.nan)
        N = (P.conjugate() * Q2).imag
        dM = 2 * (P.conjugate() * Q2).real
        k = N / M**1.5
        dk = (P.conjugate() * Q3).imag / M**1.5 - 1.5 * N * dM / M**2.5
        return k, dk


class ProfileCurve:
    """Planar profile curve with C^3 access to r and phi."""

    def __init__(
        self, jet: Callable[[float], CurveJet], domain: Interval, name: str = "curve"
    ) -> None:
        """Wrap a jet evaluator defined on a closed interval.

        :param jet: Callable returning the CurveJet at an arclength parameter.
        :type jet: Callable[[float], CurveJet]
        :param domain: Closed interval ``(s_min, s_max)``.
        :type domain: Tuple[float, float]
        :param name: Label used in tables and logs.
        :type name: str
        """
        lower, upper = float(domain[0]), float(domain[1])
        if not lower <= upper:
            raise ConstructionError(f"Empty curve domain [{lower}, {upper}]")
        self._jet = jet
        self.domain: Interval = (lower, upper)
        self.name = name

    def __repr__(self) -> str:
        return f"ProfileCurve(name={self.name!r}, domain={self.domain!r})"

    def contains(self, s: float) -> bool:
        """Return whether s lies in the closed domain."""
        return self.domain[0] <= s <= self.domain[1]

    def jet(self, s: float) -> CurveJet:
        """Evaluate the jet at s, rejecting parameters outside the domain."""
        if not self.contains(s):
            raise DomainError(s, self.domain)
        return self._jet(float(s))

    @classmethod
    def from_complex(
        cls,
        gamma: Callable[[float], Tuple[complex, complex, complex, complex]],
        domain: Interval,
        name: str = "complex",
    ) -> "ProfileCurve":
        """Build a curve from gamma and its first three derivatives.

        The polar jet follows from logarithmic differentiation, so gamma must not
        vanish on the domain.
        """

        def jet(s: float) -> CurveJet:
            z, dz, ddz, dddz = gamma(s)
            if z == 0:
                raise SingularityError("polar form", s)
            L1 = dz / z
            L2 = ddz / z - L1**2
            L3 = dddz / z - 3 * (ddz / z) * L1 + 2 * L1**3
            r = abs(z)
            u, du, ddu = L1.real, L2.real, L3.real
            return CurveJet(
                r=r,
                dr=r * u,
                ddr=r * (du + u**2),
                dddr=r * (ddu + 3 * du * u + u**3),
                phi=math.atan2(z.imag, z.real),
                dphi=L1.imag,
                ddphi=L2.imag,
                dddphi=L3.imag,
            )

        return cls(jet, domain, name)

    @classmethod
    def circle(
        cls, center: complex, radius: float, domain: Interval = (-math.pi, math.pi)
    ) -> "ProfileCurve":
        """Unit-speed counterclockwise circle ``center + radius exp(i s / radius)``."""
        if radius <= 0:
            raise ConstructionError(f"radius: must be positive, got {radius}")

        def gamma(s: float) -> Tuple[complex, complex, complex, complex]:
            w = np.exp(1j * s / radius)
            return (
                center + radius * w,
                1j * w,
                -w / radius,
                -1j * w / radius**2,
            )

        return cls.from_complex(gamma, domain, name="circle")

    @classmethod
    def segment(
        cls, point: complex, direction: complex, domain: Interval = (-1.0, 1.0)
    ) -> "ProfileCurve":
        """Unit-speed straight line ``point + s direction / |direction|``."""
        if direction == 0:
            raise ConstructionError("direction: must be nonzero")
        unit = direction / abs(direction)
        return cls.from_complex(
            lambda s: (point + s * unit, unit, 0j, 0j), domain, name="segment"
        )


class CenterVelocity:
    """Center-velocity curve ``W(s)`` with its first two derivatives."""

    def __init__(
        self,
        evaluate: Callable[[float], Tuple[np.ndarray, np.ndarray, np.ndarray]],
        n: int,
        domain: Optional[Interval] = None,
        is_zero: bool = False,
    ) -> None:
        """Wrap an evaluator of ``(W, dW, ddW)``; ``domain=None`` means all of R."""
        self._evaluate = evaluate
        self.n = int(n)
        self.domain = domain
        self.is_zero = is_zero

    def __call__(self, s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._evaluate(float(s))

    @classmethod
    def zero(cls, n: int) -> "CenterVelocity":
        """W identically zero (centered immersions)."""
        zeros = np.zeros(n)
        return cls(lambda s: (zeros, zeros, zeros), n, is_zero=True)

    @classmethod
    def constant(cls, w: Sequence[float]) -> "CenterVelocity":
        """Constant center velocity."""
        vector = np.array(w, dtype=float)
        zeros = np.zeros_like(vector)
        if not np.any(vector):
            return cls.zero(vector.size)
        return cls(lambda s: (vector, zeros, zeros), vector.size)

    @classmethod
    def polynomial(cls, coefficients: Any) -> "CenterVelocity":
        """``W(s) = sum_k c_k s^k`` for a ``(degree + 1, n)`` coefficient array."""
        coef = np.array(coefficients, dtype=float)
        if coef.ndim != 2:
            raise ValueError("coefficients must have shape (degree + 1, n)")
        first = npoly.polyder(coef, 1) if len(coef) > 1 else np.zeros_like(coef[:1])
        second = npoly.polyder(coef, 2) if len(coef) > 2 else np.zeros_like(coef[:1])

        def evaluate(s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
            return (
                npoly.polyval(s, coef),
                npoly.polyval(s, first),
                npoly.polyval(s, second),
            )

        return cls(evaluate, coef.shape[1])


@dataclass(frozen=True, eq=False)
class FoliatedSpec:
    """Complete data of a sphere-foliated immersion.

    The immersion is ``l(s, x) = r e^{i phi} x + V(s)`` with the center integral
    ``V(s) = int_{s0}^s e^{i phi} W``. V is not stored; it is integrated on demand and
    cached on grid nodes ``s0 + k * CENTER_NODE_SPACING``. ``center_primitive`` may
    supply V in closed form.

    :ivar n: Complex dimension of the ambient space, at least 3.
    :type n: int
    :ivar curve: The profile curve.
    :type curve: ProfileCurve
    :ivar center: The center-velocity curve.
    :type center: CenterVelocity
    :ivar s0: Base point of the center integral.
    :type s0: float
    :ivar name: Preset name or label.
    :type name: str
    :ivar center_primitive: Optional closed form of V.
    :type center_primitive: Optional[Callable[[float], np.ndarray]]
    """

    n: int
    curve: ProfileCurve
    center: CenterVelocity
    s0: float
    name: str = "custom"
    center_primitive: Optional[Callable[[float], np.ndarray]] = None
    _nodes: Dict[int, np.ndarray] = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False
    )

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 3:
            raise ConstructionError(
                f"n: must be an integer >= 3 (round spheres need n >= 3), got {self.n}"
            )
        if self.center.n != self.n:
            raise ConstructionError(
                f"Center velocity lives in R^{self.center.n}, expected R^{self.n}"
            )
        if self.center.domain is not None and tuple(self.center.domain) != tuple(
            self.curve.domain
        ):
            raise ConstructionError("Curve and center velocity domains differ")
        if not self.curve.contains(self.s0):
            raise ConstructionError(
                f"s0={self.s0} is outside the curve domain {self.curve.domain}"
            )

    @property
    def domain(self) -> Interval:
        """Shared domain of curve and center."""
        return self.curve.domain

    @property
    def centered(self) -> bool:
        """Whether W vanishes identically."""
        return self.center.is_zero

    def _integrand(self, t: float) -> np.ndarray:
        phi = self.curve.jet(t).phi
        w = self.center(t)[0]
        return np.concatenate([math.cos(phi) * w, math.sin(phi) * w])

    def _integrate(self, a: float, b: float) -> np.ndarray:
        if a == b:
            return np.zeros(2 * self.n)
        value, error, info = quad_vec(
            self._integrand, a, b, epsabs=1e-13, epsrel=1e-12, full_output=True
        )
        if not info.success:
            raise QuadratureError(
                f"Center integral on [{a}, {b}] did not converge: {info.message} "
                f"(error estimate {error:.3g})"
            )
        return np.asarray(value, dtype=float)

    def _node_value(self, index: int) -> np.ndarray:
        with self._lock:
            self._nodes.setdefault(0, np.zeros(2 * self.n))
            step = 1 if index > 0 else -1
            k = 0
            while k != index and k + step in self._nodes:
                k += step
            value = self._nodes[k]
            while k != index:
                a = self.s0 + k * CENTER_NODE_SPACING
                value = value + self._integrate(a, a + step * CENTER_NODE_SPACING)
                k += step
                self._nodes[k] = value
            logger.debug(
                "Center integral cache of %s holds %d nodes",
                self.name,
                len(self._nodes),
            )
            return value

    def center_integral(self, s: float) -> np.ndarray:
        """Return ``V(s)`` as a complex n-vector.

        :param s: Arclength parameter in the domain.
        :type s: float
        :return: The center integral at s.
        :rtype: np.ndarray
        """
        if not self.curve.contains(s):
            raise DomainError(s, self.domain)
        if self.center.is_zero:
            return np.zeros(self.n, dtype=complex)
        if self.center_primitive is not None:
            return np.asarray(self.center_primitive(s), dtype=complex)
        index = math.floor((s - self.s0) / CENTER_NODE_SPACING)
        node = self.s0 + index * CENTER_NODE_SPACING
        # below s0 the floor node can fall outside the domain
        if not self.curve.contains(node):
            index += 1
            node += CENTER_NODE_SPACING
        total = self._node_value(index) + self._integrate(node, s)
        return total[: self.n] + 1j * total[self.n :]


def eval_profile(
    curve: ProfileCurve, s: float, need_curvature: bool = True
) -> ProfileState:
    """Evaluate r, phi, theta, alpha, k and the first derivatives at s.

    :param curve: The profile curve.
    :type curve: ProfileCurve
    :param s: Arclength parameter in the domain.
    :type s: float
    :param need_curvature: Whether k is required; if so r = 0 is a singularity.
    :type need_curvature: bool
    :return: The profile state.
    :rtype: ProfileState
    """
    jet = curve.jet(s)
    alpha = math.atan2(jet.r * jet.dphi, jet.dr)
    if jet.r <= 0:
        if need_curvature:
            raise SingularityError("curvature", s)
        k, dk = math.nan, math.nan
    else:
        k, dk = jet.curvature()
    return ProfileState(
        s=float(s),
        r=jet.r,
        phi=jet.phi,
        theta=jet.phi + alpha,
        alpha=alpha,
        k=k,
        dr=jet.dr,
        dphi=jet.dphi,
        dk=dk,
    )


def check_arclength(curve: ProfileCurve, samples: int = 101) -> ArclengthReport:
    """Report the largest deviation from unit speed over evenly spaced samples."""
    if samples < 2:
        raise ValidationError(f"samples: must be >= 2, got {samples}")
    worst, worst_s = 0.0, curve.domain[0]
    for s in np.linspace(curve.domain[0], curve.domain[1], samples):
        deviation = abs(curve.jet(float(s)).speed_defect())
        if deviation > worst:
            worst, worst_s = deviation, float(s)
    passed = worst <= ARCLENGTH_TOL
    if not passed:
        logger.warning(
            "Curve %s violates unit speed: deviation %.3g at s=%.6g",
            curve.name,
            worst,
            worst_s,
        )
    return ArclengthReport(
        max_deviation=worst, worst_s=worst_s, samples=samples, passed=passed
    )


def curve_table(curve: ProfileCurve, samples: int = 201) -> List[Tuple[float, ...]]:
    """Sample rows ``(s, r, phi, alpha, k)`` for CSV export; k is NaN where r = 0."""
    if samples < 1:
        raise ValidationError(f"samples: must be positive, got {samples}")
    rows = []
    for s in np.linspace(curve.domain[0], curve.domain[1], samples):
        state = eval_profile(curve, float(s), need_curvature=False)
        rows.append((state.s, state.r, state.phi, state.alpha, state.k))
    return rows


def curve_from_hs_trajectory(traj: HSTrajectory, phi0: float = 0.0) -> ProfileCurve:
    """Adapt an integrated Hamiltonian-stationary orbit into a profile curve.

    The phase is integrated along the orbit as ``phi' = sin(alpha) / r``; all jet
    derivatives are obtained from the ODE vector field evaluated on the dense output.

    :param traj: The integrated trajectory.
    :type traj: HSTrajectory
    :param phi0: Phase at the initial parameter.
    :type phi0: float
    :return: Unit-speed profile curve on the trajectory's span.
    :rtype: ProfileCurve
    """
    n, C = traj.params.n, traj.params.C
    if np.min(traj.r) <= 0:
        raise SingularityError("profile curve", float(traj.s[int(np.argmin(traj.r))]))

    def jet(s: float) -> CurveJet:
        alpha, r, phi = traj.state_at(s)
        if r <= 0:
            raise SingularityError("profile curve", s)
        sa, ca = math.sin(alpha), math.cos(alpha)
        a1 = C * r ** (1 - n) - n * sa / r
        da1 = -(n - 1) * C * r ** (-n) * ca - n * (ca * a1 / r - sa * ca / r**2)
        return CurveJet(
            r=r,
            dr=ca,
            ddr=-sa * a1,
            dddr=-ca * a1**2 - sa * da1,
            phi=phi0 + phi,
            dphi=sa / r,
            ddphi=ca * a1 / r - sa * ca / r**2,
            dddphi=(-sa * a1**2 + ca * da1) / r
            - ca**2 * a1 / r**2
            - ((ca**2 - sa**2) * a1 / r**2 - 2 * sa * ca**2 / r**3),
        )

    return ProfileCurve(jet, traj.domain, name=f"hs(n={n}, C={C:g})")


def _vector_param(
    params: Mapping[str, Any], name: str, n: int, default: float
) -> np.ndarray:
    """Read a vector given as a sequence, a scalar along e1, or name1..nameN."""
    if name in params:
        value = params[name]
        if np.ndim(value) == 0:
            vector = np.zeros(n)
            vector[0] = float(value)
            return vector
        vector = np.array(value, dtype=float)
        if vector.shape != (n,):
            raise ConstructionError(f"{name}: expected {n} components")
        return vector
    components = [f"{name}{i + 1}" for i in range(n)]
    if any(key in params for key in components):
        return np.array([float(params.get(key, 0.0)) for key in components])
    vector = np.zeros(n)
    vector[0] = default
    return vector


def _domain(params: Mapping[str, Any], default: Interval) -> Interval:
    lower = float(params.get("s_min", default[0]))
    return lower, float(params.get("s_max", default[1]))


def _polar_jet(
    r: Callable[[float], Tuple[float, float, float, float]],
    phi: Callable[[float], Tuple[float, float, float, float]],
) -> Callable[[float], CurveJet]:
    def jet(s: float) -> CurveJet:
        r0, r1, r2, r3 = r(s)
        p0, p1, p2, p3 = phi(s)
        return CurveJet(r0, r1, r2, r3, p0, p1, p2, p3)

    return jet


def _circle_curve(rho: float, domain: Interval, name: str) -> ProfileCurve:
    return ProfileCurve(
        _polar_jet(
            lambda s: (rho, 0.0, 0.0, 0.0), lambda s: (s / rho, 1 / rho, 0.0, 0.0)
        ),
        domain,
        name,
    )


def _standard_circle(params: Mapping[str, Any]) -> FoliatedSpec:
    n = int(params.get("n", 3))
    domain = _domain(params, (-2 * math.pi, 2 * math.pi))
    curve = _circle_curve(1.0, domain, "standard_circle")
    s0 = float(params.get("s0", 0.0))
    return FoliatedSpec(n, curve, CenterVelocity.zero(n), s0, "standard_circle")


def _centered_circle(params: Mapping[str, Any]) -> FoliatedSpec:
    n = int(params.get("n", 3))
    rho = float(params.get("rho", 1.0))
    if rho <= 0:
        raise ConstructionError(f"rho: must be positive, got {rho}")
    domain = _domain(params, (-2 * math.pi * rho, 2 * math.pi * rho))
    curve = _circle_curve(rho, domain, "centered_circle")
    s0 = float(params.get("s0", 0.0))
    return FoliatedSpec(n, curve, CenterVelocity.zero(n), s0, "centered_circle")


def _line(params: Mapping[str, Any]) -> FoliatedSpec:
    n = int(params.get("n", 3))
    phi0 = float(params.get("phi0", 0.0))
    w = _vector_param(params, "w", n, 0.0)
    domain = _domain(params, (0.0, 10.0))
    if domain[0] < 0:
        raise ConstructionError("s_min: the line preset needs r = s >= 0")
    s0 = float(params.get("s0", domain[0]))
    curve = ProfileCurve(
        _polar_jet(lambda s: (s, 1.0, 0.0, 0.0), lambda s: (phi0, 0.0, 0.0, 0.0)),
        domain,
        "line",
    )
    rotation = complex(math.cos(phi0), math.sin(phi0))
    return FoliatedSpec(
        n,
        curve,
        CenterVelocity.constant(w),
        s0,
        "line",
        center_primitive=lambda s: rotation * w * (s - s0),
    )


def _catenoid3(params: Mapping[str, Any]) -> FoliatedSpec:
    if int(params.get("n", 3)) != 3:
        raise ConstructionError("n: the catenoid3 preset is three dimensional")
    c = float(params.get("C_geo", 1.0))
    if c <= 0:
        raise ConstructionError(f"C_geo: must be positive, got {c}")

    def radius(s: float) -> Tuple[float, float, float, float]:
        r = math.hypot(c, s)
        return r, s / r, c**2 / r**3, -3 * c**2 * s / r**5

    def phase(s: float) -> Tuple[float, float, float, float]:
        r2 = c**2 + s**2
        return (
            math.atan2(s, c),
            c / r2,
            -2 * c * s / r2**2,
            2 * c * (3 * s**2 - c**2) / r2**3,
        )

    domain = _domain(params, (-10.0, 10.0))
    curve = ProfileCurve(_polar_jet(radius, phase), domain, "catenoid3")
    s0 = float(params.get("s0", 0.0))
    return FoliatedSpec(3, curve, CenterVelocity.zero(3), s0, "catenoid3")


def _epicycloid(params: Mapping[str, Any]) -> FoliatedSpec:
    n = int(params.get("n", 3))
    rho = float(params.get("rho", 1.0))
    b = _vector_param(params, "b", n, 1.0)
    curve = params.get("curve")
    if curve is None:
        if rho <= 0:
            raise ConstructionError(f"rho: must be positive, got {rho}")
        domain = _domain(params, (-2 * math.pi * rho, 2 * math.pi * rho))
        curve = _circle_curve(rho, domain, "epicycloid")
    elif not isinstance(curve, ProfileCurve):
        raise ConstructionError("curve: expected a ProfileCurve")
    s0 = float(params.get("s0", 0.0 if curve.contains(0.0) else curve.domain[0]))

    def velocity(s: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        jet = curve.jet(s)
        return jet.dphi * b, jet.ddphi * b, jet.dddphi * b

    start = np.exp(1j * curve.jet(s0).phi)
    center = CenterVelocity(velocity, n, domain=curve.domain, is_zero=not np.any(b))
    return FoliatedSpec(
        n,
        curve,
        center,
        s0,
        "epicycloid",
        center_primitive=lambda s: -1j * (np.exp(1j * curve.jet(s).phi) - start) * b,
    )


PRESETS: Dict[str, Callable[[Mapping[str, Any]], FoliatedSpec]] = {
    "standard_circle": _standard_circle,
    "centered_circle": _centered_circle,
    "line": _line,
    "catenoid3": _catenoid3,
    "epicycloid": _epicycloid,
}


def make_preset(name: str, params: Optional[Mapping[str, Any]] = None) -> FoliatedSpec:
    """Build one of the named example immersions.

    :param name: One of ``standard_circle``, ``centered_circle``, ``line``,
        ``catenoid3`` and ``epicycloid``.
    :type name: str
    :param params: Family parameters (``n``, ``rho``, ``phi0``, ``w``, ``b``,
        ``C_geo``, ``s_min``, ``s_max``, ``s0``, ``curve``).
    :type params: Optional[Mapping[str, Any]]
    :return: The foliated immersion data.
    :rtype: FoliatedSpec
    """
    builder = PRESETS.get(name)
    if builder is None:
        raise ConstructionError(
            f"Unknown preset {name!r}; expected one of {', '.join(sorted(PRESETS))}"
        )
    spec = builder(dict(params or {}))
    logger.debug("Built preset %s with n=%d on %s", name, spec.n, spec.domain)
    return spec
