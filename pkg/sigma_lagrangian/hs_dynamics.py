"""Profile ODE of centered Hamiltonian-stationary sphere-foliated immersions.

Centered immersions are Hamiltonian stationary exactly when the flux
``r^{n-1} (n phi' + alpha') = C`` is constant, which gives the planar system
``alpha' = C r^{1-n} - n sin(alpha) / r``, ``r' = cos(alpha)`` with the first integral
``E = 2 r^n sin(alpha) - C r^2``. This module integrates the system, locates its fixed
point, classifies energy levels and tracks the inflection points of the profile.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from sigma_lagrangian.exceptions import (
    BranchResolutionError,
    DomainError,
    InternalError,
    NoFixedPointError,
    NumericError,
    SingularityError,
    ValidationError,
)
from sigma_lagrangian.models import (
    EnergyClass,
    EnergyTag,
    HSParams,
    HSState,
    InflectionReport,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_R_MAX = 1e3
DEFAULT_R_MIN = 1e-9
DRIFT_TOL = 1e-8
ASYMPTOTIC_GAP = 1e-6


def hs_rhs(state: HSState, params: HSParams) -> Tuple[float, float]:
    """Return ``(alpha', r')`` at a phase-plane state.

    :param state: State with r > 0.
    :type state: HSState
    :param params: ODE parameters.
    :type params: HSParams
    :return: The vector field.
    :rtype: Tuple[float, float]
    """
    if state.r <= 0:
        raise SingularityError("profile ODE vector field", math.nan)
    n, C = params.n, params.C
    return (
        C * state.r ** (1 - n) - n * math.sin(state.alpha) / state.r,
        math.cos(state.alpha),
    )


def energy(state: HSState, params: HSParams) -> float:
    """First integral ``E = 2 r^n sin(alpha) - C r^2``."""
    return 2.0 * state.r**params.n * math.sin(state.alpha) - params.C * state.r**2


def _energies(alpha: np.ndarray, r: np.ndarray, params: HSParams) -> np.ndarray:
    return 2.0 * r**params.n * np.sin(alpha) - params.C * r**2


def profile_curvature(state: HSState, params: HSParams) -> float:
    """Curvature ``k = C / r^{n-1} - (n-1) sin(alpha) / r`` of the profile curve."""
    if state.r <= 0:
        raise SingularityError("profile curvature", math.nan)
    n = params.n
    return params.C / state.r ** (n - 1) - (n - 1) * math.sin(state.alpha) / state.r


def fixed_points(params: HSParams) -> Tuple[HSState, float]:
    """Return the fixed point ``(pi/2, (C/n)^{1/(n-2)})`` and its energy E0.

    :param params: ODE parameters; C is normalised to be non negative.
    :type params: HSParams
    :return: The fixed point and ``E0 = (C/n)^{n/(n-2)} (2 - n)``.
    :rtype: Tuple[HSState, float]
    """
    normal, _ = params.normalized()
    n, C = normal.n, normal.C
    if C == 0:
        raise NoFixedPointError(
            "C = 0 is the special Lagrangian family; it has no interior fixed point"
        )
    r_bar = (C / n) ** (1.0 / (n - 2))
    E0 = (C / n) ** (n / (n - 2)) * (2 - n)
    point = HSState(alpha=math.pi / 2, r=r_bar)
    if abs(energy(point, normal) - E0) > 1e-12 * max(1.0, abs(E0)):
        raise InternalError(f"Fixed-point energy mismatch for n={n}, C={C}")
    return point, E0


@dataclass(frozen=True, eq=False)
class HSTrajectory:
    """Integrated orbit of the profile ODE.

    ``phi`` is the phase accumulated from the first grid point, ``phi' = sin(alpha)/r``.
    When the input flux was negative the orbit is stored in the normalised variables
    ``(-s, alpha + pi)`` and ``reversed`` is set.

    :ivar params: Normalised parameters (C >= 0).
    :type params: HSParams
    :ivar s: Accepted step grid, in integration order.
    :type s: np.ndarray
    :ivar alpha: Angle on the grid.
    :type alpha: np.ndarray
    :ivar r: Radius on the grid.
    :type r: np.ndarray
    :ivar phi: Phase on the grid.
    :type phi: np.ndarray
    :ivar energy: Energy of the initial state.
    :type energy: float
    :ivar termination: ``span``, ``origin``, ``r_max``, ``alpha_stop``, ``failed`` or
        ``empty``.
    :type termination: str
    :ivar sol: Dense output ``s -> (alpha, r, phi)``, ``None`` for a single point.
    :type sol: Optional[Callable[[float], np.ndarray]]
    :ivar sections: Parameters where ``cos(alpha) = 0``.
    :type sections: List[float]
    :ivar reversed: Whether the s-reversal normalisation was applied.
    :type reversed: bool
    """

    params: HSParams
    s: np.ndarray
    alpha: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    energy: float
    termination: str
    sol: Optional[Callable[[float], np.ndarray]] = None
    sections: List[float] = field(default_factory=list)
    reversed: bool = False
    message: str = ""

    @property
    def domain(self) -> Tuple[float, float]:
        """Closed parameter interval covered by the orbit."""
        return float(np.min(self.s)), float(np.max(self.s))

    def state_at(self, s: float) -> Tuple[float, float, float]:
        """Return ``(alpha, r, phi)`` from the dense output."""
        lower, upper = self.domain
        if not lower <= s <= upper:
            raise DomainError(s, (lower, upper))
        if self.sol is None:
            return float(self.alpha[0]), float(self.r[0]), float(self.phi[0])
        y = self.sol(s)
        return float(y[0]), float(y[1]), float(y[2])

    def states(self) -> List[HSState]:
        """Grid states."""
        return [HSState(alpha=float(a), r=float(r)) for a, r in zip(self.alpha, self.r)]

    def energy_drift(self) -> float:
        """Largest ``|E(s) - E(s_0)|`` over the grid."""
        energies = _energies(self.alpha, self.r, self.params)
        return float(np.max(np.abs(energies - self.energy)))

    def table(self) -> List[Tuple[float, float, float, float, float]]:
        """Rows ``(s, alpha, r, E, k)`` on the grid."""
        energies = _energies(self.alpha, self.r, self.params)
        n, C = self.params.n, self.params.C
        curvatures = C / self.r ** (n - 1) - (n - 1) * np.sin(self.alpha) / self.r
        return [
            (float(s), float(a), float(r), float(e), float(k))
            for s, a, r, e, k in zip(self.s, self.alpha, self.r, energies, curvatures)
        ]


def _event(
    fn: Callable[[float, np.ndarray], float], terminal: bool, direction: int
) -> Any:
    fn.terminal = terminal  # type: ignore[attr-defined]
    fn.direction = direction  # type: ignore[attr-defined]
    return fn


def integrate(
    params: HSParams,
    initial: HSState,
    s_span: Tuple[float, float],
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
    r_min: float = DEFAULT_R_MIN,
    alpha_stop: Optional[float] = None,
) -> HSTrajectory:
    """Integrate the profile ODE with an embedded 8(5,3) Runge-Kutta pair.

    :param params: ODE parameters; a negative flux is normalised by s-reversal.
    :type params: HSParams
    :param initial: Initial state, r > 0.
    :type initial: HSState
    :param s_span: Start and end parameter (either order).
    :type s_span: Tuple[float, float]
    :param tol: Requested accuracy, at least 1e-12; steps use a tenth of it.
    :type tol: float
    :param r_max: Radius that terminates the integration.
    :type r_max: float
    :param r_min: Radius treated as reaching the origin.
    :type r_min: float
    :param alpha_stop: Optional angle that terminates the integration.
    :type alpha_stop: Optional[float]
    :return: The trajectory; failures return the partial orbit.
    :rtype: HSTrajectory
    """
    if tol < 1e-12:
        raise ValidationError(f"tol: must be >= 1e-12, got {tol}")
    if not initial.r > 0:
        raise ValidationError(f"r0: must be positive, got {initial.r}")
    normal, flipped = params.normalized()
    alpha0 = initial.alpha + math.pi if flipped else initial.alpha
    start, stop = (-s_span[0], -s_span[1]) if flipped else (s_span[0], s_span[1])
    E = energy(HSState(alpha0, initial.r), normal)
    if start == stop:
        return HSTrajectory(
            params=normal,
            s=np.array([start], dtype=float),
            alpha=np.array([alpha0]),
            r=np.array([initial.r]),
            phi=np.zeros(1),
            energy=E,
            termination="empty",
            reversed=flipped,
        )
    n, C = normal.n, normal.C
    # one decade below tol, floored at 1e-13
    step_tol = max(tol / 10.0, 1e-13)

    def rhs(s: float, y: np.ndarray) -> List[float]:
        alpha, r = y[0], y[1]
        sa = math.sin(alpha)
        return [C * r ** (1 - n) - n * sa / r, math.cos(alpha), sa / r]

    events = [
        _event(lambda s, y: y[1] - r_min, True, -1),
        _event(lambda s, y: y[1] - r_max, True, 1),
        _event(lambda s, y: math.cos(y[0]), False, 0),
    ]
    names = ["origin", "r_max", "section"]
    if alpha_stop is not None:
        target = alpha_stop + math.pi if flipped else alpha_stop
        events.append(_event(lambda s, y: y[0] - target, True, 0))
        names.append("alpha_stop")
    try:
        result = solve_ivp(
            rhs,
            (start, stop),
            [alpha0, initial.r, 0.0],
            method="DOP853",
            rtol=step_tol,
            atol=step_tol,
            dense_output=True,
            events=events,
        )
    except (ValueError, ZeroDivisionError, OverflowError) as error:
        raise NumericError(f"Profile ODE integration failed: {error}") from error
    termination = "span"
    if result.status == -1:
        termination = "failed"
        logger.warning("Profile ODE integration failed: %s", result.message)
    elif result.status == 1:
        for name, hits in zip(names, result.t_events):
            if name != "section" and len(hits):
                termination = name
                break
    trajectory = HSTrajectory(
        params=normal,
        s=result.t,
        alpha=result.y[0],
        r=result.y[1],
        phi=result.y[2],
        energy=E,
        termination=termination,
        sol=result.sol,
        sections=[float(s) for s in result.t_events[2]],
        reversed=flipped,
        message=str(result.message),
    )
    drift = trajectory.energy_drift()
    if drift > DRIFT_TOL * max(1.0, abs(E)):
        logger.warning("Energy drift %.3g exceeds tolerance on E=%.6g", drift, E)
    logger.info(
        "Integrated n=%d C=%g from s=%g to s=%g in %d steps (%s)",
        n,
        C,
        start,
        float(result.t[-1]),
        len(result.t),
        termination,
    )
    return trajectory


def integrate_symmetric(
    params: HSParams,
    center: HSState,
    half_span: float,
    tol: float = DEFAULT_TOL,
    r_max: float = DEFAULT_R_MAX,
) -> HSTrajectory:
    """Integrate both ways from ``center`` placed at s = 0 and join the halves."""
    if half_span <= 0:
        raise ValidationError(f"half_span: must be positive, got {half_span}")
    backward = integrate(params, center, (0.0, -half_span), tol=tol, r_max=r_max)
    forward = integrate(params, center, (0.0, half_span), tol=tol, r_max=r_max)
    if backward.reversed:
        backward, forward = forward, backward
    back_sol, fwd_sol = backward.sol, forward.sol

    def sol(s: float) -> np.ndarray:
        chosen = back_sol if s < 0 else fwd_sol
        assert chosen is not None
        return chosen(s)

    terminations = {backward.termination, forward.termination} - {"span"}
    return HSTrajectory(
        params=forward.params,
        s=np.concatenate([backward.s[::-1], forward.s[1:]]),
        alpha=np.concatenate([backward.alpha[::-1], forward.alpha[1:]]),
        r=np.concatenate([backward.r[::-1], forward.r[1:]]),
        phi=np.concatenate([backward.phi[::-1], forward.phi[1:]]),
        energy=forward.energy,
        termination=terminations.pop() if terminations else "span",
        sol=sol,
        sections=sorted(backward.sections + forward.sections),
        reversed=forward.reversed,
    )


def classify(params: HSParams, E: float) -> EnergyClass:
    """Classify an energy level relative to the fixed-point energy E0.

    :param params: ODE parameters with nonzero flux.
    :type params: HSParams
    :param E: Energy level.
    :type E: float
    :return: The energy class.
    :rtype: EnergyClass
    """
    _, E0 = fixed_points(params)
    if abs(E - E0) <= 1e-12 * max(1.0, abs(E0)):
        return EnergyClass(EnergyTag.CRITICAL, E, E0, (EnergyTag.CRITICAL,))
    if E >= 0:
        return EnergyClass(EnergyTag.TYPE_I, E, E0, (EnergyTag.TYPE_I,))
    if E < E0:
        return EnergyClass(EnergyTag.TYPE_II, E, E0, (EnergyTag.TYPE_II,))
    return EnergyClass(
        EnergyTag.TYPE_III, E, E0, (EnergyTag.TYPE_III, EnergyTag.TYPE_I)
    )


def classify_state(params: HSParams, state: HSState) -> EnergyClass:
    """Classify the orbit through a state, pinning its component."""
    normal, flipped = params.normalized()
    if flipped:
        state = HSState(state.alpha + math.pi, state.r)
    point, E0 = fixed_points(normal)
    gap = math.hypot(
        math.remainder(state.alpha - point.alpha, 2 * math.pi), state.r - point.r
    )
    E = energy(state, normal)
    if gap <= 1e-12 * max(1.0, point.r):
        return EnergyClass(EnergyTag.FIXED_POINT, E, E0, (EnergyTag.FIXED_POINT,))
    level = classify(normal, E)
    if level.tag in (EnergyTag.CRITICAL, EnergyTag.TYPE_III):
        piece = "bounded" if state.r < point.r else "unbounded"
        return EnergyClass(
            level.tag,
            E,
            E0,
            level.components,
            piece=piece,
            asymptotic=level.tag is EnergyTag.CRITICAL and gap < ASYMPTOTIC_GAP,
        )
    return level


def energy_level_radius(
    params: HSParams, alpha: float, E: float, branch: Optional[str] = None
) -> float:
    """Solve ``2 r^n sin(alpha) - C r^2 = E`` for r.

    For ``sin(alpha) <= 0`` the root is unique. For ``sin(alpha) > 0`` there are up to
    two roots separated by ``r_m = (C / (n sin(alpha)))^{1/(n-2)}``; ``branch`` picks
    ``"smaller"`` or ``"larger"`` (default: the only root when E >= 0, else smaller).

    :param params: ODE parameters, C >= 0.
    :type params: HSParams
    :param alpha: Angle.
    :type alpha: float
    :param E: Energy level.
    :type E: float
    :param branch: ``"smaller"``, ``"larger"`` or ``None``.
    :type branch: Optional[str]
    :return: The radius.
    :rtype: float
    """
    n, C = params.n, params.C
    sa = math.sin(alpha)

    def level(r: float) -> float:
        return 2.0 * r**n * sa - C * r**2 - E

    if sa <= 0:
        if E >= 0:
            raise BranchResolutionError(
                alpha, E, "no positive radius for sin(alpha) <= 0"
            )
        lower, upper = 0.0, 1.0
        while level(upper) > 0:
            upper *= 2.0
            if upper > 1e12:
                raise BranchResolutionError(alpha, E, "bracket expansion failed")
    else:
        r_m = (C / (n * sa)) ** (1.0 / (n - 2)) if C > 0 else 0.0
        if level(r_m) > 0:
            raise BranchResolutionError(alpha, E, "energy level misses this angle")
        choice = branch or ("larger" if E >= 0 else "smaller")
        if choice == "smaller":
            if E >= 0:
                raise BranchResolutionError(alpha, E, "no smaller root for E >= 0")
            lower, upper = 0.0, r_m
        elif choice == "larger":
            lower, upper = r_m, max(2.0 * r_m, 1.0)
            while level(upper) < 0:
                upper *= 2.0
                if upper > 1e12:
                    raise BranchResolutionError(alpha, E, "bracket expansion failed")
        else:
            raise ValidationError(f"branch: expected smaller or larger, got {branch!r}")
        if level(lower) == 0.0:
            return lower
    try:
        root = float(brentq(level, lower, upper, xtol=1e-15, maxiter=200))
    except (ValueError, RuntimeError) as error:
        raise BranchResolutionError(alpha, E, str(error)) from error
    if abs(level(root)) > 1e-10 * max(1.0, abs(E)):
        raise BranchResolutionError(
            alpha, E, f"energy residual {abs(level(root)):.3g} exceeds 1e-10"
        )
    return root


@dataclass(frozen=True)
class InflectionLocus:
    """Curve ``r = (C / ((n - 1) sin(alpha)))^{1/(n-2)}`` where the profile is flat.

    :ivar n: Complex dimension.
    :type n: int
    :ivar C: Flux constant.
    :type C: float
    :ivar r1: Locus radius at ``alpha = pi/2``.
    :type r1: float
    :ivar E1: Energy ``2 r1^n - C r1^2`` at that point.
    :type E1: float
    :ivar E0: Fixed-point energy.
    :type E0: float
    """

    n: int
    C: float
    r1: float
    E1: float
    E0: float

    def radius(self, alpha: float) -> float:
        """Locus radius at alpha; requires ``sin(alpha) > 0``."""
        sa = math.sin(alpha)
        if sa <= 0:
            raise ValidationError("alpha: the inflection locus needs sin(alpha) > 0")
        return (self.C / ((self.n - 1) * sa)) ** (1.0 / (self.n - 2))


def inflection_locus(params: HSParams) -> InflectionLocus:
    """Return the inflection locus with its apex radius r1 and energy E1."""
    normal, _ = params.normalized()
    _, E0 = fixed_points(normal)
    n, C = normal.n, normal.C
    r1 = (C / (n - 1)) ** (1.0 / (n - 2))
    E1 = 2.0 * r1**n - C * r1**2
    locus = InflectionLocus(n=n, C=C, r1=r1, E1=E1, E0=E0)
    if n == 3:
        for alpha in (math.pi / 6, math.pi / 2, 2.0):
            value = energy(HSState(alpha, locus.radius(alpha)), normal)
            if abs(value) > 1e-12 * max(1.0, C**3):
                raise InternalError("For n = 3 the locus must be the level E = 0")
    elif not E0 < E1 < 0:
        raise InternalError(f"E1={E1} is not inside (E0, 0) = ({E0}, 0)")
    return locus


def count_inflections(traj: HSTrajectory, refine: int = 8) -> InflectionReport:
    """Locate sign changes of the profile curvature along a trajectory.

    Sign changes on a refined sampling of the dense output are bisected to 1e-10 in s.
    A curvature below 1e-9 everywhere is reported as identically zero.
    """
    if traj.sol is None or len(traj.s) < 2:
        return InflectionReport(
            s_values=[], identically_zero=False, max_abs_curvature=0.0
        )
    params = traj.params

    def curvature(s: float) -> float:
        alpha, r, _ = traj.state_at(s)
        return profile_curvature(HSState(alpha, r), params)

    grid = np.sort(traj.s)
    pieces = [
        np.linspace(a, b, refine, endpoint=False) for a, b in zip(grid[:-1], grid[1:])
    ]
    samples = np.unique(np.concatenate(pieces + [grid[-1:]]))
    values = np.array([curvature(float(s)) for s in samples])
    peak = float(np.max(np.abs(values)))
    if peak < 1e-9:
        return InflectionReport(
            s_values=[], identically_zero=True, max_abs_curvature=peak
        )
    roots = []
    for i in range(len(samples) - 1):
        left, right = float(samples[i]), float(samples[i + 1])
        if values[i] == 0.0:
            roots.append(left)
        elif values[i] * values[i + 1] < 0:
            roots.append(float(brentq(curvature, left, right, xtol=1e-10)))
    return InflectionReport(
        s_values=roots, identically_zero=False, max_abs_curvature=peak
    )
