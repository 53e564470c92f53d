"""Total variation of phase, self-intersections and the solution catalog.

The phase of a Hamiltonian-stationary profile varies by ``Phi = int sin(alpha)/r ds``
along an orbit of the profile ODE. Depending on the energy level this is an improper
integral over r (unbounded orbits) or an integral over alpha (pieces where alpha is
monotone). Together with a polyline self-intersection detector these values sort
solutions into the standard embedding, the two spiraloids, the catenoid-type family
and the closed non-standard immersions.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, fsolve

from sigma_lagrangian.exceptions import (
    QuadratureError,
    ValidationError,
    WrongComponentError,
)
from sigma_lagrangian.hs_dynamics import (
    HSTrajectory,
    classify,
    classify_state,
    energy_level_radius,
    fixed_points,
    integrate,
    integrate_symmetric,
)
from sigma_lagrangian.models import (
    CatalogEntry,
    Crossing,
    EnergyClass,
    EnergyTag,
    Family,
    HSParams,
    HSState,
    PhaseResult,
    SelfIntersectionReport,
)
from sigma_lagrangian.profile_curves import ProfileCurve, curve_from_hs_trajectory

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-9
VALUE_CAP = 1e4
CLOSURE_DENOMINATOR = 64
CLOSURE_TOL = 1e-8
DIVERGENCE_GAP = 1e-9

_QUAD_OPTIONS = {"epsabs": 1e-12, "epsrel": 1e-11, "limit": 500}


def _checked(value: float, error: float, what: str) -> PhaseResult:
    if error >= 1e-6 * max(1.0, abs(value)):
        raise QuadratureError(
            f"{what}: error estimate {error:.3g} is too large for value {value:.6g}"
        )
    return PhaseResult(value=value, error_estimate=error)


def _quad(
    fn: Callable[[float], float], a: float, b: float, **extra: object
) -> Tuple[float, float]:
    value, error = quad(fn, a, b, **{**_QUAD_OPTIONS, **extra})
    return float(value), float(error)


def _to_infinity(
    fn: Callable[[float], float], start: float, first: float, what: str
) -> Tuple[float, float, bool]:
    """Integrate on ``[start, inf)`` by doubling the truncation until the tail is small.

    Returns the value, the accumulated error and whether the value cap was hit.
    """
    total, error = _quad(fn, start, first)
    upper = first
    for _ in range(200):
        piece, piece_error = _quad(fn, upper, 2.0 * upper)
        total += piece
        error += piece_error
        upper *= 2.0
        if abs(piece) < TAIL_TOL:
            return total, error, False
        if total > VALUE_CAP:
            return total, error, True
    raise QuadratureError(f"{what}: tail did not settle below {TAIL_TOL}")


def phi_type1(params: HSParams, r0: float) -> PhaseResult:
    """Total variation of phase of a type I orbit with minimal radius r0.

    With ``lambda = C / (2 r0^{n-2})`` the variation is
    ``2 int_1^inf dx / (x sqrt(F^2 - 1))``, ``F = x^n / (lambda (x^2 - 1) + 1)``,
    evaluated after the substitution ``x = 1 + u^2`` which removes the endpoint
    singularity.

    :param params: ODE parameters.
    :type params: HSParams
    :param r0: Minimal radius of the orbit.
    :type r0: float
    :return: The phase variation, or a divergence marker when ``lambda >= n/2``.
    :rtype: PhaseResult
    """
    normal, _ = params.normalized()
    n, C = normal.n, normal.C
    if r0 <= 0:
        raise ValidationError(f"r0: must be positive, got {r0}")
    lam = C / (2.0 * r0 ** (n - 2))
    if lam >= n / 2.0 - DIVERGENCE_GAP:
        return PhaseResult.divergence(f"lambda={lam:.12g} reaches n/2")

    def integrand(u: float) -> float:
        u2 = u * u
        x = 1.0 + u2
        if u2 < 1e-16:
            q = n - 2.0 * lam
            F = 1.0
        else:
            q = (math.expm1(n * math.log1p(u2)) / u2 - lam * (2.0 + u2)) / (
                lam * u2 * (2.0 + u2) + 1.0
            )
            F = 1.0 + q * u2
        return 2.0 / (x * math.sqrt(q * (F + 1.0)))

    value, error, capped = _to_infinity(integrand, 0.0, 1.0, "type I phase")
    if capped:
        return PhaseResult.divergence(f"value cap {VALUE_CAP} exceeded")
    return _checked(2.0 * value, 2.0 * error, "type I phase")


def type1_min_radius(params: HSParams, E: float) -> float:
    """Minimal radius ``r0`` of the unbounded orbit of energy E, at ``alpha = pi/2``."""
    normal, _ = params.normalized()
    return energy_level_radius(normal, math.pi / 2, E, "larger")


def type2_crossing_radius(params: HSParams, E: float) -> float:
    """Radius ``r1 = sqrt(-E / C)`` where a type II orbit crosses ``sin alpha = 0``."""
    normal, _ = params.normalized()
    if E >= 0 or normal.C <= 0:
        raise ValidationError(f"E: type II levels are negative, got {E}")
    return math.sqrt(-E / normal.C)


def _alpha_integrand(
    params: HSParams, E: float, branch: Optional[str]
) -> Callable[[float], float]:
    """``phi' / alpha'`` as a function of alpha on one branch of the energy level."""
    n, C = params.n, params.C

    def integrand(alpha: float) -> float:
        side = branch if math.sin(alpha) > 0 else None
        r = energy_level_radius(params, alpha, E, side)
        term = r ** (n - 2) * math.sin(alpha)
        denominator = C - n * term
        if denominator <= 0:
            raise WrongComponentError(
                f"alpha' does not stay positive on E={E} (alpha={alpha:.6g})"
            )
        return term / denominator

    return integrand


def phi_type2(params: HSParams, r1: float) -> PhaseResult:
    """Phase variation of a type II orbit split into its positive and negative pieces.

    The positive piece is ``2 int_1^inf G / (x sqrt(1 - G^2)) dx`` with
    ``G = lambda (x^2 - 1) / x^n`` and ``lambda = C / (2 r1^{n-2})``; the negative piece
    is integrated over ``alpha in [pi, 2 pi]`` with r from the first integral.

    :param params: ODE parameters.
    :type params: HSParams
    :param r1: Radius at ``alpha = 0 mod pi``.
    :type r1: float
    :return: Total with the pieces ``plus`` and ``minus``.
    :rtype: PhaseResult
    """
    normal, _ = params.normalized()
    n, C = normal.n, normal.C
    if r1 <= 0:
        raise ValidationError(f"r1: must be positive, got {r1}")
    E = -C * r1**2
    _, E0 = fixed_points(normal)
    if not E < E0:
        raise ValidationError(f"E={E} is not a type II level (E0={E0})")
    lam = C / (2.0 * r1 ** (n - 2))
    peak = math.sqrt(n / (n - 2.0))

    def positive(x: float) -> float:
        G = lam * (x * x - 1.0) / x**n
        return G / (x * math.sqrt((1.0 - G) * (1.0 + G)))

    plus, plus_error, _ = _to_infinity(
        lambda x: positive(x), 1.0, 2.0 * peak, "type II positive phase"
    )
    minus, minus_error = _quad(_alpha_integrand(normal, E, None), math.pi, 2 * math.pi)
    result = _checked(
        2.0 * plus + minus, 2.0 * plus_error + minus_error, "type II phase"
    )
    return PhaseResult(
        value=result.value,
        error_estimate=result.error_estimate,
        plus=2.0 * plus,
        minus=minus,
    )


def phi_type3(params: HSParams, E: float) -> PhaseResult:
    """Phase variation over one period of the bounded type III orbit of energy E.

    Alpha increases along the bounded component, so it parametrises the period
    ``[pi/2, 5 pi/2]``: the positive piece is the part over ``[pi/2, pi]`` and
    ``[2 pi, 5 pi/2]``, the negative piece the part over ``[pi, 2 pi]``.

    :param params: ODE parameters.
    :type params: HSParams
    :param E: Energy in ``(E0, 0)``.
    :type E: float
    :return: Total with the pieces ``plus`` and ``minus``.
    :rtype: PhaseResult
    """
    normal, _ = params.normalized()
    _, E0 = fixed_points(normal)
    if not E0 < E < 0:
        raise ValidationError(f"E={E} is not inside (E0, 0) = ({E0}, 0)")
    integrand = _alpha_integrand(normal, E, "smaller")
    first, first_error = _quad(integrand, math.pi / 2, math.pi)
    last, last_error = _quad(integrand, 2 * math.pi, 2.5 * math.pi)
    minus, minus_error = _quad(integrand, math.pi, 2 * math.pi)
    result = _checked(
        first + last + minus, first_error + last_error + minus_error, "type III phase"
    )
    return PhaseResult(
        value=result.value,
        error_estimate=result.error_estimate,
        plus=first + last,
        minus=minus,
    )


def phase_for_energy(
    params: HSParams, E: float, piece: Optional[str] = None
) -> PhaseResult:
    """Dispatch the phase computation by the class of the level E.

    On levels in ``(E0, 0)`` ``piece`` selects the ``"bounded"`` (default) or the
    ``"unbounded"`` component; the latter reuses the type I formula with its minimal
    radius.
    """
    level = classify(params, E)
    if level.tag is EnergyTag.CRITICAL:
        return PhaseResult.divergence("critical level E = E0")
    if level.tag is EnergyTag.TYPE_I:
        return phi_type1(params, type1_min_radius(params, E))
    if level.tag is EnergyTag.TYPE_II:
        return phi_type2(params, type2_crossing_radius(params, E))
    if piece == "unbounded":
        return phi_type1(params, type1_min_radius(params, E))
    return phi_type3(params, E)


def bounded_orbit(params: HSParams, E: float, s_max: float = 1e3) -> HSTrajectory:
    """Integrate one period of the bounded orbit of energy E from ``alpha = pi/2``."""
    normal, _ = params.normalized()
    _, E0 = fixed_points(normal)
    if not E0 < E < 0:
        raise ValidationError(f"E={E} is not inside (E0, 0) = ({E0}, 0)")
    r = energy_level_radius(normal, math.pi / 2, E, "smaller")
    trajectory = integrate(
        normal, HSState(math.pi / 2, r), (0.0, s_max), alpha_stop=2.5 * math.pi
    )
    if trajectory.termination != "alpha_stop":
        logger.warning("Bounded orbit of E=%g ended by %s", E, trajectory.termination)
    return trajectory


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def polyline_crossings(
    points: Sequence[complex],
) -> List[Tuple[int, int, float, float]]:
    """Transverse crossings of non-adjacent segments of a polyline.

    Segments are binned on a uniform grid (broad phase) and candidate pairs tested by
    the cross-product parametrisation (narrow phase). Each result ``(i, j, t, u)``
    says that segment i at fraction t meets segment j at fraction u, with ``i < j``.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size < 4:
        return []
    starts, ends = pts[:-1], pts[1:]
    lengths = np.abs(ends - starts)
    cell = max(float(np.max(lengths)), 1e-12)
    grid: Dict[Tuple[int, int], List[int]] = defaultdict(list)
    for index, (p, q) in enumerate(zip(starts, ends)):
        x0, x1 = sorted((p.real, q.real))
        y0, y1 = sorted((p.imag, q.imag))
        for gx in range(math.floor(x0 / cell), math.floor(x1 / cell) + 1):
            for gy in range(math.floor(y0 / cell), math.floor(y1 / cell) + 1):
                grid[(gx, gy)].append(index)
    candidates = set()
    for members in grid.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                i, j = sorted((members[a], members[b]))
                if j - i > 1:
                    candidates.add((i, j))
    crossings = []
    for i, j in sorted(candidates):
        p, r = starts[i], ends[i] - starts[i]
        q, s = starts[j], ends[j] - starts[j]
        denominator = _cross(r, s)
        if abs(denominator) < 1e-300:
            continue
        t = _cross(q - p, s) / denominator
        u = _cross(q - p, r) / denominator
        if 0.0 <= t < 1.0 and 0.0 <= u < 1.0:
            crossings.append((i, j, t, u))
    return crossings


def detect_self_intersection(
    curve: ProfileCurve,
    s_span: Optional[Tuple[float, float]] = None,
    resolution: float = 8.0,
) -> SelfIntersectionReport:
    """Find transverse self-intersections of ``gamma = r e^{i phi}``.

    The curve is sampled with ``resolution`` points per unit arclength; polyline
    crossings are refined by solving ``gamma(s1) = gamma(s2)`` to 1e-9.

    :param curve: The profile curve.
    :type curve: ProfileCurve
    :param s_span: Parameter interval, defaults to the curve domain.
    :type s_span: Optional[Tuple[float, float]]
    :param resolution: Samples per unit arclength, at least 2.
    :type resolution: float
    :return: Crossings sorted by s1.
    :rtype: SelfIntersectionReport
    """
    if resolution < 2:
        raise ValidationError(f"resolution: must be >= 2, got {resolution}")
    lower, upper = s_span if s_span is not None else curve.domain
    samples = max(16, math.ceil((upper - lower) * resolution)) + 1
    grid = np.linspace(lower, upper, samples)

    def gamma(s: float) -> complex:
        jet = curve.jet(min(max(s, lower), upper))
        return jet.r * complex(math.cos(jet.phi), math.sin(jet.phi))

    points = [gamma(float(s)) for s in grid]
    step = grid[1] - grid[0]
    found: List[Crossing] = []
    for i, j, t, u in polyline_crossings(points):
        guess = np.array([grid[i] + t * step, grid[j] + u * step])

        def residual(z: np.ndarray) -> List[float]:
            gap = gamma(float(z[0])) - gamma(float(z[1]))
            return [gap.real, gap.imag]

        solution, _, status, _ = fsolve(residual, guess, xtol=1e-12, full_output=True)
        s1, s2 = sorted(float(v) for v in solution)
        gap = abs(gamma(s1) - gamma(s2))
        if status != 1 or gap > 1e-9 or not lower <= s1 < s2 <= upper or s2 - s1 < step:
            logger.debug("Keeping unrefined crossing near s=(%g, %g)", *guess)
            s1, s2 = sorted(float(v) for v in guess)
        if any(abs(c.s1 - s1) < 1e-6 and abs(c.s2 - s2) < 1e-6 for c in found):
            continue
        found.append(Crossing(s1=s1, s2=s2, point=gamma(s1)))
    found.sort(key=lambda crossing: crossing.s1)
    return SelfIntersectionReport(
        crossings=found, resolution=resolution, samples=samples
    )


def closure_test(phi: PhaseResult) -> Optional[Fraction]:
    """Return ``p/q`` with ``Phi = 2 pi p/q`` (q <= 64, tol 1e-8), else ``None``."""
    if phi.divergent or not math.isfinite(phi.value):
        return None
    ratio = phi.value / (2 * math.pi)
    fraction = Fraction(ratio).limit_denominator(CLOSURE_DENOMINATOR)
    if abs(ratio - float(fraction)) <= CLOSURE_TOL and fraction > 0:
        return fraction
    return None


def _closure_label(fraction: Optional[Fraction]) -> str:
    if fraction is None:
        return f"no closure detected (cap {CLOSURE_DENOMINATOR})"
    return f"closes after {fraction.denominator} periods"


def _crossings_on(trajectory: HSTrajectory) -> int:
    curve = curve_from_hs_trajectory(trajectory)
    return len(detect_self_intersection(curve).crossings)


def classify_catalog(
    params: HSParams,
    initial: Optional[HSState] = None,
    E: Optional[float] = None,
    half_span: float = 40.0,
) -> CatalogEntry:
    """Place the orbit through ``initial`` (or the level E) in the solution catalog.

    Without a state, levels carrying two components default to the bounded one.

    :param params: ODE parameters with nonzero flux.
    :type params: HSParams
    :param initial: State on the orbit.
    :type initial: Optional[HSState]
    :param E: Energy level, used when no state is given.
    :type E: Optional[float]
    :param half_span: Arclength integrated each way for the embeddedness check.
    :type half_span: float
    :return: The catalog entry.
    :rtype: CatalogEntry
    """
    normal, _ = params.normalized()
    point, E0 = fixed_points(normal)
    level: EnergyClass
    if initial is not None:
        level = classify_state(params, initial)
    elif E is not None:
        level = classify(normal, E)
    else:
        raise ValidationError("Either an initial state or an energy is required")
    energy_value = level.energy
    if level.tag is EnergyTag.FIXED_POINT:
        return CatalogEntry(
            family=Family.STANDARD_EMBEDDING,
            energy=energy_value,
            embedded=True,
            phi=PhaseResult(value=2 * math.pi, error_estimate=0.0),
            energy_class=level,
        )
    if level.tag is EnergyTag.CRITICAL:
        bounded = level.piece != "unbounded"
        return CatalogEntry(
            family=Family.BOUNDED_SPIRALOID if bounded else Family.UNBOUNDED_SPIRALOID,
            energy=energy_value,
            embedded=None,
            phi=PhaseResult.divergence("critical level E = E0"),
            energy_class=level,
        )
    if level.tag is EnergyTag.TYPE_II:
        r1 = type2_crossing_radius(normal, energy_value)
        bottom = energy_level_radius(normal, 1.5 * math.pi, energy_value)
        trajectory = integrate_symmetric(
            normal, HSState(1.5 * math.pi, bottom), half_span
        )
        return CatalogEntry(
            family=Family.CATENOID_TYPE,
            energy=energy_value,
            embedded=False,
            phi=phi_type2(normal, r1),
            energy_class=level,
            self_intersections=_crossings_on(trajectory),
        )
    if level.tag is EnergyTag.TYPE_III and level.piece != "unbounded":
        phi = phi_type3(normal, energy_value)
        fraction = closure_test(phi)
        return CatalogEntry(
            family=Family.CLOSED_NON_STANDARD,
            energy=energy_value,
            embedded=False,
            phi=phi,
            energy_class=level,
            self_intersections=_crossings_on(bounded_orbit(normal, energy_value)),
            closure=_closure_label(fraction),
        )
    r0 = type1_min_radius(normal, energy_value)
    phi = phi_type1(normal, r0)
    trajectory = integrate_symmetric(normal, HSState(math.pi / 2, r0), half_span)
    crossings = _crossings_on(trajectory)
    return CatalogEntry(
        family=Family.CATENOID_TYPE,
        energy=energy_value,
        embedded=crossings == 0 and phi.value < 2 * math.pi,
        phi=phi,
        energy_class=level,
        self_intersections=crossings,
    )


def closed_orbit_energy(params: HSParams, max_denominator: int = 8) -> float:
    """Energy in ``(E0, 0)`` whose bounded orbit closes up, found by root finding.

    The target ``Phi / 2 pi`` is the best rational approximation with denominator at
    most ``max_denominator`` of the value at ``E0 / 2``.
    """
    normal, _ = params.normalized()
    _, E0 = fixed_points(normal)
    middle = phi_type3(normal, 0.5 * E0).value / (2 * math.pi)
    target = max(
        Fraction(middle).limit_denominator(max_denominator),
        Fraction(1, max_denominator),
    )
    goal = 2 * math.pi * float(target)

    def gap(E: float) -> float:
        return phi_type3(normal, E).value - goal

    levels = np.linspace(E0, 0.0, 41)[1:-1]
    values = [gap(float(E)) for E in levels]
    pairs = zip(levels[:-1], levels[1:], values[:-1], values[1:])
    for left, right, f_left, f_right in pairs:
        if f_left == 0.0:
            return float(left)
        if f_left * f_right < 0:
            return float(brentq(gap, left, right, xtol=1e-14, rtol=1e-13))
    raise QuadratureError(f"No type III energy with Phi = 2 pi {target} was bracketed")


def catalog_samples(params: HSParams) -> List[CatalogEntry]:
    """One representative catalog entry per family."""
    normal, _ = params.normalized()
    point, E0 = fixed_points(normal)
    n, C = normal.n, normal.C
    bottom = energy_level_radius(normal, 1.5 * math.pi, E0)
    outer = 2.0 * point.r
    outer_alpha = math.asin((E0 + C * outer**2) / (2.0 * outer**n))
    entries = [
        classify_catalog(normal, initial=point),
        classify_catalog(normal, initial=HSState(1.5 * math.pi, bottom)),
        classify_catalog(normal, initial=HSState(outer_alpha, outer)),
        classify_catalog(normal, initial=HSState(math.pi / 2, outer)),
        classify_catalog(normal, E=closed_orbit_energy(normal)),
    ]
    logger.info("Built %d catalog samples for n=%d, C=%g", len(entries), n, C)
    return entries
