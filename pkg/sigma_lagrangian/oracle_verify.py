"""Finite-difference oracles for the closed forms of foliation_core.

Every oracle works from the immersion alone: tangent vectors, Hessians and the
Laplace-Beltrami operator are taken by central differences in the geodesic normal
chart ``(s, u) -> l(s, exp_x(u))`` of the sphere. The immersion may be replaced by
any callable with the same signature, which is how the negative controls reuse the
machinery.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm, qmc

from sigma_lagrangian.exceptions import (
    SingularityError,
    UndefinedAngleError,
    ValidationError,
)
from sigma_lagrangian.foliation_core import (
    DirectionLike,
    delta_beta_poly_f,
    eval_immersion,
    lagrangian_angle,
    mean_curvature_coeffs,
    orthonormal_frame,
    sphere_direction,
    tangent_frame,
)
from sigma_lagrangian.models import (
    CheckResult,
    ComplexPoint,
    FDConfig,
    FDTangents,
    LaplacianEstimate,
    OracleCurvature,
    ResidualReport,
    SamplePlan,
    SphereDirection,
    StarInstance,
    StarVerdict,
    TangentFrame,
)
from sigma_lagrangian.profile_curves import FoliatedSpec, eval_profile
from sigma_lagrangian.utils import angle_difference

logger = logging.getLogger(__name__)

Immersion = Callable[[float, np.ndarray], np.ndarray]
Point = Tuple[float, SphereDirection]

STAR_TOL = 1e-10

TOLERANCES: Dict[str, float] = {
    "arclength": 1e-9,
    "lagrangian": 1e-8,
    "metric": 1e-6,
    "frame": 1e-9,
    "angle": 1e-6,
    "mean_curvature": 1e-4,
    "delta_beta": 1e-3,
    "delta_beta_centered": 1e-9,
    "c_symmetry": 1e-4,
}


def default_immersion(spec: FoliatedSpec) -> Immersion:
    """The immersion of ``spec`` as a map to real 2n-vectors."""
    return lambda s, x: eval_immersion(spec, s, x).as_real()


def sample_points(spec: FoliatedSpec, plan: SamplePlan) -> List[Point]:
    """Deterministic ``(s, x)`` samples from a scrambled Halton sequence.

    s fills the domain shrunk by ``plan.margin`` at each end; x is the normalised
    inverse-normal image of the remaining coordinates.
    """
    sampler = qmc.Halton(d=1 + spec.n, scramble=True, seed=plan.seed)
    table = sampler.random(plan.count)
    lower, upper = spec.domain
    width = upper - lower
    points = []
    for row in table:
        s = lower + width * (plan.margin + (1.0 - 2.0 * plan.margin) * row[0])
        gaussian = norm.ppf(np.clip(row[1:], 1e-12, 1.0 - 1e-12))
        if not np.any(gaussian):
            gaussian[0] = 1.0
        points.append((float(s), sphere_direction(gaussian)))
    return points


def _chart(
    immersion: Immersion, frame: TangentFrame
) -> Callable[[np.ndarray], np.ndarray]:
    """Geodesic normal chart ``p = (s, u) -> l(s, cos|u| x + sin|u| u.v / |u|)``."""
    x0, v = frame.x.x, frame.v

    def chart(p: np.ndarray) -> np.ndarray:
        u = p[1:]
        length = float(np.linalg.norm(u))
        if length == 0.0:
            x = x0
        else:
            x = math.cos(length) * x0 + (math.sin(length) / length) * (u @ v)
        return immersion(float(p[0]), x)

    return chart


def _jacobian(
    chart: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    h: float,
    domain: Tuple[float, float],
) -> Tuple[np.ndarray, bool]:
    """Rows ``d chart / d p_i``; the s-derivative is one sided at the domain edge."""
    rows = []
    one_sided = False
    for i in range(p.size):
        step = np.zeros_like(p)
        step[i] = h
        if i == 0 and not (domain[0] <= p[0] - h and p[0] + h <= domain[1]):
            one_sided = True
            sign = 1.0 if p[0] - h < domain[0] else -1.0
            f0, f1, f2 = chart(p), chart(p + sign * step), chart(p + 2 * sign * step)
            rows.append(sign * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
        else:
            rows.append((chart(p + step) - chart(p - step)) / (2.0 * h))
    return np.array(rows), one_sided


def fd_tangents(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> FDTangents:
    """Central-difference tangent vectors ``(l_s, l_* v_2, ..., l_* v_n)`` at (s, x)."""
    frame = tangent_frame(x)
    chart = _chart(immersion or default_immersion(spec), frame)
    p = np.zeros(spec.n)
    p[0] = s
    rows, one_sided = _jacobian(chart, p, cfg.h_first, spec.domain)
    if one_sided:
        logger.warning("One-sided s-difference used at s=%g (domain edge)", s)
    return FDTangents(vectors=rows, one_sided=one_sided)


def oracle_metric(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> np.ndarray:
    """Gram matrix of the finite-difference tangent vectors."""
    tangents = fd_tangents(spec, s, x, cfg, immersion).vectors
    return tangents @ tangents.T


def _omega_matrix(tangents: np.ndarray) -> np.ndarray:
    half = tangents.shape[1] // 2
    re, im = tangents[:, :half], tangents[:, half:]
    return re @ im.T - im @ re.T


def check_lagrangian(
    spec: FoliatedSpec,
    plan: SamplePlan = SamplePlan(),
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> ResidualReport:
    """Largest symplectic pairing of finite-difference tangents over the samples."""
    values, points = [], []
    for s, x in sample_points(spec, plan):
        tangents = fd_tangents(spec, s, x, cfg, immersion).vectors
        values.append(float(np.max(np.abs(_omega_matrix(tangents)))))
        points.append((s, x.x))
    return ResidualReport.from_values(values, points)


def corrupt_leaf_rotation(spec: FoliatedSpec, angle: float = 0.3) -> Immersion:
    """Negative control: rotate the imaginary part of l in the first coordinate plane.

    The real part is unchanged, so the result is still an immersion, but it is no
    longer Lagrangian.
    """
    rotation = np.eye(spec.n)
    c, s = math.cos(angle), math.sin(angle)
    rotation[:2, :2] = [[c, -s], [s, c]]
    base = default_immersion(spec)

    def immersion(t: float, x: np.ndarray) -> np.ndarray:
        point = base(t, x)
        return np.concatenate([point[: spec.n], rotation @ point[spec.n :]])

    return immersion


def _fd_frame(tangents: np.ndarray) -> np.ndarray:
    """Coefficients of the orthonormal frame (gradient of s, normalised u-axes)."""
    gram = tangents @ tangents.T
    inverse = np.linalg.inv(gram)
    frame = np.zeros_like(gram)
    frame[0] = inverse[0] / math.sqrt(inverse[0, 0])
    for j in range(1, gram.shape[0]):
        frame[j, j] = 1.0 / math.sqrt(gram[j, j])
    return frame


def _as_complex(rows: np.ndarray) -> np.ndarray:
    half = rows.shape[-1] // 2
    return rows[..., :half] + 1j * rows[..., half:]


def oracle_lagrangian_angle(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> complex:
    """Complex determinant of the finite-difference orthonormal frame."""
    tangents = fd_tangents(spec, s, x, cfg, immersion).vectors
    frame = _fd_frame(tangents) @ tangents
    return complex(np.linalg.det(_as_complex(frame).T))


def _hessian(
    chart: Callable[[np.ndarray], np.ndarray], p: np.ndarray, h: float
) -> np.ndarray:
    size = p.size
    center = chart(p)
    hessian = np.zeros((size, size, center.size))
    for i in range(size):
        ei = np.zeros(size)
        ei[i] = h
        hessian[i, i] = (chart(p + ei) - 2.0 * center + chart(p - ei)) / h**2
        for j in range(i + 1, size):
            ej = np.zeros(size)
            ej[j] = h
            mixed = (
                chart(p + ei + ej)
                - chart(p + ei - ej)
                - chart(p - ei + ej)
                + chart(p - ei - ej)
            ) / (4.0 * h**2)
            hessian[i, j] = hessian[j, i] = mixed
    return hessian


def _J(vector: np.ndarray) -> np.ndarray:
    half = vector.size // 2
    return np.concatenate([-vector[half:], vector[:half]])


def oracle_mean_curvature(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> OracleCurvature:
    """Mean curvature and the coefficients ``a, a_j`` from finite differences.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s: Arclength parameter, at least ``h_second`` from the domain edge.
    :type s: float
    :param x: Point of the unit sphere.
    :type x: DirectionLike
    :param cfg: Step sizes.
    :type cfg: FDConfig
    :param immersion: Replacement immersion.
    :type immersion: Optional[Immersion]
    :return: The oracle curvature.
    :rtype: OracleCurvature
    """
    lower, upper = spec.domain
    h = cfg.h_second
    if not (lower <= s - h and s + h <= upper):
        raise ValidationError(f"s={s} is closer than {h} to the domain edge")
    frame = tangent_frame(x)
    chart = _chart(immersion or default_immersion(spec), frame)
    p = np.zeros(spec.n)
    p[0] = s
    tangents = fd_tangents(spec, s, frame.x, cfg, immersion).vectors
    hessian = _hessian(chart, p, h)
    gram = tangents @ tangents.T
    projector = tangents.T @ np.linalg.solve(gram, tangents)
    normal = hessian - hessian @ projector.T
    coeffs = _fd_frame(tangents)
    unit = coeffs @ tangents
    second = np.einsum("ai,bj,ijk->abk", coeffs, coeffs, normal)
    trace = np.einsum("aak->k", second)
    rotated = np.array([_J(e) for e in unit])
    a = -float(trace @ rotated[0])
    aj = -(rotated[1:] @ trace)
    tensor = np.einsum("abk,ck->abc", second, rotated)
    defect = max(
        float(np.max(np.abs(tensor - np.transpose(tensor, perm))))
        for perm in itertools.permutations(range(3))
    )
    return OracleCurvature(
        a=a,
        aj=aj,
        mean_curvature=ComplexPoint.from_real(trace / spec.n),
        symmetry_defect=defect,
        frame=[ComplexPoint.from_real(e) for e in unit],
    )


def c_tensor_symmetry_defect(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
    immersion: Optional[Immersion] = None,
) -> float:
    """Largest asymmetry of ``C_abc = <h(e_a, e_b), J l_* e_c>`` under index swaps."""
    return oracle_mean_curvature(spec, s, x, cfg, immersion).symmetry_defect


def _beta_at(spec: FoliatedSpec, frame: TangentFrame, p: np.ndarray) -> float:
    u = p[1:]
    length = float(np.linalg.norm(u))
    x = frame.x.x if length == 0.0 else (
        math.cos(length) * frame.x.x + (math.sin(length) / length) * (u @ frame.v)
    )
    return lagrangian_angle(spec, float(p[0]), x)


def _laplacian_level(
    spec: FoliatedSpec,
    frame: TangentFrame,
    chart: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    h: float,
    h_metric: float,
) -> float:
    size = p.size

    def flux(q: np.ndarray, i: int) -> float:
        rows, _ = _jacobian(chart, q, h_metric, spec.domain)
        gram = rows @ rows.T
        inverse = np.linalg.inv(gram)
        beta = _beta_at(spec, frame, q)
        gradient = np.zeros(size)
        for j in range(size):
            step = np.zeros(size)
            step[j] = h
            gradient[j] = (
                angle_difference(_beta_at(spec, frame, q + step), beta)
                - angle_difference(_beta_at(spec, frame, q - step), beta)
            ) / (2.0 * h)
        return math.sqrt(np.linalg.det(gram)) * float(inverse[i] @ gradient)

    rows, _ = _jacobian(chart, p, h_metric, spec.domain)
    volume = math.sqrt(np.linalg.det(rows @ rows.T))
    divergence = 0.0
    for i in range(size):
        step = np.zeros(size)
        step[i] = h
        divergence += (flux(p + step, i) - flux(p - step, i)) / (2.0 * h)
    return -divergence / volume


def oracle_laplace_beltrami_beta(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
) -> LaplacianEstimate:
    """``-(1/sqrt g) d_i(sqrt g g^{ij} d_j beta)`` in the normal chart.

    Two step sizes are combined by Richardson extrapolation.

    Differences of beta are wrapped to ``(-pi, pi]``.
    """
    h = cfg.h_second
    lower, upper = spec.domain
    if not (lower <= s - 2 * h and s + 2 * h <= upper):
        raise ValidationError(f"s={s} is too close to the domain edge")
    frame = tangent_frame(x)
    chart = _chart(default_immersion(spec), frame)
    p = np.zeros(spec.n)
    p[0] = s
    coarse = _laplacian_level(spec, frame, chart, p, h, cfg.h_first)
    fine = _laplacian_level(spec, frame, chart, p, h / 2.0, cfg.h_first)
    value = (4.0 * fine - coarse) / 3.0
    return LaplacianEstimate(
        value=value,
        coarse=coarse,
        fine=fine,
        condition=abs(fine - coarse) / max(1.0, abs(value)),
    )


def centered_laplacian_beta(spec: FoliatedSpec, s: float, h: float = 1e-3) -> float:
    """``-r^{1-n} d/ds (r^{n-1} beta')`` for a centered spec, by a five-point stencil.

    Uses ``beta' = k + (n - 1) sin(alpha) / r``.
    """
    if not spec.centered:
        raise ValidationError("The one-dimensional Laplacian needs W = 0")
    n = spec.n

    def flux(t: float) -> float:
        state = eval_profile(spec.curve, t)
        if state.r <= 0:
            raise SingularityError("centered Laplacian", t)
        slope = state.k + (n - 1) * math.sin(state.alpha) / state.r
        return state.r ** (n - 1) * slope

    derivative = (
        flux(s - 2 * h) - 8.0 * flux(s - h) + 8.0 * flux(s + h) - flux(s + 2 * h)
    ) / (12.0 * h)
    r = eval_profile(spec.curve, s).r
    return -derivative / r ** (n - 1)


def _normal_part(vector: ComplexPoint, pushed: Sequence[ComplexPoint]) -> ComplexPoint:
    total = ComplexPoint.from_complex(np.zeros(vector.n, dtype=complex))
    for e in pushed:
        je = e.J()
        total = total + je * vector.inner(je)
    return total


def _residual_report(
    spec: FoliatedSpec,
    plan: SamplePlan,
    residual: Callable[[float, SphereDirection], float],
) -> ResidualReport:
    values, points, skipped = [], [], 0
    for s, x in sample_points(spec, plan):
        try:
            values.append(residual(s, x))
        except (SingularityError, UndefinedAngleError) as error:
            logger.warning("Skipping sample s=%g: %s", s, error)
            skipped += 1
            continue
        points.append((s, x.x))
    return ResidualReport.from_values(values, points, skipped)


def oracle_angle_gradient_norm(
    spec: FoliatedSpec,
    s: float,
    x: DirectionLike,
    cfg: FDConfig = FDConfig(),
) -> float:
    """``|grad beta| = sqrt(g^{ij} d_i beta d_j beta)`` in the normal chart.

    Differences of beta are wrapped to ``(-pi, pi]``; the metric is the Gram matrix
    of the finite-difference tangents.
    """
    frame = tangent_frame(x)
    p = np.zeros(spec.n)
    p[0] = s
    beta = _beta_at(spec, frame, p)

    def wrapped(q: np.ndarray) -> np.ndarray:
        return np.array([angle_difference(_beta_at(spec, frame, q), beta)])

    rows, _ = _jacobian(wrapped, p, cfg.h_first, spec.domain)
    gradient = rows[:, 0]
    gram = oracle_metric(spec, s, frame.x, cfg)
    return math.sqrt(max(0.0, float(gradient @ np.linalg.solve(gram, gradient))))


def residual_special_lagrangian(
    spec: FoliatedSpec,
    plan: SamplePlan = SamplePlan(),
    cfg: FDConfig = FDConfig(),
) -> ResidualReport:
    """Residual ``|grad beta|`` of the special Lagrangian equation."""

    def residual(s: float, x: SphereDirection) -> float:
        return oracle_angle_gradient_norm(spec, s, x, cfg)

    return _residual_report(spec, plan, residual)


def residual_self_similar(
    spec: FoliatedSpec,
    plan: SamplePlan = SamplePlan(),
    lam: float = 1.0,
    cfg: FDConfig = FDConfig(),
) -> ResidualReport:
    """Residual ``|H + lam X^perp|`` of the self-similar equation.

    ``lam > 0`` tests self-shrinkers, ``lam < 0`` self-expanders. H and the normal
    projection come from the finite-difference oracle.
    """

    def residual(s: float, x: SphereDirection) -> float:
        oracle = oracle_mean_curvature(spec, s, x, cfg)
        position = eval_immersion(spec, s, x)
        normal = _normal_part(position, oracle.frame)
        return (oracle.mean_curvature + normal * lam).norm()

    return _residual_report(spec, plan, residual)


def residual_translator(
    spec: FoliatedSpec,
    direction: Sequence[complex],
    plan: SamplePlan = SamplePlan(),
    cfg: FDConfig = FDConfig(),
) -> ResidualReport:
    """Residual ``|H - V^perp|`` of the translating-soliton equation for a fixed V."""
    target = ComplexPoint.from_complex(np.asarray(direction, dtype=complex))
    if target.n != spec.n:
        raise ValidationError(f"V: expected {spec.n} complex components")

    def residual(s: float, x: SphereDirection) -> float:
        oracle = oracle_mean_curvature(spec, s, x, cfg)
        return (oracle.mean_curvature - _normal_part(target, oracle.frame)).norm()

    return _residual_report(spec, plan, residual)


def star_instance_from_motion(
    M: np.ndarray, dM: np.ndarray, dV: np.ndarray
) -> StarInstance:
    """Build ``b = Im(M^-1 V')`` and ``B = Im(M^-1 M')`` for a unitary motion M(s)."""
    matrix = np.asarray(M, dtype=complex)
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) > 1e-9:
        raise ValidationError("M: the leaf motion must be unitary")
    inverse = matrix.conj().T
    bmat = (inverse @ np.asarray(dM, dtype=complex)).imag
    if np.max(np.abs(bmat - bmat.T)) > 1e-9:
        raise ValidationError("dM: M^-1 M' must be skew Hermitian")
    b = (inverse @ np.asarray(dV, dtype=complex)).imag
    return StarInstance(b=b, bmat=0.5 * (bmat + bmat.T))


def star_condition_expected(instance: StarInstance, tol: float = STAR_TOL) -> bool:
    """Whether the leaf-isotropy condition must hold: b = 0 and B a homothety."""
    diagonal = np.diag(instance.bmat)
    off = instance.bmat - np.diag(diagonal)
    spread = float(np.max(diagonal) - np.min(diagonal))
    return (
        float(np.linalg.norm(instance.b)) < tol
        and float(np.max(np.abs(off), initial=0.0)) + spread < tol
    )


def check_star_condition(
    instance: StarInstance,
    plan: SamplePlan = SamplePlan(count=64),
    r: float = 1.0,
) -> StarVerdict:
    """Sample ``<b, xi> + r <B x, xi> = 0`` over unit x and unit xi orthogonal to x.

    :param instance: Vector b and symmetric matrix B.
    :type instance: StarInstance
    :param plan: Number of samples and seed.
    :type plan: SamplePlan
    :param r: Leaf radius.
    :type r: float
    :return: Verdict with the worst sample as witness.
    :rtype: StarVerdict
    :raises ValidationError: Fewer than ``n^2`` samples or a non-positive radius.
    """
    n = instance.n
    if plan.count < n * n:
        raise ValidationError(f"samples: need at least n^2 = {n * n}, got {plan.count}")
    if r <= 0:
        raise ValidationError(f"r: must be positive, got {r}")
    sampler = qmc.Halton(d=2 * n, scramble=True, seed=plan.seed)
    table = norm.ppf(np.clip(sampler.random(plan.count), 1e-12, 1.0 - 1e-12))
    worst, witness = 0.0, None
    for row in table:
        x = row[:n] / np.linalg.norm(row[:n])
        xi = row[n:] - (row[n:] @ x) * x
        length = np.linalg.norm(xi)
        if length < 1e-12:
            continue
        xi = xi / length
        violation = abs(float(instance.b @ xi + r * (instance.bmat @ x) @ xi))
        if violation > worst:
            worst, witness = violation, (x, xi)
    holds = worst < STAR_TOL
    return StarVerdict(
        holds=holds,
        max_violation=worst,
        samples=plan.count,
        witness=None if holds else witness,
    )


def _row(name: str, report: ResidualReport) -> CheckResult:
    tol = TOLERANCES[name]
    witness = report.to_dict()["witness"]
    return CheckResult(
        check=name,
        passed=report.sup_norm <= tol,
        sup=report.sup_norm,
        rms=report.rms,
        tol=tol,
        witness=witness,
    )


def run_verification(
    spec: FoliatedSpec,
    plan: SamplePlan = SamplePlan(),
    cfg: FDConfig = FDConfig(),
) -> List[CheckResult]:
    """Run every closed-form check against its oracle over the sample plan.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param plan: Sample plan.
    :type plan: SamplePlan
    :param cfg: Step sizes.
    :type cfg: FDConfig
    :return: One row per check.
    :rtype: List[CheckResult]
    """
    points = sample_points(spec, plan)
    collected: Dict[str, List[float]] = {name: [] for name in TOLERANCES}
    where: Dict[str, List[Tuple[float, np.ndarray]]] = {name: [] for name in TOLERANCES}
    skipped = 0

    def record(name: str, value: float, s: float, x: SphereDirection) -> None:
        collected[name].append(value)
        where[name].append((s, x.x))

    for s, x in points:
        record("arclength", abs(spec.curve.jet(s).speed_defect()), s, x)
        try:
            frame = tangent_frame(x)
            tangents = fd_tangents(spec, s, x, cfg).vectors
            record("lagrangian", float(np.max(np.abs(_omega_matrix(tangents)))), s, x)
            closed = orthonormal_frame(spec, s, frame)
            metric = closed.metric_matrix()
            scale = max(1.0, float(np.max(np.abs(metric))))
            gap = float(np.max(np.abs(tangents @ tangents.T - metric)))
            record("metric", gap / scale, s, x)
            record("frame", closed.orthonormality_defect(), s, x)
            beta = lagrangian_angle(spec, s, x)
            determinant = oracle_lagrangian_angle(spec, s, x, cfg)
            phase = complex(math.cos(beta), math.sin(beta))
            record("angle", abs(phase - determinant), s, x)
            oracle = oracle_mean_curvature(spec, s, x, cfg)
            coeffs = mean_curvature_coeffs(spec, s, frame)
            assert coeffs.a is not None and coeffs.aj is not None
            gap = max([abs(coeffs.a - oracle.a)] + list(np.abs(coeffs.aj - oracle.aj)))
            scale = max([1.0, abs(coeffs.a)] + list(np.abs(coeffs.aj)))
            record("mean_curvature", gap / scale, s, x)
            record("c_symmetry", oracle.symmetry_defect, s, x)
            laplacian = delta_beta_poly_f(spec, s, x).delta_beta
            estimate = oracle_laplace_beltrami_beta(spec, s, x, cfg).value
            relative = abs(laplacian - estimate) / max(1.0, abs(laplacian))
            record("delta_beta", relative, s, x)
            if spec.centered:
                record(
                    "delta_beta_centered",
                    abs(laplacian - centered_laplacian_beta(spec, s))
                    / max(1.0, abs(laplacian)),
                    s,
                    x,
                )
        except (SingularityError, UndefinedAngleError) as error:
            logger.warning("Skipping sample s=%g: %s", s, error)
            skipped += 1
    rows = []
    for name in TOLERANCES:
        if not collected[name]:
            continue
        report = ResidualReport.from_values(collected[name], where[name], skipped)
        rows.append(_row(name, report))
        if not rows[-1].passed:
            logger.warning(
                "Check %s failed: sup %.3g > tol %.3g",
                name,
                report.sup_norm,
                rows[-1].tol,
            )
    return rows
