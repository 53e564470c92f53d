"""Pointwise closed forms of a sphere-foliated Lagrangian immersion.

For ``l(s, x) = r e^{i phi} x + V(s)`` this module evaluates the sphere tangent frame,
the immersion, the induced metric with its orthonormal frame ``(A, B_j)``, the
Lagrangian angle, the curvature scalar B, the mean-curvature coefficients ``a, a_j``
and the polynomial ``f = A^-6 Delta beta``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from sigma_lagrangian.exceptions import (
    InternalError,
    NumericError,
    SingularityError,
    UndefinedAngleError,
    ValidationError,
)
from sigma_lagrangian.models import (
    ComplexPoint,
    CurvatureData,
    FrameData,
    LeadingTermFit,
    ProfileState,
    SphereDirection,
    TangentFrame,
)
from sigma_lagrangian.profile_curves import FoliatedSpec, eval_profile
from sigma_lagrangian.utils import wrap_angle

logger = logging.getLogger(__name__)

DirectionLike = Union[SphereDirection, Sequence[float], np.ndarray]

_POLE_GAP = 1e-6


def sphere_direction(vector: DirectionLike) -> SphereDirection:
    """Normalise a nonzero vector of R^n to a sphere direction."""
    if isinstance(vector, SphereDirection):
        return vector
    array = np.array(vector, dtype=float)
    norm = float(np.linalg.norm(array))
    if array.ndim != 1 or norm == 0.0 or not math.isfinite(norm):
        raise ValidationError("x: expected a nonzero finite vector")
    return SphereDirection(array / norm)


def tangent_frame(x: DirectionLike) -> TangentFrame:
    """Complete x to a positively oriented orthonormal basis ``(x, v_2, ..., v_n)``.

    The completion is the Householder reflection exchanging x with the first axis,
    applied to the remaining coordinate axes. Within 1e-6 of ``-e_1`` the reflection
    switches to the axis exchanging x with ``+e_1``.

    :param x: Unit vector (or nonzero vector, normalised here).
    :type x: DirectionLike
    :return: The tangent frame at x.
    :rtype: TangentFrame
    """
    direction = sphere_direction(x)
    vec = direction.x
    n = vec.size
    axis = np.zeros(n)
    axis[0] = 1.0
    flip = 1.0 + vec[0] < _POLE_GAP
    w = vec - axis if flip else vec + axis
    reflection = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    v = reflection[:, 1:].T.copy()
    if flip:
        v[-1] = -v[-1]
    return TangentFrame(x=direction, v=v)


@dataclass(frozen=True)
class _Local:
    """Profile state and center-velocity pairings at (s, x)."""

    state: ProfileState
    W: np.ndarray
    dW: np.ndarray
    ddW: np.ndarray
    wx: float
    dwx: float
    ddwx: float

    @property
    def w2(self) -> float:
        return float(self.W @ self.W)

    @property
    def wdw(self) -> float:
        return float(self.W @ self.dW)


def _local(spec: FoliatedSpec, s: float, x: SphereDirection, curvature: bool) -> _Local:
    state = eval_profile(spec.curve, s, need_curvature=curvature)
    W, dW, ddW = spec.center(s)
    return _Local(
        state=state,
        W=W,
        dW=dW,
        ddW=ddW,
        wx=float(W @ x.x),
        dwx=float(dW @ x.x),
        ddwx=float(ddW @ x.x),
    )


def _require_radius(state: ProfileState, quantity: str) -> None:
    if state.r <= 0:
        raise SingularityError(quantity, state.s)


def eval_immersion(spec: FoliatedSpec, s: float, x: DirectionLike) -> ComplexPoint:
    """Evaluate ``l(s, x) = r e^{i phi} x + V(s)``.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s: Arclength parameter in the domain.
    :type s: float
    :param x: Point of the unit sphere.
    :type x: DirectionLike
    :return: The image point in C^n.
    :rtype: ComplexPoint
    """
    direction = sphere_direction(x)
    jet = spec.curve.jet(s)
    point = jet.r * np.exp(1j * jet.phi) * direction.x + spec.center_integral(s)
    return ComplexPoint.from_complex(point)


def induced_metric(spec: FoliatedSpec, s: float, frame: TangentFrame) -> FrameData:
    """Metric components in the basis ``(d/ds, v_j)`` and the basis pushforwards."""
    local = _local(spec, s, frame.x, curvature=False)
    state = local.state
    x = frame.x.x
    wv = frame.v @ local.W
    g11 = 1.0 + local.w2 + 2.0 * math.cos(state.alpha) * local.wx
    ell_s = np.exp(1j * state.theta) * x + np.exp(1j * state.phi) * local.W
    ell_v = [
        ComplexPoint.from_complex(state.r * np.exp(1j * state.phi) * v) for v in frame.v
    ]
    return FrameData(
        g11=g11,
        g1j=state.r * wv,
        gjj=state.r**2,
        r=state.r,
        ell_s=ComplexPoint.from_complex(ell_s),
        ell_v=ell_v,
    )


def _frame_normaliser(alpha: float, wx: float) -> float:
    value = 1.0 + 2.0 * math.cos(alpha) * wx + wx**2
    if not value > 0:
        raise InternalError(
            "Frame normaliser 1 + 2 cos(alpha)<W,x> + <W,x>^2 = "
            f"{value!r} is not positive"
        )
    return value


def orthonormal_frame(spec: FoliatedSpec, s: float, frame: TangentFrame) -> FrameData:
    """Metric plus the orthonormal frame ``e_1 = A d/ds + sum B_j v_j, e_j = v_j / r``.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s: Arclength parameter with r(s) > 0.
    :type s: float
    :param frame: Tangent frame at x.
    :type frame: TangentFrame
    :return: Metric and frame coefficients.
    :rtype: FrameData
    """
    metric = induced_metric(spec, s, frame)
    if metric.r <= 0:
        raise SingularityError("orthonormal frame", s)
    state = eval_profile(spec.curve, s, need_curvature=False)
    W = spec.center(s)[0]
    A = _frame_normaliser(state.alpha, float(W @ frame.x.x)) ** -0.5
    Bj = -A * (frame.v @ W) / metric.r
    return FrameData(
        g11=metric.g11,
        g1j=metric.g1j,
        gjj=metric.gjj,
        r=metric.r,
        ell_s=metric.ell_s,
        ell_v=metric.ell_v,
        A=A,
        Bj=Bj,
    )


def lagrangian_angle(spec: FoliatedSpec, s: float, x: DirectionLike) -> float:
    """Return ``beta = Arg(e^{i alpha} + <W, x>) + n phi`` reduced to ``[0, 2 pi)``."""
    direction = sphere_direction(x)
    local = _local(spec, s, direction, curvature=False)
    z = complex(math.cos(local.state.alpha) + local.wx, math.sin(local.state.alpha))
    if abs(z) < 1e-14:
        raise UndefinedAngleError(
            f"e^(i alpha) + <W,x> vanishes at s={s!r}; "
            "the Lagrangian angle is undefined"
        )
    return wrap_angle(math.atan2(z.imag, z.real) + spec.n * local.state.phi)


def _curvature_scalar(state: ProfileState, wx: float, dwx: float) -> float:
    c, sn, r, k = math.cos(state.alpha), math.sin(state.alpha), state.r, state.k
    return k + (k * c + sn * c / r) * wx + sn * dwx + (sn / r) * wx**2


def curvature_scalar_B(spec: FoliatedSpec, s: float, x: DirectionLike) -> float:
    """Curvature scalar B of the Laplacian polynomial; equals k when W vanishes."""
    local = _local(spec, s, sphere_direction(x), curvature=True)
    _require_radius(local.state, "curvature scalar B")
    return _curvature_scalar(local.state, local.wx, local.dwx)


def _mean_curvature_bracket(
    state: ProfileState, wx: float, dwx: float, w2: float, wv: np.ndarray
) -> float:
    # <h(d_s, d_s), J l_s> with the v_j corrections of e_1 = A(d_s - sum <W,v_j> v_j/r)
    c, sn, r, k = math.cos(state.alpha), math.sin(state.alpha), state.r, state.k
    second = k + k * c * wx + sn * c * wx / r + sn * dwx + sn * w2 / r
    tangential = float(wv @ wv)
    return second + sn * tangential / r - 2.0 * sn * tangential / r


def mean_curvature_coeffs(
    spec: FoliatedSpec, s: float, frame: TangentFrame
) -> CurvatureData:
    """Coefficients of ``n J H = a l_* e_1 + sum a_j l_* e_j``.

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s: Arclength parameter with r(s) > 0.
    :type s: float
    :param frame: Tangent frame at x.
    :type frame: TangentFrame
    :return: B, A, a and a_j.
    :rtype: CurvatureData
    """
    local = _local(spec, s, frame.x, curvature=True)
    state = local.state
    _require_radius(state, "mean curvature")
    sn, r, n = math.sin(state.alpha), state.r, spec.n
    wv = frame.v @ local.W
    A = _frame_normaliser(state.alpha, local.wx) ** -0.5
    bracket = _mean_curvature_bracket(state, local.wx, local.dwx, local.w2, wv)
    return CurvatureData(
        B=_curvature_scalar(state, local.wx, local.dwx),
        A=A,
        a=-(A**3) * bracket - (n - 1) * A * sn / r,
        aj=A**2 * sn * wv / r,
    )


def mean_curvature_vector(
    spec: FoliatedSpec, s: float, frame: TangentFrame
) -> ComplexPoint:
    """Mean curvature vector ``H = -(a J l_* e_1 + sum a_j J l_* e_j) / n``."""
    coeffs = mean_curvature_coeffs(spec, s, frame)
    pushed = orthonormal_frame(spec, s, frame).pushforward_frame()
    assert coeffs.a is not None and coeffs.aj is not None
    total = pushed[0].J() * coeffs.a
    for coefficient, vector in zip(coeffs.aj, pushed[1:]):
        total = total + vector.J() * float(coefficient)
    return total * (-1.0 / spec.n)


def delta_beta_blocks(
    n: int,
    r: float,
    alpha: float,
    k: float,
    dk: float,
    wx: float,
    dwx: float,
    ddwx: float,
    w2: float,
    wdw: float,
) -> Tuple[Tuple[float, float, float, float], float]:
    """Evaluate the four blocks of ``f = A^-6 Delta beta`` from scalar inputs.

    :param n: Complex dimension.
    :type n: int
    :param r: Leaf radius, positive.
    :type r: float
    :param alpha: Angle between tangent and radial direction.
    :type alpha: float
    :param k: Profile curvature.
    :type k: float
    :param dk: Derivative of the profile curvature.
    :type dk: float
    :param wx: ``<W, x>``.
    :type wx: float
    :param dwx: ``<W', x>``.
    :type dwx: float
    :param ddwx: ``<W'', x>``.
    :type ddwx: float
    :param w2: ``|W|^2``.
    :type w2: float
    :param wdw: ``<W', W>``.
    :type wdw: float
    :return: The blocks and their sum f.
    :rtype: Tuple[Tuple[float, float, float, float], float]
    """
    c, sn = math.cos(alpha), math.sin(alpha)
    dalpha = k - sn / r
    inv2 = 1.0 + 2.0 * c * wx + wx**2
    inv4 = inv2**2
    B = k + (k * c + sn * c / r) * wx + sn * dwx + (sn / r) * wx**2
    D = c * dwx - dalpha * sn * wx + wx * dwx
    P = w2 - wx**2
    d_sn_r = c * dalpha / r - sn * c / r**2
    d_snc_r = (c**2 - sn**2) * dalpha / r - sn * c**2 / r**2
    dB = (
        dk
        + (dk * c - k * sn * dalpha + d_snc_r) * wx
        + (k * c + sn * c / r) * dwx
        + c * dalpha * dwx
        + sn * ddwx
        + d_sn_r * wx**2
        + 2.0 * (sn / r) * wx * dwx
    )
    block1 = (
        3.0 * B * D
        - inv2 * (dB - (n - 1) * (sn / r) * D)
        - inv4 * (n - 1) * d_sn_r
    )
    block2 = -3.0 * B * (c + wx) * P / r + (inv2 / r) * (
        (k * c - (n - 2) * sn * c / r - (n - 3) * (sn / r) * wx) * P
        + sn * (wdw - wx * dwx)
    )
    block3 = -inv2 * (sn / r**2) * (c + wx) * P - inv4 * (n - 1) * (sn / r**2) * wx
    block4 = (
        -inv2 * B * (n - 1) * (c + wx) / r
        - inv4 * (n - 1) ** 2 * (sn / r**2) * (c + wx)
    )
    blocks = (block1, block2, block3, block4)
    return blocks, float(sum(blocks))


def _f_inputs(spec: FoliatedSpec, s: float, x: SphereDirection) -> _Local:
    local = _local(spec, s, x, curvature=True)
    _require_radius(local.state, "Laplacian of the Lagrangian angle")
    if not math.isfinite(local.state.dk):
        raise NumericError(
            f"Profile curve {spec.curve.name} has no third jet at s={s!r}"
        )
    return local


def delta_beta_poly_f(spec: FoliatedSpec, s: float, x: DirectionLike) -> CurvatureData:
    """Evaluate f, its blocks and ``Delta beta = A^6 f`` at (s, x).

    :param spec: Immersion data.
    :type spec: FoliatedSpec
    :param s: Arclength parameter with r(s) > 0.
    :type s: float
    :param x: Point of the unit sphere.
    :type x: DirectionLike
    :return: Curvature data with f and the blocks filled in.
    :rtype: CurvatureData
    """
    frame = tangent_frame(x)
    local = _f_inputs(spec, s, frame.x)
    state = local.state
    blocks, f = delta_beta_blocks(
        spec.n,
        state.r,
        state.alpha,
        state.k,
        state.dk,
        local.wx,
        local.dwx,
        local.ddwx,
        local.w2,
        local.wdw,
    )
    coeffs = mean_curvature_coeffs(spec, s, frame)
    return CurvatureData(
        B=coeffs.B, A=coeffs.A, a=coeffs.a, aj=coeffs.aj, f=f, blocks=blocks
    )


def coefficient_check_acceleration(
    spec: FoliatedSpec, s: float, x: DirectionLike
) -> float:
    """Defect of the ``<W'', x>`` coefficient of f against its closed form.

    f is affine in ``<W'', x>``, so a two-point slope is exact; the closed form is
    ``-sin(alpha) (1 + 2 cos(alpha) <W, x> + <W, x>^2)``.
    """
    local = _f_inputs(spec, s, sphere_direction(x))
    state = local.state
    base = (
        spec.n,
        state.r,
        state.alpha,
        state.k,
        state.dk,
        local.wx,
        local.dwx,
    )
    _, low = delta_beta_blocks(*base, local.ddwx, local.w2, local.wdw)
    _, high = delta_beta_blocks(*base, local.ddwx + 1.0, local.w2, local.wdw)
    expected = -math.sin(state.alpha) * _frame_normaliser(state.alpha, local.wx)
    return abs((high - low) - expected)


def coefficient_check_leading_term(
    n: int,
    r: float,
    alpha: float,
    w: Sequence[float],
    x: DirectionLike,
    ladder: Optional[Sequence[float]] = None,
    k: float = 0.0,
    dk: float = 0.0,
) -> LeadingTermFit:
    """Fit the ``t^5`` coefficient of f along ``<W, x> = t <w, x>``.

    ``W'`` and ``W''`` vanish and ``|W|^2`` is held at ``|w|^2``, so f restricted to
    the ladder is a quintic in t whose top coefficient should be
    ``(-n^2 + n + 2) sin(alpha) <w, x>^5 / r^2``.

    :param n: Complex dimension, at least 3.
    :type n: int
    :param r: Leaf radius.
    :type r: float
    :param alpha: Angle with ``sin(alpha) != 0``.
    :type alpha: float
    :param w: Center-velocity direction with ``<w, x> != 0``.
    :type w: Sequence[float]
    :param x: Point of the unit sphere.
    :type x: DirectionLike
    :param ladder: Scale values t; defaults to twelve geometric steps in [0.5, 8].
    :type ladder: Optional[Sequence[float]]
    :return: Fitted and expected coefficients with fit diagnostics.
    :rtype: LeadingTermFit
    """
    if n < 3:
        raise ValidationError(f"n: must be >= 3, got {n}")
    sn = math.sin(alpha)
    if abs(sn) < 1e-12:
        raise ValidationError("alpha: the leading term vanishes when sin(alpha) = 0")
    direction = sphere_direction(x)
    wvec = np.array(w, dtype=float)
    wx0 = float(wvec @ direction.x)
    if wx0 == 0.0:
        raise ValidationError("w: must not be orthogonal to x")
    t = np.geomspace(0.5, 8.0, 12) if ladder is None else np.array(ladder, dtype=float)
    if t.size < 6:
        raise ValidationError("ladder: at least six scale values are needed")
    w2 = float(wvec @ wvec)
    values = np.array(
        [
            delta_beta_blocks(n, r, alpha, k, dk, ti * wx0, 0.0, 0.0, w2, 0.0)[1]
            for ti in t
        ]
    )
    fit = np.polynomial.Polynomial.fit(t, values, 5)
    coefficient = float(fit.convert().coef[5]) if fit.convert().coef.size > 5 else 0.0
    expected = (-(n**2) + n + 2) * sn * wx0**5 / r**2
    residual = float(np.max(np.abs(fit(t) - values)) / np.max(np.abs(values)))
    condition = float(np.linalg.cond(np.vander(t / np.max(np.abs(t)), 6)))
    if condition > 1e10:
        logger.warning("Leading-term fit is ill conditioned (cond=%.3g)", condition)
    return LeadingTermFit(
        coefficient=coefficient,
        expected=expected,
        relative_error=abs(coefficient - expected) / abs(expected),
        fit_residual=residual,
        condition_number=condition,
    )
