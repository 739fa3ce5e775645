"""Initial guesses and time-compressed continuation of pulses."""
from typing import Any, Mapping

import numpy as np
from pydantic import ValidationError
from scipy.interpolate import CubicSpline

from app.core.errors import InvalidDuration, InvalidSpec
from app.optimizer.propagation import Pulse
from app.schemas.optimization import GuessSpec


def knot_indices(n: int, stride: int) -> np.ndarray:
    """Every stride-th slice from 0, plus the last slice so both ends are pinned."""
    knots = np.arange(0, n, stride)
    if knots[-1] != n - 1:
        knots = np.append(knots, n - 1)
    return knots


def _spline_through(knots: np.ndarray, values: np.ndarray, n: int) -> np.ndarray:
    if knots.size == 1:
        return np.full(n, values[0])
    samples = CubicSpline(knots, values, bc_type="natural")(np.arange(n))
    # exact knot values, the spline evaluation may be off by rounding at the last knot
    samples[knots] = values
    return samples


def guess_spec(spec: GuessSpec | Mapping[str, Any]) -> GuessSpec:
    """Validate a guess spec given as a model or as plain fields."""
    payload = spec.model_dump() if isinstance(spec, GuessSpec) else spec
    try:
        return GuessSpec.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "spec"
        raise InvalidSpec(f"invalid guess spec: {where}: {first['msg']}") from exc


def random_spline_guess(spec: GuessSpec | Mapping[str, Any], T: float) -> Pulse:
    """Uniform random knots in [-bound, bound] joined by a natural cubic spline.

    The bound applies to the knots only; the spline may overshoot between them.

    Raises:
        InvalidSpec: The spec fields are out of range.
    """
    spec = guess_spec(spec)
    rng = np.random.default_rng(spec.seed)
    knots = knot_indices(spec.n, spec.knot_stride)
    bound = spec.amplitude_bound
    ux_knots = rng.uniform(-bound, bound, size=knots.size)
    uy_knots = rng.uniform(-bound, bound, size=knots.size)
    return Pulse(
        ux=_spline_through(knots, ux_knots, spec.n),
        uy=_spline_through(knots, uy_knots, spec.n),
        T=T,
    )


def pft_continue(pulse: Pulse, delta_t: float) -> Pulse:
    """Reuse the amplitude samples over the shorter duration T - delta_t.

    N is kept and the slice width shrinks, so the whole shape is compressed
    rather than truncated.
    """
    if delta_t < 0 or delta_t >= pulse.T:
        raise InvalidDuration(f"deltaT must lie in [0, T={pulse.T:g}), got {delta_t:g}")
    if delta_t == 0:
        return pulse
    return pulse.with_duration(pulse.T - delta_t)
