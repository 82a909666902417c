"""Per-θ transfer functions of the physical nonlinear node.

Each ``*_step`` maps ``(u, s_feedback, s_prev)`` to the next state, where
``s_feedback`` is the state one loop delay τ ago and ``s_prev`` the state one
θ slot ago. The batch loops in :mod:`dfrc.kernels` evaluate the same
expressions in the same order, so a flat recursion over these functions
reproduces an engine run bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import StateDivergenceError

NODE_KINDS = ("silicon_mr", "mackey_glass", "mzi")


@dataclass(frozen=True)
class SiliconMRParams:
    """Microring node.

    The state update charges the cavity by ``(u + gamma*s_feedback)`` times
    ``1 - exp(-theta/tau_ph)`` and adds a trailing memory term. Two switches
    select how that term is formed:

    * ``trailing_state``: ``"tau"`` takes the state one loop delay back, as
      in the reference update rule; ``"theta"`` takes the previous
      slot's state, which makes each virtual node relax from its neighbour
      with time constant ``tau_ph``.
    * ``symmetric_decay``: when false the charging branch (``u >= s_prev``)
      adds the trailing state undamped; when true both branches damp it by
      ``exp(-theta/tau_ph)``.

    The literal form (``"tau"``, ``False``) multiplies the feedback by
    ``1 + gamma*(1 - exp(-theta/tau_ph)) > 1`` on every charging step and
    diverges for any ``gamma > 0``. ``("tau", True)`` is stable but leaves
    the virtual nodes uncoupled, so all columns of the state matrix are the
    same filter up to the mask sign. The default ``("theta", True)`` is the
    exact solution over one slot of a first-order cavity driven by
    ``u + gamma*s_feedback``.
    """

    tau_ph: float = 50e-12
    theta: float = 50e-12
    gamma: float = 0.9
    symmetric_decay: bool = True
    trailing_state: str = "theta"

    def __post_init__(self):
        if not self.tau_ph > 0 or not self.theta > 0:
            raise ValueError("tau_ph and theta must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.trailing_state not in ("tau", "theta"):
            raise ValueError("trailing_state must be 'tau' or 'theta'")

    @classmethod
    def literal(cls, tau_ph: float, theta: float, gamma: float) -> "SiliconMRParams":
        """Reference update rule: undamped charging term, lag-τ memory."""
        return cls(tau_ph, theta, gamma, symmetric_decay=False, trailing_state="tau")

    @property
    def ratio(self) -> float:
        return self.theta / self.tau_ph

    @property
    def charge(self) -> float:
        """Fraction ``1 - exp(-theta/tau_ph)`` coupled in per slot.

        Evaluated as written rather than with ``expm1`` so that any direct
        implementation of the formula reproduces engine states bit for bit.
        """
        return 1.0 - math.exp(-self.ratio)

    @property
    def decay(self) -> float:
        return math.exp(-self.ratio)


@dataclass(frozen=True)
class MackeyGlassParams:
    """Electronic Mackey-Glass baseline.

    One explicit-Euler step of ``dx/dt = -x + eta*z / (1 + |z|**p)`` over a
    slot of normalized length ``h = theta_over_T``, with the delayed drive
    ``z = s_feedback + gamma_in*u`` held constant across the slot.
    """

    eta: float = 0.4
    gamma_in: float = 0.05
    exponent_p: float = 2.0
    theta_over_T: float = 0.2

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.eta, self.gamma_in, self.exponent_p, self.theta_over_T)):
            raise ValueError("Mackey-Glass parameters must be finite")
        if self.exponent_p < 1:
            raise ValueError("exponent_p must be >= 1")
        if not self.theta_over_T > 0:
            raise ValueError("theta_over_T must be > 0")


@dataclass(frozen=True)
class MZIParams:
    """All-optical MZI baseline: ``gain * sin^2(u + gamma*s_feedback + phase_bias)``."""

    phase_bias: float = 0.25 * math.pi
    gain: float = 1.0
    gamma: float = 0.9

    def __post_init__(self):
        if not math.isfinite(self.gain) or not math.isfinite(self.phase_bias):
            raise ValueError("MZI gain and phase_bias must be finite")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")


NodeParams = SiliconMRParams | MackeyGlassParams | MZIParams


def _checked(value: float, prev: float, step: int | None) -> float:
    if not math.isfinite(value):
        raise StateDivergenceError(-1 if step is None else step, prev)
    return value


def mr_step(u: float, s_feedback: float, s_prev: float, params: SiliconMRParams,
            step: int | None = None) -> float:
    charged = (u + params.gamma * s_feedback) * params.charge
    tail = s_prev if params.trailing_state == "theta" else s_feedback
    if u >= s_prev and not params.symmetric_decay:
        s = charged + tail
    else:
        s = charged + tail * params.decay
    return _checked(s, s_prev, step)


def mg_step(u: float, s_feedback: float, s_prev: float, params: MackeyGlassParams,
            step: int | None = None) -> float:
    z = s_feedback + params.gamma_in * u
    drive = params.eta * z / (1.0 + abs(z) ** params.exponent_p)
    s = s_prev + params.theta_over_T * (drive - s_prev)
    return _checked(s, s_prev, step)


def mzi_step(u: float, s_feedback: float, s_prev: float, params: MZIParams,
             step: int | None = None) -> float:
    x = math.sin(u + params.gamma * s_feedback + params.phase_bias)
    return _checked(params.gain * (x * x), s_prev, step)


def node_kind(params: NodeParams) -> str:
    if isinstance(params, SiliconMRParams):
        return "silicon_mr"
    if isinstance(params, MackeyGlassParams):
        return "mackey_glass"
    if isinstance(params, MZIParams):
        return "mzi"
    raise TypeError(f"unsupported node parameters {type(params).__name__}")


def step_function(params: NodeParams):
    return {"silicon_mr": mr_step, "mackey_glass": mg_step, "mzi": mzi_step}[node_kind(params)]
