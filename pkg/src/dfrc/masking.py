"""Input masking: MLS mask generation and the sample-and-hold mask product.

The masked drive for a reservoir with ``N`` virtual nodes is laid out flat,
one value per θ slot: ``stream[k*N + i] = gain * input[k] * mask[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyInputError, InsufficientSequenceLengthError, InvalidSeedError

# Fibonacci LFSR feedback taps (1-based register positions), one primitive
# polynomial per register order. The feedback polynomial is
# x^m + sum(x^(m - t)) + 1 over the non-leading taps; every entry is checked
# for maximal period by exhaustive enumeration in the test-suite.
PRIMITIVE_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 11, 10, 4),
    13: (13, 12, 11, 8),
    14: (14, 13, 12, 2),
    15: (15, 14),
    16: (16, 15, 13, 4),
    17: (17, 14),
    18: (18, 11),
    19: (19, 18, 17, 14),
    20: (20, 17),
}

ALPHABETS = ("bipolar", "unipolar")


@dataclass(frozen=True)
class MaskPattern:
    """One mask weight per virtual node.

    For ``bipolar`` MLS masks values are ``±amplitude``; for ``unipolar``
    they are ``{0, amplitude}``.
    """

    values: np.ndarray
    amplitude: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("mask must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(v)):
            raise ValueError("mask values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_virtual(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def save(self, path: str | Path) -> None:
        """Write the mask as a single-column text file."""
        Path(path).write_text("".join(f"{x!r}\n" for x in self.values.tolist()))

    @classmethod
    def load(cls, path: str | Path, amplitude: float = 1.0) -> "MaskPattern":
        lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
        return cls(np.array([float(ln) for ln in lines if ln]), amplitude)


@dataclass(frozen=True)
class MaskedStream:
    values: np.ndarray
    n_virtual: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if self.n_virtual < 1 or v.size % self.n_virtual:
            raise ValueError("stream length must be a multiple of n_virtual")
        object.__setattr__(self, "values", v)

    @property
    def n_samples(self) -> int:
        return self.values.size // self.n_virtual

    def __len__(self) -> int:
        return self.values.size


def lfsr_bits(order: int, seed_state: int = 1, length: int | None = None) -> np.ndarray:
    """Bits of a maximal-length Fibonacci LFSR of the given order.

    The output bit is the register's lowest bit; the register shifts right
    and the XOR of the tapped bits enters at the top. With a nonzero seed the
    sequence has period ``2**order - 1``.
    """
    if order not in PRIMITIVE_TAPS:
        raise ValueError(f"no primitive polynomial tabulated for order {order}")
    if seed_state <= 0 or seed_state >= 1 << order:
        raise InvalidSeedError(f"seed_state must be a nonzero {order}-bit integer, got {seed_state}")
    period = (1 << order) - 1
    if length is None:
        length = period
    shifts = [order - t for t in PRIMITIVE_TAPS[order]]
    top = order - 1
    state = seed_state
    out = np.empty(length, dtype=np.uint8)
    for n in range(length):
        out[n] = state & 1
        fb = 0
        for sh in shifts:
            fb ^= (state >> sh) & 1
        state = (state >> 1) | (fb << top)
    return out


def min_mls_order(n_virtual: int) -> int:
    """Smallest tabulated order whose MLS covers ``n_virtual`` slots."""
    m = max(2, int(n_virtual).bit_length())
    if (1 << m) - 1 < n_virtual:
        m += 1
    return m


def generate_mls_mask(
    order: int | None,
    n_virtual: int,
    amplitude: float = 1.0,
    seed_state: int = 1,
    alphabet: str = "bipolar",
) -> MaskPattern:
    """Build a mask from the first ``n_virtual`` chips of an MLS.

    Args:
        order: LFSR register length ``m``; ``None`` picks the smallest order
            with ``2**m - 1 >= n_virtual``.
        n_virtual: number of virtual nodes ``N``.
        amplitude: mask scale ``A``.
        seed_state: nonzero initial register contents.
        alphabet: ``"bipolar"`` maps bits to ``{-A, +A}``, ``"unipolar"``
            to ``{0, A}``.

    Raises:
        InsufficientSequenceLengthError: ``2**order - 1 < n_virtual``.
        InvalidSeedError: zero or out-of-range seed.
    """
    if n_virtual < 1:
        raise ValueError("n_virtual must be >= 1")
    if order is None:
        order = min_mls_order(n_virtual)
    if order < 2:
        raise ValueError("MLS order must be >= 2")
    if (1 << order) - 1 < n_virtual:
        raise InsufficientSequenceLengthError(
            f"MLS of order {order} has {(1 << order) - 1} chips, need {n_virtual}"
        )
    bits = lfsr_bits(order, seed_state, n_virtual).astype(np.float64)
    if alphabet == "bipolar":
        values = (2.0 * bits - 1.0) * amplitude
    elif alphabet == "unipolar":
        values = bits * amplitude
    else:
        raise ValueError(f"unknown mask alphabet {alphabet!r}; expected one of {ALPHABETS}")
    return MaskPattern(values, amplitude)


def apply_mask(inputs, mask: MaskPattern, gain: float = 1.0) -> MaskedStream:
    """Sample-and-hold each input across ``N`` slots and multiply by the mask."""
    x = np.asarray(inputs, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInputError("input series is empty")
    if not np.all(np.isfinite(x)):
        raise ValueError("input series contains non-finite values")
    if gain != 1.0:
        x = gain * x
    return MaskedStream(np.outer(x, mask.values).ravel(), mask.n_virtual)
