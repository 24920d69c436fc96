"""Independent brute-force references used to freeze expected values.

The stage matrices here are written out column by column from the reference
interferometer's port assignments, without going through the package's
embed/routing machinery, and the pointer oracle integrates Gaussian
wavepackets on a dense grid instead of using closed-form overlaps.
"""

from __future__ import annotations

import numpy as np

ARMS = ("S", "A", "B", "C", "D", "E", "F")

_C = 1.0 / np.sqrt(2.0)
_IS = 1j / np.sqrt(2.0)


def _columns_to_matrix(images: dict[str, dict[str, complex]]) -> np.ndarray:
    mat = np.zeros((7, 7), dtype=np.complex128)
    for src in ARMS:
        column = images.get(src, {src: 1.0})
        for dst, amp in column.items():
            mat[ARMS.index(dst), ARMS.index(src)] = amp
    return mat


def fig1_stage_matrices() -> list[np.ndarray]:
    """Stage unitaries of the three-path interferometer, written longhand."""
    split = _columns_to_matrix(
        {
            "S": {"D": _C, "A": _IS},
            "A": {"D": _IS, "A": _C},
            "D": {"S": 1.0},
        }
    )
    inner_split = _columns_to_matrix(
        {
            "D": {"C": _C, "B": _IS},
            "B": {"C": _IS, "B": _C},
            "C": {"D": 1.0},
        }
    )
    inner_merge = _columns_to_matrix(
        {
            "C": {"E": _C, "F": _IS},
            "B": {"E": _IS, "F": _C},
            "E": {"C": 1.0},
            "F": {"B": 1.0},
        }
    )
    return [split, inner_split, inner_merge]


def _pol_index(arm: str, pol: int) -> int:
    return ARMS.index(arm) * 2 + pol


def _pol_rotation(arm: str, angle: float) -> np.ndarray:
    mat = np.eye(14, dtype=np.complex128)
    c, s = np.cos(angle), np.sin(angle)
    h, v = _pol_index(arm, 0), _pol_index(arm, 1)
    mat[h, h] = c
    mat[h, v] = -s
    mat[v, h] = s
    mat[v, v] = c
    return mat


def fig2_stage_matrices() -> list[np.ndarray]:
    """Polarized variant: same splitters, wave plates inside the inner loop."""
    pol_identity = np.eye(2, dtype=np.complex128)
    split, inner_split, inner_merge = (
        np.kron(stage, pol_identity) for stage in fig1_stage_matrices()
    )
    inner_split = _pol_rotation("C", -np.pi / 4) @ _pol_rotation("B", np.pi / 4) @ inner_split
    return [split, inner_split, inner_merge]


def fig1_states() -> tuple[np.ndarray, np.ndarray]:
    pre = np.zeros(7, dtype=np.complex128)
    pre[ARMS.index("S")] = 1.0
    post = np.zeros(7, dtype=np.complex128)
    post[ARMS.index("A")] = _C
    post[ARMS.index("E")] = 1j * _C
    return pre, post


def fig2_states() -> tuple[np.ndarray, np.ndarray]:
    pre = np.zeros(14, dtype=np.complex128)
    pre[_pol_index("S", 0)] = 1.0
    post = np.zeros(14, dtype=np.complex128)
    post[_pol_index("A", 0)] = _C
    post[_pol_index("E", 0)] = 1j * _C
    return pre, post


def evolve_forward(stages: list[np.ndarray], pre: np.ndarray, boundary: int) -> np.ndarray:
    state = pre.copy()
    for stage in stages[:boundary]:
        state = stage @ state
    return state


def evolve_backward(stages: list[np.ndarray], post: np.ndarray, boundary: int) -> np.ndarray:
    state = post.copy()
    for stage in reversed(stages[boundary:]):
        state = stage.conj().T @ state
    return state


def oracle_amplitude(
    stages: list[np.ndarray],
    pre: np.ndarray,
    post: np.ndarray,
    observable: np.ndarray | None = None,
    boundary: int | None = None,
) -> complex:
    boundary = len(stages) if boundary is None else boundary
    fwd = evolve_forward(stages, pre, boundary)
    if observable is not None:
        fwd = observable @ fwd
    bwd = evolve_backward(stages, post, boundary)
    return complex(np.vdot(bwd, fwd))


def grid_pointer_readout(
    weights: np.ndarray,
    shifts: np.ndarray,
    sigma: float,
    n_points: int = 4096,
    half_span: float = 12.0,
) -> tuple[float, float, float]:
    """Post-selected pointer statistics by quadrature on a position grid.

    The post-selected pointer wavefunction is a weighted sum of displaced
    Gaussians; probability and position mean come from the rectangle rule,
    the momentum mean from the Fourier spectrum, so no closed-form overlap
    formulas enter.
    """
    span = half_span * sigma
    x = -span + (2.0 * span / n_points) * np.arange(n_points)
    dx = x[1] - x[0]
    norm = (2.0 * np.pi * sigma**2) ** -0.25
    psi = np.zeros(n_points, dtype=np.complex128)
    for w, s in zip(weights, shifts):
        psi += w * norm * np.exp(-((x - s) ** 2) / (4.0 * sigma**2))
    density = np.abs(psi) ** 2
    probability = float(density.sum() * dx)
    mean_x = float((x * density).sum() * dx / probability)
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    spectrum = np.abs(np.fft.fft(psi)) ** 2
    mean_p = float((k * spectrum).sum() / spectrum.sum())
    return probability, mean_x, mean_p
