"""Amplitude amplification around a register-value target subspace.

One iterate is Q = -I_s U^-1 I_t U, where U is the synthesis circuit,
I_t flips the sign of every basis state whose registers match the target
predicate, and I_s flips the single all-zero source state.  After nu
iterates the post-selected probability is sin((2 nu + 1) asin u)**2 with
u the pre-amplification post-selected norm; the conditional distribution
inside the target slice is unchanged at every nu.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .simcore import (
    Circuit,
    RegisterLayout,
    StateVector,
    apply_circuit,
    phase,
    x,
    z,
)

NU_RULES = ("paper", "optimal")


class AmplificationSpec:
    """Synthesis circuit plus the reflection data for its iterates.

    ``target`` maps register names to required values (the |t> subspace);
    the source is the all-zero basis state.  The inverse circuit is built
    once and cached.
    """

    def __init__(self, synthesis: Circuit, target: Mapping[str, int], nu: int):
        if nu < 0:
            raise ValueError("nu must be >= 0")
        if not target:
            raise ValueError("target predicate must name at least one register")
        for reg, val in target.items():
            width = synthesis.layout.width(reg)
            if not 0 <= val < (1 << width):
                raise ValueError(f"target value {val} out of range for register {reg!r}")
        self.synthesis = synthesis
        self.target = dict(target)
        self.nu = int(nu)
        self._inverse = None

    @property
    def synthesis_inverse(self) -> Circuit:
        if self._inverse is None:
            self._inverse = self.synthesis.inverse()
        return self._inverse


def _predicate_selector(state: StateVector, conditions: Mapping[str, int]):
    n = state.num_qubits
    layout = state.layout
    sel = [slice(None)] * n
    for reg, val in conditions.items():
        width = layout.width(reg)
        if not 0 <= val < (1 << width):
            raise ValueError(f"value {val} out of range for register {reg!r}")
        for k, q in enumerate(layout.qubits(reg)):
            sel[n - 1 - q] = (val >> k) & 1
    return tuple(sel)


def phase_flip(state: StateVector, conditions: Mapping[str, int]) -> StateVector:
    """Negate every amplitude whose registers match the predicate.

    An empty predicate matches everything (a global sign).  Acts in place.
    """
    sel = _predicate_selector(state, conditions)
    psi = state.amplitudes.reshape((2,) * state.num_qubits)
    psi[sel] *= -1.0
    return state


def postselect_probability(state: StateVector, conditions: Mapping[str, int]) -> float:
    """Joint probability of reading the given values on the named registers."""
    sel = _predicate_selector(state, conditions)
    psi = state.amplitudes.reshape((2,) * state.num_qubits)
    return float(np.sum(np.abs(psi[sel]) ** 2))


def predicate_flip_circuit(layout: RegisterLayout, conditions: Mapping[str, int]) -> Circuit:
    """Gate-level equivalent of phase_flip: one multi-controlled Z.

    The first conditioned qubit is the Z target (X-conjugated when its
    required bit is 0); the rest become polarity controls.
    """
    bits = []
    for reg, val in conditions.items():
        for k, q in enumerate(layout.qubits(reg)):
            bits.append((q, (val >> k) & 1))
    if not bits:
        # global -1: Z X Z X on any one qubit
        return Circuit(layout, [z(0), x(0), z(0), x(0)])
    (q0, b0), rest = bits[0], tuple(bits[1:])
    core = phase(math.pi, q0, controls=rest)
    gates = [core] if b0 == 1 else [x(q0), core, x(q0)]
    return Circuit(layout, gates)


def source_flip_circuit(layout: RegisterLayout) -> Circuit:
    """Flip |00...0>: X on every qubit around a multi-controlled Z."""
    n = layout.total_qubits
    wrap = [x(q) for q in range(n)]
    core = phase(math.pi, 0, controls=tuple((q, 1) for q in range(1, n)))
    return Circuit(layout, wrap + [core] + list(reversed(wrap)))


def grover_iterate(state: StateVector, spec: AmplificationSpec) -> StateVector:
    """Advance U Q^k |0> to U Q^(k+1) |0>, in place.

    Applies the conjugated iterate U Q U^-1 = -(U I_s U^-1) I_t, which
    equals one application of Q = -I_s U^-1 I_t U in the pre-synthesis
    frame.  The source flip targets the single all-zero basis state.
    """
    phase_flip(state, spec.target)
    apply_circuit(state, spec.synthesis_inverse, validate=False)
    state.amplitudes[0] *= -1.0  # I_s: the source predicate matches index 0 only
    apply_circuit(state, spec.synthesis, validate=False)
    np.negative(state.amplitudes, out=state.amplitudes)
    return state


def run_amplified(spec: AmplificationSpec, dtype=np.complex128) -> tuple[StateVector, float]:
    """Prepare U Q^nu |0> from scratch; returns (state, pre-amp u**2)."""
    state = StateVector.zero_state(spec.synthesis.layout, dtype=dtype)
    apply_circuit(state, spec.synthesis, validate=False)
    u_sq = postselect_probability(state, spec.target)
    for _ in range(spec.nu):
        grover_iterate(state, spec)
    return state, u_sq


def select_nu(u: float, rule: str = "paper") -> int:
    """Iteration count for a pre-amplification norm u.

    paper: round(pi / (4 u)), half away from zero.
    optimal: the nu in {floor, ceil} of pi/(4 asin u) - 1/2 maximizing
    sin((2 nu + 1) asin u)**2, preferring the smaller count on ties.
    """
    if not 0.0 < u <= 1.0:
        raise ValueError("u must be in (0, 1]")
    if rule not in NU_RULES:
        raise ValueError(f"rule must be one of {NU_RULES}, got {rule!r}")
    if rule == "paper":
        return int(math.floor(math.pi / (4.0 * u) + 0.5))
    theta = math.asin(u)
    raw = math.pi / (4.0 * theta) - 0.5
    lo = max(0, math.floor(raw))
    hi = max(0, math.ceil(raw))
    best = min(
        sorted({lo, hi}),
        key=lambda nu: (-predicted_postamp(u, nu), nu),
    )
    return int(best)


def predicted_postamp(u: float, nu: int) -> float:
    """sin((2 nu + 1) asin u)**2, the rotation law for nu iterates."""
    if not 0.0 <= u <= 1.0:
        raise ValueError("u must be in [0, 1]")
    if nu < 0:
        raise ValueError("nu must be >= 0")
    return math.sin((2 * nu + 1) * math.asin(u)) ** 2
