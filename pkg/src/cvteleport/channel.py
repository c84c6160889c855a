"""Teleportation output states in the characteristic-function picture.

The whole channel model is one product:

``chi_out(xi) = chi_AB(g conj(xi); xi) * chi_in(g xi)``

i.e. the transfer function of the resource times the input characteristic
function with the gain folded into its argument.
"""

from __future__ import annotations

from dataclasses import dataclass

from .phasespace import CharFn, PhasePoint
from .states import (
    Channel,
    InputState,
    channel_to_descriptor,
    input_charfn,
    state_to_descriptor,
    transfer_fn,
)


@dataclass(frozen=True)
class OutputState:
    """Teleportation output: its Wigner characteristic function plus provenance."""

    charfn: CharFn
    input: InputState
    channel: Channel

    @property
    def input_descriptor(self) -> dict:
        return state_to_descriptor(self.input)

    @property
    def channel_descriptor(self) -> dict:
        return channel_to_descriptor(self.channel)


def teleport(input_state: InputState, ch: Channel) -> OutputState:
    """Output state of teleporting ``input_state`` through ``ch``."""
    tau = transfer_fn(ch)
    chi_in = input_charfn(input_state)
    g = ch.gain

    def chi_out(p: PhasePoint):
        return tau.fn(p) * chi_in.fn(PhasePoint(g * p.w, g * p.z))

    label = f"out[{chi_in.label} | {tau.label}]"
    return OutputState(
        charfn=CharFn(chi_out, ordering=0, label=label),
        input=input_state,
        channel=ch,
    )
