"""Input-state catalog and the Squeezed Bell-like resource family.

Every catalog state exposes its Wigner characteristic function as a pure
closure; closed-form photon statistics live in :func:`input_photon_probs` and
closed-form origin derivatives in :mod:`cvteleport.moments`.

Characteristic functions (Wigner ordering, ``u = |xi|^2``):

* Fock ``n``:            ``exp(-u/2) L_n(u)``
* coherent ``beta``:     ``exp(-u/2 + xi conj(beta) - conj(xi) beta)``
  (for real beta this is ``exp(-u/2 + 2i Im[xi] beta)``)
* squeezed vacuum ``s``: ``exp(-|xi'|^2 / 2)`` with
  ``xi' = xi cosh(s) + conj(xi) sinh(s)``
* Fock mixture:          probability-weighted sum of Fock functions

The two-mode resource is

``chi(xi_A; xi_B) = exp(-(|xi'_A|^2 + |xi'_B|^2)/2) * { Delta^2
    + 2 Delta sqrt(1 - Delta^2) Re[e^{i theta} xi'_A xi'_B]
    + (1 - Delta^2)(1 - |xi'_A|^2)(1 - |xi'_B|^2) }``

with ``xi'_{A/B} = cosh(r) xi_{A/B} - sinh(r) conj(xi_{B/A})``.  Its transfer
function is the restriction to ``(g conj(xi), xi)``, which collapses to a
function of ``u`` alone; the reduced one-mode form is the production path and
the full two-mode form (:func:`sbl_two_mode_value`) is kept as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CapacityError, InvalidArgumentError
from .numerics import laguerre_envelope, laguerre_envelope_all
from .phasespace import CharFn, PhasePoint

N_MAX_FOCK = 64
_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FockInput:
    """Fock state |n>."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidArgumentError(f"Fock photon number must be a nonnegative integer, got {self.n!r}")


@dataclass(frozen=True)
class CoherentInput:
    """Coherent state with displacement ``beta`` (complex permitted)."""

    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))


@dataclass(frozen=True)
class SqueezedVacuumInput:
    """Squeezed vacuum with real squeezing parameter ``s``."""

    s: float


@dataclass(frozen=True)
class FockMixtureInput:
    """Statistical mixture of Fock states, ``weights = ((n, p), ...)``."""

    weights: tuple

    def __post_init__(self):
        weights = tuple((int(n), float(p)) for n, p in self.weights)
        if not weights:
            raise InvalidArgumentError("mixture needs at least one component")
        for n, p in weights:
            if n < 0:
                raise InvalidArgumentError("mixture photon numbers must be nonnegative")
            if p < 0:
                raise InvalidArgumentError("mixture probabilities must be nonnegative")
        total = math.fsum(p for _, p in weights)
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise InvalidArgumentError(f"mixture probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "weights", weights)

    @property
    def max_n(self) -> int:
        return max(n for n, _ in self.weights)


InputState = Union[FockInput, CoherentInput, SqueezedVacuumInput, FockMixtureInput]


@dataclass(frozen=True)
class SqueezedBellResource:
    """Squeezed Bell-like two-mode resource (delta, theta, r)."""

    delta: float
    theta: float = 0.0
    r: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise InvalidArgumentError(f"delta must lie in [0, 1], got {self.delta!r}")
        if self.r < 0.0:
            raise InvalidArgumentError(f"two-mode squeezing r must be >= 0, got {self.r!r}")


@dataclass(frozen=True)
class Channel:
    """A teleportation channel: resource plus measurement gain (default 1)."""

    resource: SqueezedBellResource
    gain: float = 1.0

    def __post_init__(self):
        if not self.gain > 0:
            raise InvalidArgumentError(f"gain must be positive, got {self.gain!r}")


def fock_charfn(n: int, n_max: int = N_MAX_FOCK) -> CharFn:
    """Wigner characteristic function of the Fock state |n>."""
    if n < 0:
        raise InvalidArgumentError("n must be nonnegative")
    if n > n_max:
        raise CapacityError(f"Fock cutoff exceeded: n={n} > n_max={n_max}")

    def chi(p: PhasePoint):
        return laguerre_envelope(n, p.abs_sq) + 0.0j

    return CharFn(chi, ordering=0, label=f"fock:{n}")


def input_charfn(state: InputState) -> CharFn:
    """Wigner characteristic function of a catalog input state."""
    if isinstance(state, FockInput):
        return fock_charfn(state.n)

    if isinstance(state, CoherentInput):
        beta = state.beta

        def chi(p: PhasePoint):
            return np.exp(-0.5 * p.abs_sq + p.xi * np.conj(beta) - p.xi_conj * beta)

        return CharFn(chi, ordering=0, label=f"coherent:{beta}")

    if isinstance(state, SqueezedVacuumInput):
        ch, sh = math.cosh(state.s), math.sinh(state.s)

        def chi(p: PhasePoint):
            xi_p = p.xi * ch + p.xi_conj * sh
            return np.exp(-0.5 * (xi_p * np.conj(xi_p)).real) + 0.0j

        return CharFn(chi, ordering=0, label=f"sqvac:{state.s}")

    if isinstance(state, FockMixtureInput):
        weights = state.weights
        n_top = state.max_n

        def chi(p: PhasePoint):
            u = np.asarray(p.abs_sq, dtype=float)
            lag = laguerre_envelope_all(n_top, u)
            return sum(pk * lag[nk] for nk, pk in weights) + 0.0j

        return CharFn(chi, ordering=0, label="mix:" + ",".join(f"{n}@{p}" for n, p in weights))

    raise InvalidArgumentError(f"unknown input state {state!r}")


def transfer_coefficients(ch: Channel):
    """Coefficients (a, b) of the squeezed-mode maps under the (g xi*, xi) restriction.

    With gain g, ``xi'_A = a conj(xi)`` and ``xi'_B = b xi`` where
    ``a = g cosh(r) - sinh(r)`` and ``b = cosh(r) - g sinh(r)``; at g = 1 both
    reduce to ``exp(-r)``.
    """
    r, g = ch.resource.r, ch.gain
    return g * math.cosh(r) - math.sinh(r), math.cosh(r) - g * math.sinh(r)


def transfer_fn(ch: Channel) -> CharFn:
    """One-mode transfer function ``tau(xi) = chi_AB(g conj(xi), xi)``.

    For the Squeezed Bell-like family this reduces to a function of
    ``u = |xi|^2`` alone; at g = 1 it is
    ``exp(-gamma) [Delta^2 + 2 Delta sqrt(1-Delta^2) cos(theta) gamma
    + (1-Delta^2)(1-gamma)^2]`` with ``gamma = u exp(-2r)``.
    """
    res = ch.resource
    a, b = transfer_coefficients(ch)
    delta = res.delta
    cross = 2.0 * delta * math.sqrt(max(1.0 - delta * delta, 0.0)) * math.cos(res.theta)
    comp = 1.0 - delta * delta
    d2 = delta * delta
    a2, b2, ab = a * a, b * b, a * b

    def tau(p: PhasePoint):
        u = p.abs_sq
        brace = d2 + cross * ab * u + comp * (1.0 - a2 * u) * (1.0 - b2 * u)
        return np.exp(-0.5 * (a2 + b2) * u) * brace + 0.0j

    return CharFn(
        tau,
        ordering=0,
        label=f"transfer(delta={res.delta},theta={res.theta},r={res.r},g={ch.gain})",
        kind="transfer",
    )


def sbl_two_mode_value(res: SqueezedBellResource, xi_a: complex, xi_b: complex) -> complex:
    """Full two-mode characteristic function of the resource (test oracle)."""
    chr_, shr = math.cosh(res.r), math.sinh(res.r)
    xa = chr_ * xi_a - shr * np.conj(xi_b)
    xb = chr_ * xi_b - shr * np.conj(xi_a)
    na, nb = abs(xa) ** 2, abs(xb) ** 2
    delta = res.delta
    q = math.sqrt(max(1.0 - delta * delta, 0.0))
    brace = (
        delta * delta
        + 2.0 * delta * q * (np.exp(1j * res.theta) * xa * xb).real
        + (1.0 - delta * delta) * (1.0 - na) * (1.0 - nb)
    )
    return complex(np.exp(-0.5 * (na + nb)) * brace)


def input_photon_probs(state: InputState, N: int) -> np.ndarray:
    """Exact photon-number probabilities ``P_0 .. P_N`` of a catalog state."""
    if N < 0:
        raise InvalidArgumentError("N must be nonnegative")
    probs = np.zeros(N + 1)

    if isinstance(state, FockInput):
        if state.n <= N:
            probs[state.n] = 1.0
        return probs

    if isinstance(state, CoherentInput):
        mu = abs(state.beta) ** 2
        probs[0] = math.exp(-mu)
        for n in range(1, N + 1):
            probs[n] = probs[n - 1] * mu / n
        return probs

    if isinstance(state, SqueezedVacuumInput):
        t2 = math.tanh(state.s) ** 2
        probs[0] = 1.0 / math.cosh(state.s)
        for k in range(1, N // 2 + 1):
            # P_{2k} / P_{2k-2} = tanh^2(s) (2k-1) / (2k); odd terms vanish.
            probs[2 * k] = probs[2 * k - 2] * t2 * (2 * k - 1) / (2 * k)
        return probs

    if isinstance(state, FockMixtureInput):
        for n, p in state.weights:
            if n <= N:
                probs[n] += p
        return probs

    raise InvalidArgumentError(f"unknown input state {state!r}")


# ---------------------------------------------------------------------------
# JSON descriptors (the CLI-facing state/channel grammar)
# ---------------------------------------------------------------------------

def state_from_descriptor(d: dict) -> InputState:
    """Build an input state from its JSON descriptor.

    Kinds: ``{"kind": "fock", "n": int}``,
    ``{"kind": "coherent", "beta_re": float, "beta_im": float}``,
    ``{"kind": "squeezed_vacuum", "s": float}``,
    ``{"kind": "fock_mixture", "weights": [[n, p], ...]}``.
    """
    try:
        kind = d["kind"]
    except (TypeError, KeyError):
        raise InvalidArgumentError(f"state descriptor needs a 'kind' field: {d!r}") from None
    if kind == "fock":
        return FockInput(int(d["n"]))
    if kind == "coherent":
        return CoherentInput(complex(float(d["beta_re"]), float(d.get("beta_im", 0.0))))
    if kind == "squeezed_vacuum":
        return SqueezedVacuumInput(float(d["s"]))
    if kind == "fock_mixture":
        return FockMixtureInput(tuple((int(n), float(p)) for n, p in d["weights"]))
    raise InvalidArgumentError(f"unknown state kind {kind!r}")


def state_to_descriptor(state: InputState) -> dict:
    if isinstance(state, FockInput):
        return {"kind": "fock", "n": state.n}
    if isinstance(state, CoherentInput):
        return {"kind": "coherent", "beta_re": state.beta.real, "beta_im": state.beta.imag}
    if isinstance(state, SqueezedVacuumInput):
        return {"kind": "squeezed_vacuum", "s": state.s}
    if isinstance(state, FockMixtureInput):
        return {"kind": "fock_mixture", "weights": [[n, p] for n, p in state.weights]}
    raise InvalidArgumentError(f"unknown input state {state!r}")


def channel_to_descriptor(ch: Channel) -> dict:
    res = ch.resource
    return {"delta": res.delta, "theta": res.theta, "r": res.r, "gain": ch.gain}


def channel_from_descriptor(d: dict) -> Channel:
    res = SqueezedBellResource(
        delta=float(d["delta"]), theta=float(d.get("theta", 0.0)), r=float(d["r"])
    )
    return Channel(res, gain=float(d.get("gain", 1.0)))
