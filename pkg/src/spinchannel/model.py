"""Physical configuration and chain geometry.

Qubits and chain sites are numbered from 1 in the public API. Qubit ``j``
couples to the first site of its ``(m + 1)``-site block, so with ``m`` spacer
spins the coupled sites are ``1, m + 2, 2m + 3, ...``. Bond ``b`` joins sites
``b`` and ``b + 1``; the chain is open (there is never a bond ``L -> 1``).

Internally (``Chain`` and everything numerical) indices are 0-based.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import ConfigError

ZERO_MODE_POLICIES = ("raise", "empty")


@dataclass(frozen=True)
class ModelParams:
    """Full physical configuration of the channel and its environment chain.

    Attributes:
        n_qubits: number of channel uses (carrier qubits) ``n``.
        gamma: XY anisotropy, ``gamma = 1`` is the Ising chain.
        lam: transverse field in units of the exchange coupling.
        coupling: exchange energy ``J``.
        epsilon: qubit-chain coupling energy.
        spacing: number ``m`` of uncoupled spacer spins between coupled sites.
        broken_bonds: 1-based bond indices whose couplings are removed.
        zero_modes: ``"raise"`` signals a degenerate environment ground state,
            ``"empty"`` leaves zero-energy modes unoccupied.
    """

    n_qubits: int
    gamma: float = 1.0
    lam: float = 1.0
    coupling: float = 1.0
    epsilon: float = 0.05
    spacing: int = 0
    broken_bonds: frozenset = field(default_factory=frozenset)
    zero_modes: str = "raise"

    def __post_init__(self):
        object.__setattr__(self, "broken_bonds", frozenset(int(b) for b in self.broken_bonds))
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        if int(self.spacing) != self.spacing or self.spacing < 0:
            raise ValueError(f"spacing must be a nonnegative integer, got {self.spacing!r}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam!r}")
        if self.coupling <= 0:
            raise ValueError(f"coupling must be positive, got {self.coupling!r}")
        if self.zero_modes not in ZERO_MODE_POLICIES:
            raise ValueError(f"zero_modes must be one of {ZERO_MODE_POLICIES}")
        L = self.chain_length
        bad = [b for b in self.broken_bonds if not 1 <= b <= L - 1]
        if bad:
            raise ValueError(f"broken bonds {sorted(bad)} outside 1..{L - 1}")

    @property
    def chain_length(self) -> int:
        return self.n_qubits + (self.n_qubits - 1) * self.spacing

    @property
    def n_states(self) -> int:
        """Hilbert-space dimension ``N = 2**n`` of the carriers."""
        return 2**self.n_qubits

    def qubit_site(self, j: int) -> int:
        """1-based chain site touched by qubit ``j`` (also 1-based)."""
        if not 1 <= j <= self.n_qubits:
            raise IndexError(f"qubit index {j} outside 1..{self.n_qubits}")
        return 1 + (j - 1) * (self.spacing + 1)

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def chain(self) -> "Chain":
        L = self.chain_length
        active = np.ones(max(L - 1, 0), dtype=bool)
        for b in self.broken_bonds:
            active[b - 1] = False
        return Chain(
            n_sites=L,
            qubit_sites=tuple(self.qubit_site(j) - 1 for j in range(1, self.n_qubits + 1)),
            active_bonds=tuple(bool(a) for a in active),
            gamma=float(self.gamma),
            lam=float(self.lam),
            coupling=float(self.coupling),
            epsilon=float(self.epsilon),
            zero_modes=self.zero_modes,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["broken_bonds"] = sorted(self.broken_bonds)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown model fields: {sorted(extra)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def chain_length(params: ModelParams) -> int:
    return params.chain_length


def qubit_site(params: ModelParams, j: int) -> int:
    return params.qubit_site(j)


@dataclass(frozen=True)
class BasisString:
    """Computational-basis label of the carriers, ``g -> 0`` and ``e -> 1``."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "BasisString":
        table = {"g": 0, "e": 1}
        try:
            return cls(tuple(table[ch] for ch in text.strip()))
        except KeyError:
            raise ValueError(f"basis string must use the alphabet {{g, e}}: {text!r}") from None

    @classmethod
    def from_code(cls, code: int, n: int) -> "BasisString":
        """Inverse of :attr:`code`; qubit 1 is the most significant bit."""
        if not 0 <= code < 2**n:
            raise ValueError(f"code {code} out of range for n={n}")
        return cls(tuple((code >> (n - 1 - j)) & 1 for j in range(n)))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def code(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def excited_set(self) -> frozenset:
        """1-based indices of the excited qubits."""
        return frozenset(j + 1 for j, b in enumerate(self.bits) if b)

    def __str__(self) -> str:
        return "".join("ge"[b] for b in self.bits)


def as_basis_string(x, n: int) -> BasisString:
    if isinstance(x, BasisString):
        s = x
    elif isinstance(x, str):
        s = BasisString.parse(x)
    elif isinstance(x, (int, np.integer)):
        s = BasisString.from_code(int(x), n)
    else:
        s = BasisString(tuple(x))
    if s.n != n:
        raise ValueError(f"basis string {s} has length {s.n}, expected {n}")
    return s


def perturbed_sites(params: ModelParams, x) -> frozenset:
    """1-based chain sites whose field is shifted when the carriers are in ``x``."""
    s = as_basis_string(x, params.n_qubits)
    return frozenset(params.qubit_site(j) for j in s.excited_set())


@dataclass(frozen=True)
class Chain:
    """0-based numerical view of a (possibly broken) environment chain."""

    n_sites: int
    qubit_sites: tuple
    active_bonds: tuple
    gamma: float
    lam: float
    coupling: float
    epsilon: float
    zero_modes: str = "raise"

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_sites)

    def sites_for_code(self, code: int) -> tuple:
        """0-based perturbed sites for an integer basis-string code."""
        n = self.n_qubits
        return tuple(self.qubit_sites[j] for j in range(n) if (code >> (n - 1 - j)) & 1)

    def blocks(self) -> list:
        """Connected components over the active bonds, as ``(start, stop)`` site ranges."""
        out, start = [], 0
        for b, on in enumerate(self.active_bonds):
            if not on:
                out.append((start, b + 1))
                start = b + 1
        out.append((start, self.n_sites))
        return out

    def split(self) -> list:
        """Independent sub-chains that carry at least one qubit.

        Returns ``(sub_chain, qubit_indices)`` pairs, where ``qubit_indices`` are
        the 0-based positions (in this chain's qubit order) of the qubits owned
        by the block. Blocks without qubits never influence the channel.
        """
        parts = []
        for start, stop in self.blocks():
            owned = [j for j, s in enumerate(self.qubit_sites) if start <= s < stop]
            if not owned:
                continue
            sub = Chain(
                n_sites=stop - start,
                qubit_sites=tuple(self.qubit_sites[j] - start for j in owned),
                active_bonds=tuple([True] * (stop - start - 1)),
                gamma=self.gamma,
                lam=self.lam,
                coupling=self.coupling,
                epsilon=self.epsilon,
                zero_modes=self.zero_modes,
            )
            parts.append((sub, tuple(owned)))
        return parts


def broken_link_preset(n_qubits: int = 12, spacing: int = 4, **kwargs) -> ModelParams:
    """Chain with one bond cut inside every spacer segment.

    The cut sits between spacer ``m // 2`` and ``m // 2 + 1`` of each gap, so
    for ``m = 4`` the environment falls apart into 5-spin blocks centred on the
    coupled sites (the two end blocks keep only 3 spins).
    """
    if spacing < 2:
        raise ValueError("the broken-link layout needs at least two spacer spins")
    base = ModelParams(n_qubits=n_qubits, spacing=spacing, **kwargs)
    cuts = {base.qubit_site(j) + spacing // 2 for j in range(1, n_qubits)}
    return base.replace(broken_bonds=frozenset(cuts))


def codes_to_bits(codes: Iterable[int], n: int) -> np.ndarray:
    codes = np.asarray(list(codes), dtype=object)
    out = np.zeros((len(codes), n), dtype=np.int8)
    for j in range(n):
        shift = n - 1 - j
        out[:, j] = [(int(c) >> shift) & 1 for c in codes]
    return out
