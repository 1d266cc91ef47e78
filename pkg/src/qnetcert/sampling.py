"""Random network states used as a soundness oracle.

An IQN sample is built source by source: every hyperedge emits a random
state with one ``source_dim``-dimensional subsystem per receiving party,
each party optionally applies a random local unitary to everything it
received, then compresses its subsystems to ``party_dim`` with a fixed
channel (generalised parity + partial trace) and is optionally
depolarised.  All of these are local channels, so the result lies in
``S_I(G)`` by construction.  CQN samples are Dirichlet mixtures of IQN
samples.
"""

from __future__ import annotations

import itertools
from typing import Any

import numpy as np

from .linalg import DensityMatrix, partial_trace_array
from .network import Network
from .states import Decomposition, haar_unitary

MAX_SOURCE_DIM = 4096


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_mixed_state(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def parity_unitary(d: int, m: int) -> np.ndarray:
    """Permutation ``|x_1..x_m> -> |(x_1+..+x_m) mod d, x_2, .., x_m>``."""
    size = d**m
    u = np.zeros((size, size))
    for digits in itertools.product(range(d), repeat=m):
        src = np.ravel_multi_index(digits, (d,) * m)
        out = (sum(digits) % d,) + digits[1:]
        u[np.ravel_multi_index(out, (d,) * m), src] = 1
    return u


def _apply_local(rho: np.ndarray, dims: list[int], start: int, count: int, u: np.ndarray) -> np.ndarray:
    left = int(np.prod(dims[:start]))
    right = int(np.prod(dims[start + count :]))
    full = np.kron(np.kron(np.eye(left), u), np.eye(right))
    return full @ rho @ full.conj().T


def sample_iqn_state(
    g: Network,
    local_channels: bool = False,
    seed=None,
    *,
    source_dim: int = 2,
    party_dim: int | None = 2,
    mixed_sources: bool = False,
    depolarize: bool = False,
) -> tuple[DensityMatrix, dict[str, Any]]:
    """Draw a random state of the independent network ``g``.

    Args:
        g: network topology.
        local_channels: apply an independent Haar-random unitary on every
            party's received subsystems (and depolarise if ``depolarize``).
        seed: anything accepted by ``numpy.random.default_rng``.
        source_dim: dimension of each subsystem a source sends.
        party_dim: output dimension per party. ``None`` keeps all received
            subsystems (no compression).
        mixed_sources: draw rank-2 mixed source states instead of pure ones.
        depolarize: with ``local_channels``, depolarise each party with a
            random strength in [0, 0.5).

    Returns:
        The state and a provenance dict recording every random factor.
    """
    rng = _rng(seed)
    n = g.n_parties
    # subsystem bookkeeping: one subsystem per (source, party) incidence
    owners: list[int] = []
    source_states = []
    for e in g.sources:
        d = source_dim ** len(e)
        if mixed_sources:
            source_states.append(random_mixed_state(d, min(2, d), rng))
        else:
            source_states.append(random_pure_state(d, rng))
        owners.extend(e)
    n_sub = len(owners)
    if source_dim**n_sub > MAX_SOURCE_DIM:
        raise OverflowError(
            f"sampling needs a {source_dim ** n_sub}-dimensional space (limit {MAX_SOURCE_DIM})"
        )
    rho = np.ones((1, 1), dtype=complex)
    for s in source_states:
        rho = np.kron(rho, s)

    # regroup subsystems party by party
    order = sorted(range(n_sub), key=lambda s: (owners[s], s))
    dims = [source_dim] * n_sub
    t = rho.reshape(dims + dims).transpose(order + [n_sub + i for i in order])
    rho = t.reshape(rho.shape)
    degree = [owners.count(i) for i in range(n)]

    unitaries: list[np.ndarray | None] = []
    depol: list[float] = []
    start = 0
    for i in range(n):
        deg = degree[i]
        din = source_dim**deg
        u = haar_unitary(din, rng) if local_channels else None
        compress = party_dim is not None and party_dim != din
        if compress:
            if party_dim != source_dim:
                raise ValueError("compression requires party_dim == source_dim")
            p = parity_unitary(source_dim, deg)
            u = p if u is None else p @ u
        if u is not None:
            rho = _apply_local(rho, dims, start, deg, u)
        unitaries.append(None if u is None else u.copy())
        start += deg

    # keep the first subsystem of every compressed party, all of the others
    keep: list[int] = []
    out_dims: list[int] = []
    start = 0
    for i in range(n):
        deg = degree[i]
        din = source_dim**deg
        if party_dim is not None and party_dim != din:
            keep.append(start)
            out_dims.append(source_dim)
        else:
            keep.extend(range(start, start + deg))
            out_dims.append(din)
        start += deg
    rho = partial_trace_array(rho, dims, keep)

    if local_channels and depolarize:
        for i in range(n):
            q = float(rng.uniform(0, 0.5))
            depol.append(q)
            if q > 0:
                rho = _depolarize(rho, out_dims, i, q)
    provenance = {
        "network": g.to_dict(),
        "source_states": source_states,
        "local_unitaries": unitaries,
        "depolarizing": depol,
        "party_dims": tuple(out_dims),
        "source_dim": source_dim,
    }
    return DensityMatrix(tuple(out_dims), rho), provenance


def _depolarize(rho: np.ndarray, dims: list[int], party: int, q: float) -> np.ndarray:
    others = [j for j in range(len(dims)) if j != party]
    d = dims[party]
    if not others:
        return (1 - q) * rho + q * np.eye(d) / d
    red = partial_trace_array(rho, dims, others)
    # rebuild I/d ⊗ red with the party slot in place
    t = np.kron(np.eye(d) / d, red)
    k = len(dims)
    perm_dims = [d] + [dims[j] for j in others]
    t = t.reshape(perm_dims + perm_dims)
    src = [party] + others
    inv = [src.index(j) for j in range(k)]
    t = t.transpose(inv + [k + i for i in inv]).reshape(rho.shape)
    return (1 - q) * rho + q * t


def sample_cqn_state(
    g: Network, n_components: int, seed=None, **iqn_kwargs
) -> tuple[DensityMatrix, Decomposition]:
    """Dirichlet(1, ..., 1) mixture of ``n_components`` independent IQN samples."""
    if n_components < 1:
        raise ValueError("need at least one component")
    ss = np.random.SeedSequence(seed)
    weight_seed, *child_seeds = ss.spawn(n_components + 1)
    iqn_kwargs.setdefault("local_channels", True)
    components = [sample_iqn_state(g, seed=np.random.default_rng(c), **iqn_kwargs)[0] for c in child_seeds]
    if n_components == 1:
        weights = (1.0,)
    else:
        w = np.random.default_rng(weight_seed).dirichlet(np.ones(n_components))
        w = np.clip(w, 1e-12, None)
        weights = tuple(w / w.sum())
    dec = Decomposition(weights, tuple(components))
    return dec.state(), dec
