"""The two-hop aggregation round: keygen, user encoding, relay and server sums."""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .combi import UserId, relay_users
from .linalg import Mat, mat_add, mat_vec, zeros
from .scheme import PrecodingScheme


@dataclass(frozen=True)
class KeyMaterial:
    """One L_S x 1 key vector per group, in canonical group order.

    Groups draw from disjoint PRNG substreams of the same seed, so the keys
    are mutually independent by construction.
    """

    keys: tuple[Mat, ...]
    seed: int
    prng_id: str


@dataclass(frozen=True)
class Transcript:
    inputs: dict[UserId, Mat]
    user_messages: dict[UserId, Mat]
    relay_messages: dict[int, Mat]
    decoded_sum: Mat


def keygen(s: PrecodingScheme, seed: int) -> KeyMaterial:
    """Sample all C(UV, G) groupwise keys, i.i.d. uniform over GF(q)^{L_S}."""
    keys = tuple(
        linalg.random_mat(s.dims.L_S, 1, s.cfg.field, (seed, g_idx))
        for g_idx in range(len(s.groups))
    )
    return KeyMaterial(keys, seed, linalg.PRNG_ID)


def user_key(s: PrecodingScheme, k: KeyMaterial, user: UserId) -> list[tuple[int, Mat]]:
    """The keys of all groups containing the user, in canonical group order."""
    return [(g_idx, k.keys[g_idx]) for g_idx, grp in enumerate(s.groups) if user in grp]


def user_encode(s: PrecodingScheme, k: KeyMaterial, user: UserId, w: Mat) -> Mat:
    """X = W + sum over the user's groups of block(g, user) * S_g."""
    if w.cols != 1 or w.rows != s.dims.L:
        raise linalg.DimensionMismatch(f"input must be {s.dims.L}x1, got {w.rows}x{w.cols}")
    x = w
    for g_idx, key in user_key(s, k, user):
        x = mat_add(x, mat_vec(s.block(g_idx, user), key))
    return x


def relay_aggregate(xs: list[Mat]) -> Mat:
    """Y = entrywise sum of the relay's V user messages."""
    acc = xs[0]
    for x in xs[1:]:
        acc = mat_add(acc, x)
    return acc


def server_decode(ys: list[Mat]) -> Mat:
    """Entrywise sum of the U relay messages; equals the input sum for zero-sum schemes."""
    acc = ys[0]
    for y in ys[1:]:
        acc = mat_add(acc, y)
    return acc


def run_round_with_inputs(
    s: PrecodingScheme, inputs: dict[UserId, Mat], keys: KeyMaterial
) -> Transcript:
    """Run encode / aggregate / decode on explicit inputs and keys."""
    user_messages = {
        user: user_encode(s, keys, user, w) for user, w in inputs.items()
    }
    relay_messages = {
        u: relay_aggregate([user_messages[user] for user in relay_users(u, s.cfg.V)])
        for u in range(1, s.cfg.U + 1)
    }
    decoded = server_decode([relay_messages[u] for u in range(1, s.cfg.U + 1)])
    return Transcript(inputs, user_messages, relay_messages, decoded)


def run_round(s: PrecodingScheme, input_seed: int, key_seed: int) -> Transcript:
    """One full round with uniform random inputs and keys, deterministic in the seeds."""
    inputs = {
        user: linalg.random_mat(s.dims.L, 1, s.cfg.field, (input_seed, user[0], user[1]))
        for u in range(1, s.cfg.U + 1)
        for user in relay_users(u, s.cfg.V)
    }
    return run_round_with_inputs(s, inputs, keygen(s, key_seed))


def input_sum(s: PrecodingScheme, inputs: dict[UserId, Mat]) -> Mat:
    acc = zeros(s.cfg.field, s.dims.L, 1)
    for w in inputs.values():
        acc = mat_add(acc, w)
    return acc
