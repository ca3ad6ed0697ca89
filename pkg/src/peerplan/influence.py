"""Single-stage competitive threshold influence on a weighted post-intervention network.

A node's threshold is exceeded iff the summed weight of opposite-behavior
sources reaches a uniform random draw; an exceeded node flips with the
behavior-specific probability.  With per-target weights normalized to sum to
0 or 1, the expected post-intervention non-user count has the closed form
implemented by expected_nonusers; simulate estimates the same quantity by
Monte Carlo and exists to validate the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Behavior, ModelParams, Partition, PeerplanError, SocialNetwork
from .dynamics import WeightedNetwork

NORMALIZATION_TOL = 1e-9
_SIM_BLOCK = 8192


class UnnormalizedInput(PeerplanError):
    """A target's incoming weights summed to something other than 0 or 1."""


@dataclass(frozen=True)
class FlipRisk:
    become_user: float
    become_nonuser: float


@dataclass
class Evaluation:
    expected_nonusers: float
    success: float
    flips: dict[str, FlipRisk]
    partition_echo: Partition


@dataclass
class SimulationResult:
    mean: float
    std_error: float
    sample_count: int
    clamp_events: int


def _opposite_sums(wnet: WeightedNetwork) -> tuple[list[str], dict[str, Behavior], dict[str, float]]:
    """Per original target, summed weight from opposite-behavior sources.

    Also enforces the normalization contract: every original target's total
    incoming weight must be 0 or 1 within NORMALIZATION_TOL.
    """
    behavior = {node.id: node.behavior for node in wnet.nodes}
    originals = [node.id for node in wnet.nodes if not node.is_facilitator]
    total: dict[str, float] = {node_id: 0.0 for node_id in originals}
    opposite: dict[str, float] = {node_id: 0.0 for node_id in originals}
    for (src, dst), weight in wnet.weights.items():
        if dst not in total:
            continue
        total[dst] += weight
        if behavior[src] is not behavior[dst]:
            opposite[dst] += weight
    for node_id, s in total.items():
        if not (abs(s) <= NORMALIZATION_TOL or abs(s - 1.0) <= NORMALIZATION_TOL):
            raise UnnormalizedInput(f"incoming weights for {node_id} sum to {s!r}, expected 0 or 1")
    return originals, behavior, opposite


def expected_nonusers(wnet: WeightedNetwork, params: ModelParams) -> float:
    """Closed-form expected non-user count after one influence stage.

    A non-user stays with probability 1 - flip_to_user * (user weight in);
    a user converts with probability flip_to_nonuser * (non-user weight in).
    Facilitators influence others but are never counted or influenced.
    """
    originals, behavior, opposite = _opposite_sums(wnet)
    expected = 0.0
    for node_id in originals:
        if behavior[node_id].is_user:
            expected += params.flip_to_nonuser * opposite[node_id]
        else:
            expected += 1.0 - params.flip_to_user * opposite[node_id]
    return expected


def flip_profile(wnet: WeightedNetwork, params: ModelParams) -> dict[str, FlipRisk]:
    """Per original node, the probability of switching behavior."""
    originals, behavior, opposite = _opposite_sums(wnet)
    profile = {}
    for node_id in originals:
        if behavior[node_id].is_user:
            profile[node_id] = FlipRisk(0.0, params.flip_to_nonuser * opposite[node_id])
        else:
            profile[node_id] = FlipRisk(params.flip_to_user * opposite[node_id], 0.0)
    return profile


def success(net: SocialNetwork, expected_post: float, params: ModelParams) -> float:
    """Expected conversions as a fraction of the best attainable, 0 with no users.

    The denominator is the expected conversions if every user received full
    opposite-behavior pressure; negative values mean the grouping is expected
    to create users on net.
    """
    users = net.user_count()
    if users == 0:
        return 0.0
    return (expected_post - net.nonuser_count()) / (params.flip_to_nonuser * users)


def simulate(
    wnet: WeightedNetwork,
    params: ModelParams,
    sample_count: int,
    seed: int,
) -> SimulationResult:
    """Monte Carlo estimate of expected_nonusers with standard error.

    Samples are generated in fixed-size blocks, each from its own child of
    SeedSequence(seed), so results depend only on (seed, sample_count) and not
    on how callers shard the work.  Running mean/variance are merged per block
    (Welford).  Opposite-weight sums are clamped to [0, 1] before use as
    probabilities; clamp_events counts how many node entries needed it.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    originals, behavior, opposite = _opposite_sums(wnet)
    is_user = np.array([behavior[node_id].is_user for node_id in originals])
    opp = np.array([opposite[node_id] for node_id in originals], dtype=float)
    clamped = np.clip(opp, 0.0, 1.0)
    clamp_events = int(np.count_nonzero(clamped != opp))
    flip_prob = np.where(is_user, params.flip_to_nonuser, params.flip_to_user)
    base_nonusers = int(np.count_nonzero(~is_user))
    sign = np.where(is_user, 1.0, -1.0)

    count = 0
    mean = 0.0
    m2 = 0.0
    block_index = 0
    while count < sample_count:
        block = min(_SIM_BLOCK, sample_count - count)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block_index,)))
        thresholds = rng.random((block, opp.size))
        flip_draws = rng.random((block, opp.size))
        flips = (clamped[None, :] >= thresholds) & (flip_draws < flip_prob[None, :])
        samples = base_nonusers + (flips * sign[None, :]).sum(axis=1)

        block_mean = float(samples.mean())
        block_m2 = float(((samples - block_mean) ** 2).sum())
        delta = block_mean - mean
        total = count + block
        mean += delta * block / total
        m2 += block_m2 + delta * delta * count * block / total
        count = total
        block_index += 1

    std_error = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return SimulationResult(mean=mean, std_error=std_error, sample_count=count, clamp_events=clamp_events)
