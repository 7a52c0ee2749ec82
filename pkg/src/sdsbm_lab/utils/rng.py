"""Seed derivation for reproducible Monte-Carlo replicates."""

import zlib

import numpy as np

# Stream ids within one replicate; methods follow at METHOD_STREAM_BASE + ordinal.
LABEL_STREAM = 0
EDGE_STREAM = 1
METHOD_STREAM_BASE = 2


def replicate_seed(master_seed: int, scenario: str, directed: bool, n: int, replicate: int) -> int:
    """
    Derive the seed of one replicate from the master seed.

    The scenario name enters through its CRC-32, so the seed does not depend on
    registry order, the method list, or the worker that runs the replicate.

    Args:
        master_seed (int): Seed of the whole run.
        scenario (str): Scenario name.
        directed (bool): Directed or undirected ensemble.
        n (int): Number of nodes.
        replicate (int): Replicate index.

    Returns:
        int: A 64-bit unsigned seed.
    """
    if master_seed < 0:
        raise ValueError(f"Master seed must be nonnegative, got {master_seed}")
    sequence = np.random.SeedSequence(
        master_seed,
        spawn_key=(zlib.crc32(scenario.encode("utf-8")), int(directed), n, replicate),
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def random_stream(seed: int, stream_id: int) -> np.random.Generator:
    """
    Independent Philox generator for one consumer (labels, edges or a method) of a replicate.

    Args:
        seed (int): Replicate seed from :func:`replicate_seed`.
        stream_id (int): Consumer id.

    Returns:
        np.random.Generator: Generator keyed by ``(seed, stream_id)``.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream_id,))))
