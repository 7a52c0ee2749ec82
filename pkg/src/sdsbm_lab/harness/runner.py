"""Monte-Carlo driver: sample replicates, run every method, score, aggregate."""

import math
import time
from functools import partial
from itertools import groupby
from typing import Iterable, List, NamedTuple

import numpy as np
from loguru import logger
from tqdm import tqdm
from tqdm.contrib.concurrent import process_map

from ..baselines import dscore, kma, spectral
from ..clustering import kmp_pipeline
from ..config import KNOWN_METHODS, RunConfig
from ..graph_model import (
    AdjacencyMatrix,
    LabelVector,
    build_probability_matrix,
    sample_directed,
    sample_labels,
    sample_undirected,
)
from ..metrics import ari, matched_count
from ..types import AggregateRow, RunRecord
from ..utils.rng import EDGE_STREAM, LABEL_STREAM, METHOD_STREAM_BASE, random_stream, replicate_seed
from .scenarios import ScenarioSpec, get_scenario

# Method order fixes the random stream of each method within a replicate.
METHODS = KNOWN_METHODS


class ReplicateTask(NamedTuple):
    scenario: str
    directed: bool
    n: int
    replicate: int


def run_method(
    method: str, A: AdjacencyMatrix, K: int, config: RunConfig, rng: np.random.Generator
) -> LabelVector:
    """Dispatch one community detection method with the configured options."""
    svd_options = dict(
        svd_tol=config.svd_tol,
        svd_max_iters=config.svd_max_iters,
        svd_oversample=config.svd_oversample,
    )
    if method == "KMA":
        return kma(A, K, config.kmeans, rng)
    if method == "KMP":
        return kmp_pipeline(A, K, None, config.kmeans, rng, h_constant=config.h_constant)
    if method == "SPECTRAL":
        return spectral(A, K, config.kmeans, rng, **svd_options)
    if method == "DSCORE":
        return dscore(A, K, config.kmeans, rng, clip=config.dscore_clip, **svd_options)
    raise ValueError(f"Unknown method {method!r}; expected one of {', '.join(METHODS)}")


def run_replicate(task: ReplicateTask, config: RunConfig) -> List[RunRecord]:
    """Sample one graph and score every configured method on it.

    A method that raises yields an error record; the other methods still run.
    """
    spec = get_scenario(task.scenario, task.directed)
    block, probs, K = spec.build(task.n)
    seed = replicate_seed(config.master_seed, spec.name, spec.directed, task.n, task.replicate)

    labels = sample_labels(probs, task.n, random_stream(seed, LABEL_STREAM))
    P = build_probability_matrix(labels, block)
    sampler = sample_directed if spec.directed else sample_undirected
    A = sampler(P, random_stream(seed, EDGE_STREAM))

    records = []
    base = dict(
        scenario=spec.name, directed=spec.directed, n=task.n, replicate=task.replicate, seed=seed
    )
    for method in config.methods:
        rng = random_stream(seed, METHOD_STREAM_BASE + METHODS.index(method))
        start = time.perf_counter()
        try:
            predicted = run_method(method, A, K, config, rng)
        except Exception as e:
            logger.warning(
                f"{method} failed on {spec.name} directed={spec.directed} n={task.n} "
                f"replicate={task.replicate}: {e}"
            )
            records.append(
                RunRecord(
                    **base,
                    method=method,
                    ari=math.nan,
                    accuracy=math.nan,
                    exact=False,
                    error=f"{type(e).__name__}: {e}",
                )
            )
            continue
        elapsed_ms = round((time.perf_counter() - start) * 1000) if config.record_timing else 0

        matched = matched_count(labels, predicted, K)
        records.append(
            RunRecord(
                **base,
                method=method,
                ari=ari(labels, predicted),
                accuracy=matched / task.n,
                exact=matched == task.n,
                elapsed_ms=elapsed_ms,
            )
        )
    return records


def run_monte_carlo(spec: ScenarioSpec, config: RunConfig) -> List[RunRecord]:
    """All replicates of one scenario over the configured n grid, sorted canonically."""
    config.validate()
    tasks = [
        ReplicateTask(spec.name, spec.directed, n, replicate)
        for n in config.n_grid
        for replicate in range(config.mc)
    ]
    direction = "directed" if spec.directed else "undirected"
    desc = f"{spec.name} ({direction})"
    logger.info(
        f"Running {desc}: n in {config.n_grid}, mc={config.mc}, "
        f"methods={','.join(config.methods)}, jobs={config.jobs}"
    )

    worker = partial(run_replicate, config=config)
    if config.jobs > 1:
        batches = process_map(
            worker,
            tasks,
            max_workers=config.jobs,
            chunksize=1,
            desc=desc,
            disable=not config.progress,
        )
    else:
        batches = [worker(task) for task in tqdm(tasks, desc=desc, disable=not config.progress)]

    records = sorted((record for batch in batches for record in batch), key=RunRecord.sort_key)
    failures = sum(record.is_error for record in records)
    if failures:
        logger.warning(f"{desc}: {failures} of {len(records)} method runs failed")
    return records


def run_scenarios(specs: Iterable[ScenarioSpec], config: RunConfig) -> List[RunRecord]:
    records: List[RunRecord] = []
    for spec in specs:
        records.extend(run_monte_carlo(spec, config))
    return sorted(records, key=RunRecord.sort_key)


def _group_key(record: RunRecord):
    return (record.scenario, record.directed, record.n, record.method)


def _sample_sd(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def aggregate(records: Iterable[RunRecord]) -> List[AggregateRow]:
    """Mean and sample sd of the ARI per (scenario, directed, n, method).

    Error records are counted but excluded from the statistics. Values are
    sorted within each group, so the result does not depend on input order.
    """
    ordered = sorted(records, key=RunRecord.sort_key)
    if not ordered:
        raise ValueError("Cannot aggregate an empty record list")

    rows = []
    for (scenario, directed, n, method), group in groupby(ordered, key=_group_key):
        group = list(group)
        ok = [record for record in group if not record.is_error]
        errors = len(group) - len(ok)
        if ok:
            aris = np.sort(np.array([record.ari for record in ok]))
            elapsed = np.sort(np.array([record.elapsed_ms for record in ok], dtype=np.float64))
            mean_ari = math.fsum(aris) / aris.size
            sd_ari = _sample_sd(aris)
            exact_rate = sum(record.exact for record in ok) / len(ok)
            mean_elapsed = math.fsum(elapsed) / elapsed.size
        else:
            mean_ari = sd_ari = exact_rate = mean_elapsed = math.nan
        rows.append(
            AggregateRow(
                scenario=scenario,
                directed=directed,
                n=n,
                method=method,
                replicates=len(ok),
                errors=errors,
                mean_ari=mean_ari,
                sd_ari=sd_ari,
                exact_rate=exact_rate,
                mean_elapsed_ms=mean_elapsed,
            )
        )
    return rows
