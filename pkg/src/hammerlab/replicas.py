# -*- coding: utf-8 -*-
##
# @file src/hammerlab/replicas.py
# @brief Deterministic replica scheduler for Monte Carlo experiments.
#
# @if japanese
# レプリカ番号 i ごとに SeedSequence(seed, spawn_key=(i,)) から独立な乱数系列を割り当て、
# 直列またはmultiprocessing.Poolで実行します。結果は常にレプリカ番号順に並ぶため、
# 集計はワーカ数に依存しません。
# @endif
#
# @if english
# Gives replica i its own stream from SeedSequence(seed, spawn_key=(i,)) and runs replicas serially or on a
# multiprocessing.Pool. Results always come back in replica order, so any reduction is independent of the
# number of workers.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 進捗ログ / [EN] Standard: progress logging
import math  # [JP] 標準: 正確な総和 / [EN] Standard: exact summation
from functools import partial  # [JP] 標準: 引数の束縛 / [EN] Standard: argument binding
from multiprocessing import Pool  # [JP] 標準: プロセス並列 / [EN] Standard: process parallelism
from typing import Any, Callable, List, Sequence, TypeVar  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 乱数系列 / [EN] External: seed sequences

logger = logging.getLogger(__name__)

T = TypeVar("T")

# [JP] 1ワーカに渡すレプリカ数 / [EN] Replicas handed to a worker per task
CHUNK = 4


##
# @brief Seed for replica index / レプリカ番号に対応するシード
#
# @param seed [in]  親シード / Master seed
# @param index [in]  レプリカ番号 / Replica index
# @return int  64bitシード / 64-bit seed
def replica_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _call(func: Callable[..., T], seed: int, index: int) -> T:
    return func(index, replica_seed(seed, index))


##
# @brief Run replicas in index order / レプリカをレプリカ番号順に実行する
#
# @if japanese
# func(index, seed, **kwargs) をレプリカ数だけ呼びます。threads>1 の場合はPool.mapを使いますが、
# 戻り値の順序はレプリカ番号順のままです。funcはpickle可能なトップレベル関数である必要があります。
# @endif
#
# @if english
# Calls func(index, seed, **kwargs) for every replica. With threads > 1 it uses Pool.map; results keep replica
# order either way. func must be a picklable top-level function.
# @endif
#
# @param func [in]  レプリカ関数 / Replica function
# @param n [in]  レプリカ数 / Replica count
# @param seed [in]  親シード / Master seed
# @param threads [in]  ワーカ数 / Worker processes
# @param kwargs [in]  funcへ渡す追加引数 / Extra keyword arguments for func
# @return list  各レプリカの結果 / Per-replica results in index order
def run_replicas(func: Callable[..., T], n: int, seed: int, threads: int = 1, **kwargs: Any) -> List[T]:
    if n < 1:
        raise ValueError(f"replica count must be >= 1, got {n}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    bound = partial(func, **kwargs) if kwargs else func
    job = partial(_call, bound, int(seed))
    logger.debug("running %d replicas on %d worker(s)", n, threads)
    if threads == 1 or n == 1:
        return [job(i) for i in range(n)]
    with Pool(processes=min(threads, n)) as pool:
        return pool.map(job, range(n), chunksize=CHUNK)


##
# @brief Order-fixed sum / 順序固定の総和
#
# @param values [in]  値の列 / Values in replica order
# @return float  正確に丸めた総和 / Correctly rounded sum
def ordered_sum(values: Sequence[float]) -> float:
    return math.fsum(float(v) for v in values)
