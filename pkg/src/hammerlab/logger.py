# -*- coding: utf-8 -*-
##
# @file src/hammerlab/logger.py
# @brief Console logger for one experiment run.
#
# @if japanese
# 1回の実験実行の進捗を時刻と実験名付きで表示します。飽和などの注意事項は[FLG]行、チェックの合否は[OK]/[NG]行で、
# 最後に合格数を添えた判定行を出します。エラーは標準エラーへ出します。
# @endif
#
# @if english
# Prints the progress of one experiment run with the time and experiment name. Cautions such as saturation go to
# [FLG] lines, check outcomes to [OK]/[NG] lines, closed by a verdict line with the pass count. Errors go to stderr.
# @endif
#

from __future__ import annotations

import sys  # [JP] 標準: 標準エラー出力 / [EN] Standard: stderr stream
import time  # [JP] 標準: 時刻取得 / [EN] Standard: time utilities
from typing import Any, Mapping  # [JP] 標準: 型ヒント / [EN] Standard: type hints


def now_ts() -> str:
    return time.strftime("%H:%M:%S")


class RunLogger:
    """
    実験1回分のロガー。experiment を渡すと各行に [experiment] を付ける。
    verbose=False のときは DEBUG 行を抑制する。
    """

    def __init__(self, experiment: str = "", verbose: bool = False) -> None:
        self.experiment = experiment
        self.verbose = verbose

    def _emit(self, tag: str, msg: str, *, err: bool = False) -> None:
        head = f"[{now_ts()}]"
        if self.experiment:
            head += f" [{self.experiment}]"
        if tag:
            head += f" {tag}"
        print(f"{head} {msg}", file=sys.stderr if err else sys.stdout)

    def info(self, msg: str) -> None:
        self._emit("", msg)

    def debug(self, msg: str) -> None:
        if self.verbose:
            self._emit("[DBG]", msg)

    def error(self, msg: str) -> None:
        self._emit("[ERR]", msg, err=True)

    ##
    # @brief Print a caution flag / 注意事項の行を出力
    #
    # @if japanese
    # 窓の飽和や収束しなかったレプリカ数など、結果は出るが注意が必要な事象に使います。
    # @endif
    #
    # @if english
    # For window saturation, non-converged replica counts and similar conditions that still yield a result.
    # @endif
    #
    # @param key [in]  フラグ名 / Flag name
    # @param value [in]  値 / Value
    def flag(self, key: str, value: Any) -> None:
        self._emit("[FLG]", f"{key}: {value}")

    ##
    # @brief Print a verdict line for one check / チェック1つの判定行を出力
    #
    # @param name [in]  チェック名 / Check name
    # @param passed [in]  合否 / Whether the check passed
    # @param detail [in]  補足 / Extra detail
    def verdict(self, name: str, passed: bool, detail: str = "") -> None:
        self._emit("[OK]" if passed else "[NG]", f"{name} {detail}".rstrip())

    ##
    # @brief Print every check and the overall verdict / 全チェックと総合判定を出力
    #
    # @param checks [in]  チェック名と合否 / Check names and outcomes
    # @return bool  チェックが1つ以上あり全て合格か / True when there is at least one check and all pass
    def summary(self, checks: Mapping[str, bool]) -> bool:
        for name, passed in sorted(checks.items()):
            self.verdict(name, bool(passed))
        n_ok = sum(1 for v in checks.values() if v)
        passed = bool(checks) and n_ok == len(checks)
        self.info(f"verdict: {'pass' if passed else 'fail'} ({n_ok}/{len(checks)} checks)")
        return passed
