# -*- coding: utf-8 -*-
##
# @file src/hammerlab/cli.py
# @brief Experiment runner CLI.
#
# @if japanese
# 登録済みの実験ごとにサブコマンドを作り、共通フラグ(--seed, --replicas, --threads, --out, --json, --csv, --config)と
# 実験パラメータ(--<名前>)を受け付けます。終了コードは 0=全チェック合格、1=判定不合格、2=使い方の誤りです。
# @endif
#
# @if english
# Builds one subcommand per registered experiment with the shared flags (--seed, --replicas, --threads, --out,
# --json, --csv, --config) plus experiment parameters (--<name>). Exit codes: 0 all checks pass, 1 verdict failure,
# 2 usage error.
# @endif
#

from __future__ import annotations

import argparse  # [JP] 標準: CLI引数処理 / [EN] Standard: CLI argument parsing
import logging  # [JP] 標準: ログ設定 / [EN] Standard: logging configuration
import time  # [JP] 標準: 経過時間 / [EN] Standard: elapsed time
from dataclasses import replace  # [JP] 標準: 設定の差し替え / [EN] Standard: config update
from typing import List, Optional  # [JP] 標準: 型ヒント / [EN] Standard: type hints

from .experiments import EXPERIMENTS, find_experiment, resolve_parameters, run_experiment
from .logger import RunLogger
from .report import build_report, version_string, write_report
from .settings import HarnessDefaults, resolve_config

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


##
# @brief Build the argument parser / 引数パーサを構築する
#
# @return argparse.ArgumentParser  パーサ / Parser
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hammerlab", description="Hammersley process experiment runner")
    sub = parser.add_subparsers(dest="cmd", required=True)

    for name in sorted(EXPERIMENTS):
        exp = EXPERIMENTS[name]
        p = sub.add_parser(name, aliases=list(exp.aliases), help=exp.help, description=exp.help)
        common = p.add_argument_group("run control")
        common.add_argument("--seed", type=int, default=None, help="master seed")
        common.add_argument("--replicas", type=int, default=None, help="replica count")
        common.add_argument("--threads", type=int, default=None, help="worker processes (results do not depend on it)")
        common.add_argument("--out", default=None, help="report directory")
        common.add_argument(
            "--json", dest="write_json", action=argparse.BooleanOptionalAction, default=None, help="write report.json"
        )
        common.add_argument("--csv", dest="write_csv", action="store_true", default=None, help="write CSV samples")
        common.add_argument("--config", default=None, help="JSON experiment config")
        common.add_argument("--setting", default=None, help="explicit setting.csv")
        common.add_argument("--log-level", default="INFO")

        params = p.add_argument_group("experiment parameters")
        for key, default in exp.defaults.items():
            shown = ",".join(f"{v:g}" for v in default) if isinstance(default, tuple) else default
            params.add_argument(_flag(key), dest=f"param_{key}", default=None, help=f"default: {shown}")
    return parser


##
# @brief CLI main / CLIのメイン
#
# @param argv [in]  引数(省略時は sys.argv) / Arguments, sys.argv when omitted
# @return int  終了コード / Exit code
def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = getattr(logging, str(args.log_level).upper(), None)
    if not isinstance(level, int):
        parser.error(f"unknown log level '{args.log_level}'")
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    exp = find_experiment(args.cmd)
    log = RunLogger(exp.name, verbose=level <= logging.DEBUG)
    try:
        defaults = HarnessDefaults.load(args.setting)
        given = {k: getattr(args, f"param_{k}") for k in exp.defaults}
        flags = {
            "seed": args.seed,
            "replicas": args.replicas,
            "threads": args.threads,
            "out": args.out,
            "write_json": args.write_json,
            "write_csv": args.write_csv,
        }
        cfg = resolve_config(exp.name, defaults, args.config, flags, given, aliases=exp.aliases)
        cfg = replace(cfg, parameters=resolve_parameters(cfg.experiment, cfg.parameters))
        log.info(f"seed={cfg.seed} replicas={cfg.replicas} threads={cfg.threads}")
        started = time.perf_counter()
        result = run_experiment(cfg, defaults)
    except (ValueError, FileNotFoundError, NotImplementedError) as e:
        log.error(str(e))
        return EXIT_USAGE
    log.debug(f"elapsed {time.perf_counter() - started:.2f}s")

    report = build_report(cfg, result, version_string())
    for path in write_report(cfg, result, report, html=defaults.report_html):
        log.info(f"wrote {path}")
    for key, value in sorted(result.flags.items()):
        log.flag(key, value)
    return EXIT_OK if log.summary(result.checks) else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
