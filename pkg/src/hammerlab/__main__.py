# -*- coding: utf-8 -*-
##
# @file src/hammerlab/__main__.py
# @brief Module entry point for `python -m hammerlab`.
#
# @if japanese
# `python -m hammerlab ...` 実行時のエントリーポイントです。処理はcli.mainに委譲し、終了コードをSystemExitで返します。
# @endif
#
# @if english
# Entry point when invoking `python -m hammerlab ...`. Delegates to cli.main and returns its exit code via SystemExit.
# @endif
#

"""
例:
  python -m hammerlab worked-box
  python -m hammerlab figure21        # worked-box の別名 / alias of worked-box
  python -m hammerlab shape --dist dirac1 --t-grid 250,500,1000 --replicas 500 --seed 7
"""

from .cli import main

if __name__ == "__main__":
    # 0: 合格 / 1: 判定不合格 / 2: 使い方の誤り
    raise SystemExit(main())
