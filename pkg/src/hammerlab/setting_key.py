# -*- coding: utf-8 -*-
##
# @file src/hammerlab/setting_key.py
# @brief Constants for setting.csv keys.
#
# @if japanese
# setting.csv のキー名を集約した定数定義です。実験ハーネスの既定値(シード、レプリカ数、許容誤差など)を参照する際に使います。
# @endif
#
# @if english
# Key names used in setting.csv. Harness defaults (seed, replicas, tolerances) are looked up through these constants.
# @endif
#

from typing import Final  # [JP] 標準: イミュータブル定数用ヒント / [EN] Standard: type hint for immutable constants

# 実行制御 / Run control
KEY_DEFAULT_SEED: Final[str] = "DEFAULT_SEED"  # 乱数シード / master seed
KEY_DEFAULT_REPLICAS: Final[str] = "DEFAULT_REPLICAS"  # レプリカ数 / replica count
KEY_DEFAULT_THREADS: Final[str] = "DEFAULT_THREADS"  # 並列ワーカ数 / worker processes
KEY_OUT_DIR: Final[str] = "OUT_DIR"  # レポート出力先 / report directory

# 統計 / Statistics
KEY_ALPHA_LEVEL: Final[str] = "ALPHA_LEVEL"  # 有意水準 / significance level
KEY_CI_Z: Final[str] = "CI_Z"  # 95%区間のz値 / z value for 95% intervals
KEY_EXPONENT_LOW: Final[str] = "EXPONENT_LOW"  # 指数帯の下限 / exponent band lower edge
KEY_EXPONENT_HIGH: Final[str] = "EXPONENT_HIGH"  # 指数帯の上限 / exponent band upper edge

# 数値計算 / Numerics
KEY_MASS_TOL: Final[str] = "MASS_TOL"  # 流体質量の許容誤差 / fluid mass tolerance
KEY_BUSEMANN_R0: Final[str] = "BUSEMANN_R0"  # 半径列の初期値 / first Busemann radius
KEY_BUSEMANN_STEPS: Final[str] = "BUSEMANN_STEPS"  # 半径列の段数 / Busemann doublings
KEY_SERIES_PRECISION: Final[str] = "SERIES_PRECISION"  # 10進精度 / decimal digits
KEY_SERIES_TAIL: Final[str] = "SERIES_TAIL"  # 級数打切り / series tail cut

# 出力 / Output
KEY_REPORT_HTML: Final[str] = "REPORT_HTML"  # HTML要約の有無 / render HTML summary
