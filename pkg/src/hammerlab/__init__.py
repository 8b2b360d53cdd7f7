# -*- coding: utf-8 -*-
##
# @file src/hammerlab/__init__.py
# @brief Package marker for hammerlab.
#
# @if japanese
# Hammersleyの最終通過パーコレーションと流体系の実験ハーネスです。公開するのはモジュール単位です。
# @endif
#
# @if english
# Experiment harness for Hammersley last passage percolation and its fluid system. Modules are the public surface.
# @endif
#

"""
hammerlab パッケージの入口。

- points / lpp / fluid が土台、busemann / particles / fluctuations がその上の解析。
- experiments と cli が受け入れ実験を束ねる。
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
