# -*- coding: utf-8 -*-
##
# @file src/hammerlab/textio.py
# @brief Canonical JSON for reports and BOM-tolerant JSON configs.
#
# @if japanese
# レポートのJSONはキー順固定・インデント固定の正規形にし、同じ結果なら同じバイト列になるようにします。
# numpyのスカラー・配列はPythonの型へ、NaN/Infは文字列へ置き換えます。設定JSONはBOM付きでも読み込めます。
# @endif
#
# @if english
# Report JSON is canonical (sorted keys, fixed indent) so equal results give equal bytes. numpy scalars and arrays
# become Python values and NaN/Inf become strings. Config JSON may carry a BOM.
# @endif
#

from __future__ import annotations

import json  # [JP] 標準: JSON入出力 / [EN] Standard: JSON encoding
import math  # [JP] 標準: 非有限値判定 / [EN] Standard: finiteness checks
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import Any  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: numpy型の変換 / [EN] External: numpy scalar conversion


##
# @brief Convert numpy and non-finite values into JSON-safe values / numpy値や非有限値をJSON向けに変換
#
# @param obj [in]  変換対象(dict/list/tupleは再帰) / Object to convert, containers recursively
# @return Any  JSON化可能な値 / JSON-serializable value
def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def dumps_canonical(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, sort_keys=True, indent=2) + "\n"


##
# @brief Write a report file as UTF-8 with LF newlines / レポートファイルをUTF-8・LF改行で書き込む
#
# @if japanese
# 出力ディレクトリを作成します。str以外はdumps_canonicalで正規形JSONにしてから書き込みます。
# @endif
#
# @if english
# Creates the output directory. Anything other than str is written as canonical JSON via dumps_canonical.
# @endif
#
# @param path [in]  出力パス / Target path
# @param content [in]  テキストまたはJSON化する値 / Text, or a value to encode as canonical JSON
# @return Path  書き込んだパス / Written path
def write_report_file(path: Path | str, content: Any) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    text = content if isinstance(content, str) else dumps_canonical(content)
    p.write_text(text, encoding="utf-8", newline="\n")
    return p


##
# @brief Load a JSON config, with or without BOM / BOMの有無を問わずJSON設定を読み込む
#
# @param path [in]  入力パス / Path to read
# @return Any  デコード結果 / Decoded object
# @throws FileNotFoundError ファイルが無い場合 / When the file is missing
# @throws ValueError JSONとして不正、またはUTF-8でない場合 / When the file is not UTF-8 JSON
def load_json(path: Path | str) -> Any:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config not found: {p}")
    try:
        # [JP] utf-8-sig はBOM無しのUTF-8もそのまま読む / [EN] utf-8-sig also reads plain UTF-8
        return json.loads(p.read_text(encoding="utf-8-sig"))
    except UnicodeDecodeError as e:
        raise ValueError(f"config is not UTF-8: {p} ({e})") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"invalid JSON in {p}: {e}") from e
