# -*- coding: utf-8 -*-
##
# @file src/hammerlab/settings.py
# @brief Harness defaults from setting.csv and experiment configs from JSON.
#
# @if japanese
# setting.csv (key,value,type,remark) をpandasで読み込み、既定値を型変換して返します。
# 実験設定はJSONファイルで与えることもでき、優先順位は コマンドライン > JSON > setting.csv > 組込み既定値 です。
# setting.csv が見つからない場合も組込み既定値で動作します。
# @endif
#
# @if english
# Loads setting.csv (key,value,type,remark) with pandas and returns typed defaults.
# Experiments may also be described by a JSON file; precedence is flags > JSON > setting.csv > built-in defaults.
# Works with built-in defaults when setting.csv cannot be found.
# @endif
#

from __future__ import annotations

from dataclasses import dataclass, field, replace  # [JP] 標準: 設定レコード / [EN] Standard: config records
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import Any, Callable, Dict, Optional, Sequence  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import pandas as pd  # [JP] 外部: CSV読込 / [EN] External: CSV loading

from . import setting_key as sk
from .textio import load_json

SETTING_FILENAME = "setting.csv"

# [JP] setting.csv が無い場合の既定値 / [EN] Built-in fallbacks when setting.csv is absent
_FALLBACKS: Dict[str, Any] = {
    sk.KEY_DEFAULT_SEED: 20240607,
    sk.KEY_DEFAULT_REPLICAS: 200,
    sk.KEY_DEFAULT_THREADS: 1,
    sk.KEY_OUT_DIR: "build/reports",
    sk.KEY_ALPHA_LEVEL: 0.01,
    sk.KEY_CI_Z: 1.959963984540054,
    sk.KEY_MASS_TOL: 1e-9,
    sk.KEY_BUSEMANN_R0: 8.0,
    sk.KEY_BUSEMANN_STEPS: 7,
    sk.KEY_SERIES_PRECISION: 80,
    sk.KEY_SERIES_TAIL: 1e-10,
    sk.KEY_EXPONENT_LOW: 0.57,
    sk.KEY_EXPONENT_HIGH: 0.77,
    sk.KEY_REPORT_HTML: 1,
}

_CASTS: Dict[str, Callable[[str], Any]] = {
    "int": lambda s: int(float(s)),
    "float": float,
    "str": str,
}


##
# @brief Search for a file upward from a starting directory / 開始ディレクトリから親方向にファイルを探索する
#
# @param filename [in]  探索するファイル名 / Filename to search for
# @param start_dir [in]  起点ディレクトリ / Starting directory
# @return Optional[Path]  見つかったPathまたはNone / Found path or None
def _find_file_upwards(filename: str, start_dir: Path) -> Optional[Path]:
    cur = start_dir.resolve()
    for p in [cur, *cur.parents]:
        cand = p / filename
        if cand.exists():
            return cand.resolve()
    return None


##
# @brief Locate setting.csv / setting.csvの場所を探す
#
# @if japanese
# カレントディレクトリ → パッケージ位置から親方向 の順で探索します。見つからなければNoneを返します。
# @endif
#
# @if english
# Looks in the current directory, then upward from the package location. Returns None when absent.
# @endif
#
# @param filename [in]  ファイル名 / Filename to search for
# @return Optional[Path]  見つかったパス / Found path or None
def find_setting_csv(filename: str = SETTING_FILENAME) -> Optional[Path]:
    cwd_candidate = Path.cwd() / filename
    if cwd_candidate.exists():
        return cwd_candidate.resolve()
    return _find_file_upwards(filename, Path(__file__).resolve().parent)


##
# @brief Load setting CSV as DataFrame / setting CSVをDataFrameとして読み込む
#
# @param path [in]  明示パス(省略時は探索) / Explicit path, searched when omitted
# @return pd.DataFrame  設定表 / Settings table
# @throws FileNotFoundError 見つからない場合 / When no file is found
def load_setting_csv(path: Optional[Path | str] = None) -> pd.DataFrame:
    p = Path(path) if path is not None else find_setting_csv()
    if p is None or not p.exists():
        raise FileNotFoundError(f"{SETTING_FILENAME} not found (cwd={Path.cwd()}, path={path})")
    return pd.read_csv(p, encoding="utf-8-sig", dtype=str)


##
# @brief Get value for a key from setting CSV / setting CSVからキーの値を取得する
#
# @param csv [in]  設定DataFrame / Settings data
# @param key [in]  キー名 / Key name
# @return str  値 / Raw value
def get_setting_value(csv: pd.DataFrame, key: str) -> str:
    indexed = csv.set_index(csv.columns[0])
    return indexed.at[key, csv.columns[1]]


def fallback(key: str) -> Any:
    """Built-in value of a setting key; library defaults read through this."""
    if key not in _FALLBACKS:
        raise KeyError(f"unknown setting key '{key}'")
    return _FALLBACKS[key]


##
# @brief Get typed setting value with fallback / 型変換済みの設定値を取得(フォールバック付き)
#
# @if japanese
# type列に従って値を変換します。キーが無い、空、変換失敗の場合は組込み既定値を返します。
# @endif
#
# @if english
# Casts the value according to the type column; returns the built-in default when the key is missing, empty or malformed.
# @endif
#
# @param csv [in]  設定DataFrame(Noneも可) / Settings data or None
# @param key [in]  キー名 / Key name
# @return Any  設定値 / Setting value
def get_setting(csv: Optional[pd.DataFrame], key: str) -> Any:
    default = _FALLBACKS.get(key)
    if csv is None:
        return default
    try:
        raw = get_setting_value(csv, key)
        if raw is None or str(raw).strip() == "" or str(raw) == "nan":
            return default
        indexed = csv.set_index(csv.columns[0])
        kind = str(indexed.at[key, csv.columns[2]]).strip() if len(csv.columns) > 2 else "str"
        return _CASTS.get(kind, str)(str(raw).strip())
    except (KeyError, ValueError):
        return default


@dataclass(frozen=True)
class HarnessDefaults:
    seed: int
    replicas: int
    threads: int
    out_dir: str
    alpha: float
    ci_z: float
    mass_tol: float
    busemann_r0: float
    busemann_steps: int
    series_precision: int
    series_tail: float
    exponent_low: float
    exponent_high: float
    report_html: bool

    ##
    # @brief Build defaults from setting.csv / setting.csvから既定値を構築
    #
    # @param path [in]  setting.csvのパス(省略時は探索) / Optional explicit path
    # @return HarnessDefaults  既定値 / Harness defaults
    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "HarnessDefaults":
        try:
            csv: Optional[pd.DataFrame] = load_setting_csv(path)
        except FileNotFoundError:
            if path is not None:
                raise
            csv = None
        return cls(
            seed=int(get_setting(csv, sk.KEY_DEFAULT_SEED)),
            replicas=int(get_setting(csv, sk.KEY_DEFAULT_REPLICAS)),
            threads=int(get_setting(csv, sk.KEY_DEFAULT_THREADS)),
            out_dir=str(get_setting(csv, sk.KEY_OUT_DIR)),
            alpha=float(get_setting(csv, sk.KEY_ALPHA_LEVEL)),
            ci_z=float(get_setting(csv, sk.KEY_CI_Z)),
            mass_tol=float(get_setting(csv, sk.KEY_MASS_TOL)),
            busemann_r0=float(get_setting(csv, sk.KEY_BUSEMANN_R0)),
            busemann_steps=int(get_setting(csv, sk.KEY_BUSEMANN_STEPS)),
            series_precision=int(get_setting(csv, sk.KEY_SERIES_PRECISION)),
            series_tail=float(get_setting(csv, sk.KEY_SERIES_TAIL)),
            exponent_low=float(get_setting(csv, sk.KEY_EXPONENT_LOW)),
            exponent_high=float(get_setting(csv, sk.KEY_EXPONENT_HIGH)),
            report_html=bool(int(get_setting(csv, sk.KEY_REPORT_HTML))),
        )

    ##
    # @brief Geometric Busemann radius schedule / Busemann半径の等比列
    #
    # @return list[float]  r0·2^k
    def radii(self) -> list[float]:
        return [self.busemann_r0 * (2.0**k) for k in range(self.busemann_steps)]


@dataclass(frozen=True)
class ExperimentConfig:
    """
    実験1回分の完全な設定。レポートにそのまま埋め込まれる。
    """

    experiment: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    replicas: int = 1
    threads: int = 1
    out: str = "build/reports"
    write_json: bool = True
    write_csv: bool = False

    ##
    # @brief Validate basic invariants / 基本的な不変条件を検証
    #
    # @throws ValueError replicas<1 や threads<1 の場合 / When replicas or threads are below 1
    def validate(self) -> None:
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if not self.experiment:
            raise ValueError("experiment name is empty")

    ##
    # @brief Config as a plain dict for reports / レポート埋め込み用のdict
    #
    # @return dict  設定内容(threadsは結果に影響しないため除外) / Config without the thread count
    def as_record(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "parameters": dict(sorted(self.parameters.items())),
            "seed": self.seed,
            "replicas": self.replicas,
        }


##
# @brief Resolve an experiment config from JSON file and flags / JSONとフラグから実験設定を解決
#
# @if japanese
# 既定値 → JSONファイル → コマンドラインの順に上書きします。flags中のNoneは「指定なし」として扱います。
# parametersは辞書単位でマージします。
# @endif
#
# @if english
# Layers defaults, then the JSON file, then command-line flags. None in flags means "not given".
# Parameters are merged key by key.
# @endif
#
# @param experiment [in]  実験名 / Experiment name
# @param defaults [in]  ハーネス既定値 / Harness defaults
# @param config_path [in]  JSON設定ファイル / Optional JSON config path
# @param flags [in]  コマンドラインの値 / Values from the command line
# @param parameters [in]  コマンドラインの実験パラメータ / Experiment parameters from the command line
# @param aliases [in]  JSONで受け付ける実験の別名 / Other names the JSON may use for the experiment
# @return ExperimentConfig  解決済み設定 / Resolved config
# @throws ValueError JSONの実験名が一致しない場合 / When the JSON names another experiment
def resolve_config(
    experiment: str,
    defaults: HarnessDefaults,
    config_path: Optional[Path | str],
    flags: Dict[str, Any],
    parameters: Dict[str, Any],
    *,
    aliases: Sequence[str] = (),
) -> ExperimentConfig:
    cfg = ExperimentConfig(
        experiment=experiment,
        seed=defaults.seed,
        replicas=defaults.replicas,
        threads=defaults.threads,
        out=defaults.out_dir,
    )

    merged_params: Dict[str, Any] = {}
    if config_path is not None:
        data = load_json(config_path)
        if not isinstance(data, dict):
            raise ValueError(f"config must be a JSON object: {config_path}")
        named = data.get("experiment")
        if named is not None and named != experiment and named not in aliases:
            raise ValueError(f"config is for experiment '{named}', not '{experiment}'")
        merged_params.update(data.get("parameters", {}) or {})
        for k in ("seed", "replicas", "threads", "out"):
            if k in data and data[k] is not None:
                cfg = replace(cfg, **{k: data[k]})

    for k, v in parameters.items():
        if v is not None:
            merged_params[k] = v
    cfg = replace(cfg, parameters=merged_params)

    for k in ("seed", "replicas", "threads", "out", "write_json", "write_csv"):
        v = flags.get(k)
        if v is not None:
            cfg = replace(cfg, **{k: v})

    cfg = replace(cfg, seed=int(cfg.seed), replicas=int(cfg.replicas), threads=int(cfg.threads))
    cfg.validate()
    return cfg
