# -*- coding: utf-8 -*-
##
# @file src/hammerlab/report.py
# @brief Canonical JSON reports, CSV samples and HTML summaries.
#
# @if japanese
# 実験結果を {experiment, version, config, parameters, estimates, ci, verdict, checks, flags} のJSONにまとめ、
# キー順固定の正規化JSONとして書き出します。同じ設定とシードからは同じバイト列になります。
# CSVはpandasで、要約ページはMarkdownを markdown パッケージでHTMLに変換して出力します。
# @endif
#
# @if english
# Assembles an experiment result into {experiment, version, config, parameters, estimates, ci, verdict, checks,
# flags} and writes it as canonical JSON with sorted keys, so the same config and seed give identical bytes.
# CSV samples go through pandas; the summary page is Markdown rendered to HTML with the markdown package.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 出力ログ / [EN] Standard: output logging
import subprocess  # [JP] 標準: git describe の取得 / [EN] Standard: git describe
from importlib import metadata  # [JP] 標準: パッケージ版数 / [EN] Standard: package version
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import Any, Dict, List, Optional  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import markdown  # [JP] 外部: Markdown→HTML変換 / [EN] External: Markdown to HTML

from .experiments import ExperimentResult
from .settings import ExperimentConfig
from .textio import dumps_canonical, write_report_file

logger = logging.getLogger(__name__)

PACKAGE_NAME = "hammerlab"
REPORT_JSON = "report.json"
REPORT_HTML = "report.html"
VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"


##
# @brief Version string for provenance / 出所記録用の版数文字列
#
# @if japanese
# `git describe --always --dirty` が使えればその出力、使えなければインストール済みパッケージの版数を返します。
# @endif
#
# @if english
# Returns `git describe --always --dirty` when available, else the installed package version.
# @endif
#
# @param cwd [in]  gitを実行するディレクトリ / Directory to run git in
# @return str  版数 / Version string
def version_string(cwd: Optional[Path] = None) -> str:
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=str(cwd) if cwd else None,
            capture_output=True,
            text=True,
            check=False,
            timeout=10,
        )
        if proc.returncode == 0 and proc.stdout.strip():
            return proc.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return "0.0.0+unknown"


##
# @brief Assemble the report dict / レポートの辞書を組み立てる
#
# @param config [in]  解決済み設定 / Resolved config
# @param result [in]  実験結果 / Experiment result
# @param version [in]  版数 / Version string
# @return dict  レポート / Report
def build_report(config: ExperimentConfig, result: ExperimentResult, version: str) -> Dict[str, Any]:
    return {
        "experiment": config.experiment,
        "version": version,
        "config": config.as_record(),
        "parameters": dict(sorted(config.parameters.items())),
        "estimates": result.estimates,
        "ci": result.ci,
        "verdict": VERDICT_PASS if result.verdict else VERDICT_FAIL,
        "checks": {k: bool(v) for k, v in result.checks.items()},
        "flags": result.flags,
    }


def report_dir(config: ExperimentConfig) -> Path:
    return Path(config.out) / config.experiment


##
# @brief Markdown summary of a report / レポートのMarkdown要約
#
# @param report [in]  レポート / Report
# @return str  Markdown文字列 / Markdown text
def render_markdown(report: Dict[str, Any]) -> str:
    lines: List[str] = [
        f"# {report['experiment']}",
        "",
        f"- verdict: **{report['verdict']}**",
        f"- version: `{report['version']}`",
        f"- seed: {report['config']['seed']}, replicas: {report['config']['replicas']}",
        "",
        "## Parameters",
        "",
        "| name | value |",
        "| --- | --- |",
    ]
    lines += [f"| {k} | {v} |" for k, v in report["parameters"].items()]
    lines += ["", "## Checks", "", "| check | result |", "| --- | --- |"]
    lines += [f"| {k} | {'OK' if v else 'NG'} |" for k, v in sorted(report["checks"].items())]
    if report["flags"]:
        lines += ["", "## Flags", ""]
        lines += [f"- {k}: {v}" for k, v in sorted(report["flags"].items())]
    lines += ["", "## Estimates", "", "```", dumps_canonical(report["estimates"]).rstrip(), "```", ""]
    return "\n".join(lines)


##
# @brief Wrap converted Markdown into a standalone page / 変換済みMarkdownを単独ページに包む
#
# @param inner_html [in]  本文HTML / Body HTML
# @param title [in]  タイトル / Page title
# @return str  HTML文書 / HTML document
def wrap_page_html(inner_html: str, title: str) -> str:
    return f"""<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8" />
<meta name="viewport" content="width=device-width, initial-scale=1" />
<title>{title}</title>
<style>
  body{{margin:0 auto;max-width:960px;padding:24px;font:14px/1.6 system-ui,sans-serif;color:#1d2130;}}
  table{{border-collapse:collapse;margin:8px 0;}}
  th,td{{border:1px solid #cfd4e0;padding:4px 10px;text-align:left;}}
  pre{{background:#f4f6fa;padding:12px;overflow:auto;}}
  code{{font-family:ui-monospace,monospace;}}
</style>
</head>
<body>
{inner_html}
</body>
</html>
"""


def render_html(report: Dict[str, Any]) -> str:
    body = markdown.markdown(render_markdown(report), extensions=["tables", "fenced_code"])
    return wrap_page_html(body, f"hammerlab: {report['experiment']}")


##
# @brief Write the report files / レポートのファイル群を書き出す
#
# @if japanese
# write_json が真なら report.json、write_csv が真なら result.frames の各表を samples_<名前>.csv、
# html が真なら report.html を <out>/<experiment>/ に書き出します。
# @endif
#
# @if english
# Writes report.json when write_json is set, every table of result.frames as samples_<name>.csv when write_csv is
# set, and report.html when html is set, all under <out>/<experiment>/.
# @endif
#
# @param config [in]  設定 / Config
# @param result [in]  結果 / Result
# @param report [in]  組み立て済みレポート / Assembled report
# @param html [in]  HTML要約を出すか / Whether to render the HTML summary
# @return list[Path]  書き出したファイル / Written files
def write_report(
    config: ExperimentConfig, result: ExperimentResult, report: Dict[str, Any], *, html: bool = True
) -> List[Path]:
    out = report_dir(config)
    written: List[Path] = []
    if config.write_json:
        written.append(write_report_file(out / REPORT_JSON, report))
    if config.write_csv:
        out.mkdir(parents=True, exist_ok=True)
        for name, frame in sorted(result.frames.items()):
            p = out / f"samples_{name}.csv"
            frame.to_csv(p, index=False, float_format="%.17g", encoding="utf-8")
            written.append(p)
    if html:
        written.append(write_report_file(out / REPORT_HTML, render_html(report)))
    for p in written:
        logger.debug("wrote %s", p)
    return written
