# backend/api/report_generator.py
"""
Report Generator - renders a RunReport as text, JSON or HTML
"""

import json
from typing import Any, Dict

import markdown

from backend.models.report import RunReport

FORMATS = ("human", "json", "html")


class ReportGenerator:
    """Render RunReports in the formats offered by the CLI and the service"""

    def render(self, report: RunReport, fmt: str = "human") -> str:
        if fmt == "json":
            return self.generate_json(report)
        if fmt == "html":
            return self.generate_html(report)
        if fmt == "human":
            return self.generate_text(report)
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")

    def generate_json(self, report: RunReport) -> str:
        """Sorted keys and no timestamps, so equal inputs give equal bytes"""
        return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2, default=str)

    def generate_markdown(self, report: RunReport) -> str:
        lines = [
            f"# {report.command}",
            "",
            f"**Status:** {report.status.value}  ",
            f"**Inputs:** `{report.inputs_digest[:16]}`",
            "",
            "## Results",
            "",
        ]
        lines.extend(_result_lines(report.results))
        lines += ["", "## Checks", "", "| Check | Result | Detail |", "|-------|--------|--------|"]
        for c in report.checks:
            lines.append(f"| {c.name} | {'pass' if c.passed else 'FAIL'} | {c.detail} |")
        if report.error:
            lines += ["", "## Error", "", f"{report.error.get('error')}: {report.error.get('message')}"]
        return "\n".join(lines) + "\n"

    def generate_text(self, report: RunReport) -> str:
        lines = [f"{report.command}: {report.status.value}"]
        lines.extend("  " + line.lstrip("- ") for line in _result_lines(report.results))
        for c in report.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f" ({c.detail})" if c.detail else ""))
        if report.error:
            lines.append(f"  error: {report.error.get('message')}")
        return "\n".join(lines) + "\n"

    def generate_html(self, report: RunReport) -> str:
        body = markdown.markdown(self.generate_markdown(report), extensions=["tables"])
        return f"<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{report.command}</title></head>\n<body>\n{body}\n</body></html>\n"


def _result_lines(results: Dict[str, Any]) -> list:
    lines = []
    for key in sorted(results):
        value = results[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, default=str)
        lines.append(f"- {key}: {value}")
    return lines


report_generator = ReportGenerator()
