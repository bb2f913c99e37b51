import json
import os
import time
from typing import Any, Dict, Optional

import pandas as pd
from rich.console import Console
from tabulate import tabulate

from schemas import Provenance, Report, value_to_json

# Results only; diagnostics use the stderr console from log_setup
console = Console(soft_wrap=True, highlight=False)


class ReportGenerator:
    def __init__(self, command: str, verb: str, fmt: str = "text", out: Optional[str] = None):
        """One report per CLI invocation; the clock starts here"""
        if fmt not in ("text", "json"):
            raise ValueError(f"Unknown output format {fmt!r}")
        self.command = command
        self.verb = verb
        self.fmt = fmt
        self.out = out
        self._start = time.perf_counter()

    def build(self, text: str, result: Optional[Dict[str, Any]] = None, ok: bool = True,
              provenance: Optional[Provenance] = None) -> Report:
        return Report(
            command=self.command,
            verb=self.verb,
            ok=ok,
            text=text,
            result=result or {},
            provenance=provenance or Provenance(),
            elapsed=round(time.perf_counter() - self._start, 6),
        )

    def for_value(self, text: str, value, ok: bool = True, provenance: Optional[Provenance] = None,
                  **extra) -> Report:
        """Report whose structured result is the JSON form of a single value"""
        result = {"value": value_to_json(value)} if value is not None else {}
        result.update(extra)
        return self.build(text, result, ok, provenance)

    def render(self, report: Report) -> str:
        if self.fmt == "json":
            return report.model_dump_json(indent=2)
        lines = [report.text]
        p = report.provenance
        details = [f"{name}={value}" for name, value in p.model_dump().items() if value is not None]
        if details:
            lines.append("# " + " ".join(details))
        return "\n".join(lines)

    def emit(self, report: Report) -> None:
        """Print to stdout, or write to the --out path"""
        rendered = self.render(report)
        if self.out:
            directory = os.path.dirname(self.out)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.out, "w", encoding="utf-8") as fh:
                fh.write(rendered + "\n")
            return
        if self.fmt == "json":
            # rich would restyle the JSON; write it verbatim
            console.file.write(rendered + "\n")
        else:
            console.print(rendered, markup=False)

    def suite_report(self, results: pd.DataFrame, full: bool) -> Report:
        """Reproduction suite outcome: a psql table of checks plus a pass count"""
        passed = int(results["passed"].sum())
        table = tabulate(
            results[["check", "name", "passed", "observed"]],
            headers="keys",
            tablefmt="psql",
            showindex=False,
            maxcolwidths=[None, None, None, 70],
        )
        text = f"{table}\n{passed}/{len(results)} checks passed"
        records = json.loads(results.to_json(orient="records"))
        return self.build(text, {"checks": records, "full": full}, ok=passed == len(results))
