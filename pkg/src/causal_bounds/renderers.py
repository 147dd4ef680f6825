"""
Human-readable ``table`` output, rendered from Django template strings.

Values reach the templates already formatted as strings; the table layout is
not a stable contract (JSON output is).
"""
import csv
import io
import json
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from django.conf import settings
from django.template import Context, Engine

_engine = None


def get_engine() -> Engine:
    global _engine
    if _engine is None:
        if not settings.configured:
            settings.configure()
        _engine = Engine(autoescape=False)
    return _engine


def render_template_string(template_string: str, context: Dict[str, Any]) -> str:
    return get_engine().from_string(template_string).render(Context(context))


def format_value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _aligned(rows: Iterable[Tuple[str, Any]]) -> List[Tuple[str, str]]:
    rows = [(label, format_value(value)) for label, value in rows]
    width = max((len(label) for label, _ in rows), default=0)
    return [(label.ljust(width), value) for label, value in rows]


def render_key_values(
    title: str, rows: Sequence[Tuple[str, Any]], notes: Sequence[str] = ()
) -> str:
    template_string = """{{ title }}
{% for label, value in rows %}  {{ label }}  {{ value }}
{% endfor %}{% for note in notes %}note: {{ note }}
{% endfor %}"""
    context = {"title": title, "rows": _aligned(rows), "notes": list(notes)}
    return render_template_string(template_string, context)


def render_bounds(report: Dict[str, Any]) -> str:
    lower = report["inst_lower"]
    upper = report["inst_upper"]
    template_string = """bounds on the average causal effect (seed {{ seed }}, tol {{ tol }})
  natural       [{{ natural_lower }}, {{ natural_upper }}]
  instrumental  [{{ best_lower }}, {{ best_upper }}]
  linear prog.  [{{ lp_lower }}, {{ lp_upper }}]
  feasible      {{ feasible }} (margin {{ margin }})
   #  lower       upper
{% for index, low, high in entries %}  {{ index }}  {{ low }}  {{ high }}
{% endfor %}{% for v in violations %}violated: {{ v.side }} {{ v.index }} = {{ v.value }}
{% endfor %}{% for row in printed_rows %}printed upper {{ row.index }}: {{ row.printed }} (symmetric {{ row.symmetric }}){% if not row.consistent %} INCONSISTENT{% endif %}
{% endfor %}"""
    context = {
        "seed": report.get("seed"),
        "tol": report.get("tol"),
        "natural_lower": format_value(report["natural_lower"]),
        "natural_upper": format_value(report["natural_upper"]),
        "best_lower": format_value(max(lower)),
        "best_upper": format_value(min(upper)),
        "lp_lower": format_value(report["lp_lower"]),
        "lp_upper": format_value(report["lp_upper"]),
        "feasible": format_value(report["feasible"]),
        "margin": format_value(report["feasibility_margin"]),
        "entries": [
            (i, format_value(low).rjust(10), format_value(high).rjust(10))
            for i, (low, high) in enumerate(zip(lower, upper), start=1)
        ],
        "violations": [
            dict(v, value=format_value(v["value"])) for v in report["violations"]
        ],
        "printed_rows": [
            dict(
                row,
                printed=format_value(row["printed"]),
                symmetric=format_value(row["symmetric"]),
            )
            for row in report.get("printed_rows", {}).get("rows", [])
        ],
    }
    return render_template_string(template_string, context)


def render_reproduction(report: Dict[str, Any]) -> str:
    template_string = """reproduction at angles {{ angles }} (seed {{ seed }}, tol {{ tol }})
{% for check in checks %}  [{{ check.status }}] {{ check.name }}  {{ check.value }}  {{ check.relation }} {{ check.target }}
{% endfor %}{% for label, value in values %}  {{ label }}  {{ value }}
{% endfor %}{% for note in notes %}note: {{ note }}
{% endfor %}result: {{ result }}
"""
    relations = {"equal": "==", "at_least": ">=", "at_most": "<="}
    width = max((len(c["name"]) for c in report["checks"]), default=0)
    context = {
        "angles": report["angles"],
        "seed": report.get("seed"),
        "tol": report.get("tol"),
        "checks": [
            {
                "status": "ok" if c["passed"] else "FAIL",
                "name": c["name"].ljust(width),
                "value": format_value(c["value"]).rjust(10),
                "relation": relations[c["kind"]],
                "target": format_value(c["target"]),
            }
            for c in report["checks"]
        ],
        "values": _aligned(report["values"].items()),
        "notes": report["notes"],
        "result": "match" if report["ok"] else "MISMATCH",
    }
    return render_template_string(template_string, context)


def render_verification(summary: Dict[str, Any]) -> str:
    template_string = """verification: {{ samples }} models per family, dims {{ dims }} (seed {{ seed }}, tol {{ tol }})
{% for t in tallies %}  {{ t.name }}  {{ t.passed }} passed  {{ t.failed }} failed  worst margin {{ t.worst }}{% if not t.asserted %}  (recorded){% endif %}
{% endfor %}failures: {{ failures }}
"""
    tallies = summary["checks"]
    width = max((len(t["name"]) for t in tallies), default=0)
    context = {
        "samples": summary["samples"],
        "dims": "x".join(str(d) for d in summary["dims"]),
        "seed": summary.get("seed"),
        "tol": summary.get("tol"),
        "tallies": [
            dict(
                t,
                name=t["name"].ljust(width),
                worst=format_value(t["worst_margin"]),
            )
            for t in tallies
        ],
        "failures": summary["failures"],
    }
    return render_template_string(template_string, context)


def render_scan(result: Dict[str, Any]) -> str:
    return render_key_values(
        f"grid scan, step {result['step']} deg (seed {result.get('seed')}, tol {result.get('tol')})",
        [
            ("alpha0", result["angles"]["alpha0"]),
            ("alpha1", result["angles"]["alpha1"]),
            ("beta0", result["angles"]["beta0"]),
            ("beta1", result["angles"]["beta1"]),
            ("lower bound 3", result["violation"]),
        ],
    )


def render_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()
