"""Text/JSON/CSV rendering of exact probabilities and tabular reports."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

MAX_FRACTION_DIGITS = 20
SCHEMA_VERSION = 1


def log2(value: Fraction) -> float:
    if value == 0:
        return -math.inf
    return math.log2(value.numerator) - math.log2(value.denominator)


def _half_even(x: float, places: int) -> Decimal:
    return Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)


def decimal_text(value: Fraction, places: int = 5) -> str:
    scaled = round(Fraction(value) * 10**places)  # Fraction rounds half to even
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def log2_number(value: Fraction) -> str:
    x = log2(value)
    if math.isinf(x):
        return "-inf"
    return str(_half_even(x, 2))


def log2_text(value: Fraction) -> str:
    """``~2^-6.83`` style, two decimals, round half to even."""
    return f"~2^{log2_number(value)}"


def fraction_text(value: Fraction) -> str | None:
    value = Fraction(value)
    if len(str(value.denominator)) > MAX_FRACTION_DIGITS:
        return None
    return f"{value.numerator}/{value.denominator}"


def prob_text(value: Fraction) -> str:
    parts = [p for p in (fraction_text(value),) if p]
    parts += [decimal_text(value), log2_text(value)]
    return " = ".join(parts[:-1]) + " " + parts[-1]


def prob_dict(value: Fraction) -> dict:
    value = Fraction(value)
    return {
        "num": value.numerator,
        "den": value.denominator,
        "decimal": decimal_text(value),
        "log2": log2_number(value),
    }


@dataclass
class Report:
    """One command's output in all three formats."""

    schema: str
    data: dict
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    title: str = ""
    notes: list[str] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return to_json({"schema": f"chacharot.{self.schema}/{SCHEMA_VERSION}", **self.data})
        if fmt == "csv":
            return to_csv(self.columns, self.rows)
        return self.text()

    def text(self) -> str:
        lines = [self.title] if self.title else []
        if self.columns:
            cells = [self.columns] + [[str(c) for c in row] for row in self.rows]
            widths = [max(len(row[i]) for row in cells) for i in range(len(self.columns))]
            for n, row in enumerate(cells):
                lines.append("  ".join(c.rjust(wd) for c, wd in zip(row, widths)).rstrip())
                if n == 0:
                    lines.append("  ".join("-" * wd for wd in widths))
        lines += self.notes
        return "\n".join(lines) + "\n"


def to_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()
