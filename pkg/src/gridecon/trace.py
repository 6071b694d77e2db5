"""Episode traces, per-period metrics tables, and replay.

A trace is line-delimited JSON: one header record, one record per
simulation event, and a closing record carrying the SHA-256 digest of
every preceding line. All coin amounts inside events are scaled
integers (cents), so a trace round-trips exactly.

Replay rebuilds the per-period metrics from events alone. The builds,
house-trade, and skill-trade counts are recounted from event records;
coin and labor ledgers are taken from the collection snapshots. A
replayed metrics table is byte-equal to the one written live.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json

from .metrics import MetricsRecord, build_metrics_record, pearson_correlation

TRACE_VERSION = "1"


class TraceParseError(ValueError):
    """A trace line failed to parse; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def _dump(record: dict) -> bytes:
    return (json.dumps(record, sort_keys=True) + "\n").encode()


class TraceWriter:
    """Streams events to a line-delimited file with a running digest."""

    def __init__(self, path, header: dict):
        self._file = open(path, "wb")
        self._hash = hashlib.sha256()
        self.digest = None
        record = {"kind": "header", "version": TRACE_VERSION, **header}
        self._emit(record)

    def _emit(self, record: dict) -> None:
        line = _dump(record)
        self._hash.update(line)
        self._file.write(line)

    def write_event(self, event: dict) -> None:
        self._emit(event)

    def close(self) -> str:
        self.digest = self._hash.hexdigest()
        self._file.write(_dump({"kind": "end", "digest": self.digest}))
        self._file.close()
        return self.digest


def read_trace(path):
    """Parse a trace file into (header, events, digest).

    Verifies the closing digest against the recomputed one when an end
    record is present.
    """
    header = None
    events = []
    digest = None
    running = hashlib.sha256()
    with open(path, "rb") as handle:
        for line_number, raw in enumerate(handle, start=1):
            if not raw.endswith(b"\n"):
                raise TraceParseError(line_number, "truncated line")
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise TraceParseError(line_number, f"bad JSON: {exc}") from None
            if not isinstance(record, dict) or "kind" not in record:
                raise TraceParseError(line_number, "record has no kind")
            kind = record["kind"]
            if kind == "header":
                if line_number != 1:
                    raise TraceParseError(line_number, "header not first")
                header = record
            elif kind == "end":
                digest = record["digest"]
                if digest != running.hexdigest():
                    raise TraceParseError(line_number, "digest mismatch")
                continue
            else:
                if header is None:
                    raise TraceParseError(line_number, "event before header")
                events.append(record)
            running.update(raw)
    return header, events, digest


# Metrics table -------------------------------------------------------------

_SCALAR_COLUMNS = (
    "period",
    "equality",
    "productivity",
    "maximin",
    "swf",
    "builds",
    "house_trades",
    "skill_trades",
    "ratio_build_house",
    "ratio_build_skill",
    "house_denominator_clamped",
    "skill_denominator_clamped",
)
_LIST_COLUMNS = ("coin_cents", "labor_micro", "utility_micro")

METRICS_COLUMNS = _SCALAR_COLUMNS + _LIST_COLUMNS


def _format_value(value):
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metrics_to_csv(records) -> str:
    """Render MetricsRecord rows as CSV text, floats in repr form."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(METRICS_COLUMNS)
    for record in records:
        row = [_format_value(getattr(record, c)) for c in _SCALAR_COLUMNS]
        for column in _LIST_COLUMNS:
            row.append("|".join(str(v) for v in getattr(record, column)))
        writer.writerow(row)
    return buffer.getvalue()


def write_metrics(path, records) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(metrics_to_csv(records))


def replay_metrics(header: dict, events) -> list:
    """Recompute the per-period metrics series from trace events alone."""
    config = header["config"]
    swf_kind = config["governing"]["planner_reward"]
    floor = config["inverse_income_floor"]
    eta = config["crra_eta"]
    period_length = config["period_length"]

    counts = {}
    for event in events:
        kind = event.get("kind")
        if kind in ("build", "house_trade", "skill_trade"):
            period = event["step"] // period_length
            slot = counts.setdefault(period, [0, 0, 0])
            slot[("build", "house_trade", "skill_trade").index(kind)] += 1

    from .fixedpoint import MICRO
    from .metrics import agent_utility

    records = []
    for event in events:
        if event.get("kind") != "collection":
            continue
        period = event["period"]
        coin_cents = event["coin_cents"]
        labor_micro = event["labor_micro"]
        utility_micro = [
            round(agent_utility(c / 100, l / MICRO, eta) * MICRO)
            for c, l in zip(coin_cents, labor_micro)
        ]
        builds, house_trades, skill_trades = counts.get(period, [0, 0, 0])
        records.append(
            build_metrics_record(
                period=period,
                coin_cents=coin_cents,
                labor_micro=labor_micro,
                utility_micro=utility_micro,
                swf_kind=swf_kind,
                inverse_income_floor=floor,
                builds=builds,
                house_trades=house_trades,
                skill_trades=skill_trades,
            )
        )
    return records


# Run summary ---------------------------------------------------------------

_ACTIVITY_SERIES = ("builds", "house_trades", "skill_trades")
_WELFARE_SERIES = ("equality", "productivity", "maximin", "swf")


def correlation_table(records) -> dict:
    """Pearson r between each activity and welfare series, per period.

    Degenerate series (constant, or fewer than two periods) yield None.
    """
    table = {}
    for activity in _ACTIVITY_SERIES:
        x = [float(getattr(r, activity)) for r in records]
        for welfare in _WELFARE_SERIES:
            y = [float(getattr(r, welfare)) for r in records]
            if len(x) < 2:
                table[f"{activity}_vs_{welfare}"] = None
            else:
                table[f"{activity}_vs_{welfare}"] = pearson_correlation(x, y)
    return table


def build_summary(records, digest: str | None) -> dict:
    """Aggregate a run into the reported summary structure."""
    summary = {
        "periods": len(records),
        "trace_digest": digest,
        "totals": {
            "builds": sum(r.builds for r in records),
            "house_trades": sum(r.house_trades for r in records),
            "skill_trades": sum(r.skill_trades for r in records),
        },
        "correlations": correlation_table(records),
    }
    if records:
        final = records[-1]
        summary["final"] = {
            "equality": final.equality,
            "productivity": final.productivity,
            "maximin": final.maximin,
            "swf": final.swf,
            "ratio_build_house": final.ratio_build_house,
            "ratio_build_skill": final.ratio_build_skill,
        }
    else:
        summary["final"] = None
    return summary


def write_summary(path, summary: dict) -> None:
    with open(path, "w") as handle:
        json.dump(summary, handle, sort_keys=True, indent=2)
        handle.write("\n")
