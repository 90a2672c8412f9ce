"""Command-line interface.

Commands: quantify one requirement, run a terminal elicitation session,
evaluate produced curves against a dataset, sweep a parameter headlessly,
import examples into the knowledge store, and serve the HTTP API.

Exit codes: 0 on success, 2 on any input or pipeline failure.  The store
path defaults to the REQQUANT_STORE environment variable.
"""

from __future__ import annotations

import json
import statistics
import sys
from pathlib import Path

import click

from .analogy import AnalogyError, reason
from .classify import ClassificationError
from .curves import CurveError, Quantification
from .extract import ExtractionConfig, ExtractionError, initial_quantification
from .metrics import MetricError, compare
from .session import (AnswerPath, InvalidAnswer, Session, SessionError,
                      start_session)
from .store import KnowledgeStore, StoreError, import_dataset, import_examples

_PIPELINE_ERRORS = (ClassificationError, ExtractionError, AnalogyError,
                    CurveError, StoreError, MetricError, SessionError)
_METRICS = ("p2p", "chebyshev", "rmse", "iad")

STORE_ENVVAR = "REQQUANT_STORE"


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_store(path: str | None) -> KnowledgeStore | None:
    if not path:
        return None
    try:
        return KnowledgeStore.load(path)
    except StoreError as exc:
        _fail(str(exc))


def _points_str(q: Quantification) -> str:
    return json.dumps(q.to_pairs())


@click.group()
def main() -> None:
    """Quantify performance requirements into satisfaction curves."""


@main.command()
@click.option("--text", help="Requirement sentence to quantify.")
@click.option("--file", "file_", type=click.Path(), help="Read the requirement from a file.")
@click.option("--store", envvar=STORE_ENVVAR, help="Knowledge store for analogy reasoning.")
@click.option("--no-analogy", is_flag=True, help="Skip analogy reasoning.")
@click.option("--delta", type=float, default=0.10, show_default=True,
              help="Tolerance as a fraction of the threshold.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def quantify(text, file_, store, no_analogy, delta, as_json) -> None:
    """Quantify one requirement and print its curve."""
    if text is None and file_ is None:
        _fail("provide --text or --file")
    if text is None:
        path = Path(file_)
        if not path.exists():
            _fail(f"file not found: {path}")
        text = path.read_text("utf-8").strip()
    knowledge = _load_store(store)
    try:
        config = ExtractionConfig(delta_fraction=delta)
        draft = initial_quantification(
            text, config=config,
            cache=knowledge.embedding_cache if knowledge else None)
        reasoned = None
        analogy_id = None
        if knowledge is not None and not no_analogy:
            result = reason(text, draft.quantification, knowledge)
            reasoned = result.quantification
            analogy_id = result.example.id if result.example else None
    except _PIPELINE_ERRORS as exc:
        _fail(str(exc))
    if as_json:
        payload = {"pattern": draft.classification.pattern.value,
                   "threshold": draft.threshold,
                   "points": draft.quantification.to_pairs()}
        if reasoned is not None:
            payload["reasoned_points"] = reasoned.to_pairs()
            payload["analogy_id"] = analogy_id
        click.echo(json.dumps(payload))
        return
    click.echo(f"pattern: {draft.classification.pattern.value}")
    click.echo(f"threshold: {draft.threshold:g}")
    click.echo(f"points: {_points_str(draft.quantification)}")
    if reasoned is not None:
        suffix = f" (analogy {analogy_id})" if analogy_id else " (no analogy found)"
        click.echo(f"reasoned: {_points_str(reasoned)}{suffix}")


@main.command()
@click.option("--text", required=True, help="Requirement sentence.")
@click.option("--store", envvar=STORE_ENVVAR, help="Knowledge store path.")
@click.option("--n", "rounds", type=int, default=5, show_default=True,
              help="Maximum interaction rounds.")
@click.option("--points", help="Start from this JSON point list instead of the pipeline.")
@click.option("--script", type=click.Path(), help="Answer-path JSON lines; runs headlessly.")
@click.option("--no-analogy", is_flag=True, help="Skip analogy reasoning.")
@click.option("--finalize", "do_finalize", is_flag=True,
              help="Persist the final curve into the store.")
@click.option("--json", "as_json", is_flag=True, help="Print the final session as JSON.")
def session(text, store, rounds, points, script, no_analogy, do_finalize, as_json) -> None:
    """Tune a curve through the question tree (interactive or scripted)."""
    knowledge = _load_store(store)
    try:
        if points is not None:
            live = Session(text, Quantification.from_pairs(json.loads(points)),
                           max_rounds=rounds)
        else:
            live = start_session(text, knowledge, max_rounds=rounds,
                                 use_analogy=not no_analogy)
    except (*_PIPELINE_ERRORS, ValueError) as exc:
        _fail(str(exc))
    click.echo(f"round 0: {_points_str(live.current)}")
    if script is not None:
        _run_scripted(live, Path(script))
    else:
        _run_interactive(live)
    if do_finalize:
        if knowledge is None:
            _fail("--finalize needs --store")
        example = live.finalize(knowledge)
        click.echo(f"stored example {example.id}")
    if as_json:
        click.echo(json.dumps(live.to_dict()))


def _run_scripted(live: Session, script_path: Path) -> None:
    if not script_path.exists():
        _fail(f"script not found: {script_path}")
    for line_no, line in enumerate(script_path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if live.round >= live.max_rounds:
            break
        try:
            path = AnswerPath.from_dict(json.loads(line))
            outcome = live.answer(path)
        except (json.JSONDecodeError, InvalidAnswer, SessionError) as exc:
            _fail(f"{script_path}:{line_no}: {exc}")
        note = " (no change after clamping)" if outcome.no_op else ""
        click.echo(f"round {live.round}: {_points_str(live.current)}{note}")


def _run_interactive(live: Session) -> None:
    while live.round < live.max_rounds:
        click.echo(f"-- round {live.round + 1} of {live.max_rounds} --")
        walked = None
        while walked is None:
            node = live.current_question()
            click.echo(node.text)
            if node.key == "interval":
                click.echo("  0) finish session")
            for i, choice in enumerate(node.choices, 1):
                click.echo(f"  {i}) {choice.label}")
            raw = click.prompt("choice", type=int)
            if node.key == "interval" and raw == 0:
                return
            if not 1 <= raw <= len(node.choices):
                click.echo("  out of range, try again")
                continue
            result = live.choose(node.choices[raw - 1].value)
            if isinstance(result, AnswerPath):
                walked = result
        try:
            outcome = live.answer(walked)
        except InvalidAnswer as exc:
            click.echo(f"  rejected: {exc}")
            continue
        note = " (no change after clamping)" if outcome.no_op else ""
        click.echo(f"round {live.round}: {_points_str(live.current)}{note}")


@main.command()
@click.option("--dataset", required=True, type=click.Path(), help="Ground-truth JSONL file.")
@click.option("--produced", type=click.Path(),
              help="JSON file mapping record id to a point list.")
@click.option("--pipeline", "use_pipeline", is_flag=True,
              help="Produce curves by running the quantification pipeline.")
@click.option("--store", envvar=STORE_ENVVAR, help="Knowledge store for --pipeline.")
@click.option("--no-analogy", is_flag=True, help="Skip analogy reasoning in --pipeline.")
@click.option("--repeats", type=int, default=1, show_default=True,
              help="Independent repeats to aggregate over.")
@click.option("--report-dir", type=click.Path(),
              help="Write CSV tables and figures into this directory.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def evaluate(dataset, produced, use_pipeline, store, no_analogy, repeats,
             report_dir, as_json) -> None:
    """Score produced curves against ground truth on all four metrics."""
    if (produced is None) == (not use_pipeline):
        _fail("provide exactly one of --produced or --pipeline")
    try:
        records = import_dataset(dataset)
    except StoreError as exc:
        _fail(str(exc))
    knowledge = _load_store(store)

    def produce(record) -> Quantification:
        if produced is not None:
            return _produced_lookup(record.id)
        draft = initial_quantification(
            record.text, cache=knowledge.embedding_cache if knowledge else None)
        if knowledge is not None and not no_analogy:
            return reason(record.text, draft.quantification, knowledge).quantification
        return draft.quantification

    produced_map = {}
    if produced is not None:
        try:
            raw = json.loads(Path(produced).read_text("utf-8"))
            produced_map = {str(k): Quantification.from_pairs(v) for k, v in raw.items()}
        except (OSError, ValueError, CurveError) as exc:
            _fail(f"cannot read produced curves: {exc}")

    def _produced_lookup(record_id: str) -> Quantification:
        if record_id not in produced_map:
            raise MetricError(f"no produced points for record {record_id!r}")
        return produced_map[record_id]

    rows = []
    curves = {}
    try:
        for _ in range(max(1, repeats)):
            for record in records:
                candidate = produce(record)
                report = compare(candidate, record.ground_truth)
                rows.append({"id": record.id, **report.to_dict()})
                curves[record.id] = (candidate, record.ground_truth)
    except _PIPELINE_ERRORS as exc:
        _fail(str(exc))
    if not rows:
        _fail("dataset contains no records")

    aggregates = _aggregate(rows)
    if report_dir:
        from .report import write_evaluate_report
        written = write_evaluate_report(report_dir, rows, aggregates, curves)
        click.echo(f"report written: {', '.join(str(p) for p in written)}", err=True)
    if as_json:
        click.echo(json.dumps({"records": rows, "aggregates": aggregates}))
        return
    header = f"{'id':<20}" + "".join(f"{m.upper():>12}" for m in _METRICS)
    click.echo(header)
    for row in rows:
        click.echo(f"{row['id']:<20}" + "".join(f"{row[m]:>12.3f}" for m in _METRICS))
    click.echo("aggregate mean (deviation): " + "  ".join(
        f"{m.upper()} {aggregates[m]['mean']:.3f} ({aggregates[m]['deviation']:.3f})"
        for m in _METRICS))


def _aggregate(rows) -> dict:
    aggregates = {}
    for key in _METRICS:
        values = [row[key] for row in rows]
        deviation = statistics.stdev(values) if len(values) > 1 else 0.0
        aggregates[key] = {"mean": statistics.fmean(values), "deviation": deviation}
    return aggregates


@main.command()
@click.option("--param", required=True, type=click.Choice(["N", "delta"]),
              help="Which knob to sweep.")
@click.option("--values", required=True,
              help="Comma-separated values (N: integers, delta: fractions or percents).")
@click.option("--dataset", required=True, type=click.Path(), help="Ground-truth JSONL file.")
@click.option("--script", type=click.Path(),
              help="Answer-path JSON lines applied to every record.")
@click.option("--store", envvar=STORE_ENVVAR, help="Knowledge store for analogy reasoning.")
@click.option("--no-analogy", is_flag=True, help="Skip analogy reasoning.")
@click.option("--report-dir", type=click.Path(),
              help="Write CSV table and figures into this directory.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def sweep(param, values, dataset, script, store, no_analogy, report_dir, as_json) -> None:
    """Rerun the headless pipeline per swept value and aggregate the metrics."""
    try:
        records = import_dataset(dataset)
    except StoreError as exc:
        _fail(str(exc))
    if not records:
        _fail("dataset contains no records")
    knowledge = _load_store(store)

    answers: list[AnswerPath] = []
    if script:
        script_path = Path(script)
        if not script_path.exists():
            _fail(f"script not found: {script_path}")
        for line_no, line in enumerate(script_path.read_text("utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                answers.append(AnswerPath.from_dict(json.loads(line)))
            except (json.JSONDecodeError, InvalidAnswer) as exc:
                _fail(f"{script_path}:{line_no}: {exc}")

    try:
        swept = _parse_sweep_values(param, values)
    except ValueError as exc:
        _fail(str(exc))

    out_rows = []
    for value in swept:
        rounds = int(value) if param == "N" else 5
        fraction = value if param == "delta" else 0.10
        per_record = []
        for record in records:
            try:
                config = ExtractionConfig(delta_fraction=fraction)
                draft = initial_quantification(
                    record.text, config=config,
                    cache=knowledge.embedding_cache if knowledge else None)
                current = draft.quantification
                if knowledge is not None and not no_analogy:
                    current = reason(record.text, current, knowledge).quantification
                live = Session(record.text, current, initial=draft.quantification,
                               max_rounds=rounds)
                for path in answers:
                    if live.round >= live.max_rounds:
                        break
                    try:
                        live.answer(path)
                    except InvalidAnswer as exc:
                        click.echo(f"note: {record.id}: skipped answer ({exc})", err=True)
                per_record.append({"id": record.id,
                                   **compare(live.current, record.ground_truth).to_dict()})
            except _PIPELINE_ERRORS as exc:
                _fail(f"record {record.id!r}: {exc}")
        aggregates = _aggregate(per_record)
        row = {"value": value}
        for key in _METRICS:
            row[f"{key}_mean"] = aggregates[key]["mean"]
            row[f"{key}_deviation"] = aggregates[key]["deviation"]
        out_rows.append(row)

    if report_dir:
        from .report import write_sweep_report
        written = write_sweep_report(report_dir, param, out_rows)
        click.echo(f"report written: {', '.join(str(p) for p in written)}", err=True)
    if as_json:
        click.echo(json.dumps({"param": param, "rows": out_rows}))
        return
    header = f"{param:<10}" + "".join(f"{m.upper():>22}" for m in _METRICS)
    click.echo(header)
    for row in out_rows:
        cells = "".join(
            f"{row[f'{m}_mean']:>14.3f} ({row[f'{m}_deviation']:.3f})" for m in _METRICS)
        click.echo(f"{row['value']:<10g}{cells}")


def _parse_sweep_values(param: str, raw: str) -> list[float]:
    values = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if chunk.endswith("%"):
            values.append(float(chunk[:-1]) / 100.0)
        else:
            values.append(float(chunk))
    if not values:
        raise ValueError("no sweep values given")
    if param == "N":
        for v in values:
            if v != int(v) or not 1 <= v <= 9:
                raise ValueError(f"N values must be integers in 1..9, got {v}")
    else:
        # plain numbers above 1 are read as percents (10 -> 0.10)
        values = [v / 100.0 if v >= 1.0 else v for v in values]
        for v in values:
            if not 0.0 < v < 1.0:
                raise ValueError(f"delta values must land in (0, 1), got {v}")
    return values


@main.command("import")
@click.option("--file", "file_", required=True, type=click.Path(),
              help="Examples JSONL file (id, text, initial, preferred).")
@click.option("--store", envvar=STORE_ENVVAR, required=True, help="Knowledge store path.")
def import_cmd(file_, store) -> None:
    """Append examples from a file into the knowledge store."""
    try:
        examples = import_examples(file_)
        knowledge = KnowledgeStore.load(store)
        for example in examples:
            knowledge.add_example(example)
    except StoreError as exc:
        _fail(str(exc))
    click.echo(f"imported {len(examples)} examples into {store} "
               f"(now {len(knowledge)} total)")


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="Service config JSON.")
@click.option("--host", help="Bind address (overrides config).")
@click.option("--port", type=int, help="Port (overrides config).")
@click.option("--store", envvar=STORE_ENVVAR, help="Knowledge store path (overrides config).")
def serve(config_path, host, port, store) -> None:
    """Run the HTTP API."""
    from .service import ServiceConfig, run

    try:
        config = ServiceConfig.from_file(config_path) if config_path else ServiceConfig()
        if host:
            config.host = host
        if port:
            config.port = port
        if store:
            config.store_path = store
    except (OSError, ValueError, TypeError) as exc:
        _fail(f"cannot load service config: {exc}")
    run(config)


if __name__ == "__main__":
    main()
