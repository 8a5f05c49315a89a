"""Command-line entry point: ``birdcast {ingest,train,evaluate,forecast,simulate}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import modelfile
from .config import AXES, REDUCED_PROTOCOL, ConfigError, RunConfig
from .data import DataError, TrackSeries, count_filled, ingest_csv, interpolate_gaps, write_track_csv
from .deconflict import NoSafeDelayError, RunwayConfig, min_delay, runway_trajectory
from .forecast import aggregate_mae, direct_forecast, recursive_forecast
from .nn.train import TrainingError
from .pipeline import evaluate_baseline, evaluate_model, evaluate_oracle, load_track, prepare, train_axis

log = logging.getLogger("birdcast")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x) -> str:
    return repr(float(x))


def build_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "protocol", None) == "reduced":
        for k, v in REDUCED_PROTOCOL.items():
            setattr(cfg, k, v)
    for attr, key in (("seed", "seed"), ("epochs", "epochs"), ("model", "model"), ("data", "data"), ("out", "output_dir")):
        val = getattr(args, attr, None)
        if val is not None:
            setattr(cfg, key, val)
    axis = getattr(args, "axis", None)
    if axis is not None:
        cfg.axes = list(AXES) if axis == "both" else [axis]
    cfg.validate()
    return cfg


# --- ingest -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    raw = ingest_csv(args.csv)
    if len(raw) < 2:
        raise DataError(f"{args.csv}: need at least two samples")
    series = interpolate_gaps(raw, args.resolution)
    filled = count_filled(raw, series)
    word = "gap" if filled == 1 else "gaps"
    msg = f"{len(series)} samples, {filled} {word} filled"
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_track_csv(series, out)
    print(msg)
    return EXIT_OK


# --- train ------------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = build_config(args)
    if not cfg.data_path.exists():
        raise UsageError(f"data file {cfg.data_path} does not exist")
    prep = prepare(cfg)
    models = {}
    for axis in cfg.axes:
        def progress(epoch, tl, vl, axis=axis):
            log.info("[%s] epoch %d/%d train %.3e val %.3e", axis, epoch + 1, cfg.epochs, tl, vl)

        models[axis] = train_axis(cfg, prep, axis, progress)
    out = Path(cfg.output_dir)
    model_path = out / "model.json"
    # the output location is not part of the model; leaving it out keeps reruns byte-identical
    saved_cfg = {k: v for k, v in cfg.to_dict().items() if k != "output_dir"}
    modelfile.save_model(model_path, models, saved_cfg, cfg.seed)
    for axis, m in models.items():
        _write_csv(
            out / f"history_{axis}.csv",
            ["epoch", "train_loss", "val_loss"],
            [[i + 1, _fmt(a), _fmt(b)] for i, (a, b) in enumerate(m.history)],
        )
        print(f"{axis}: best epoch {m.best_epoch + 1}/{len(m.history)}, val loss {m.history[m.best_epoch][1]:.3e}")
    print(f"wrote {model_path}")
    return EXIT_OK


# --- evaluate ---------------------------------------------------------------

def _load_models(path):
    models, cfg_dict, _ = modelfile.load_model(path)
    cfg = RunConfig.from_dict(cfg_dict) if cfg_dict else RunConfig()
    return models, cfg


def _partition_indices(index, k):
    if index is None:
        return list(range(k))
    if not 1 <= index <= k:
        raise UsageError(f"partition index {index} out of range 1..{k}")
    return [index - 1]


def cmd_evaluate(args) -> int:
    if args.oracle:
        cfg = build_config(args)
        models = {}
    else:
        if not args.model_file:
            raise UsageError("evaluate needs --model-file (or --oracle)")
        models, cfg = _load_models(args.model_file)
        if args.data:
            cfg.data = args.data
        if args.out:
            cfg.output_dir = args.out
        if args.axis and args.axis != "both":
            models = {a: m for a, m in models.items() if a == args.axis}
    idx = _partition_indices(args.partition, cfg.test_partitions)
    prep = prepare(cfg)
    L, H = cfg.input_horizon, cfg.prediction_horizon
    axes = list(models) if models else cfg.axes

    # rows of (axis, model label, partition number, evaluation)
    table = []
    for axis in axes:
        runs = {}
        if args.oracle:
            runs["oracle"] = evaluate_oracle(prep, axis, L, H)
        else:
            runs[models[axis].spec.kind] = evaluate_model(models[axis], prep, H)
        if args.baselines:
            runs["linear_regression"] = evaluate_baseline(prep, axis, 1, L, H)
            runs["quartic_regression"] = evaluate_baseline(prep, axis, 4, L, H)
        for label, evs in runs.items():
            for i in idx:
                table.append((axis, label, i + 1, evs[i]))

    out = Path(cfg.output_dir)
    rows = [[axis, label, part, _fmt(ev.mae_m), _fmt(ev.mae_deg), ev.n_steps] for axis, label, part, ev in table]
    _write_csv(out / "mae.csv", ["axis", "model", "test_set", "mae_m", "mae_deg", "n_steps"], rows)
    _write_csv(
        out / "step_error.csv",
        ["axis", "model", "test_set", "lead_s", "mae_m"],
        [[axis, label, part, k + 1, _fmt(e)] for axis, label, part, ev in table for k, e in enumerate(ev.step_mae_m)],
    )
    pred_rows = []
    for axis, label, part, ev in table:
        for r in ev.results:
            for k in range(r.horizon):
                pred_rows.append([axis, label, part, _fmt(r.window_start + k), _fmt(r.truth[k]), _fmt(r.predicted[k])])
    _write_csv(out / "predictions.csv", ["axis", "model", "test_set", "t", "truth_deg", "predicted_deg"], pred_rows)

    print(_render_table(table, [i + 1 for i in idx]))
    return EXIT_OK


def _render_table(table, parts) -> str:
    lines = []
    for axis in dict.fromkeys(a for a, *_ in table):
        lines.append(f"MAE in meters, {'latitude' if axis == 'lat' else 'longitude'}")
        head = f"{'model':<22}" + "".join(f"{'test set ' + str(p):>14}" for p in parts) + f"{'aggregate':>14}"
        lines.append(head)
        labels = list(dict.fromkeys(lbl for a, lbl, *_ in table if a == axis))
        for lbl in labels:
            evs = [ev for a, lb, _, ev in table if a == axis and lb == lbl]
            cells = "".join(f"{ev.mae_m:>14.2f}" for ev in evs)
            lines.append(f"{lbl:<22}{cells}{aggregate_mae(evs):>14.2f}")
        lines.append("")
    return "\n".join(lines)


# --- forecast ---------------------------------------------------------------

def forecast_track(models, track: TrackSeries, t_start: float, horizon: int) -> dict[str, np.ndarray]:
    """Degree forecasts per axis for ``horizon`` steps beginning at ``t_start``."""
    try:
        i = track.at(t_start)
    except KeyError:
        raise UsageError(f"t_start {t_start} is not a sample time of the track") from None
    out = {}
    for axis, m in models.items():
        L = m.spec.input_horizon
        if i < L:
            raise UsageError(f"t_start {t_start} has only {i} s of history; {L} s are needed")
        window = m.scaler.scale(track.axis(axis)[i - L:i])
        if m.spec.many_to_one:
            scaled = recursive_forecast(m.network, window, horizon)
        else:
            if horizon > m.spec.prediction_horizon:
                raise UsageError(f"encoder_decoder model emits at most {m.spec.prediction_horizon} steps")
            scaled = direct_forecast(m.network, window)[:horizon]
        out[axis] = m.scaler.unscale(scaled)
    return out


def cmd_forecast(args) -> int:
    models, _ = _load_models(args.model_file)
    if args.horizon < 1:
        raise UsageError("horizon must be >= 1")
    track = load_track(args.track)
    pred = forecast_track(models, track, args.t_start, args.horizon)
    i = track.at(args.t_start)
    ts = track.t[i:i + args.horizon]
    header = ["t"] + [f"predicted_{a}" for a in AXES if a in pred]
    has_truth = len(ts) == args.horizon
    if has_truth:
        header += [f"truth_{a}" for a in AXES if a in pred]
    rows = []
    for k in range(args.horizon):
        row = [_fmt(args.t_start + k)] + [_fmt(pred[a][k]) for a in AXES if a in pred]
        if has_truth:
            row += [_fmt(track.axis(a)[i + k]) for a in AXES if a in pred]
        rows.append(row)
    out = Path(args.out)
    _write_csv(out, header, rows)
    print(f"wrote {args.horizon}-step forecast to {out}")
    return EXIT_OK


# --- simulate ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    try:
        rcfg = RunwayConfig.load(args.runway)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"runway config {args.runway}: {exc}") from None
    runway = rcfg.runway
    need = int(np.ceil(rcfg.t_roll_s)) + rcfg.max_delay_s + 1
    if args.bird_forecast:
        bird = interpolate_gaps(ingest_csv(args.bird_forecast))
        t_depart = args.t_depart if args.t_depart is not None else float(bird.t[0])
    else:
        if not (args.model_file and args.track and args.t_start is not None):
            raise UsageError("simulate needs --bird-forecast, or --model-file with --track and --t-start")
        models, _ = _load_models(args.model_file)
        if set(models) != set(AXES):
            raise UsageError("simulation needs a model file with both lat and lon models")
        track = load_track(args.track)
        pred = forecast_track(models, track, args.t_start, need)
        t = args.t_start + np.arange(need, dtype=float)
        bird = TrackSeries(t, pred["lat"], pred["lon"], "bird forecast", track.origin)
        t_depart = args.t_depart if args.t_depart is not None else float(args.t_start)

    report = min_delay(runway, bird, rcfg.eps_lat_m, rcfg.eps_lon_m, rcfg.max_delay_s, t_depart, args.mode)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = report.to_dict()
    payload["runway"] = rcfg.to_dict()
    payload["mode"] = args.mode
    (out / "conflict_report.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    rows = []
    for tr in (report.trace, report.delayed_trace):
        aircraft = runway_trajectory(runway, t_depart + tr.delay)
        for k, t in enumerate(tr.t):
            ia = aircraft.at(t)
            ib = bird.at(t)
            rows.append([
                tr.delay, _fmt(t), _fmt(aircraft.lat[ia]), _fmt(aircraft.lon[ia]),
                _fmt(bird.lat[ib]), _fmt(bird.lon[ib]),
                _fmt(tr.sep_lat_m[k]), _fmt(tr.sep_lon_m[k]), int(tr.conflict[k]),
            ])
    _write_csv(
        out / "separation.csv",
        ["delay_s", "t", "aircraft_lat", "aircraft_lon", "bird_lat", "bird_lon", "sep_lat_m", "sep_lon_m", "conflict"],
        rows,
    )
    if report.conflict is None:
        print("no conflict on the scheduled departure; min_delay=0 s")
    else:
        print(f"conflict at t={report.conflict.t:g} s on the scheduled departure; min_delay={report.min_delay} s")
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--epochs", type=int)
    common.add_argument("--model", choices=["vanilla", "stacked", "bidirectional", "encdec", "encoder_decoder"])
    common.add_argument("--axis", choices=["lat", "lon", "both"])
    common.add_argument("--data", help="track CSV (defaults to the bundled synthetic excerpt)")
    common.add_argument("--protocol", choices=["full", "reduced"], help="reduced: 25 epochs, stride-3 windows")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="birdcast", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="parse a track CSV and fill gaps")
    s.add_argument("csv")
    s.add_argument("--out", help="write the gap-filled track here")
    s.add_argument("--resolution", type=float, default=1.0)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("train", parents=[common], help="train one model per axis")
    s.add_argument("--out", help="output directory (overrides output_dir)")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", parents=[common], help="MAE in meters on the test sets")
    s.add_argument("--model-file")
    s.add_argument("--partition", type=int, help="1-based test set index (default: all)")
    s.add_argument("--oracle", action="store_true", help="score a perfect forecaster (sanity check)")
    s.add_argument("--baselines", action="store_true", help="add linear and quartic regression rows")
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("forecast", parents=[common], help="forecast a track from a given time")
    s.add_argument("--model-file", required=True)
    s.add_argument("--track", required=True)
    s.add_argument("--t-start", type=float, required=True, help="seconds since the track start")
    s.add_argument("--horizon", type=int, default=30)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_forecast)

    s = sub.add_parser("simulate", parents=[common], help="departure delay that avoids a predicted strike")
    s.add_argument("--runway", required=True, help="runway JSON config")
    s.add_argument("--bird-forecast", help="use this track directly as the bird forecast")
    s.add_argument("--model-file")
    s.add_argument("--track")
    s.add_argument("--t-start", type=float)
    s.add_argument("--t-depart", type=float)
    s.add_argument("--mode", choices=["box", "euclidean"], default="box")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, modelfile.ModelFileError, NoSafeDelayError, TrainingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
