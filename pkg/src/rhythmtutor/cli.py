"""Command-line driver.

Thin wrappers over the library: every command's output comes straight
from the same calls a library user would make. Exit codes: 0 success,
1 domain error, 2 usage error. ``--json`` switches a command to pure
JSON on stdout.
"""

from __future__ import annotations

import json
import sys

import click

from .assessment import AssessmentResult, assess
from .complexity import (
    adjusted_complexity,
    build_code_levels,
    enumerate_curriculum,
    h_code,
)
from .core import TimingConfig, parse_pattern
from .errors import DomainError
from .synthesis import generate_pulses, render
from .wav_io import read_wav, write_wav

_BAR_WIDTH = 30


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _bar(value: float, scale: float) -> str:
    """Signed horizontal bar: left of the axis lags, right of it rushes."""
    units = 0 if scale == 0 else round(abs(value) / scale * _BAR_WIDTH)
    units = min(units, _BAR_WIDTH)
    left = "#" * units if value < 0 else ""
    right = "#" * units if value > 0 else ""
    return f"{left:>{_BAR_WIDTH}}|{right:<{_BAR_WIDTH}}"


def _print_graph(title: str, labels: list[str], values) -> None:
    click.echo(title)
    scale = max((abs(v) for v in values), default=0.0) or 1.0
    axis = " " * _BAR_WIDTH + "|"
    click.echo(f"  {'':>8} {'dragging':>{_BAR_WIDTH}} {'rushing':<{_BAR_WIDTH}}")
    for label, v in zip(labels, values):
        click.echo(f"  {label:>8} {_bar(v, scale)} {v:+7.2f}%")
    click.echo(f"  {'':>8} {axis} (full bar = {scale:.2f}%)")


@click.group()
def main():
    """Rhythm training toolkit: render, score, and serve rhythm patterns."""


@main.command()
@click.option("--pattern", required=True, help="binary pattern, e.g. 10010010")
@click.option("--ppm", default=160.0, show_default=True, help="pulses per minute")
@click.option("--repeats", default=4, show_default=True)
@click.option("--fs", default=44100, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def generate(pattern, ppm, repeats, fs, out, as_json):
    """Render a pattern to a WAV file."""
    try:
        p = parse_pattern(pattern)
        cfg = TimingConfig(ppm=ppm, fs=fs, repeats=repeats)
        train = generate_pulses(p, cfg)
        audio = render(p, cfg)
        write_wav(out, audio)
    except DomainError as exc:
        _fail(str(exc))
    info = {
        "pattern": str(p),
        "ipi_samples": cfg.ipi,
        "onset_positions": list(train.onset_positions),
        "total_samples": train.total_samples,
        "out": out,
    }
    if as_json:
        click.echo(json.dumps(info))
        return
    click.echo(f"pattern {p} at {ppm} PPM x {repeats} repeats -> {out}")
    click.echo(f"inter-pulse interval: {cfg.ipi} samples")
    if cfg.ipi != int(cfg.ipi):
        click.echo(
            "note: fractional interval; each onset is rounded to the nearest "
            "sample, so placement error stays within half a sample"
        )
    click.echo(f"onset positions: {list(train.onset_positions)}")
    click.echo(f"total samples: {train.total_samples}")


@main.command()
@click.option("--pattern", required=True)
@click.option("--json", "as_json", is_flag=True)
def complexity(pattern, as_json):
    """Per-level uncertainty table and total complexity for a pattern."""
    try:
        p = parse_pattern(pattern)
        score = adjusted_complexity(p)
        comp = p.complement() if 0 < p.onset_count < p.cycle_len else None
    except DomainError as exc:
        _fail(str(exc))
    info = {
        "pattern": str(p),
        "levels": [
            {"level": r.level, "n_elements": len(r.elements), "h_max": r.h_max,
             "h_joint": r.h_joint}
            for r in score.levels
        ],
        "h_code": score.h_code,
        "off_beat_adjusted": score.off_beat_adjusted,
        "adjusted_value": score.adjusted_value,
        "complement_h_code": h_code(comp) if comp is not None else None,
    }
    if as_json:
        click.echo(json.dumps(info))
        return
    click.echo(f"pattern {p}")
    click.echo(f"{'level':>5} {'elements':>8} {'h_max':>10} {'h_joint':>10}")
    for r in score.levels:
        click.echo(f"{r.level:>5} {len(r.elements):>8} {r.h_max:>10.4f} {r.h_joint:>10.4f}")
    click.echo(f"h_code = {score.h_code:.4f}")
    if score.off_beat_adjusted:
        click.echo(f"adjusted (off-beat) = {score.adjusted_value:.4f}")
    if comp is not None:
        same = abs(info["complement_h_code"] - score.h_code) < 1e-9
        click.echo(
            f"complement {comp} h_code = {info['complement_h_code']:.4f} "
            f"({'equal' if same else 'differs'})"
        )


@main.command()
@click.option("--cycle", required=True, type=int)
@click.option("--allow-large", is_flag=True, help="lift the enumeration bound")
@click.option("--json", "as_json", is_flag=True)
def curriculum(cycle, allow_large, as_json):
    """All patterns of a cycle length, easiest first."""
    try:
        scores = enumerate_curriculum(cycle, allow_large=allow_large)
    except DomainError as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps([
            {"rank": i, "pattern": str(s.pattern), "h_code": s.h_code,
             "adjusted_value": s.adjusted_value}
            for i, s in enumerate(scores)
        ]))
        return
    click.echo(f"{'rank':>4} {'pattern':>{cycle + 2}} {'h_code':>10} {'adjusted':>10}")
    for i, s in enumerate(scores):
        click.echo(
            f"{i:>4} {str(s.pattern):>{cycle + 2}} {s.h_code:>10.4f} "
            f"{s.adjusted_value:>10.4f}"
        )


@main.command("assess")
@click.option("--pattern", required=True)
@click.option("--ppm", default=160.0, show_default=True)
@click.option("--repeats", default=4, show_default=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bound", default=10.0, show_default=True, help="pass bound in percent")
@click.option("--json", "as_json", is_flag=True)
def assess_cmd(pattern, ppm, repeats, in_path, bound, as_json):
    """Score a recorded WAV against a pattern."""
    try:
        p = parse_pattern(pattern)
        recording = read_wav(in_path)
        cfg = TimingConfig(ppm=ppm, fs=recording.fs, repeats=repeats)
        result: AssessmentResult = assess(p, cfg, recording, bound=bound)
    except DomainError as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(result.to_dict()))
        return
    click.echo(f"pattern {p}: {'PASS' if result.passed else 'FAIL'} "
               f"(bound {result.bounds_used}%)")
    _print_graph(
        "per-onset average deviation",
        [f"onset {i}" for i in range(len(result.per_onset_avg))],
        result.per_onset_avg,
    )
    _print_graph(
        "per-cycle average deviation",
        [f"cycle {i}" for i in range(len(result.per_cycle_avg))],
        result.per_cycle_avg,
    )
    sys.exit(0 if result.passed else 1)


@main.command()
@click.option("--store", required=True, type=click.Path(dir_okay=False))
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port")
@click.option("--ppm", default=160.0, show_default=True)
@click.option("--pass-bound", default=10.0, show_default=True)
@click.option("--token-ttl", default=86400.0, show_default=True, help="seconds")
def serve(store, bind, ppm, pass_bound, token_ttl):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    host, _, port_text = bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.BadParameter("--bind must be host:port", param_hint="--bind")
    try:
        app = create_app(
            store, ppm=ppm, pass_bound=pass_bound, token_ttl=token_ttl
        )
    except DomainError as exc:
        _fail(str(exc))
    uvicorn.run(app, host=host, port=int(port_text))


if __name__ == "__main__":
    main()
