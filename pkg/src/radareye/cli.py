"""Command-line interface for radareye."""

import contextlib
import csv
import logging
import sys
from typing import Optional

import click
from dotenv import load_dotenv

from . import __version__
from .bench import run_benchmark
from .beamforming import apply_los_mask, compute_spectrum, normalize_spectrum, subtract_background
from .config import ScenarioFile, load_config
from .errors import RadarEyeError
from .framefile import read_frame_file, write_frame_file
from .geometry import DEFAULT_AOA_RANGE, MountGeometry, range_to_tof
from .pipeline import DEFAULT_WARMUP, LOS_RANGE_FLOOR, LevelPipeline, grid_for
from .radar_model import default_config
from .tracking import get_available_estimators
from .tracking.baselines import BaselineParams
from .tracking.tracker import TrackerParams

EXIT_USAGE = 1
EXIT_DATA = 2

METHOD_CHOICES = get_available_estimators() + ["all"]

# -------------------- HELPERS --------------------


class DataError(click.ClickException):
    """Input data could not be used (config, frame file, tracking)."""

    exit_code = EXIT_DATA


@contextlib.contextmanager
def data_errors():
    try:
        yield
    except (RadarEyeError, ValueError) as e:
        raise DataError(str(e)) from e
    except OSError as e:
        raise DataError(f"{e.filename or 'file'}: {e.strerror or e}") from e


class RadarEyeGroup(click.Group):
    """Click group with radareye's exit codes: 1 for usage, 2 for data errors."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        load_dotenv()
        try:
            return super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            if not standalone_mode:
                raise
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            if not standalone_mode:
                raise
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            if not standalone_mode:
                raise
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)


def setup_logging(verbose: int):
    if verbose <= 0:
        return
    logging.basicConfig(
        level=logging.DEBUG if verbose > 1 else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def load_scenario(config: Optional[str]) -> Optional[ScenarioFile]:
    if config is None:
        return None
    with data_errors():
        return load_config(config)


def los_floor_tof(los_floor: float) -> Optional[float]:
    return range_to_tof(los_floor) if los_floor > 0 else None


def open_frames(frames_path: str, scenario: Optional[ScenarioFile]):
    """Read a frame file and the radar, mount and grid it should be processed with."""
    radar = scenario.radar if scenario else default_config()
    mount = scenario.mount if scenario else MountGeometry()
    with data_errors():
        contents = read_frame_file(frames_path, expected_shape=(radar.num_antennas,
                                                                radar.num_freq_points))
    return contents, radar, mount


def output_stream(output: Optional[str]):
    if output is None:
        return contextlib.nullcontext(click.get_text_stream("stdout"))
    with data_errors():
        return open(output, "w", newline="", encoding="utf-8")


# -------------------- CLI --------------------
@click.version_option(version=__version__, package_name="radareye")
@click.group(cls=RadarEyeGroup, context_settings={"auto_envvar_prefix": "RADAREYE"})
@click.option("-v", "--verbose", count=True, help="Log progress to stderr (-vv for debug)")
def cli(verbose):
    """radareye: mmWave liquid-level sensing. Simulate, replay, track and benchmark."""
    setup_logging(verbose)


# -------------------- SIMULATE --------------------


@cli.command()
@click.argument("config")
@click.argument("output", type=click.Path(dir_okay=False, writable=True))
@click.option("--seed", default=0, show_default=True, help="Root seed for all frame noise")
def simulate(config, output, seed):
    """Simulate a scenario CONFIG and write it to the frame file OUTPUT.

    CONFIG is a path or a bundled name (static_fill, pour).

    Examples:

        radareye simulate pour pour.rdre --seed 3

        radareye simulate my_scene.cfg scene.rdre
    """
    scenario = load_scenario(config)
    with data_errors():
        sequence = scenario.generate(seed)
        write_frame_file(output, sequence.frames, sequence.background, sequence.truth_levels)

    click.echo(f"Simulated {scenario.kind}: {len(sequence)} slots")
    if sequence.interference_slots:
        first, last = sequence.interference_slots[0], sequence.interference_slots[-1]
        click.echo(f"  Interference: slots {first}-{last}")
    click.echo(f"✓ Saved to {output}")


# -------------------- TRACK --------------------


@cli.command()
@click.argument("frames", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", help="Per-slot CSV path (default: stdout)")
@click.option("-c", "--config", help="Scenario config supplying radar, mount and grid")
@click.option("--method", default="track", show_default=True, type=click.Choice(METHOD_CHOICES))
@click.option("--grid-n", type=click.IntRange(min=2), help="Grid size N  [default: 64]")
@click.option("--q", "q", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--omega", default=1.0, show_default=True, type=click.FloatRange(min=0))
@click.option("--omega-theta", default=0.1, show_default=True, type=click.FloatRange(min=0))
@click.option("--omega-tau", default=0.1, show_default=True, type=click.FloatRange(min=0))
@click.option("--free-start", is_flag=True, help="Start from every bin instead of the warm-up peak")
@click.option("--warmup", default=DEFAULT_WARMUP, show_default=True, type=click.IntRange(min=1))
@click.option("--top-n", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--window", default=3, show_default=True, type=click.IntRange(min=1))
@click.option("--no-background", is_flag=True, help="Skip differential background subtraction")
@click.option("--normalize/--no-normalize", default=True, show_default=True)
@click.option("--los-floor", default=LOS_RANGE_FLOOR, show_default=True,
              type=click.FloatRange(min=0), help="Mask bins closer than this range (m); 0 disables")
def track(frames, output, config, method, grid_n, q, omega, omega_theta, omega_tau, free_start,
          warmup, top_n, window, no_background, normalize, los_floor):
    """Estimate the liquid level for every slot of a frame file.

    Examples:

        radareye track pour.rdre --method all -o levels.csv

        radareye track capture.rdre --no-background --q 3
    """
    scenario = load_scenario(config)
    contents, radar, mount = open_frames(frames, scenario)
    if contents.background is None and not no_background:
        raise DataError(f"{frames} has no background frame; pass --no-background to run without")

    methods = get_available_estimators() if method == "all" else [method]
    n = grid_n or (scenario.grid_n if scenario else 64)
    aoa_range = scenario.aoa_range if scenario else DEFAULT_AOA_RANGE

    with data_errors():
        pipeline = LevelPipeline(
            grid_for(radar, mount, n, aoa_range),
            mount,
            methods=methods,
            use_background=not no_background,
            normalize=normalize,
            los_floor=los_floor_tof(los_floor),
            tracker_params=TrackerParams(
                omega=omega, omega_theta=omega_theta, omega_tau=omega_tau, q=q,
                free_start=free_start,
            ),
            baseline_params=BaselineParams(top_n=top_n, window=window),
            warmup=warmup,
        )
        report = pipeline.run(contents.frames, contents.background, contents.truth)

    with output_stream(output) as out:
        report.write_csv(out)
    click.echo(report.summary_line(), err=output is None)


# -------------------- SPECTRUM --------------------


@cli.command()
@click.argument("frames", type=click.Path(exists=True, dir_okay=False))
@click.option("--slot", default=0, show_default=True, type=int)
@click.option("-o", "--output", help="CSV path (default: stdout)")
@click.option("-c", "--config", help="Scenario config supplying radar, mount and grid")
@click.option("--grid-n", type=click.IntRange(min=2), help="Grid size N  [default: 64]")
@click.option("--no-background", is_flag=True, help="Skip differential background subtraction")
@click.option("--normalize/--no-normalize", default=False, show_default=True)
@click.option("--los-floor", default=0.0, show_default=True, type=click.FloatRange(min=0),
              help="Mask bins closer than this range (m); masked bins export as 0")
def spectrum(frames, slot, output, config, grid_n, no_background, normalize, los_floor):
    """Export the N x N AoA-ToF spectrum of one slot as CSV.

    The header row holds the ToF bin centres (s), the first column the AoA bin
    centres (rad).
    """
    scenario = load_scenario(config)
    contents, radar, mount = open_frames(frames, scenario)
    if not 0 <= slot < len(contents):
        raise DataError(f"slot {slot} out of range: {frames} has {len(contents)} slots")

    n = grid_n or (scenario.grid_n if scenario else 64)
    aoa_range = scenario.aoa_range if scenario else DEFAULT_AOA_RANGE
    with data_errors():
        grid = grid_for(radar, mount, n, aoa_range)
        frame = contents.frames[slot]
        if contents.background is not None and not no_background:
            frame = subtract_background(frame, contents.background)
        result = compute_spectrum(grid, frame)
        floor = los_floor_tof(los_floor)
        if floor is not None:
            result = apply_los_mask(result, floor)
        if normalize:
            result = normalize_spectrum(result)

    values = result.masked_values(fill=0.0)
    with output_stream(output) as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["aoa_rad\\tof_s"] + [f"{t:.12g}" for t in grid.tof_bins])
        for aoa, row in zip(grid.aoa_bins, values):
            writer.writerow([f"{aoa:.12g}"] + [f"{v:.12g}" for v in row])
    if output:
        click.echo(f"✓ Saved {n}x{n} spectrum of slot {slot} to {output}")


# -------------------- BENCH --------------------


@cli.command()
@click.option("--grid-n", default=64, show_default=True, type=click.IntRange(min=2))
@click.option("--m", "m", default=4, show_default=True, type=click.IntRange(min=1))
@click.option("--k", "k", default=128, show_default=True, type=click.IntRange(min=1))
@click.option("--q", "q", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("-n", "--repetitions", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--warmup", default=10, show_default=True, type=click.IntRange(min=10))
@click.option("--seed", default=0, show_default=True)
def bench(grid_n, m, k, q, repetitions, warmup, seed):
    """Measure per-update latency (one spectrum + one tracker step).

    Examples:

        radareye bench -n 1000

        radareye bench --grid-n 32 --q 10
    """
    with data_errors():
        result = run_benchmark(grid_n, m, k, q, repetitions, warmup=warmup, seed=seed)

    click.echo(f"\nLatency over {result.repetitions} updates (N={grid_n}, M={m}, K={k}, Q={q})")
    click.echo(f"  min:    {result.min_us:10.1f} us")
    click.echo(f"  median: {result.median_us:10.1f} us")
    click.echo(f"  p99:    {result.p99_us:10.1f} us")
    click.echo(
        f"  transitions/step: {result.transitions_per_step} "
        f"(bound N^2(2Q+1)^2 = {result.transition_bound})"
    )


# -------------------- ENTRYPOINT --------------------
def main(args=None):
    """
    Entry point for console_scripts and testing.

    Args:
        args (list[str], optional): Command-line arguments to pass to Click CLI.
    """
    # If args is None, Click will use sys.argv by default
    cli.main(args=args, prog_name="radareye")


if __name__ == "__main__":
    main()
