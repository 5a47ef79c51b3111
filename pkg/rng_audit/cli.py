import functools
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from rng_audit.adversary import (
    audit as run_audit,
    build_adversarial_initial,
    build_target_state,
    run_case_study,
)
from rng_audit.circuit import compile_unitary
from rng_audit.circuit_parser import parse_amplitudes, parse_circuit, serialize_circuit
from rng_audit.exceptions import EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, AuditError, InputError
from rng_audit.linalg import norm, phase_insensitive_distance
from rng_audit.log import configure as configure_logging, get_logger
from rng_audit.models import AdversaryConfig, Circuit
from rng_audit.report import FORMATS, RunManifest, build_report, content_digest, render, render_json, render_text
from rng_audit.settings import AuditSettings
from rng_audit.simulator import init_state, measure_all, run, sample
from rng_audit.sweep import run_sweep
from rng_audit.validators import PairingValidator


logger = get_logger(__name__)

U64_MAX = (1 << 64) - 1


def get_version():
    """Get the current version of rng-audit"""
    try:
        from importlib.metadata import version
        return version("rng-audit")
    except Exception:
        pass

    try:
        from rng_audit.__version__ import __version__
        return f"{__version__}"
    except Exception:
        return "unknown"


def handle_errors(command):
    """Turn package errors into a red message on stderr and the matching exit code"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except AuditError as e:
            click.echo(click.style(f"❌ {e}", fg='red'), err=True)
            sys.exit(e.exit_code)
        except ValueError as e:
            click.echo(click.style(f"❌ {e}", fg='red'), err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception as e:
            logger.exception("Unexpected error")
            click.echo(click.style(f"❌ Internal error: {e}", fg='red'), err=True)
            sys.exit(EXIT_INTERNAL_ERROR)
    return wrapper


def load_settings(max_qubits: Optional[int]) -> AuditSettings:
    settings = AuditSettings.from_env()
    if max_qubits is not None:
        settings = settings.with_max_qubits(max_qubits)
    settings.validate()
    return settings


def read_text(path: str) -> Tuple[str, bytes]:
    """Read a UTF-8 input file, returning (text, raw bytes)"""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}", {"path": path})
    try:
        return raw.decode("utf-8"), raw
    except UnicodeDecodeError as e:
        raise InputError(f"{path} is not valid UTF-8: {e}", {"path": path})


def load_circuit(path: str, settings: AuditSettings) -> Tuple[Circuit, str]:
    text, raw = read_text(path)
    return parse_circuit(text, settings.max_qubits), content_digest(raw)


def load_initial(spec: str, circuit: Circuit, settings: AuditSettings) -> Tuple[np.ndarray, bool]:
    """Resolve ``basis:<int>`` or an amplitude file into a unit state"""
    if spec.startswith("basis:"):
        try:
            index = int(spec[len("basis:"):])
        except ValueError:
            raise InputError(f"bad basis index in '{spec}'", suggestions=["Use --initial basis:<int>"])
        return init_state(circuit.layout, index)
    text, _ = read_text(spec)
    return init_state(circuit.layout, parse_amplitudes(text),
                      settings.normalizable_floor, settings.state_tolerance)


def parse_pairing_option(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    try:
        return PairingValidator.parse_pairing(text)
    except ValueError:
        raise InputError(f"bad --pairing '{text}'", suggestions=["Give a comma-separated permutation, e.g. 1,0"])


def dense_oracle_residual(circuit: Circuit, state: np.ndarray, final: np.ndarray, dense_max_qubits: int) -> float:
    """Largest entrywise gap between (U ⊗ I_E)|s⟩ from the compiled unitary and the gate-local result"""
    layout = circuit.layout
    unitary = compile_unitary(circuit, dense_max_qubits)
    dense = (unitary @ state.reshape(layout.d_m * layout.d_p, layout.d_e)).reshape(layout.dim)
    return float(np.max(np.abs(dense - final)))


def emit(output: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(output, encoding="utf-8")
    else:
        click.echo(output, nl=False)


format_option = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json', show_default=True,
                             help='Report format (csv exports the distribution only)')
out_option = click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
                          help='Write the report to a file instead of standard output')
seed_option = click.option('--seed', type=click.IntRange(0, U64_MAX), default=0, show_default=True,
                           help='Seed for sampling (64-bit unsigned)')
samples_option = click.option('--samples', type=click.IntRange(min=1), default=None,
                              help='Number of seeded samples to draw')
max_qubits_option = click.option('--max-qubits', type=click.IntRange(min=3), default=None,
                                 help='Maximum total qubits (default 20, or RNG_AUDIT_MAX_QUBITS)')


@click.group()
@click.version_option(version=get_version(), prog_name="rngaudit")
@click.option('-v', '--verbose', count=True, help='Log progress to stderr (-vv for debug output)')
def cli(verbose):
    """Audit random-number generation circuits against an entangled environment.

    Every setup of M (measured) and P (projection) registers can be run from
    an initial state entangled with an environment register E so that the
    generated number is perfectly predictable from E. These commands build
    that state, simulate the circuit and quantify the dependence.
    """
    configure_logging(AuditSettings.from_env().log_level, verbose)


@click.command('case-study')
@format_option
@out_option
@click.option('--write-circuit', type=click.Path(dir_okay=False, writable=True), default=None,
              help='Also write the built-in circuit in the text format')
@handle_errors
def case_study(fmt, out, write_circuit):
    """Run the built-in H-CNOT-H bit generator three ways.

    Compares an honest |000⟩ input, the entangled fixed-point preset and the
    constructed adversarial input, and reports the fixed-point residual and
    the conditional Bell-state fidelities for each P outcome.

    Example:
        rngaudit case-study --format text
    """
    result = run_case_study(load_settings(None))
    circuit_text = serialize_circuit(result.circuit)
    if write_circuit:
        Path(write_circuit).write_text(circuit_text, encoding="utf-8")

    manifest = RunManifest.create("case-study", content_digest(circuit_text.encode("utf-8")), None)
    report = build_report(
        manifest,
        distribution=result.rows["constructed"].distribution,
        audit={name: row.to_dict() for name, row in result.rows.items()},
        checks=result.checks,
    )
    emit(render(report, fmt), out)


def _audit_one(path: str, p_star: Optional[int], pairing: Optional[Tuple[int, ...]], initial: Optional[str],
               samples: Optional[int], seed: int, settings: AuditSettings) -> Dict[str, Any]:
    circuit, digest = load_circuit(path, settings)
    cfg = AdversaryConfig(p_star=p_star, pairing=pairing)
    checks: Dict[str, Any] = {}

    override = None
    if initial is not None:
        override, renormalized = load_initial(initial, circuit, settings)
        checks["initial_renormalized"] = renormalized

    result = run_audit(circuit, cfg, initial_override=override, samples=samples,
                       seed=seed if samples is not None else None, settings=settings)

    if override is None:
        resolved = cfg.resolve(circuit.layout, circuit.success_set)
        checks["target_residual"] = phase_insensitive_distance(
            run(circuit, build_adversarial_initial(circuit, resolved)),
            build_target_state(circuit.layout, resolved))

    manifest = RunManifest.create("audit", digest, seed if samples is not None else None)
    return build_report(manifest, distribution=result.distribution, audit=result.to_dict(), checks=checks)


@click.command()
@click.argument('circuit_files', nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--p-star', type=click.IntRange(min=0), default=None,
              help='Successful P outcome prepared by the adversary (default: smallest in the success set)')
@click.option('--pairing', default=None, help='M-to-E basis pairing as a permutation, e.g. 1,0')
@click.option('--initial', default=None,
              help='Audit this initial state instead of the adversary: basis:<int> or an amplitude file')
@samples_option
@seed_option
@format_option
@out_option
@max_qubits_option
@click.option('--batch', is_flag=True, help='Audit several circuit files, one report each, in input order')
@click.option('--jobs', type=click.IntRange(min=1), default=1, show_default=True,
              help='Worker threads for --batch')
@handle_errors
def audit(circuit_files, p_star, pairing, initial, samples, seed, fmt, out, max_qubits, batch, jobs):
    """Audit a circuit file against its constructed adversarial environment.

    Builds the initial state that the circuit evolves into a state where M is
    maximally entangled with E and P is successful, then reports success
    probability, M/E agreement, mutual information and the min-entropy of
    the output given E.

    Examples:
        rngaudit audit setup.circ
        rngaudit audit setup.circ --samples 100000 --seed 42
        rngaudit audit --batch a.circ b.circ --jobs 2
    """
    if len(circuit_files) > 1 and not batch:
        raise click.UsageError("several circuit files need --batch")

    settings = load_settings(max_qubits)
    pairing_tuple = parse_pairing_option(pairing)

    def job(path: str) -> Dict[str, Any]:
        return _audit_one(path, p_star, pairing_tuple, initial, samples, seed, settings)

    if not batch:
        emit(render(job(circuit_files[0]), fmt), out)
        return

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(job, circuit_files))
    else:
        reports = [job(path) for path in circuit_files]

    if fmt == "json":
        output = render_json({"reports": reports})
    else:
        parts = []
        for path, report in zip(circuit_files, reports):
            parts.append(f"# {path}\n" + render(report, fmt))
        output = "".join(parts)
    emit(output, out)


@click.command()
@click.argument('circuit_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--initial', default='basis:0', show_default=True,
              help='Initial state: basis:<int> or an amplitude file')
@samples_option
@seed_option
@format_option
@out_option
@max_qubits_option
@handle_errors
def simulate(circuit_file, initial, samples, seed, fmt, out, max_qubits):
    """Run a circuit on an initial state and report the exact distribution.

    With --samples, also draws seeded outcomes; the same seed always gives
    the same samples.

    Example:
        rngaudit simulate setup.circ --initial basis:0 --samples 10 --seed 7
    """
    settings = load_settings(max_qubits)
    circuit, digest = load_circuit(circuit_file, settings)
    state, renormalized = load_initial(initial, circuit, settings)

    final = run(circuit, state)
    distribution = measure_all(final, circuit.layout, settings.probability_floor)
    drawn = sample(final, circuit.layout, samples, seed) if samples is not None else None

    checks = {
        "initial_renormalized": renormalized,
        "norm_residual": abs(norm(final) - 1.0),
    }
    if circuit.layout.mp_qubits <= settings.dense_max_qubits:
        checks["dense_oracle_residual"] = dense_oracle_residual(circuit, state, final, settings.dense_max_qubits)
    else:
        logger.info(f"Skipping dense cross-check: m + p = {circuit.layout.mp_qubits} exceeds "
                    f"dense_max_qubits = {settings.dense_max_qubits}")
    manifest = RunManifest.create("simulate", digest, seed if samples is not None else None)
    report = build_report(manifest, distribution=distribution, checks=checks, samples=drawn)
    emit(render(report, fmt), out)


@click.command()
@click.option('--count', type=click.IntRange(min=1), default=100, show_default=True, help='Number of random circuits')
@seed_option
@click.option('--max-register', type=click.IntRange(1, 6), default=4, show_default=True,
              help='Largest M (= E) and P qubit count')
@click.option('--max-gates', type=click.IntRange(min=1), default=50, show_default=True, help='Largest gate count')
@click.option('--random-pairing', is_flag=True, help='Use a random M-to-E pairing per circuit')
@click.option('--jobs', type=click.IntRange(min=1), default=1, show_default=True, help='Worker threads')
@click.option('--format', 'fmt', type=click.Choice(["json", "text"]), default='json', show_default=True)
@out_option
@handle_errors
def sweep(count, seed, max_register, max_gates, random_pairing, jobs, fmt, out):
    """Audit many seeded random circuits, adversarial and honest.

    Every circuit must give certain success, perfect M/E agreement and
    I(M;E) = m bits under the constructed adversary, and zero dependence
    with an untouched environment for a product initial state. Exits 4 if
    any circuit fails.

    Example:
        rngaudit sweep --count 100 --seed 42
    """
    result = run_sweep(count, seed, max_register, max_gates, random_pairing, jobs, load_settings(None))

    manifest = RunManifest.create("sweep", None, seed)
    report = {"manifest": manifest.to_dict(), **result.to_dict()}
    if fmt == "json":
        output = render_json(report)
    else:
        text_report = build_report(manifest, checks=result.summary())
        output = render_text(text_report)
    emit(output, out)

    if not result.passed:
        sys.exit(EXIT_INTERNAL_ERROR)


# register command
cli.add_command(case_study)
cli.add_command(audit)
cli.add_command(simulate)
cli.add_command(sweep)

if __name__ == "__main__":
    cli()
