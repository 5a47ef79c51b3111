"""
Adversarial environment construction and audits

Builds the state in which M is maximally entangled with an environment
register E while P sits in a successful outcome, pulls it back through
the circuit to obtain the initial state that produces it, and audits how
much the generated output depends on E.
"""

import hashlib
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from rng_audit.__version__ import __version__
from rng_audit.analysis import (
    BivariateDistribution,
    agreement_probability,
    chi_square_independence,
    min_entropy_given_y,
    mutual_information,
)
from rng_audit.circuit_parser import serialize_circuit
from rng_audit.exceptions import AdversaryConstructionError, DegenerateSampleError, InvalidStateError
from rng_audit.linalg import COMPLEX_DTYPE, DenseVector, norm, phase_insensitive_distance, fidelity
from rng_audit.log import get_logger
from rng_audit.models import INDEX_CONVENTION, AdversaryConfig, Circuit, GateSpec, SubsystemLayout
from rng_audit.prng import make_generator, prng_description
from rng_audit.settings import DEFAULT_SETTINGS, AuditSettings
from rng_audit.simulator import (
    JointDistribution,
    conditional_state,
    measure_all,
    reduced_density_matrix,
    run,
    run_inverse,
    sample,
)


logger = get_logger(__name__)

OVERRIDE_NORM_TOLERANCE = 1e-9

CASE_STUDY_LAYOUT = SubsystemLayout(1, 1, 1)

# ½ on |000⟩, |010⟩, |101⟩, |111⟩ in M,P,E bit order
CASE_STUDY_SUPPORT = (0b000, 0b010, 0b101, 0b111)


@dataclass(frozen=True)
class SamplingSummary:
    """Sampled cross-check of an exact audit"""
    n: int
    seed: int
    prng: str
    success_count: int
    empirical_agreement: Optional[float]
    chi_square_statistic: Optional[float]
    chi_square_dof: Optional[int]
    chi_square_p_value: Optional[float]


@dataclass(frozen=True)
class AuditReport:
    """
    Dependence between the generated output and the environment

    All quantities except success_probability are conditioned on a
    successful P outcome. ``distribution`` is the exact final joint
    distribution and is not part of the serialized report.
    """
    success_probability: float
    agreement_probability: float
    mutual_information_bits: float
    output_mutual_information_bits: float
    output_min_entropy_given_e_bits: float
    p_star: Optional[int]
    pairing: Tuple[int, ...]
    initial_state: str
    circuit_digest: str
    index_convention: str = INDEX_CONVENTION
    tool_version: str = __version__
    sampling: Optional[SamplingSummary] = None
    distribution: Optional[JointDistribution] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        """Serializable fields in a fixed order"""
        data = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "distribution"}
        data["pairing"] = list(self.pairing)
        data["sampling"] = asdict(self.sampling) if self.sampling is not None else None
        return data


def circuit_digest(c: Circuit) -> str:
    """SHA-256 of the canonical circuit text"""
    return "sha256:" + hashlib.sha256(serialize_circuit(c).encode("utf-8")).hexdigest()


def build_target_state(layout: SubsystemLayout, cfg: AdversaryConfig) -> DenseVector:
    """
    The entangled target state

    Amplitude 1/√d_M on every |k⟩_M |p_star⟩_P |pairing(k)⟩_E, zero elsewhere.

    Raises:
        InvalidAdversaryConfigError: If p_star or the pairing does not fit the layout
    """
    resolved = cfg.resolve(layout)
    state = np.zeros(layout.dim, dtype=COMPLEX_DTYPE)
    amplitude = 1.0 / np.sqrt(layout.d_m)
    for k in range(layout.d_m):
        state[layout.index(k, resolved.p_star, resolved.pairing[k])] = amplitude
    return state


def build_adversarial_initial(c: Circuit, cfg: AdversaryConfig) -> DenseVector:
    """
    The initial state that the circuit evolves into the target state

    Raises:
        InvalidAdversaryConfigError: If cfg does not fit the circuit
    """
    resolved = cfg.resolve(c.layout, c.success_set)
    return run_inverse(c, build_target_state(c.layout, resolved))


def case_study_circuit() -> Circuit:
    """H on M, CNOT from M to P, H on M; both P outcomes succeed, f(m, p) = m"""
    gates = [GateSpec("H", (0,)), GateSpec("CNOT", (0, 1)), GateSpec("H", (0,))]
    return Circuit.build(CASE_STUDY_LAYOUT, gates, success_set=(0, 1))


def case_study_initial() -> DenseVector:
    """The entangled case-study state, a fixed point of case_study_circuit()"""
    state = np.zeros(CASE_STUDY_LAYOUT.dim, dtype=COMPLEX_DTYPE)
    state[list(CASE_STUDY_SUPPORT)] = 0.5
    return state


def random_product_state(layout: SubsystemLayout, seed: int) -> DenseVector:
    """Seeded Haar-like |ψ⟩_MP ⊗ |χ⟩_E with no M/E entanglement"""
    rng = make_generator(seed)

    def unit(dim: int) -> np.ndarray:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return v / np.linalg.norm(v)

    return np.kron(unit(layout.d_m * layout.d_p), unit(layout.d_e))


def success_conditioned(c: Circuit, distribution: JointDistribution,
                        impossible_threshold: float = DEFAULT_SETTINGS.impossible_threshold
                        ) -> Tuple[float, np.ndarray]:
    """
    Restrict the joint distribution to successful P outcomes

    Returns:
        tuple: (success probability, conditioned array of shape (d_m, |S|, d_e))

    Raises:
        AdversaryConstructionError: If success has negligible probability
    """
    restricted = distribution.probabilities[:, list(c.success_set), :]
    success_probability = float(restricted.sum())
    if success_probability < impossible_threshold:
        raise AdversaryConstructionError(success_probability, {"success_set": list(c.success_set)})
    return success_probability, restricted / success_probability


def output_environment_table(c: Circuit, conditioned: np.ndarray) -> np.ndarray:
    """Joint table of (f(m, p), e) on success, rows ordered by output value"""
    values = c.output_values()
    row_of = {value: row for row, value in enumerate(values)}
    table = np.zeros((len(values), c.layout.d_e))
    for m in range(c.layout.d_m):
        for j, p in enumerate(c.success_set):
            table[row_of[c.output(m, p)]] += conditioned[m, j, :]
    return table


def _sampling_summary(c: Circuit, final: DenseVector, pairing: Sequence[int],
                      n: int, seed: int) -> SamplingSummary:
    draws = sample(final, c.layout, n, seed)
    success = set(c.success_set)
    pairs = [(t.m, t.e) for t in draws if t.p in success]

    empirical = None
    if pairs:
        empirical = sum(1 for m, e in pairs if e == pairing[m]) / len(pairs)

    statistic = dof = p_value = None
    if pairs:
        try:
            result = chi_square_independence(pairs)
            statistic, dof, p_value = result.statistic, result.degrees_of_freedom, result.p_value
        except DegenerateSampleError as e:
            logger.info(f"Skipping chi-square cross-check: {e.message}")

    return SamplingSummary(n=n, seed=seed, prng=prng_description(), success_count=len(pairs),
                           empirical_agreement=empirical, chi_square_statistic=statistic,
                           chi_square_dof=dof, chi_square_p_value=p_value)


def audit(c: Circuit, cfg: AdversaryConfig = AdversaryConfig(),
          initial_override: Optional[DenseVector] = None,
          samples: Optional[int] = None, seed: Optional[int] = None,
          settings: AuditSettings = DEFAULT_SETTINGS) -> AuditReport:
    """
    Audit a circuit against an environment-entangled initial state

    Without an override the adversarial initial state is built from cfg;
    with one, that state is audited instead. The final state's exact
    distribution is conditioned on success and analysed; sampling is only
    done when ``samples`` is given.

    Raises:
        InvalidStateError: Override not unit norm
        InvalidAdversaryConfigError: p_star or pairing invalid; an explicit
            p_star must lie in the success set even with an override
        AdversaryConstructionError: Success probability below threshold
    """
    checks_success = initial_override is None or cfg.p_star is not None
    resolved = cfg.resolve(c.layout, c.success_set if checks_success else None)
    if initial_override is not None and cfg.p_star is not None:
        logger.warning(f"p_star {cfg.p_star} does not affect an audit with an initial override")

    if initial_override is None:
        initial = build_adversarial_initial(c, resolved)
        initial_label = "adversary"
        p_star: Optional[int] = resolved.p_star
    else:
        initial = np.asarray(initial_override, dtype=COMPLEX_DTYPE)
        if abs(norm(initial) - 1.0) > OVERRIDE_NORM_TOLERANCE:
            raise InvalidStateError("initial override must have unit norm", {"norm": norm(initial)})
        initial_label = "override"
        p_star = None

    final = run(c, initial)
    distribution = measure_all(final, c.layout, settings.probability_floor)
    success_probability, conditioned = success_conditioned(c, distribution, settings.impossible_threshold)

    m_e = BivariateDistribution(conditioned.sum(axis=1))
    f_e = BivariateDistribution(output_environment_table(c, conditioned))

    sampling = None
    if samples is not None:
        sampling = _sampling_summary(c, final, resolved.pairing, samples, 0 if seed is None else seed)

    report = AuditReport(
        success_probability=success_probability,
        agreement_probability=agreement_probability(m_e, resolved.pairing),
        mutual_information_bits=mutual_information(m_e),
        output_mutual_information_bits=mutual_information(f_e),
        output_min_entropy_given_e_bits=min_entropy_given_y(f_e),
        p_star=p_star,
        pairing=resolved.pairing,
        initial_state=initial_label,
        circuit_digest=circuit_digest(c),
        sampling=sampling,
        distribution=distribution,
    )
    logger.info(f"Audit ({initial_label}) on layout {c.layout}: success={report.success_probability!r} "
                f"I(M;E)={report.mutual_information_bits!r}")
    return report


def environment_residual(c: Circuit, initial: DenseVector) -> float:
    """Largest entrywise change of E's reduced state across the circuit"""
    before = reduced_density_matrix(initial, c.layout, "E")
    after = reduced_density_matrix(run(c, initial), c.layout, "E")
    return float(np.max(np.abs(after - before)))


def deferred_measurement_residual(s: DenseVector, layout: SubsystemLayout,
                                  impossible_threshold: float = DEFAULT_SETTINGS.impossible_threshold) -> float:
    """
    Compare measuring P first with measuring everything at once

    For every possible P outcome, the (m, e) distribution of the collapsed
    state must equal the renormalized (m, e) slice of the joint
    distribution. Returns the largest absolute difference.
    """
    joint = measure_all(s, layout).probabilities
    worst = 0.0
    for p in range(layout.d_p):
        slice_mass = float(joint[:, p, :].sum())
        if slice_mass < impossible_threshold:
            continue
        collapsed, _ = conditional_state(s, layout, "P", p, impossible_threshold)
        after = measure_all(collapsed, layout).probabilities[:, p, :]
        worst = max(worst, float(np.max(np.abs(after - joint[:, p, :] / slice_mass))))
    return worst


@dataclass(frozen=True)
class CaseStudyResult:
    """Comparative audits of the case-study circuit and named residual checks"""
    circuit: Circuit
    rows: Dict[str, AuditReport]
    checks: Dict[str, float]


def run_case_study(settings: AuditSettings = DEFAULT_SETTINGS) -> CaseStudyResult:
    """
    Audit the case-study circuit three ways

    Rows: ``honest`` (|000⟩), ``entangled_preset`` (the fixed-point state)
    and ``constructed`` (the pulled-back target with p_star = 0). Checks
    cover the fixed point, the per-P conditional Bell states, deferred
    measurement and environment inertness.
    """
    c = case_study_circuit()
    layout = c.layout
    preset = case_study_initial()
    honest = np.zeros(layout.dim, dtype=COMPLEX_DTYPE)
    honest[0] = 1.0

    rows = {
        "honest": audit(c, initial_override=honest, settings=settings),
        "entangled_preset": audit(c, initial_override=preset, settings=settings),
        "constructed": audit(c, AdversaryConfig(p_star=0), settings=settings),
    }

    evolved = run(c, preset)
    checks: Dict[str, float] = {
        "fixed_point_residual": phase_insensitive_distance(evolved, preset),
    }
    for p in range(layout.d_p):
        collapsed, probability = conditional_state(evolved, layout, "P", p, settings.impossible_threshold)
        bell = build_target_state(layout, AdversaryConfig(p_star=p))
        checks[f"conditional_p{p}_probability"] = probability
        checks[f"conditional_p{p}_bell_fidelity"] = fidelity(collapsed, bell)

    constructed_initial = build_adversarial_initial(c, AdversaryConfig(p_star=0))
    checks["constructed_target_residual"] = phase_insensitive_distance(
        run(c, constructed_initial), build_target_state(layout, AdversaryConfig(p_star=0)))
    checks["deferred_measurement_residual"] = deferred_measurement_residual(evolved, layout)
    checks["environment_inertness_residual"] = max(
        environment_residual(c, state) for state in (honest, preset, constructed_initial))

    return CaseStudyResult(circuit=c, rows=rows, checks=checks)
