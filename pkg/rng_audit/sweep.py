"""
Seeded sweeps over random circuits

For each random circuit, audit the constructed adversary and an honest
product initial state, and check the results against the expected
values: certain success, perfect agreement, I(M;E) = m bits for the
adversary, and no dependence plus an untouched environment for the
honest state.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

from rng_audit.adversary import audit, environment_residual, random_product_state
from rng_audit.circuit import random_circuit
from rng_audit.log import get_logger
from rng_audit.models import AdversaryConfig, SubsystemLayout
from rng_audit.prng import derive_seed, make_generator
from rng_audit.settings import DEFAULT_SETTINGS, AuditSettings


logger = get_logger(__name__)

ADVERSARY_TOLERANCE = 1e-9
HONEST_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SweepRow:
    """Results for one random circuit"""
    index: int
    seed: int
    layout: str
    n_gates: int
    success_probability: float
    agreement_probability: float
    mutual_information_bits: float
    honest_mutual_information_bits: float
    environment_residual: float
    passed: bool


@dataclass(frozen=True)
class SweepResult:
    rows: List[SweepRow]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def summary(self) -> Dict[str, Any]:
        failures = [row.index for row in self.rows if not row.passed]
        return {
            "count": len(self.rows),
            "passed": len(self.rows) - len(failures),
            "failed_indices": failures,
            "max_adversary_deviation": max(
                (max(abs(1 - r.success_probability), abs(1 - r.agreement_probability),
                     abs(int(r.layout.split("/")[0]) - r.mutual_information_bits)) for r in self.rows),
                default=0.0),
            "max_honest_mutual_information_bits": max(
                (r.honest_mutual_information_bits for r in self.rows), default=0.0),
            "max_environment_residual": max((r.environment_residual for r in self.rows), default=0.0),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {"summary": self.summary(), "rows": [asdict(row) for row in self.rows]}


def _sweep_one(index: int, seed: int, max_register: int, max_gates: int,
               pairing_seed: Optional[int], settings: AuditSettings) -> SweepRow:
    rng = make_generator(seed)
    m = int(rng.integers(1, max_register + 1))
    p = int(rng.integers(1, max_register + 1))
    n_gates = int(rng.integers(1, max_gates + 1))
    layout = SubsystemLayout.symmetric(m, p)

    circuit = random_circuit(layout, n_gates, derive_seed(seed, "circuit"))

    pairing = None
    if pairing_seed is not None:
        pairing = tuple(int(k) for k in make_generator(derive_seed(pairing_seed, index)).permutation(layout.d_m))
    cfg = AdversaryConfig(pairing=pairing)

    adversary = audit(circuit, cfg, settings=settings)
    honest_initial = random_product_state(layout, derive_seed(seed, "honest"))
    honest = audit(circuit, cfg, initial_override=honest_initial, settings=settings)
    residual = environment_residual(circuit, honest_initial)

    passed = (abs(adversary.success_probability - 1.0) <= ADVERSARY_TOLERANCE
              and abs(adversary.agreement_probability - 1.0) <= ADVERSARY_TOLERANCE
              and abs(adversary.mutual_information_bits - m) <= ADVERSARY_TOLERANCE
              and honest.mutual_information_bits <= HONEST_TOLERANCE
              and residual <= HONEST_TOLERANCE)
    if not passed:
        logger.warning(f"Sweep circuit {index} (seed {seed}, layout {layout}) failed its checks")

    return SweepRow(index=index, seed=seed, layout=str(layout), n_gates=n_gates,
                    success_probability=adversary.success_probability,
                    agreement_probability=adversary.agreement_probability,
                    mutual_information_bits=adversary.mutual_information_bits,
                    honest_mutual_information_bits=honest.mutual_information_bits,
                    environment_residual=residual, passed=passed)


def run_sweep(count: int, seed: int, max_register: int = 4, max_gates: int = 50,
              random_pairing: bool = False, jobs: int = 1,
              settings: AuditSettings = DEFAULT_SETTINGS) -> SweepResult:
    """
    Audit ``count`` seeded random circuits

    Circuit i uses the child seed derive_seed(seed, "sweep", i), so rows
    do not depend on ``jobs`` or on execution order.

    Args:
        count: Number of circuits
        seed: Sweep seed
        max_register: Largest m (= e) and p qubit count
        max_gates: Largest gate count (at least 1 gate per circuit)
        random_pairing: Draw a random M↔E pairing per circuit instead of the identity
        jobs: Worker threads
    """
    if count < 1 or max_register < 1 or max_gates < 1:
        raise ValueError("count, max_register and max_gates must be positive")
    seeds: Sequence[int] = [derive_seed(seed, "sweep", i) for i in range(count)]
    pairing_seed = derive_seed(seed, "pairing") if random_pairing else None

    def job(i: int) -> SweepRow:
        return _sweep_one(i, seeds[i], max_register, max_gates, pairing_seed, settings)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(job, range(count)))
    else:
        rows = [job(i) for i in range(count)]

    logger.info(f"Sweep finished: {sum(r.passed for r in rows)}/{count} circuit(s) passed")
    return SweepResult(rows)
