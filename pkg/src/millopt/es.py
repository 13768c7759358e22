"""Self-adaptive (mu, eta) evolution strategy over milling decision vectors.

Each individual carries its genome [v_1..v_m, f_1..f_m] together with one
mutation step size per component.  Offspring are built by discrete
recombination of the genome, intermediate recombination of the step
sizes, then log-normal step-size mutation followed by a Gaussian genome
perturbation.  Selection is comma-style: only the eta children compete,
the mu parents are discarded every generation.

All randomness flows through a single numpy Generator; for a fixed seed
the draws of a generation happen in a fixed documented order (parent
indices, recombination masks, step-size mutations, genome perturbations),
so runs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .milling import (
    ContractError,
    DecisionVector,
    EvalContext,
    MillingPlan,
    batch_evaluate,
    compile_context,
    constraint_margins,
    decision_bounds,
    derive_coefficients,
    plan_warnings,
)

__all__ = [
    "Individual",
    "EsConfig",
    "BestRecord",
    "EsState",
    "RunResult",
    "init_population",
    "recombine",
    "mutate",
    "clip_to_box",
    "select",
    "step",
    "run",
]


@dataclass
class Individual:
    """One candidate solution: genome, per-component step sizes, fitness."""

    genome: np.ndarray
    sigmas: np.ndarray
    fitness: float | None = None

    def copy(self) -> "Individual":
        return Individual(self.genome.copy(), self.sigmas.copy(), self.fitness)


@dataclass(frozen=True)
class EsConfig:
    """Strategy settings.

    tau_global scales one shared log-normal draw per individual and
    tau_local one independent draw per component; both default to the
    standard schedule 1/sqrt(2*l) and 1/sqrt(2*sqrt(l)) for genome length
    l when left as None.  sigma_floor keeps step sizes from collapsing to
    zero.  The run stops after stall_limit generations without strict
    improvement, or at max_generations as a hard cap.
    """

    mu: int = 15
    eta: int = 105
    sigma_init: float = 3.0
    alpha: float = 0.5
    tau_global: float | None = None
    tau_local: float | None = None
    stall_limit: int = 1000
    max_generations: int = 100_000
    seed: int = 0
    sigma_floor: float = 1e-8

    def __post_init__(self) -> None:
        if not (isinstance(self.mu, int) and self.mu >= 1):
            raise ValueError("mu must be an integer >= 1")
        if not (isinstance(self.eta, int) and self.eta > self.mu):
            raise ValueError("eta must be an integer > mu")
        if not (math.isfinite(self.sigma_init) and self.sigma_init > 0.0):
            raise ValueError("sigma_init must be > 0")
        if not (math.isfinite(self.alpha) and 0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be strictly between 0 and 1")
        for name in ("tau_global", "tau_local"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be > 0 when given")
        if not (isinstance(self.stall_limit, int) and self.stall_limit >= 1):
            raise ValueError("stall_limit must be an integer >= 1")
        if not (isinstance(self.max_generations, int) and self.max_generations >= 1):
            raise ValueError("max_generations must be an integer >= 1")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ValueError("seed must be an integer in [0, 2**64)")
        if not (math.isfinite(self.sigma_floor) and self.sigma_floor > 0.0):
            raise ValueError("sigma_floor must be > 0")

    def resolved_taus(self, genome_length: int) -> tuple[float, float]:
        """(tau_global, tau_local) with defaults filled in for length l."""
        if genome_length < 1:
            raise ValueError("genome_length must be >= 1")
        tau_g = self.tau_global if self.tau_global is not None else 1.0 / math.sqrt(2.0 * genome_length)
        tau_l = (
            self.tau_local
            if self.tau_local is not None
            else 1.0 / math.sqrt(2.0 * math.sqrt(genome_length))
        )
        return tau_g, tau_l


@dataclass
class BestRecord:
    """Best strictly positive fitness ever observed, kept outside the
    population so comma selection cannot lose it.

    fitness starts at 0.0, the death-penalty value, so only genuinely
    profitable feasible individuals are ever recorded.
    """

    individual: Individual | None = None
    fitness: float = 0.0
    generation_found: int = 0
    stall_counter: int = 0


@dataclass
class EsState:
    """Parent population plus bookkeeping between generations."""

    genomes: np.ndarray
    sigmas: np.ndarray
    record: BestRecord
    generation: int
    evaluations: int
    rng: np.random.Generator


@dataclass(frozen=True)
class RunResult:
    """Outcome of one optimization run.

    When no feasible solution was ever found, feasible is False and the
    solution fields are None.
    """

    feasible: bool
    best: DecisionVector | None
    sigmas_final: tuple[float, ...] | None
    unit_cost: float | None
    unit_time: float | None
    profit_rate: float | None
    generations: int
    evaluations: int
    seed: int
    warnings: tuple[str, ...]


def clip_to_box(genome: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Project a genome onto the box; in-box points pass through unchanged."""
    genome = np.asarray(genome, dtype=float)
    if genome.shape[-1] != lower.shape[0] or lower.shape != upper.shape:
        raise ContractError(
            f"genome length {genome.shape[-1]} does not match bounds length {lower.shape[0]}"
        )
    return np.clip(genome, lower, upper)


def init_population(
    plan: MillingPlan, config: EsConfig, rng: np.random.Generator
) -> list[Individual]:
    """mu individuals, genomes uniform inside the box, all step sizes
    equal to sigma_init, fitness not yet evaluated."""
    lower, upper = decision_bounds(plan)
    genomes = rng.uniform(lower, upper, size=(config.mu, lower.size))
    sigmas = np.full((config.mu, lower.size), config.sigma_init, dtype=float)
    return [Individual(genomes[i], sigmas[i]) for i in range(config.mu)]


def _recombine_batch(
    genomes_a: np.ndarray,
    genomes_b: np.ndarray,
    sigmas_a: np.ndarray,
    sigmas_b: np.ndarray,
    alpha: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    # Discrete on the genome: each component from either parent with equal
    # probability.  Intermediate on the step sizes.
    take_a = rng.integers(0, 2, size=genomes_a.shape).astype(bool)
    genomes = np.where(take_a, genomes_a, genomes_b)
    sigmas = alpha * sigmas_a + (1.0 - alpha) * sigmas_b
    return genomes, sigmas


def recombine(
    parent_a: Individual, parent_b: Individual, config: EsConfig, rng: np.random.Generator
) -> Individual:
    """Breed one unevaluated child from two parents."""
    if parent_a.genome.shape != parent_b.genome.shape:
        raise ContractError("parents have different genome lengths")
    genomes, sigmas = _recombine_batch(
        parent_a.genome[None, :],
        parent_b.genome[None, :],
        parent_a.sigmas[None, :],
        parent_b.sigmas[None, :],
        config.alpha,
        rng,
    )
    return Individual(genomes[0], sigmas[0])


def _mutate_batch(
    genomes: np.ndarray,
    sigmas: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    config: EsConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    n, length = genomes.shape
    tau_g, tau_l = config.resolved_taus(length)
    # One shared global draw per individual, one local draw per component.
    global_draw = rng.standard_normal((n, 1))
    local_draws = rng.standard_normal((n, length))
    new_sigmas = sigmas * np.exp(tau_g * global_draw + tau_l * local_draws)
    new_sigmas = np.maximum(new_sigmas, config.sigma_floor)
    steps = rng.standard_normal((n, length))
    new_genomes = np.clip(genomes + new_sigmas * steps, lower, upper)
    return new_genomes, new_sigmas


def mutate(
    ind: Individual,
    lower: np.ndarray,
    upper: np.ndarray,
    config: EsConfig,
    rng: np.random.Generator,
) -> Individual:
    """Self-adapt the step sizes, perturb the genome, clip to the box."""
    if ind.genome.shape[0] != lower.shape[0]:
        raise ContractError(
            f"genome length {ind.genome.shape[0]} does not match bounds length {lower.shape[0]}"
        )
    genomes, sigmas = _mutate_batch(
        ind.genome[None, :], ind.sigmas[None, :], lower, upper, config, rng
    )
    return Individual(genomes[0], sigmas[0])


def _select_indices(fitnesses: np.ndarray, mu: int) -> np.ndarray:
    # Stable sort on negated fitness: ties keep their generation order.
    return np.argsort(-fitnesses, kind="stable")[:mu]


def select(children: list[Individual], config: EsConfig) -> list[Individual]:
    """Keep the mu best of the children by fitness; parents never survive."""
    if len(children) < config.mu:
        raise ContractError(f"need at least mu={config.mu} children, got {len(children)}")
    for child in children:
        if child.fitness is None:
            raise ContractError("cannot select among unevaluated children")
    fitnesses = np.array([child.fitness for child in children], dtype=float)
    return [children[i] for i in _select_indices(fitnesses, config.mu)]


def step(state: EsState, ctx: EvalContext, config: EsConfig) -> EsState:
    """Advance one generation: breed eta children, evaluate, select mu.

    Draw order within the generation: parent indices, recombination
    masks, step-size mutation draws, genome perturbation draws.
    """
    rng = state.rng
    mu, eta = config.mu, config.eta
    # Two distinct parents per child, uniform over the population.
    first = rng.integers(0, mu, size=eta)
    second = rng.integers(0, mu - 1, size=eta) if mu > 1 else np.zeros(eta, dtype=int)
    if mu > 1:
        second = second + (second >= first)
    genomes, sigmas = _recombine_batch(
        state.genomes[first],
        state.genomes[second],
        state.sigmas[first],
        state.sigmas[second],
        config.alpha,
        rng,
    )
    genomes, sigmas = _mutate_batch(genomes, sigmas, ctx.lower, ctx.upper, config, rng)

    fitnesses = batch_evaluate(ctx, genomes).fitness
    order = _select_indices(fitnesses, mu)

    best_idx = int(order[0])
    record = state.record
    if fitnesses[best_idx] > record.fitness:
        record = BestRecord(
            individual=Individual(
                genomes[best_idx].copy(), sigmas[best_idx].copy(), float(fitnesses[best_idx])
            ),
            fitness=float(fitnesses[best_idx]),
            generation_found=state.generation + 1,
            stall_counter=0,
        )
    else:
        record = BestRecord(
            individual=record.individual,
            fitness=record.fitness,
            generation_found=record.generation_found,
            stall_counter=record.stall_counter + 1,
        )

    return EsState(
        genomes=genomes[order],
        sigmas=sigmas[order],
        record=record,
        generation=state.generation + 1,
        evaluations=state.evaluations + eta,
        rng=rng,
    )


def run(
    plan: MillingPlan,
    config: EsConfig | None = None,
    observer: Callable[[EsState], None] | None = None,
) -> RunResult:
    """Optimize a plan; deterministic for a fixed (plan, config, seed)."""
    config = config or EsConfig()
    coeffs = derive_coefficients(plan)
    ctx = compile_context(plan, coeffs)
    rng = np.random.default_rng(config.seed)

    parents = init_population(plan, config, rng)
    state = EsState(
        genomes=np.stack([ind.genome for ind in parents]),
        sigmas=np.stack([ind.sigmas for ind in parents]),
        record=BestRecord(),
        generation=0,
        evaluations=0,
        rng=rng,
    )

    while state.record.stall_counter < config.stall_limit and state.generation < config.max_generations:
        state = step(state, ctx, config)
        if observer is not None:
            observer(state)

    warnings = plan_warnings(plan)
    record = state.record
    if record.individual is None:
        return RunResult(
            feasible=False,
            best=None,
            sigmas_final=None,
            unit_cost=None,
            unit_time=None,
            profit_rate=None,
            generations=state.generation,
            evaluations=state.evaluations,
            seed=config.seed,
            warnings=warnings,
        )

    best = DecisionVector.from_genome(record.individual.genome)
    margins = constraint_margins(plan, best, coeffs)
    evaluation = batch_evaluate(ctx, record.individual.genome[None, :])
    cost = float(evaluation.unit_cost[0])
    time = float(evaluation.unit_time[0])
    return RunResult(
        feasible=all(m.satisfied for m in margins),
        best=best,
        sigmas_final=tuple(float(s) for s in record.individual.sigmas),
        unit_cost=cost,
        unit_time=time,
        profit_rate=(ctx.sale_price - cost) / time,
        generations=state.generation,
        evaluations=state.evaluations,
        seed=config.seed,
        warnings=warnings,
    )
