"""Genetic-algorithm search over movable-element placements.

Individuals encode (x_left, y_top, width, height) genes for each movable
element; fixed person/object boxes come from the problem. Selection is by
tournament, crossover swaps whole element quadruples, mutation adds
clamped Gaussian noise. Energy is minimized (fitness is its negation).
A grid brute-force oracle provides exact optima for small instances.
"""

from __future__ import annotations

import io
import csv
import random
from dataclasses import dataclass, field

from .annotations import BBox
from .energy import (
    ElementBox, EnergyWeights, Layout, SizeBounds, feasible, total_energy,
)

BRUTE_FORCE_MAX_ELEMENTS = 2
BRUTE_FORCE_MAX_STEPS = 24


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 150
    crossover_prob: float = 0.7
    mutation_prob: float = 0.2
    per_gene_mutation_prob: float = 0.25
    tournament_size: int = 3
    elitism: int = 2
    mutation_sigma: float = 0.05  # fraction of the matching canvas dimension
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be in [0, population_size)")
        for name in ("crossover_prob", "mutation_prob", "per_gene_mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass(frozen=True)
class MovableSpec:
    """A movable element to place: its kind and initial dimensions."""

    kind: str
    width: float
    height: float


@dataclass(frozen=True)
class LayoutProblem:
    """Everything the optimizer needs: canvas, fixed content, movables, scoring."""

    canvas_width: float
    canvas_height: float
    fixed_elements: tuple[ElementBox, ...]
    movable_specs: tuple[MovableSpec, ...]
    bounds: SizeBounds
    weights: EnergyWeights = field(default_factory=EnergyWeights)

    def __post_init__(self):
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise ValueError("canvas dimensions must be positive")
        if not self.movable_specs:
            raise ValueError("at least one movable element is required")
        if any(e.movable for e in self.fixed_elements):
            raise ValueError("fixed_elements must not contain movable kinds")
        for spec in self.movable_specs:
            rng = self.bounds.for_kind(spec.kind)
            if rng is None:
                raise ValueError(f"no size bounds configured for movable kind {spec.kind!r}")
            if rng.min_width > self.canvas_width or rng.min_height > self.canvas_height:
                raise ValueError(
                    f"size bounds for {spec.kind!r} admit no on-canvas placement"
                )

    def size_range(self, spec: MovableSpec):
        rng = self.bounds.for_kind(spec.kind)
        assert rng is not None  # guaranteed by __post_init__
        return rng


@dataclass
class Individual:
    """Flat gene vector (4 genes per movable element) plus cached energy."""

    genes: tuple[float, ...]
    energy: float | None = None

    @property
    def fitness(self) -> float | None:
        """Negated energy: the GA maximizes fitness by minimizing energy."""
        return None if self.energy is None else -self.energy

    def copy(self) -> "Individual":
        return Individual(genes=self.genes, energy=self.energy)


@dataclass(frozen=True)
class GARun:
    """Result of one evolution: the winner, convergence history, bookkeeping."""

    best_layout: Layout
    best_energy: float
    history: tuple[tuple[float, float], ...]  # (best, mean) per generation
    evaluations: int
    top_layouts: tuple[tuple[Layout, float], ...] = ()

    def history_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["generation", "best_energy", "mean_energy"])
        for gen, (best, mean) in enumerate(self.history):
            writer.writerow([gen, repr(best), repr(mean)])
        return buf.getvalue()


def decode(prob: LayoutProblem, ind: Individual) -> Layout:
    """Genes -> Layout: fixed elements first, then movables in spec order."""
    elements = list(prob.fixed_elements)
    for i, spec in enumerate(prob.movable_specs):
        x, y, w, h = ind.genes[4 * i: 4 * i + 4]
        elements.append(ElementBox(kind=spec.kind, box=BBox(x, y, x + w, y + h)))
    return Layout(prob.canvas_width, prob.canvas_height, tuple(elements))


def _evaluate(prob: LayoutProblem, ind: Individual) -> int:
    """Fill the energy cache if empty; returns the number of evaluations done."""
    if ind.energy is not None:
        return 0
    ind.energy = total_energy(decode(prob, ind), prob.weights, prob.bounds).total
    return 1


def _sample_individual(prob: LayoutProblem, rng: random.Random) -> Individual:
    genes: list[float] = []
    for spec in prob.movable_specs:
        srange = prob.size_range(spec)
        w = rng.uniform(srange.min_width, min(srange.max_width, prob.canvas_width))
        h = rng.uniform(srange.min_height, min(srange.max_height, prob.canvas_height))
        x = rng.uniform(0.0, prob.canvas_width - w)
        y = rng.uniform(0.0, prob.canvas_height - h)
        genes.extend((x, y, w, h))
    return Individual(genes=tuple(genes))


def init_population(cfg: GAConfig, prob: LayoutProblem, rng: random.Random) -> list[Individual]:
    """Uniform random feasible individuals: sizes within bounds, fully on-canvas."""
    return [_sample_individual(prob, rng) for _ in range(cfg.population_size)]


def select(population: list[Individual], k: int, cfg: GAConfig, rng: random.Random) -> list[Individual]:
    """Tournament selection: k picks, each the lowest-energy of tournament_size draws.

    Draws within one tournament are without replacement (capped at the
    population size), so a tournament spanning the whole population always
    yields the global best and tournament_size 1 is uniform sampling.
    """
    if not population:
        raise ValueError("cannot select from an empty population")
    t_size = min(cfg.tournament_size, len(population))
    parents = []
    for _ in range(k):
        contenders = rng.sample(population, t_size)
        parents.append(min(contenders, key=lambda ind: ind.energy))
    return parents


def crossover(a: Individual, b: Individual, rng: random.Random) -> tuple[Individual, Individual]:
    """Swap whole element quadruples between two parents, each with probability 1/2."""
    if len(a.genes) != len(b.genes):
        raise ValueError("parents have mismatched gene layouts")
    genes1, genes2 = list(a.genes), list(b.genes)
    changed = False
    for e in range(len(genes1) // 4):
        if rng.random() < 0.5:
            sl = slice(4 * e, 4 * e + 4)
            genes1[sl], genes2[sl] = genes2[sl], genes1[sl]
            changed = True
    if not changed:
        return a.copy(), b.copy()
    return Individual(genes=tuple(genes1)), Individual(genes=tuple(genes2))


def mutate(ind: Individual, prob: LayoutProblem, cfg: GAConfig, rng: random.Random) -> Individual:
    """Gaussian-perturb genes independently, then clamp touched elements feasible.

    Noise sigma is mutation_sigma times the canvas width for x/width genes
    and times the canvas height for y/height genes. Only elements with at
    least one perturbed gene are re-clamped, so an untouched individual
    passes through bit-identical.
    """
    genes = list(ind.genes)
    any_touched = False
    for e, spec in enumerate(prob.movable_specs):
        base = 4 * e
        touched = False
        for c in range(4):
            if rng.random() < cfg.per_gene_mutation_prob:
                dim = prob.canvas_width if c in (0, 2) else prob.canvas_height
                genes[base + c] += rng.gauss(0.0, cfg.mutation_sigma * dim)
                touched = True
        if touched:
            srange = prob.size_range(spec)
            w = min(max(genes[base + 2], srange.min_width), min(srange.max_width, prob.canvas_width))
            h = min(max(genes[base + 3], srange.min_height), min(srange.max_height, prob.canvas_height))
            x = min(max(genes[base], 0.0), prob.canvas_width - w)
            y = min(max(genes[base + 1], 0.0), prob.canvas_height - h)
            genes[base: base + 4] = (x, y, w, h)
            any_touched = True
    if not any_touched:
        return ind.copy()
    return Individual(genes=tuple(genes))


def evolve(prob: LayoutProblem, cfg: GAConfig, top_k: int = 1) -> GARun:
    """Run the full generational loop; deterministic in (problem, config, seed).

    Each generation: copy the elites unchanged, tournament-select parents,
    cross pairs with crossover_prob, mutate children with mutation_prob,
    and re-sample any child that ended up infeasible. The best `top_k`
    distinct layouts ever evaluated are retained for downstream ranking.
    """
    rng = random.Random(cfg.rng_seed)
    population = init_population(cfg, prob, rng)
    evaluations = sum(_evaluate(prob, ind) for ind in population)

    archive: dict[tuple[float, ...], tuple[float, tuple[float, ...]]] = {}

    def record(pop: list[Individual]) -> tuple[float, float]:
        for ind in pop:
            key = tuple(round(g, 3) for g in ind.genes)
            kept = archive.get(key)
            if kept is None or ind.energy < kept[0]:
                archive[key] = (ind.energy, ind.genes)
        energies = [ind.energy for ind in pop]
        return min(energies), sum(energies) / len(energies)

    history = [record(population)]
    best_energy, best_genes = history[0][0], min(population, key=lambda i: i.energy).genes

    for _ in range(cfg.generations):
        ranked = sorted(population, key=lambda ind: ind.energy)
        elites = [ind.copy() for ind in ranked[: cfg.elitism]]
        n_children = cfg.population_size - cfg.elitism
        parents = select(population, n_children, cfg, rng)

        children: list[Individual] = []
        for i in range(0, n_children - 1, 2):
            a, b = parents[i], parents[i + 1]
            if rng.random() < cfg.crossover_prob:
                c1, c2 = crossover(a, b, rng)
            else:
                c1, c2 = a.copy(), b.copy()
            children.extend((c1, c2))
        if len(children) < n_children:
            children.append(parents[-1].copy())

        for i, child in enumerate(children):
            if rng.random() < cfg.mutation_prob:
                children[i] = mutate(child, prob, cfg, rng)

        # Clamping keeps mutants feasible, but guard against any escape by
        # re-sampling, mirroring initialization.
        for i, child in enumerate(children):
            if not feasible(decode(prob, child), prob.bounds):
                children[i] = _sample_individual(prob, rng)

        population = elites + children
        evaluations += sum(_evaluate(prob, ind) for ind in population)
        gen_best, gen_mean = record(population)
        history.append((gen_best, gen_mean))
        if gen_best < best_energy:
            best_energy = gen_best
            best_genes = min(population, key=lambda i: i.energy).genes

    ranked_archive = sorted(archive.items(), key=lambda kv: (kv[1][0], kv[0]))
    top_layouts = tuple(
        (decode(prob, Individual(genes=genes)), energy)
        for _, (energy, genes) in ranked_archive[: max(1, top_k)]
    )

    return GARun(
        best_layout=decode(prob, Individual(genes=best_genes)),
        best_energy=best_energy,
        history=tuple(history),
        evaluations=evaluations,
        top_layouts=top_layouts,
    )


def _lattice(extent: float, steps: int) -> list[float]:
    if steps == 1:
        return [0.0]
    return [extent * i / (steps - 1) for i in range(steps)]


def brute_force_layout(prob: LayoutProblem, grid_steps: int) -> tuple[Layout, float]:
    """Exact minimum over a grid_steps x grid_steps lattice of top-left positions.

    Element sizes are fixed to their spec initial dimensions. Tractability
    guard: at most two movable elements and 24 lattice steps. Ties resolve
    to the first assignment in scan order (element 0 outermost, each
    element scanning rows then columns).
    """
    if len(prob.movable_specs) > BRUTE_FORCE_MAX_ELEMENTS:
        raise ValueError(f"brute force supports at most {BRUTE_FORCE_MAX_ELEMENTS} movable elements")
    if grid_steps < 1 or grid_steps > BRUTE_FORCE_MAX_STEPS:
        raise ValueError(f"grid_steps must be in [1, {BRUTE_FORCE_MAX_STEPS}]")

    placements: list[list[tuple[float, float]]] = []
    for spec in prob.movable_specs:
        if spec.width > prob.canvas_width or spec.height > prob.canvas_height:
            raise ValueError(f"element {spec.kind!r} does not fit the canvas")
        xs = _lattice(prob.canvas_width - spec.width, grid_steps)
        ys = _lattice(prob.canvas_height - spec.height, grid_steps)
        placements.append([(x, y) for y in ys for x in xs])

    best: tuple[Layout, float] | None = None

    def assignments(idx: int, genes: list[float]):
        nonlocal best
        if idx == len(prob.movable_specs):
            ind = Individual(genes=tuple(genes))
            layout = decode(prob, ind)
            if not feasible(layout, prob.bounds):
                return
            energy = total_energy(layout, prob.weights, prob.bounds).total
            if best is None or energy < best[1]:
                best = (layout, energy)
            return
        spec = prob.movable_specs[idx]
        for x, y in placements[idx]:
            assignments(idx + 1, genes + [x, y, spec.width, spec.height])

    assignments(0, [])
    if best is None:
        raise ValueError("no feasible lattice placement exists")
    return best


__all__ = [
    "GAConfig", "MovableSpec", "LayoutProblem", "Individual", "GARun",
    "decode", "init_population", "select", "crossover", "mutate", "evolve",
    "brute_force_layout", "BRUTE_FORCE_MAX_ELEMENTS", "BRUTE_FORCE_MAX_STEPS",
]
