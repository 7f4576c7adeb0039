import random

import pytest

from bannerforge.annotations import BBox
from bannerforge.energy import ElementBox, EnergyWeights, SizeBounds, SizeRange, feasible, total_energy
from bannerforge.ga import (
    GAConfig, Individual, LayoutProblem, MovableSpec, brute_force_layout,
    crossover, decode, evolve, init_population, mutate, select,
)


def fixed_size_bounds(logo=(50, 25), text=(70, 30)) -> SizeBounds:
    return SizeBounds(ranges={
        "logo": SizeRange(logo[0], logo[0], logo[1], logo[1]),
        "text": SizeRange(text[0], text[0], text[1], text[1]),
    })


def reference_problem(weights=None) -> LayoutProblem:
    """Two movables on a 200x150 canvas crowded by a fixed person."""
    return LayoutProblem(
        canvas_width=200.0, canvas_height=150.0,
        fixed_elements=(
            ElementBox("person", BBox(20, 30, 90, 140), face_box=BBox(40, 35, 70, 65)),
        ),
        movable_specs=(MovableSpec("logo", 50, 25), MovableSpec("text", 70, 30)),
        bounds=fixed_size_bounds(),
        weights=weights or EnergyWeights(),
    )


def ranged_problem() -> LayoutProblem:
    bounds = SizeBounds(ranges={
        "logo": SizeRange(40, 80, 20, 40),
        "text": SizeRange(50, 120, 20, 50),
    })
    return LayoutProblem(
        canvas_width=200.0, canvas_height=150.0,
        fixed_elements=(ElementBox("object", BBox(60, 40, 140, 110)),),
        movable_specs=(MovableSpec("logo", 60, 30), MovableSpec("text", 80, 35)),
        bounds=bounds,
        weights=EnergyWeights(),
    )


def evaluate_all(prob, population):
    for ind in population:
        if ind.energy is None:
            ind.energy = total_energy(decode(prob, ind), prob.weights, prob.bounds).total


class TestInitPopulation:
    def test_seeded_determinism(self):
        prob = ranged_problem()
        cfg = GAConfig(population_size=10, rng_seed=42)
        pop1 = init_population(cfg, prob, random.Random(42))
        pop2 = init_population(cfg, prob, random.Random(42))
        assert [i.genes for i in pop1] == [i.genes for i in pop2]

    def test_fixed_bounds_force_one_size(self):
        prob = reference_problem()
        pop = init_population(GAConfig(population_size=8), prob, random.Random(0))
        for ind in pop:
            assert ind.genes[2:4] == (50.0, 25.0)
            assert ind.genes[6:8] == (70.0, 30.0)

    def test_population_size_and_feasibility(self):
        prob = ranged_problem()
        pop = init_population(GAConfig(population_size=10), prob, random.Random(1))
        assert len(pop) == 10
        for ind in pop:
            assert feasible(decode(prob, ind), prob.bounds)

    def test_impossible_bounds_raise(self):
        with pytest.raises(ValueError, match="no on-canvas placement"):
            LayoutProblem(
                canvas_width=100.0, canvas_height=100.0,
                fixed_elements=(),
                movable_specs=(MovableSpec("logo", 150, 30),),
                bounds=SizeBounds(ranges={"logo": SizeRange(150, 200, 20, 40)}),
            )


class TestSelect:
    def test_full_tournament_always_returns_best(self):
        prob = ranged_problem()
        cfg = GAConfig(population_size=6, tournament_size=6, elitism=1)
        pop = init_population(cfg, prob, random.Random(3))
        evaluate_all(prob, pop)
        best = min(pop, key=lambda i: i.energy)
        picks = select(pop, 10, cfg, random.Random(5))
        assert all(p.energy == best.energy for p in picks)

    def test_two_individuals_size_two(self):
        a = Individual(genes=(0.0,) * 8, energy=1.0)
        b = Individual(genes=(1.0,) * 8, energy=9.0)
        cfg = GAConfig(population_size=2, tournament_size=2, elitism=0)
        picks = select([a, b], 20, cfg, random.Random(0))
        assert all(p.energy == 1.0 for p in picks)

    def test_size_one_is_uniform_sampling(self):
        pop = [Individual(genes=(float(i),) * 8, energy=float(i)) for i in range(4)]
        cfg = GAConfig(population_size=4, tournament_size=1, elitism=0)
        picks = select(pop, 400, cfg, random.Random(7))
        seen = {p.genes[0] for p in picks}
        assert seen == {0.0, 1.0, 2.0, 3.0}


class TestCrossover:
    def test_identical_parents(self):
        a = Individual(genes=(1, 2, 3, 4, 5, 6, 7, 8))
        c1, c2 = crossover(a, a.copy(), random.Random(0))
        assert c1.genes == a.genes and c2.genes == a.genes

    def test_quadruple_multiset_conserved(self):
        rng = random.Random(9)
        a = Individual(genes=tuple(float(i) for i in range(8)))
        b = Individual(genes=tuple(float(i + 100) for i in range(8)))
        for _ in range(30):
            c1, c2 = crossover(a, b, rng)
            for e in range(2):
                sl = slice(4 * e, 4 * e + 4)
                parents = {a.genes[sl], b.genes[sl]}
                children = {c1.genes[sl], c2.genes[sl]}
                assert children == parents

    def test_single_element_copy_or_swap(self):
        a = Individual(genes=(1.0, 2.0, 3.0, 4.0))
        b = Individual(genes=(9.0, 8.0, 7.0, 6.0))
        rng = random.Random(2)
        for _ in range(20):
            c1, c2 = crossover(a, b, rng)
            assert (c1.genes, c2.genes) in {(a.genes, b.genes), (b.genes, a.genes)}

    def test_parents_unmodified(self):
        a = Individual(genes=(1.0, 2.0, 3.0, 4.0), energy=0.5)
        b = Individual(genes=(9.0, 8.0, 7.0, 6.0), energy=0.7)
        crossover(a, b, random.Random(4))
        assert a.genes == (1.0, 2.0, 3.0, 4.0) and a.energy == 0.5
        assert b.genes == (9.0, 8.0, 7.0, 6.0) and b.energy == 0.7


class TestMutate:
    def test_zero_probability_is_identity(self):
        prob = ranged_problem()
        cfg = GAConfig(per_gene_mutation_prob=0.0)
        ind = init_population(GAConfig(population_size=2, elitism=0), prob, random.Random(0))[0]
        out = mutate(ind, prob, cfg, random.Random(1))
        assert out.genes == ind.genes

    def test_output_always_feasible(self):
        prob = ranged_problem()
        cfg = GAConfig(per_gene_mutation_prob=1.0, mutation_sigma=0.5)
        rng = random.Random(6)
        ind = init_population(GAConfig(population_size=2, elitism=0), prob, rng)[0]
        for _ in range(100):
            ind = mutate(ind, prob, cfg, rng)
            assert feasible(decode(prob, ind), prob.bounds)

    def test_seeded_reproducibility(self):
        prob = ranged_problem()
        cfg = GAConfig(per_gene_mutation_prob=0.5)
        ind = init_population(GAConfig(population_size=2, elitism=0), prob, random.Random(0))[0]
        out1 = mutate(ind, prob, cfg, random.Random(33))
        out2 = mutate(ind, prob, cfg, random.Random(33))
        assert out1.genes == out2.genes

    def test_cache_invalidated_when_touched(self):
        prob = ranged_problem()
        cfg = GAConfig(per_gene_mutation_prob=1.0)
        ind = init_population(GAConfig(population_size=2, elitism=0), prob, random.Random(0))[0]
        ind.energy = 0.123
        out = mutate(ind, prob, cfg, random.Random(1))
        assert out.energy is None


class TestEvolve:
    def test_history_non_increasing_and_shape(self):
        prob = reference_problem()
        cfg = GAConfig(population_size=30, generations=25, rng_seed=5)
        run = evolve(prob, cfg)
        assert len(run.history) == cfg.generations + 1
        bests = [b for b, _ in run.history]
        assert all(b2 <= b1 + 1e-12 for b1, b2 in zip(bests, bests[1:]))
        assert run.best_energy == pytest.approx(min(bests), abs=0)

    def test_same_seed_bit_identical(self):
        prob = reference_problem()
        cfg = GAConfig(population_size=24, generations=15, rng_seed=77)
        run1 = evolve(prob, cfg, top_k=3)
        run2 = evolve(prob, cfg, top_k=3)
        assert run1 == run2

    def test_best_layout_is_feasible_and_scored(self):
        prob = reference_problem()
        run = evolve(prob, GAConfig(population_size=30, generations=20, rng_seed=1))
        assert feasible(run.best_layout, prob.bounds)
        recomputed = total_energy(run.best_layout, prob.weights, prob.bounds).total
        assert recomputed == pytest.approx(run.best_energy, abs=1e-12)

    def test_matches_grid_oracle_within_two_percent(self):
        prob = reference_problem()
        _, grid_opt = brute_force_layout(prob, grid_steps=16)
        run = evolve(prob, GAConfig(rng_seed=3))
        assert run.best_energy <= grid_opt * 1.02 + 1e-9

    def test_beats_random_baseline(self):
        prob = reference_problem()
        rng = random.Random(123)
        random_best = min(
            total_energy(decode(prob, ind), prob.weights, prob.bounds).total
            for ind in init_population(GAConfig(population_size=1000), prob, rng)
        )
        run = evolve(prob, GAConfig(rng_seed=11))
        assert run.best_energy <= random_best + 1e-12

    def test_history_csv_export(self):
        prob = reference_problem()
        run = evolve(prob, GAConfig(population_size=10, generations=3, rng_seed=0))
        lines = run.history_csv().strip().splitlines()
        assert lines[0] == "generation,best_energy,mean_energy"
        assert len(lines) == 5

    def test_top_k_layouts_sorted_and_distinct(self):
        prob = reference_problem()
        run = evolve(prob, GAConfig(population_size=30, generations=20, rng_seed=2), top_k=5)
        energies = [e for _, e in run.top_layouts]
        assert energies == sorted(energies)
        assert len(run.top_layouts) == 5
        assert run.top_layouts[0][1] == pytest.approx(run.best_energy, abs=1e-12)


class TestBruteForce:
    def test_symmetry_only_centers_single_element(self):
        prob = LayoutProblem(
            canvas_width=100.0, canvas_height=100.0,
            fixed_elements=(),
            movable_specs=(MovableSpec("logo", 20, 10),),
            bounds=SizeBounds(ranges={"logo": SizeRange(20, 20, 10, 10)}),
            weights=EnergyWeights(w_align=0, w_overlap=0, w_dist=0, w_sym=1),
        )
        layout, energy = brute_force_layout(prob, grid_steps=17)  # odd -> exact center on grid
        box = layout.movable_elements()[0].box
        assert (box.x_left + box.x_right) / 2 == pytest.approx(50.0, abs=1e-9)
        assert energy == pytest.approx(0.0, abs=1e-12)

    def test_overlap_only_avoids_fixed_half(self):
        prob = LayoutProblem(
            canvas_width=100.0, canvas_height=100.0,
            fixed_elements=(ElementBox("object", BBox(0, 0, 50, 100)),),
            movable_specs=(MovableSpec("logo", 30, 30),),
            bounds=SizeBounds(ranges={"logo": SizeRange(30, 30, 30, 30)}),
            weights=EnergyWeights(w_align=0, w_overlap=1, w_dist=0, w_sym=0),
        )
        layout, energy = brute_force_layout(prob, grid_steps=15)
        assert energy == 0.0
        assert layout.movable_elements()[0].box.x_left >= 50.0

    def test_energy_self_consistent(self):
        prob = reference_problem()
        layout, energy = brute_force_layout(prob, grid_steps=8)
        assert total_energy(layout, prob.weights, prob.bounds).total == pytest.approx(energy, abs=1e-12)

    def test_tractability_guards(self):
        prob = reference_problem()
        with pytest.raises(ValueError):
            brute_force_layout(prob, grid_steps=50)
        big = LayoutProblem(
            canvas_width=200.0, canvas_height=150.0,
            fixed_elements=(),
            movable_specs=(MovableSpec("logo", 50, 25),) * 3,
            bounds=fixed_size_bounds(),
            weights=EnergyWeights(),
        )
        with pytest.raises(ValueError):
            brute_force_layout(big, grid_steps=4)
