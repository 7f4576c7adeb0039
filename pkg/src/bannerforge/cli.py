"""Command-line surface: one subcommand per engine operation.

All structured inputs come from files (JSON configs, CSV matrices, PNG
rasters); flags override scalar config fields. Exit status 0 on success,
non-zero with a categorized error line otherwise.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import click

from . import annotations as ann_mod
from . import calibration as cal_mod
from . import compositor as comp_mod
from . import features as feat_mod
from . import ga as ga_mod
from . import pipeline as pipe_mod
from . import ranking as rank_mod
from . import raster as raster_mod
from . import synthetic as synth_mod


def _fail(category: str, message: str, code: int = 1):
    click.echo(f"error: {category}: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ann_mod.AnnotationError as exc:
            _fail("annotation", str(exc))
        except cal_mod.CalibrationError as exc:
            _fail("calibration", str(exc))
        except rank_mod.SchemaMismatchError as exc:
            _fail("schema", str(exc))
        except pipe_mod.PipelineError as exc:
            _fail("pipeline", str(exc))
        except (ValueError, KeyError) as exc:
            _fail("data", str(exc))
        except OSError as exc:
            _fail("io", str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """bannerforge: offline banner generation and CTR ranking."""
    level = os.environ.get("BANNERFORGE_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--annotations", "annotation_dir", required=True, type=click.Path(exists=True))
@_guarded
def validate(annotation_dir):
    """Parse every annotation file and report invariant violations."""
    paths = sorted(Path(annotation_dir).glob("*.json"))
    if not paths:
        _fail("data", f"no annotation files in {annotation_dir}")
    n_bad = 0
    for path in paths:
        try:
            ann = ann_mod.parse_annotation(path.read_bytes())
        except ann_mod.AnnotationError as exc:
            click.echo(f"{path.name}: PARSE {exc}")
            n_bad += 1
            continue
        violations = ann_mod.validate(ann)
        for v in violations:
            click.echo(f"{path.name}: {v}")
        n_bad += bool(violations)
    click.echo(f"checked {len(paths)} file(s), {n_bad} with violations")
    if n_bad:
        sys.exit(1)


@main.command()
@click.option("--problem", "problem_file", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="override the GA seed")
@click.option("--population", type=int, default=None)
@click.option("--generations", type=int, default=None)
@click.option("--top-k", type=int, default=1)
@_guarded
def layout(problem_file, out_dir, seed, population, generations, top_k):
    """Optimize a layout problem with the GA; write layout + convergence CSV."""
    prob = pipe_mod.problem_from_dict(json.loads(Path(problem_file).read_text()))
    cfg = ga_mod.GAConfig()
    overrides = {}
    if seed is not None:
        overrides["rng_seed"] = seed
    if population is not None:
        overrides["population_size"] = population
    if generations is not None:
        overrides["generations"] = generations
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    run = ga_mod.evolve(prob, cfg, top_k=top_k)
    out = Path(out_dir)
    pipe_mod.write_atomic(out / "layout.json", json.dumps(
        pipe_mod.layout_to_dict(run.best_layout), indent=2).encode())
    pipe_mod.write_atomic(out / "garun.json", json.dumps({
        "best_energy": run.best_energy,
        "evaluations": run.evaluations,
        "generations": len(run.history) - 1,
        "top_energies": [e for _, e in run.top_layouts],
    }, indent=2).encode())
    pipe_mod.write_atomic(out / "convergence.csv", run.history_csv().encode())
    click.echo(f"best energy {run.best_energy:.6f} after {run.evaluations} evaluations")


@main.command()
@click.option("--problem", "problem_file", required=True, type=click.Path(exists=True))
@click.option("--grid-steps", type=int, default=16, show_default=True)
@click.option("--out", "out_file", required=True, type=click.Path())
@_guarded
def oracle(problem_file, grid_steps, out_file):
    """Exact brute-force optimum of a small layout problem on a position grid."""
    prob = pipe_mod.problem_from_dict(json.loads(Path(problem_file).read_text()))
    best_layout, energy = ga_mod.brute_force_layout(prob, grid_steps)
    pipe_mod.write_atomic(out_file, json.dumps({
        "energy": energy,
        "layout": pipe_mod.layout_to_dict(best_layout),
    }, indent=2).encode())
    click.echo(f"grid optimum {energy:.6f}")


@main.command()
@click.option("--image", "image_file", required=True, type=click.Path(exists=True))
@click.option("--annotation", "annotation_file", required=True, type=click.Path(exists=True))
@click.option("--layout", "layout_file", required=True, type=click.Path(exists=True))
@click.option("--logo", "logo_file", required=True, type=click.Path(exists=True))
@click.option("--callout", default="", help="text to render; empty renders none")
@click.option("--aspect", type=float, default=None, help="crop to this aspect first")
@click.option("--gradient/--no-gradient", default=True)
@click.option("--gradient-strength", type=float, default=comp_mod.DEFAULT_GRADIENT_STRENGTH)
@click.option("--out", "out_file", required=True, type=click.Path())
@_guarded
def compose(image_file, annotation_file, layout_file, logo_file, callout,
            aspect, gradient, gradient_strength, out_file):
    """Composite one banner from an image, annotation, layout, and logo."""
    image = raster_mod.read_png(image_file)
    ann = ann_mod.parse_annotation(Path(annotation_file).read_bytes())
    lay = pipe_mod.layout_from_dict(json.loads(Path(layout_file).read_text()))
    logo = raster_mod.read_png(logo_file)
    options = comp_mod.ComposeOptions(
        target_aspect=aspect, gradient_enabled=gradient, gradient_strength=gradient_strength,
    )
    banner = comp_mod.compose(image, ann, lay, logo, callout, options)
    pipe_mod.write_atomic(out_file, raster_mod.encode_png(banner))
    click.echo(f"wrote {out_file} ({banner.width}x{banner.height})")


@main.command()
@click.option("--annotations", "annotation_dir", required=True, type=click.Path(exists=True))
@click.option("--layouts", "layout_dir", required=True, type=click.Path(exists=True),
              help="directory of <image_id>.json layout files")
@click.option("--schema", "schema_file", required=True, type=click.Path(),
              help="schema artifact; built from the corpus when missing")
@click.option("--k-scene", type=int, default=feat_mod.DEFAULT_K_SCENE, show_default=True)
@click.option("--externals", "externals_file", type=click.Path(exists=True), default=None)
@click.option("--out-features", "features_file", required=True, type=click.Path())
@_guarded
def features(annotation_dir, layout_dir, schema_file, k_scene, externals_file, features_file):
    """Extract feature vectors for every annotation/layout pair into a CSV."""
    catalog, failures = pipe_mod.load_catalog(annotation_dir)
    for failure in failures:
        click.echo(f"skipped {failure.image_id}: {failure.error}", err=True)
    if Path(schema_file).exists():
        schema = feat_mod.FeatureSchema.from_json(Path(schema_file).read_text())
    else:
        schema = feat_mod.build_schema(catalog, k_scene=k_scene)
        pipe_mod.write_atomic(schema_file, schema.to_json().encode())
    externals = {}
    if externals_file is not None:
        externals = feat_mod.parse_external_features(Path(externals_file).read_bytes())

    items = []
    names = None
    for ann in catalog:
        layout_path = Path(layout_dir) / f"{ann.image_id}.json"
        if not layout_path.exists():
            click.echo(f"skipped {ann.image_id}: no layout file", err=True)
            continue
        lay = pipe_mod.layout_from_dict(json.loads(layout_path.read_text()))
        vec = feat_mod.extract(ann, lay, schema)
        ext = externals.get(ann.image_id, {})
        vec = feat_mod.attach_external(vec, vgg=ext.get("vgg"), nima=ext.get("nima"))
        effective = list(schema.slots)
        if vec.vgg is not None:
            effective += [f"vgg_{i}" for i in range(feat_mod.VGG_DIM)]
        if vec.nima is not None:
            effective.append("nima")
        if names is None:
            names = tuple(effective)
        elif names != tuple(effective):
            _fail("schema", f"{ann.image_id}: inconsistent external features across banners")
        items.append((ann.image_id, vec))
    if not items:
        _fail("data", "no feature rows produced")
    pipe_mod.write_atomic(features_file, rank_mod.features_to_csv(items, names).encode())
    click.echo(f"wrote {len(items)} feature rows x {len(names)} columns")


@main.command()
@click.option("--records", "records_file", required=True, type=click.Path(exists=True))
@click.option("--out", "weights_file", required=True, type=click.Path())
@_guarded
def calibrate(records_file, weights_file):
    """Fit energy weights from historical term scores and CTR."""
    records = cal_mod.parse_records_csv(Path(records_file).read_bytes())
    result = cal_mod.fit_weights(records)
    pipe_mod.write_atomic(weights_file, result.weights.to_json().encode())
    click.echo(
        f"fitted weights on {result.n_records} records, r^2 = {result.r_squared:.4f}: "
        f"align={result.weights.w_align:.3f} overlap={result.weights.w_overlap:.3f} "
        f"dist={result.weights.w_dist:.3f} sym={result.weights.w_sym:.3f}"
    )


def _load_dataset(features_file, labels_file) -> rank_mod.Dataset:
    return rank_mod.dataset_from_csv(
        Path(features_file).read_bytes(), Path(labels_file).read_bytes()
    )


@main.command()
@click.option("--features", "features_file", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_file", required=True, type=click.Path(exists=True))
@click.option("--model-kind", type=click.Choice(rank_mod.MODEL_KINDS), default="random_forest")
@click.option("--seed", type=int, default=0)
@click.option("--n-trees", type=int, default=100, show_default=True)
@click.option("--max-depth", type=int, default=8, show_default=True)
@click.option("--class-weight", type=click.Choice(["balanced", "none"]), default="balanced")
@click.option("--out", "model_file", required=True, type=click.Path())
@_guarded
def train(features_file, labels_file, model_kind, seed, n_trees, max_depth, class_weight, model_file):
    """Train a CTR model on a feature matrix CSV joined with a labels CSV."""
    ds = _load_dataset(features_file, labels_file)
    spec = rank_mod.ModelSpec(kind=model_kind, seed=seed, n_trees=n_trees,
                              max_depth=max_depth, class_weight=class_weight)
    model = rank_mod.train(ds, spec)
    pipe_mod.write_atomic(model_file, rank_mod.model_to_json(model).encode())
    click.echo(f"trained {model_kind} on {len(ds)} rows ({model.n_features} features)")


@main.command()
@click.option("--features", "features_file", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_file", required=True, type=click.Path(exists=True))
@click.option("--model", "model_file", required=True, type=click.Path(exists=True))
@click.option("--out", "report_file", required=True, type=click.Path())
@_guarded
def evaluate(features_file, labels_file, model_file, report_file):
    """Score a trained model: AUC on clicks, NDCG on CTR relevance."""
    ds = _load_dataset(features_file, labels_file)
    model = rank_mod.model_from_json(Path(model_file).read_bytes())
    report = rank_mod.evaluate(model, ds)
    pipe_mod.write_atomic(report_file, report.to_json().encode())
    click.echo(f"auc = {report.auc:.4f}, ndcg = {report.ndcg:.4f} on {report.n_test} rows")


@main.command()
@click.option("--features", "features_file", required=True, type=click.Path(exists=True))
@click.option("--model", "model_file", required=True, type=click.Path(exists=True))
@click.option("--out", "ranking_file", required=True, type=click.Path())
@_guarded
def rank(features_file, model_file, ranking_file):
    """Order banners by predicted CTR, highest first."""
    import csv as _csv
    import io as _io

    text = Path(features_file).read_text()
    reader = _csv.reader(_io.StringIO(text))
    header = next(reader)
    names = tuple(header[1:])
    fp = rank_mod.fingerprint_of_names(names)
    model = rank_mod.model_from_json(Path(model_file).read_bytes())
    items = []
    for line in reader:
        if not line:
            continue
        vec = feat_mod.FeatureVector(schema_fingerprint=fp,
                                     values=tuple(float(v) for v in line[1:]))
        items.append((line[0], vec))
    ordered = rank_mod.rank(model, items)
    scores = {bid: rank_mod.predict_ctr(model, vec) for bid, vec in items}
    buf = _io.StringIO()
    writer = _csv.writer(buf)
    writer.writerow(["rank", "banner_id", "predicted_ctr"])
    for i, banner_id in enumerate(ordered, start=1):
        writer.writerow([i, banner_id, repr(scores[banner_id])])
    pipe_mod.write_atomic(ranking_file, buf.getvalue().encode())
    click.echo(f"ranked {len(ordered)} banners")


@main.command()
@click.option("--config", "config_file", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="override the config seed")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="override output_dir")
@_guarded
def pipeline(config_file, seed, out_dir):
    """Run the full generate-compose-rank pipeline from a config file."""
    cfg = pipe_mod.config_from_json(Path(config_file).read_bytes(),
                                    base_dir=Path(config_file).parent)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if out_dir is not None:
        overrides["output_dir"] = out_dir
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    manifest = pipe_mod.run_pipeline(cfg)
    click.echo(f"generated {len(manifest.entries)} banner(s), "
               f"{len(manifest.failures)} failure(s) -> {cfg.output_dir}")
    for failure in manifest.failures:
        click.echo(f"  failed {failure.image_id}: {failure.error}", err=True)


@main.command()
@click.option("--size", type=int, default=1000, show_default=True)
@click.option("--signal", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_guarded
def synth(size, signal, seed, out_dir):
    """Generate a synthetic corpus with a planted, known click signal."""
    data = synth_mod.generate_synthetic(size, signal, seed)
    out = Path(out_dir)
    ann_dir = out / "annotations"
    for ann in data.annotations:
        pipe_mod.write_atomic(ann_dir / f"{ann.image_id}.json",
                              ann_mod.serialize_annotation(ann).encode())
    pipe_mod.write_atomic(out / "records.csv", cal_mod.records_to_csv(data.records).encode())
    items = [(row.banner_id, row.features) for row in data.dataset.rows]
    pipe_mod.write_atomic(out / "features.csv",
                          rank_mod.features_to_csv(items, data.schema.slots).encode())
    labels = [(row.banner_id, row.is_clicked, row.ctr) for row in data.dataset.rows]
    pipe_mod.write_atomic(out / "labels.csv", rank_mod.labels_to_csv(labels).encode())
    pipe_mod.write_atomic(out / "meta.json", json.dumps({
        "size": size, "signal_strength": signal, "seed": seed,
        "bayes_auc": data.bayes_auc, "planted_feature": data.planted_feature,
    }, indent=2).encode())
    click.echo(f"wrote {size} synthetic banners (bayes AUC {data.bayes_auc:.4f}) -> {out_dir}")


if __name__ == "__main__":
    main()
