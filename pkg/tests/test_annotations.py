import json
import random

import pytest

from bannerforge.annotations import (
    AnnotationError, ArticleAnnotation, BBox, FaceAnnotation, FilterCriteria,
    ImageAnnotation, SceneInfo, dominant_article, filter_images,
    parse_annotation, parse_element_library, serialize_annotation,
    text_area_fraction, union_area, validate,
)
from conftest import rasterized_union_area


MINIMAL = {"image_id": "img1", "width": 100, "height": 100}


def make_doc(**extra):
    doc = dict(MINIMAL)
    doc.update(extra)
    return json.dumps(doc)


class TestParse:
    def test_minimal_document(self):
        ann = parse_annotation(make_doc())
        assert ann.image_id == "img1"
        assert ann.width == 100 and ann.height == 100
        assert ann.persons == () and ann.articles == ()
        assert ann.scene.environment == "indoor"

    def test_person_box_round_trips_verbatim(self):
        ann = parse_annotation(make_doc(persons=[[10, 10, 50, 90]]))
        assert ann.persons == (BBox(10, 10, 50, 90),)

    def test_missing_width_names_the_field(self):
        doc = {"image_id": "x", "height": 100}
        with pytest.raises(AnnotationError) as err:
            parse_annotation(json.dumps(doc))
        assert err.value.path == "width"

    def test_malformed_json(self):
        with pytest.raises(AnnotationError, match="malformed"):
            parse_annotation(b"{nope")

    def test_type_mismatch_reports_path(self):
        with pytest.raises(AnnotationError) as err:
            parse_annotation(make_doc(articles=[{"category": "topwear", "box": [0, 0, "x", 5]}]))
        assert "articles[0].box" in str(err.value)

    def test_unknown_category_rejected(self):
        with pytest.raises(AnnotationError, match="articles\\[0\\].category"):
            parse_annotation(make_doc(articles=[{"category": "hats", "box": [0, 0, 5, 5]}]))

    def test_unknown_fields_ignored(self):
        ann = parse_annotation(make_doc(some_future_field=123))
        assert ann.image_id == "img1"

    def test_parse_serialize_identity(self):
        ann = ImageAnnotation(
            image_id="full", width=320, height=240, brand="acme", season="ss",
            persons=(BBox(10, 20, 110, 220),),
            faces=(FaceAnnotation(BBox(40, 30, 70, 60), "female"),),
            articles=(ArticleAnnotation("shoes", BBox(60, 150, 120, 210), 0.88),),
            scene=SceneInfo("outdoor", frozenset({"garden", "street"}), frozenset({"warm"})),
            text_regions=(BBox(0, 0, 50, 20),),
        )
        assert parse_annotation(serialize_annotation(ann)) == ann

    def test_round_trip_on_random_annotations(self):
        rng = random.Random(7)
        for i in range(25):
            n_person = rng.randrange(3)
            ann = ImageAnnotation(
                image_id=f"r{i}", width=200, height=150,
                brand=rng.choice(["a", "b"]), season="aw",
                persons=tuple(
                    BBox(x, y, x + rng.randint(1, 40), y + rng.randint(1, 40))
                    for x, y in [(rng.randint(0, 100), rng.randint(0, 100))] * n_person
                ),
                scene=SceneInfo(rng.choice(["indoor", "outdoor"]),
                                frozenset(rng.sample(["g", "s", "t"], rng.randrange(3))),
                                frozenset()),
            )
            assert parse_annotation(serialize_annotation(ann)) == ann


class TestValidate:
    def test_clean_annotation(self):
        ann = parse_annotation(make_doc(persons=[[10, 10, 50, 90]]))
        assert validate(ann) == []

    def test_out_of_bounds_face(self):
        ann = parse_annotation(make_doc(faces=[{"box": [50, 10, 120, 40], "gender": "male"}]))
        report = validate(ann)
        assert len(report) == 1
        assert "faces[0].box" in report[0].path

    def test_degenerate_box(self):
        ann = parse_annotation(make_doc(persons=[[30, 10, 30, 90]]))
        report = validate(ann)
        assert len(report) == 1
        assert "degenerate" in report[0].message


class TestDominantArticle:
    def test_argmax_area(self):
        ann = parse_annotation(make_doc(articles=[
            {"category": "shoes", "box": [0, 0, 40, 30]},     # 1200
            {"category": "bags", "box": [0, 0, 40, 20]},      # 800
        ]))
        assert dominant_article(ann) == ("shoes", BBox(0, 0, 40, 30))

    def test_no_articles(self):
        assert dominant_article(parse_annotation(make_doc())) is None

    def test_tie_breaks_by_y_top(self):
        ann = parse_annotation(make_doc(articles=[
            {"category": "bags", "box": [0, 40, 30, 70]},
            {"category": "shoes", "box": [5, 10, 35, 40]},
        ]))
        assert dominant_article(ann)[0] == "shoes"

    def test_permutation_invariant_without_ties(self):
        boxes = [("shoes", [0, 0, 30, 30]), ("bags", [10, 10, 60, 60]), ("other", [5, 5, 20, 20])]
        forward = parse_annotation(make_doc(articles=[
            {"category": c, "box": b} for c, b in boxes]))
        backward = parse_annotation(make_doc(articles=[
            {"category": c, "box": b} for c, b in reversed(boxes)]))
        assert dominant_article(forward) == dominant_article(backward)


class TestTextAreaFraction:
    def test_no_regions(self):
        assert text_area_fraction(parse_annotation(make_doc())) == 0.0

    def test_full_cover(self):
        ann = parse_annotation(make_doc(text_regions=[[0, 0, 100, 100]]))
        assert text_area_fraction(ann) == 1.0

    def test_overlapping_regions_match_pixel_oracle(self):
        regions = [[0, 0, 50, 100], [25, 0, 75, 100]]
        ann = parse_annotation(make_doc(text_regions=regions))
        oracle = rasterized_union_area([BBox(*r) for r in regions], 100, 100) / (100 * 100)
        assert oracle == 0.75
        assert text_area_fraction(ann) == pytest.approx(0.75, abs=1e-12)

    def test_union_matches_pixel_oracle_on_random_boxes(self):
        rng = random.Random(13)
        for _ in range(60):
            boxes = []
            for _ in range(rng.randrange(1, 6)):
                x0, x1 = sorted(rng.sample(range(65), 2))
                y0, y1 = sorted(rng.sample(range(65), 2))
                boxes.append(BBox(x0, y0, x1, y1))
            assert union_area(boxes) == pytest.approx(
                rasterized_union_area(boxes, 64, 64), abs=1e-9
            )


class TestFilterImages:
    def setup_method(self):
        self.catalog = [
            parse_annotation(json.dumps({
                "image_id": "x1", "width": 100, "height": 100, "brand": "X"})),
            parse_annotation(json.dumps({
                "image_id": "y1", "width": 100, "height": 100, "brand": "Y"})),
            parse_annotation(json.dumps({
                "image_id": "x2", "width": 100, "height": 100, "brand": "X",
                "text_regions": [[0, 0, 100, 100]]})),
        ]

    def test_brand_filter(self):
        assert filter_images(self.catalog, FilterCriteria(brand="X", max_text_area_fraction=1.0)) \
            == ["x1", "x2"]

    def test_text_fraction_drops_full_text_image(self):
        assert filter_images(self.catalog, FilterCriteria(max_text_area_fraction=0.1)) \
            == ["x1", "y1"]

    def test_empty_criteria_keeps_everything(self):
        assert filter_images(self.catalog, FilterCriteria(max_text_area_fraction=1.0)) \
            == ["x1", "y1", "x2"]

    def test_result_is_subsequence_and_idempotent(self):
        crit = FilterCriteria(brand="X", max_text_area_fraction=0.2)
        ids = filter_images(self.catalog, crit)
        order = [ann.image_id for ann in self.catalog]
        assert ids == [i for i in order if i in set(ids)]
        kept = [ann for ann in self.catalog if ann.image_id in set(ids)]
        assert filter_images(kept, crit) == ids


class TestElementLibrary:
    def test_parse_and_lookup(self):
        lib = parse_element_library(json.dumps({
            "logos": [{"brand": "X", "path": "x.png"}],
            "callouts": [{"text": "New drop", "themes": ["launch"]},
                         {"text": "Sale now", "themes": ["sale"]}],
        }))
        assert lib.logo_for("X").path == "x.png"
        assert lib.logo_for("Z") is None
        assert [c.text for c in lib.callouts_for("sale")] == ["Sale now"]
        assert len(lib.callouts_for(None)) == 2

    def test_duplicate_brand_rejected(self):
        with pytest.raises(AnnotationError, match="duplicate"):
            parse_element_library(json.dumps({
                "logos": [{"brand": "X", "path": "a.png"}, {"brand": "X", "path": "b.png"}],
            }))

    def test_empty_callout_rejected(self):
        with pytest.raises(AnnotationError, match="non-empty"):
            parse_element_library(json.dumps({"callouts": [{"text": ""}]}))
