import pytest

from bannerforge.annotations import (
    ArticleAnnotation, BBox, FaceAnnotation, ImageAnnotation, SceneInfo,
)
from bannerforge.energy import ElementBox, Layout
from bannerforge.features import (
    ABSENT, VGG_DIM, FeatureSchema, SchemaMismatchError,
    attach_external, build_schema, extract,
)


def ann_with_scene(image_id, categories=(), attributes=(), **kwargs):
    return ImageAnnotation(
        image_id=image_id, width=200, height=100,
        scene=SceneInfo("indoor", frozenset(categories), frozenset(attributes)),
        **kwargs,
    )


def simple_layout(*elements):
    return Layout(canvas_width=200.0, canvas_height=100.0, elements=tuple(elements))


def text_at(l, t, r, b):
    return ElementBox("text", BBox(l, t, r, b))


class TestBuildSchema:
    def test_most_frequent_label_wins(self):
        corpus = [ann_with_scene(f"g{i}", categories=("garden",)) for i in range(10)]
        corpus += [ann_with_scene(f"s{i}", categories=("street",)) for i in range(3)]
        schema = build_schema(corpus, k_scene=1)
        assert schema.scene_categories == ("garden",)
        assert "scene_cat_garden" in schema.slots

    def test_k_beyond_distinct_pads_with_reserved_slots(self):
        corpus = [ann_with_scene("a", categories=("garden",))]
        schema = build_schema(corpus, k_scene=4)
        assert schema.scene_categories == ("garden",)
        assert sum(1 for s in schema.slots if s.startswith("scene_cat_unused_")) == 3

    def test_frequency_tie_breaks_lexicographically(self):
        corpus = [
            ann_with_scene("a", categories=("garden",)),
            ann_with_scene("b", categories=("street",)),
        ]
        schema = build_schema(corpus, k_scene=1)
        assert schema.scene_categories == ("garden",)

    def test_fixed_length_regardless_of_corpus(self):
        s1 = build_schema([ann_with_scene("a", categories=("x",))], k_scene=16)
        s2 = build_schema([ann_with_scene("b", categories=("x", "y", "z"))], k_scene=16)
        assert len(s1) == len(s2) == 16 + 16 + 16 + 3 + 3 + 7 + 1 + 3 + 4

    def test_json_round_trip(self):
        schema = build_schema([ann_with_scene("a", categories=("garden",),
                                              attributes=("warm",))], k_scene=3)
        assert FeatureSchema.from_json(schema.to_json()) == schema


class TestExtract:
    def setup_method(self):
        self.corpus = [ann_with_scene("seed", categories=("garden", "street"),
                                      attributes=("warm",))]
        self.schema = build_schema(self.corpus, k_scene=2)

    def slot(self, vec, name):
        return vec.values[self.schema.slots.index(name)]

    def test_no_people_gender_zero(self):
        ann = ann_with_scene("a")
        vec = extract(ann, simple_layout(text_at(10, 10, 60, 30)), self.schema)
        assert (self.slot(vec, "n_women"), self.slot(vec, "n_men"), self.slot(vec, "n_people")) \
            == (0.0, 0.0, 0.0)
        assert self.slot(vec, "pos_person_x_left") == ABSENT

    def test_quadrant_top_left(self):
        ann = ann_with_scene("a")
        # center at (50, 25) = (0.25 * w, 0.25 * h)
        vec = extract(ann, simple_layout(text_at(40, 20, 60, 30)), self.schema)
        quads = [self.slot(vec, f"text_q_{q}") for q in ("tl", "tr", "bl", "br")]
        assert quads == [1.0, 0.0, 0.0, 0.0]

    def test_text_covering_face_scores_full_overlap(self):
        face = FaceAnnotation(BBox(50, 20, 80, 50), "female")
        ann = ann_with_scene("a", faces=(face,))
        vec = extract(ann, simple_layout(text_at(50, 20, 80, 50)), self.schema)
        assert self.slot(vec, "overlap_text_face") == 1.0

    def test_partial_face_overlap_fraction(self):
        face = FaceAnnotation(BBox(50, 20, 80, 50), "female")  # 30x30
        ann = ann_with_scene("a", faces=(face,))
        vec = extract(ann, simple_layout(text_at(40, 10, 90, 35)), self.schema)  # covers top half
        assert self.slot(vec, "overlap_text_face") == pytest.approx(0.5, abs=1e-12)

    def test_position_slots_normalized(self):
        ann = ann_with_scene("a", persons=(BBox(20, 10, 120, 90),))
        vec = extract(ann, simple_layout(text_at(0, 0, 50, 20)), self.schema)
        assert self.slot(vec, "pos_person_x_left") == pytest.approx(0.1)
        assert self.slot(vec, "pos_person_y_top") == pytest.approx(0.1)
        assert self.slot(vec, "pos_person_x_right") == pytest.approx(0.6)
        assert self.slot(vec, "pos_person_y_bottom") == pytest.approx(0.9)

    def test_dominant_person_used_for_position(self):
        ann = ann_with_scene("a", persons=(BBox(0, 0, 10, 10), BBox(20, 10, 120, 90)))
        vec = extract(ann, simple_layout(text_at(0, 0, 50, 20)), self.schema)
        assert self.slot(vec, "pos_person_x_left") == pytest.approx(0.1)

    def test_category_one_hot(self):
        ann = ann_with_scene("a", articles=(
            ArticleAnnotation("shoes", BBox(10, 10, 40, 40)),
            ArticleAnnotation("bags", BBox(100, 10, 140, 40)),
        ))
        vec = extract(ann, simple_layout(text_at(0, 50, 60, 80)), self.schema)
        assert self.slot(vec, "cat_shoes") == 1.0
        assert self.slot(vec, "cat_bags") == 1.0
        assert self.slot(vec, "cat_topwear") == 0.0

    def test_environment_and_scene_one_hots(self):
        ann = ImageAnnotation(
            image_id="a", width=200, height=100,
            scene=SceneInfo("outdoor", frozenset({"garden"}), frozenset({"warm"})),
        )
        vec = extract(ann, simple_layout(text_at(0, 0, 50, 20)), self.schema)
        assert self.slot(vec, "env_outdoor") == 1.0
        assert self.slot(vec, "scene_cat_garden") == 1.0
        assert self.slot(vec, "scene_attr_warm") == 1.0

    def test_article_order_permutation_invariant(self):
        arts = (
            ArticleAnnotation("shoes", BBox(10, 10, 40, 40)),
            ArticleAnnotation("bags", BBox(100, 10, 180, 70)),
        )
        a1 = ann_with_scene("a", articles=arts)
        a2 = ann_with_scene("a", articles=tuple(reversed(arts)))
        layout = simple_layout(text_at(0, 50, 60, 80))
        assert extract(a1, layout, self.schema).values == extract(a2, layout, self.schema).values

    def test_bit_identical_for_identical_inputs(self):
        ann = ann_with_scene("a", persons=(BBox(30, 5, 90, 95),))
        layout = simple_layout(text_at(120, 30, 190, 60))
        v1 = extract(ann, layout, self.schema)
        v2 = extract(ann, layout, self.schema)
        assert v1 == v2

    def test_normalized_slots_in_range(self):
        ann = ann_with_scene(
            "a",
            persons=(BBox(0, 0, 200, 100),),
            faces=(FaceAnnotation(BBox(10, 10, 50, 50), "male"),),
            articles=(ArticleAnnotation("other", BBox(5, 5, 195, 95)),),
        )
        vec = extract(ann, simple_layout(text_at(0, 0, 200, 100)), self.schema)
        for name, value in zip(self.schema.slots, vec.values):
            if name.startswith(("n_",)):
                continue
            assert value == ABSENT or 0.0 <= value <= 1.0, (name, value)

    def test_canvas_mismatch_rejected(self):
        ann = ann_with_scene("a")
        bad_layout = Layout(canvas_width=64.0, canvas_height=64.0,
                            elements=(text_at(0, 0, 10, 10),))
        with pytest.raises(SchemaMismatchError):
            extract(ann, bad_layout, self.schema)


class TestAttachExternal:
    def setup_method(self):
        schema = build_schema([ann_with_scene("a")], k_scene=2)
        self.vec = extract(ann_with_scene("a"), simple_layout(text_at(0, 0, 50, 20)), schema)

    def test_attach_nima(self):
        out = attach_external(self.vec, nima=5.2)
        assert len(out.full_values()) == len(self.vec.values) + 1
        assert out.full_values()[-1] == 5.2
        assert out.full_fingerprint.endswith("+nima")

    def test_attach_vgg(self):
        out = attach_external(self.vec, vgg=[0.5] * VGG_DIM)
        assert len(out.full_values()) == len(self.vec.values) + VGG_DIM
        assert "+vgg" in out.full_fingerprint

    def test_wrong_vgg_length(self):
        with pytest.raises(ValueError, match="4096"):
            attach_external(self.vec, vgg=[0.0] * 4095)

    def test_attach_nothing_is_identity(self):
        assert attach_external(self.vec) == self.vec

    def test_double_attach_rejected(self):
        once = attach_external(self.vec, nima=4.0)
        with pytest.raises(ValueError, match="already"):
            attach_external(once, nima=5.0)

    def test_non_finite_nima_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            attach_external(self.vec, nima=float("inf"))
