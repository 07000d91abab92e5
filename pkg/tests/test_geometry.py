import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dronedet import BBox, flip_box, iou, rescale_box
from dronedet.errors import InvalidGeometry, NonPositiveScale

coord = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False, allow_infinity=False)
extent = st.floats(min_value=0.0, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, min_extent=0.0):
    x1, y1 = draw(coord), draw(coord)
    w = draw(st.floats(min_value=min_extent, max_value=1e3, allow_nan=False))
    h = draw(st.floats(min_value=min_extent, max_value=1e3, allow_nan=False))
    return BBox(x1, y1, x1 + w, y1 + h)


class TestBBox:
    def test_inverted_box_rejected(self):
        with pytest.raises(InvalidGeometry):
            BBox(5, 0, 4, 1)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidGeometry):
            BBox(0, 0, math.inf, 1)

    def test_accessors(self):
        b = BBox(10, 20, 40, 60)
        assert (b.width, b.height, b.area) == (30, 40, 1200)
        assert b.center == (25, 40)


class TestIou:
    def test_identity(self):
        b = BBox(3, 4, 9, 11)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BBox(0, 0, 1, 1), BBox(5, 5, 6, 6)) == 0.0

    def test_partial_overlap(self):
        # inter = 1 * 2 = 2, union = 4 + 4 - 2 = 6
        assert iou(BBox(0, 0, 2, 2), BBox(1, 0, 3, 2)) == pytest.approx(2 / 6, abs=1e-15)

    def test_zero_area_boxes(self):
        point = BBox(2, 2, 2, 2)
        assert iou(point, point) == 0.0

    def test_edge_touching(self):
        assert iou(BBox(0, 0, 1, 1), BBox(1, 0, 2, 1)) == 0.0

    @given(boxes(), boxes())
    @settings(max_examples=80)
    def test_symmetric(self, a, b):
        assert iou(a, b) == iou(b, a)

    @given(boxes(min_extent=1e-3))
    @settings(max_examples=50)
    def test_self_iou_is_one(self, a):
        assert iou(a, a) == 1.0

    @given(boxes(min_extent=0.01), boxes(min_extent=0.01))
    @settings(max_examples=80)
    def test_flip_preserves_iou(self, a, b):
        # extents below the float grid at |x| ~ 2e4 cannot survive reflection
        width = 2e4
        assert iou(flip_box(a, width), flip_box(b, width)) == pytest.approx(
            iou(a, b), abs=1e-9
        )

    @given(boxes(), boxes(), st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]))
    @settings(max_examples=80)
    def test_uniform_power_of_two_rescale_preserves_iou_exactly(self, a, b, s):
        assert iou(rescale_box(a, s, s), rescale_box(b, s, s)) == iou(a, b)

    @given(boxes(), boxes(), st.floats(min_value=0.1, max_value=10, allow_nan=False))
    @settings(max_examples=80)
    def test_uniform_rescale_preserves_iou(self, a, b, s):
        assert iou(rescale_box(a, s, s), rescale_box(b, s, s)) == pytest.approx(
            iou(a, b), abs=1e-9
        )


class TestFlipBox:
    def test_reflection(self):
        assert flip_box(BBox(10, 5, 30, 25), 100) == BBox(70, 5, 90, 25)

    def test_centered_box_fixed_point(self):
        b = BBox(40, 0, 60, 10)
        assert flip_box(b, 100) == b

    def test_involution_on_dyadic_coords(self):
        b = BBox(10.25, 5.5, 30.75, 25.0)
        assert flip_box(flip_box(b, 100), 100) == b

    @given(boxes())
    @settings(max_examples=80)
    def test_involution(self, b):
        back = flip_box(flip_box(b, 2e4), 2e4)
        assert back.x1 == pytest.approx(b.x1, abs=1e-9)
        assert back.x2 == pytest.approx(b.x2, abs=1e-9)
        assert (back.y1, back.y2) == (b.y1, b.y2)


class TestRescaleBox:
    def test_identity(self):
        b = BBox(10, 20, 30, 40)
        assert rescale_box(b, 1.0, 1.0) == b

    def test_halving(self):
        assert rescale_box(BBox(10, 20, 30, 40), 2, 2) == BBox(5, 10, 15, 20)

    def test_per_axis(self):
        assert rescale_box(BBox(10, 20, 30, 40), 2, 4) == BBox(5, 5, 15, 10)

    @pytest.mark.parametrize("sx,sy", [(0, 1), (1, 0), (-1, 1), (math.inf, 1), (math.nan, 1)])
    def test_bad_scale(self, sx, sy):
        with pytest.raises(NonPositiveScale):
            rescale_box(BBox(0, 0, 1, 1), sx, sy)
