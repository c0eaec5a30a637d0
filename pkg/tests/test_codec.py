import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargrid_ocr.annotations import GroundTruthPage, WordAnnotation
from chargrid_ocr.codec import (
    WidthTable,
    approximate_char_boxes,
    decode_word_offset,
    encode_page,
    encode_word_offset,
    page_from_words,
)
from chargrid_ocr.geometry import Rect
from chargrid_ocr.synth import PageConfig, generate_page

E_MINUS_1 = math.e - 1


def test_word_offset_examples():
    assert encode_word_offset(0.0) == 0.0
    assert encode_word_offset(E_MINUS_1) == pytest.approx(1.0, abs=1e-15)
    assert encode_word_offset(-E_MINUS_1) == pytest.approx(-1.0, abs=1e-15)
    assert decode_word_offset(0.0) == 0.0
    assert decode_word_offset(1.0) == pytest.approx(E_MINUS_1, abs=1e-15)


def test_word_offset_matches_literal_formula():
    xs = np.array([-1000.0, -3.5, -0.01, 0.25, 42.0, 9999.0])
    literal = np.sign(xs) * np.log(np.abs(xs) + 1)
    np.testing.assert_allclose(encode_word_offset(xs), literal, rtol=1e-14)


@pytest.mark.parametrize("x", [-1000.0, -3.5, 0.25, 42.0])
def test_decode_inverts_encode(x):
    assert decode_word_offset(encode_word_offset(x)) == pytest.approx(x, abs=1e-9)


@given(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))
def test_encode_odd_and_monotone(a, b):
    assert encode_word_offset(-a) == -encode_word_offset(a)
    if a < b:
        assert encode_word_offset(a) < encode_word_offset(b)


def test_split_two_equal_chars(charset):
    boxes = approximate_char_boxes(WordAnnotation("ab", Rect(10, 5, 8, 4)), WidthTable(), charset)
    assert [(b.rect.cx, b.rect.w) for b in boxes] == [(8, 4), (12, 4)]
    assert all((b.rect.cy, b.rect.h) == (5, 4) for b in boxes)
    assert charset.decode(b.symbol_index for b in boxes) == "ab"


def test_split_single_char(charset):
    word = WordAnnotation("Q", Rect(3.3, 7.1, 2.2, 5.0))
    (box,) = approximate_char_boxes(word, None, charset)
    assert box.rect == word.rect


def test_split_proportional(charset):
    boxes = approximate_char_boxes(
        WordAnnotation("il", Rect(10, 5, 8, 4)), WidthTable({"i": 1.0, "l": 3.0}), charset
    )
    assert [b.rect.w for b in boxes] == [2, 6]


def test_unmappable_char_becomes_unknown(charset):
    (box,) = approximate_char_boxes(WordAnnotation("ß", Rect(1, 1, 1, 1)), None, charset)
    assert box.symbol_index == charset.unknown_index


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        WordAnnotation("", Rect(1, 1, 1, 1))


words = st.builds(
    WordAnnotation,
    st.text(alphabet="abcdefghijWXYZ019.,!", min_size=1, max_size=12),
    st.builds(Rect, st.floats(-100, 100), st.floats(-100, 100), st.floats(0.5, 200), st.floats(0.5, 50)),
)
width_tables = st.dictionaries(st.sampled_from("abcdefghij"), st.floats(0.1, 5.0)).map(WidthTable)


@given(words, width_tables)
def test_split_partitions_word_box(word, widths):
    boxes = approximate_char_boxes(word, widths)
    assert len(boxes) == len(word.text)
    assert math.fsum(b.rect.w for b in boxes) == pytest.approx(word.rect.w, abs=1e-9)
    assert boxes[0].rect.left == pytest.approx(word.rect.left, abs=1e-9)
    assert boxes[-1].rect.right == pytest.approx(word.rect.right, abs=1e-9)
    for a, b in zip(boxes, boxes[1:]):
        # abutting: no gap and no interior overlap
        assert a.rect.right == pytest.approx(b.rect.left, abs=1e-9)


def test_empty_page_encodes_to_zeros():
    out = encode_page(GroundTruthPage((6, 7), [], []))
    assert out.shape == (6, 7)
    for name in ("S", "Bc", "Xc", "Yc", "Wc", "Hc", "Xw", "Yw"):
        assert not getattr(out, name).any()


def test_single_char_targets(charset):
    page = page_from_words((6, 6), [WordAnnotation("A", Rect(2.5, 2.5, 3, 3))], charset)
    out = encode_page(page, charset)
    # pixel (2, 2) has its sample point at the box center
    assert out.S[2, 2] == charset.index("A")
    assert out.Bc[2, 2] == 1.0
    assert out.Xc[2, 2] == 0.0 and out.Yc[2, 2] == 0.0
    assert out.Wc[2, 2] == pytest.approx(math.log(3))
    assert out.Hc[2, 2] == pytest.approx(math.log(3))
    assert out.Xc[2, 1] == 1.0
    assert out.Yc[1, 2] == 1.0
    # 3x3 block of pixels 1..3 covered, nothing else
    assert out.Bc.sum() == 9
    assert out.Bc[1:4, 1:4].all()


def test_tiny_box_reported(charset):
    page = page_from_words((6, 6), [WordAnnotation("A", Rect(2.0, 2.5, 0.5, 3))], charset)
    skipped = []
    out = encode_page(page, charset, skipped)
    assert skipped == [0]
    assert not out.Bc.any()


def test_later_box_wins(charset):
    from chargrid_ocr.annotations import CharAnnotation

    words = [WordAnnotation("a", Rect(2, 2, 4, 4)), WordAnnotation("b", Rect(3, 2, 4, 4))]
    chars = [
        CharAnnotation(charset.index("a"), words[0].rect, 0),
        CharAnnotation(charset.index("b"), words[1].rect, 1),
    ]
    out = encode_page(GroundTruthPage((4, 6), words, chars), charset)
    assert out.S[1, 2] == charset.index("b")
    assert out.S[1, 0] == charset.index("a")


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_round_trip_centers(seed, charset):
    page = generate_page(PageConfig(seed=seed), charset)
    out = encode_page(page, charset)
    rows, cols = out.shape
    yy, xx = np.mgrid[0:rows, 0:cols] + 0.5
    covered = np.zeros((rows, cols), dtype=bool)
    for ch in page.chars:
        word = page.words[ch.word_id].rect
        r = ch.rect
        m = (xx >= r.left) & (xx < r.right) & (yy >= r.top) & (yy < r.bottom)
        assert m.any()
        covered |= m
        assert np.all(np.abs(xx[m] + out.Xc[m] - r.cx) < 1e-6)
        assert np.all(np.abs(yy[m] + out.Yc[m] - r.cy) < 1e-6)
        assert np.all(np.abs(xx[m] + decode_word_offset(out.Xw[m]) - word.cx) < 1e-6)
        assert np.all(np.abs(yy[m] + decode_word_offset(out.Yw[m]) - word.cy) < 1e-6)
        assert np.all(out.S[m] == ch.symbol_index)
    np.testing.assert_array_equal(covered, out.Bc == 1)


def test_foreground_iff_mask(charset):
    out = encode_page(generate_page(PageConfig(seed=4), charset), charset)
    np.testing.assert_array_equal(out.S != 0, out.Bc == 1)
