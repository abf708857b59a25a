"""Multi-page composition budgets and paste-up layout invariants."""

import random

import pytest

from ocrkit.pagecompose import (
    PAGE_SEPARATOR,
    PageSpec,
    compose_multipage,
    paste_handwriting_lines,
    split_multipage,
    token_count,
)
from ocrkit.tiling import ImageDims


def _page(i, n_tokens):
    return PageSpec.from_text(f"p{i}", " ".join(f"w{j}" for j in range(n_tokens)))


POOL = [_page(i, 80 + 7 * i) for i in range(24)]


def test_token_count_rules():
    assert token_count("") == 0
    assert token_count("a b c") == 3
    assert token_count("你好 world") == 3


def test_pagespec_from_text_counts():
    page = PageSpec.from_text("p", "one two three")
    assert page.token_count == 3


def test_compose_basic_budget_arithmetic():
    pool = [_page(i, 600) for i in range(8)]
    sample = compose_multipage(pool, 5, seed=1)
    assert len(sample.pages) == 5
    assert sample.total_tokens == 5 * 600 + 4 * token_count(PAGE_SEPARATOR)
    assert sample.total_tokens <= 8192


def test_compose_excludes_oversized_pages():
    pool = [_page(i, 100) for i in range(6)] + [_page(99, 700)]
    for seed in range(40):
        sample = compose_multipage(pool, 6, seed=seed)
        assert all(p.page_id != "p99" for p in sample.pages)


def test_compose_page_count_bounds():
    with pytest.raises(ValueError):
        compose_multipage(POOL, 1, seed=0)
    with pytest.raises(ValueError):
        compose_multipage(POOL, 9, seed=0)


def test_compose_insufficient_pool():
    with pytest.raises(ValueError, match="insufficient"):
        compose_multipage(POOL[:3], 4, seed=0)


def test_compose_budget_unsatisfiable():
    pool = [_page(i, 400) for i in range(10)]
    with pytest.raises(ValueError, match="budget"):
        compose_multipage(pool, 4, seed=0, budget=900)


def test_compose_respects_custom_budget_by_skipping():
    # 3 big pages never fit a 350-token budget together; small ones do
    pool = [_page(i, 300) for i in range(3)] + [_page(10 + i, 50) for i in range(6)]
    sample = compose_multipage(pool, 3, seed=2, budget=350)
    assert sample.total_tokens <= 350
    assert all(p.token_count == 50 for p in sample.pages[1:])


def test_compose_deterministic():
    assert compose_multipage(POOL, 4, seed=9) == compose_multipage(POOL, 4, seed=9)
    assert compose_multipage(POOL, 4, seed=9) != compose_multipage(POOL, 4, seed=10)


def test_joined_text_splits_back():
    sample = compose_multipage(POOL, 6, seed=5)
    assert split_multipage(sample.joined_text) == [p.text for p in sample.pages]


def test_separator_inside_page_is_ineligible():
    poisoned = PageSpec.from_text("bad", f"before\n{PAGE_SEPARATOR}\nafter")
    pool = POOL[:8] + [poisoned]
    for seed in range(30):
        sample = compose_multipage(pool, 8, seed=seed)
        assert all(p.page_id != "bad" for p in sample.pages)


def test_paste_layout_example():
    layout = paste_handwriting_lines(
        [ImageDims(1000, 80)] * 6, ImageDims(1240, 1754), seed=4
    )
    assert len(layout.placements) == 6
    assert [p[0] for p in layout.placements] == list(range(6))
    for _, x, y, w, h in layout.placements:
        assert 40 <= x and x + w <= 1240 - 40
        assert 40 <= y and y + h <= 1754 - 40
    ys = [(p[2], p[2] + p[4]) for p in layout.placements]
    for (a0, a1), (b0, b1) in zip(ys, ys[1:]):
        assert a1 < b0  # strictly below: gaps >= 10


def test_paste_slice_count_bounds():
    with pytest.raises(ValueError):
        paste_handwriting_lines([ImageDims(100, 20)] * 5, ImageDims(1000, 1000), seed=0)
    with pytest.raises(ValueError):
        paste_handwriting_lines([ImageDims(100, 20)] * 9, ImageDims(1000, 1000), seed=0)


def test_paste_rejects_wide_slice_and_overflow():
    with pytest.raises(ValueError, match="width"):
        paste_handwriting_lines(
            [ImageDims(1200, 20)] * 6, ImageDims(1240, 1754), seed=0
        )
    with pytest.raises(ValueError, match="height"):
        paste_handwriting_lines(
            [ImageDims(500, 300)] * 8, ImageDims(1000, 1000), seed=0
        )


def test_paste_deterministic():
    slices = [ImageDims(800, 60)] * 7
    canvas = ImageDims(1240, 1754)
    assert paste_handwriting_lines(slices, canvas, 3) == paste_handwriting_lines(slices, canvas, 3)


def test_paste_never_overlaps_randomized():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(6, 8)
        slices = [ImageDims(rng.randint(200, 900), rng.randint(30, 120)) for _ in range(n)]
        layout = paste_handwriting_lines(slices, ImageDims(1240, 1754), seed=rng.randint(0, 10**6))
        rects = [(x, y, x + w, y + h) for _, x, y, w, h in layout.placements]
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                ax1, ay1, ax2, ay2 = rects[i]
                bx1, by1, bx2, by2 = rects[j]
                overlap_w = max(0, min(ax2, bx2) - max(ax1, bx1))
                overlap_h = max(0, min(ay2, by2) - max(ay1, by1))
                assert overlap_w * overlap_h == 0
