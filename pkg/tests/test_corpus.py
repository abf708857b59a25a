"""Record model: round trips, format errors, dedup filtering, stage mixing."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocrkit.corpus import (
    Corpus,
    CorpusFormatError,
    Sample,
    TaskKind,
    dedup_filter,
    dump_records,
    load_records,
    mix_stages,
    save_records,
)

TEXT = st.text(min_size=1, max_size=30)
META = st.dictionaries(st.text(max_size=8), st.text(max_size=12), max_size=3)


def _sample(i, text="some text", kind=TaskKind.PLAIN_DOC, **kwargs):
    return Sample(id=f"s{i}", task_kind=kind, ground_truth=text, **kwargs)


def _corpus(*samples, schema_version=1):
    return Corpus(tuple(samples), schema_version)


# --- model invariants ---------------------------------------------------------


def test_sample_requires_id_and_ground_truth():
    with pytest.raises(ValueError):
        Sample(id="", task_kind=TaskKind.PLAIN_DOC, ground_truth="x")
    with pytest.raises(ValueError):
        Sample(id="a", task_kind=TaskKind.PLAIN_DOC, ground_truth="")


def test_sample_rejects_unknown_kind_and_lang():
    with pytest.raises(ValueError):
        Sample(id="a", task_kind="NotAKind", ground_truth="x")
    with pytest.raises(ValueError):
        Sample(id="a", task_kind=TaskKind.CHART, ground_truth="x", lang="fr")


def test_corpus_rejects_duplicate_ids_and_bad_version():
    with pytest.raises(ValueError, match="duplicate"):
        _corpus(_sample(1), _sample(1))
    with pytest.raises(ValueError):
        _corpus(schema_version=0)


# --- load/save ------------------------------------------------------------------


def test_empty_file_loads_empty_corpus(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    corpus = load_records(path)
    assert len(corpus) == 0
    assert corpus.schema_version == 1


def test_empty_corpus_saves_empty_file(tmp_path):
    path = tmp_path / "out.jsonl"
    save_records(_corpus(), path)
    assert path.read_bytes() == b""


def test_three_lines_in_order(tmp_path):
    corpus = _corpus(_sample(1), _sample(2), _sample(3))
    path = tmp_path / "c.jsonl"
    save_records(corpus, path)
    assert path.read_text().count("\n") == 3
    assert [s.id for s in load_records(path).samples] == ["s1", "s2", "s3"]


def test_missing_ground_truth_names_line(tmp_path):
    lines = [
        json.dumps({"id": "a", "task_kind": "PlainDoc", "ground_truth": "ok"}),
        json.dumps({"id": "b", "task_kind": "PlainDoc"}),
    ]
    path = tmp_path / "bad.jsonl"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorpusFormatError, match="line 2") as exc:
        load_records(path)
    assert exc.value.line == 2


def test_malformed_json_names_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "task_kind": "PlainDoc", "ground_truth": "x"}\n{oops\n')
    with pytest.raises(CorpusFormatError, match="line 2"):
        load_records(path)


def test_duplicate_id_names_id(tmp_path):
    line = json.dumps({"id": "dup", "task_kind": "PlainDoc", "ground_truth": "x"})
    path = tmp_path / "dup.jsonl"
    path.write_text(line + "\n" + line + "\n")
    with pytest.raises(CorpusFormatError, match="dup"):
        load_records(path)


def test_unknown_top_level_field_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(
        json.dumps(
            {"id": "a", "task_kind": "PlainDoc", "ground_truth": "x", "extra": 1}
        )
        + "\n"
    )
    with pytest.raises(CorpusFormatError, match="extra"):
        load_records(path)


def test_cjk_round_trip_byte_identical(tmp_path):
    corpus = _corpus(
        _sample(1, "你好，世界。", lang="zh", meta={"来源": "测试"}),
        _sample(2, "newline\ninside", image_ref="img/002.png"),
    )
    path = tmp_path / "cjk.jsonl"
    save_records(corpus, path)
    first = path.read_bytes()
    assert load_records(path) == corpus
    save_records(load_records(path), path)
    assert path.read_bytes() == first


def test_schema_version_header_round_trip(tmp_path):
    corpus = _corpus(_sample(1), schema_version=3)
    path = tmp_path / "v3.jsonl"
    save_records(corpus, path)
    assert path.read_text().splitlines()[0] == '{"schema_version": 3}'
    assert load_records(path) == corpus


def test_unknown_meta_keys_preserved(tmp_path):
    corpus = _corpus(_sample(1, meta={"custom_key": "kept", "tile_grid": "2x1"}))
    path = tmp_path / "meta.jsonl"
    save_records(corpus, path)
    assert load_records(path).samples[0].meta == {"custom_key": "kept", "tile_grid": "2x1"}


@given(
    st.lists(
        st.tuples(TEXT, st.sampled_from(list(TaskKind)), st.sampled_from(["en", "zh", "other"]), META),
        max_size=20,
    )
)
@settings(max_examples=60, deadline=None)
def test_round_trip_property(rows):
    samples = tuple(
        Sample(id=f"id{i}", task_kind=kind, ground_truth=text, lang=lang, meta=meta)
        for i, (text, kind, lang, meta) in enumerate(rows)
    )
    corpus = Corpus(samples)
    text = dump_records(corpus)
    lines = text.split("\n")
    assert lines[-1] == "" and all(line for line in lines[:-1])
    reparsed = Corpus(
        tuple(
            Sample(
                id=obj["id"],
                task_kind=obj["task_kind"],
                ground_truth=obj["ground_truth"],
                prompt=obj["prompt"],
                lang=obj["lang"],
                image_ref=obj.get("image_ref"),
                meta=obj["meta"],
            )
            for obj in map(json.loads, lines[:-1])
        )
    )
    assert reparsed == corpus


# --- dedup ------------------------------------------------------------------------


def test_dedup_drops_identical():
    test = _corpus(_sample(1, "same text"))
    train = _corpus(Sample(id="t", task_kind=TaskKind.PLAIN_DOC, ground_truth="same text"))
    assert len(dedup_filter(test, train, 0.9)) == 0


def test_dedup_keeps_abcd_vs_abcf():
    # char edit distance 1 over max length 4 -> similarity 0.75 < 0.8
    test = _corpus(_sample(1, "abcd"))
    train = _corpus(Sample(id="t", task_kind=TaskKind.PLAIN_DOC, ground_truth="abcf"))
    assert len(dedup_filter(test, train, 0.8)) == 1
    assert len(dedup_filter(test, train, 0.75)) == 0


def test_dedup_empty_train_keeps_all():
    test = _corpus(_sample(1), _sample(2))
    assert dedup_filter(test, _corpus(), 0.5) == test


def test_dedup_threshold_monotone():
    test = _corpus(*[_sample(i, t) for i, t in enumerate(["abcd", "abzz", "qqqq"])])
    train = _corpus(Sample(id="t", task_kind=TaskKind.PLAIN_DOC, ground_truth="abcd"))
    previous: set[str] = set()
    for threshold in (0.0, 0.3, 0.5, 0.75, 0.9, 1.0):
        kept = {s.id for s in dedup_filter(test, train, threshold).samples}
        assert previous <= kept
        previous = kept


def test_dedup_rejects_bad_threshold():
    with pytest.raises(ValueError):
        dedup_filter(_corpus(), _corpus(), 1.5)


# --- stage mixing --------------------------------------------------------------------


def test_mix_80_percent_of_ten():
    previous = _corpus(*[_sample(i) for i in range(10)])
    new = _corpus(Sample(id="new1", task_kind=TaskKind.CHART, ground_truth="x"))
    mixed = mix_stages(previous, new, 0.8, seed=0)
    assert len(mixed) == 1 + 8
    assert mixed.samples[0].id == "new1"


def test_mix_ratio_zero_is_new_only():
    previous = _corpus(*[_sample(i) for i in range(5)])
    new = _corpus(Sample(id="n", task_kind=TaskKind.CHART, ground_truth="x"))
    assert mix_stages(previous, new, 0.0, seed=3) == new


def test_mix_deterministic():
    previous = _corpus(*[_sample(i) for i in range(30)])
    new = _corpus(Sample(id="n", task_kind=TaskKind.CHART, ground_truth="x"))
    assert mix_stages(previous, new, 0.5, seed=7) == mix_stages(previous, new, 0.5, seed=7)
    assert mix_stages(previous, new, 0.5, seed=7) != mix_stages(previous, new, 0.5, seed=8)


@given(st.integers(0, 40), st.floats(0, 1), st.integers(0, 2**31))
@settings(max_examples=60, deadline=None)
def test_mix_size_property(n_prev, ratio, seed):
    previous = _corpus(*[_sample(i) for i in range(n_prev)])
    new = _corpus(Sample(id="n", task_kind=TaskKind.CHART, ground_truth="x"))
    mixed = mix_stages(previous, new, ratio, seed)
    assert len(mixed) == 1 + int(ratio * n_prev + 1e-9)
