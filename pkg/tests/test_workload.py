import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icn_cache_lab.analysis import loglog_slope, popularity_histogram
from icn_cache_lab.experiments import build_workload, chunked_stream
from icn_cache_lab.workload import (
    KB,
    KBPS,
    TRACE_PROFILES,
    ChunkifySpec,
    PatternSpec,
    RequestStream,
    TraceFormatError,
    ZipfSpec,
    chunk_counts,
    chunkify,
    chunks_per_second,
    load_trace,
    pattern_stream,
    profile_stream,
    save_trace,
    split_chunk_id,
    superimpose,
    trace_profile_stream,
    zipf_pmf,
    zipf_stream,
)


def test_zipf_pmf_uniform_at_zero():
    assert np.allclose(zipf_pmf(7, 0.0), 1 / 7)


def test_zipf_pmf_harmonic():
    h = 25 / 12
    assert np.allclose(zipf_pmf(4, 1.0), [1 / h, 0.5 / h, (1 / 3) / h, 0.25 / h])
    assert np.allclose(zipf_pmf(4, 1.0), [0.48, 0.24, 0.16, 0.12])


def test_zipf_rejects_empty_catalogue():
    with pytest.raises(ValueError):
        zipf_stream(ZipfSpec(0, 1.0, 10, 1))


def test_zipf_deterministic():
    a = zipf_stream(ZipfSpec(100, 0.9, 1000, 5))
    b = zipf_stream(ZipfSpec(100, 0.9, 1000, 5))
    c = zipf_stream(ZipfSpec(100, 0.9, 1000, 6))
    assert np.array_equal(a.chunks, b.chunks)
    assert not np.array_equal(a.chunks, c.chunks)


def test_zipf_rank_one_within_three_sigma():
    n = 200_000
    s = zipf_stream(ZipfSpec(1000, 1.0, n, 11))
    p1 = zipf_pmf(1000, 1.0)[0]
    k = int(np.count_nonzero(s.chunks == 1))
    assert abs(k - n * p1) <= 3 * math.sqrt(n * p1 * (1 - p1))


def test_zipf_slope_near_minus_alpha():
    s = zipf_stream(ZipfSpec(10_000, 1.0, 1_000_000, 3))
    _, counts = popularity_histogram(s)
    assert abs(loglog_slope(counts, max_rank=1000) + 1.0) <= 0.05


def test_poisson_arrivals_increase():
    s = zipf_stream(ZipfSpec(10, 1.0, 100, 1, interarrival=2.0, arrivals="poisson"))
    assert np.all(np.diff(s.times) > 0)


@pytest.mark.parametrize(
    "bitrate,chunk,rate",
    [
        (600, 1.5, 50.0),
        (600, 15, 5.0),
        (600, 60, 1.25),
        (1200, 1.5, 100.0),
        (1200, 15, 10.0),
        (1200, 60, 2.5),
    ],
)
def test_table_chunk_rates(bitrate, chunk, rate):
    assert chunks_per_second(bitrate * KBPS, int(chunk * KB)) == rate


def test_chunkify_single_chunk_content():
    content = RequestStream([9], [0.0], [60 * KB])
    out = chunkify(content, ChunkifySpec(60 * KB, 1200 * KBPS))
    assert len(out) == 1
    assert split_chunk_id(int(out.chunks[0])) == (9, 0)


def test_chunkify_paces_chunks():
    content = RequestStream([3], [10.0], [45 * KB])
    out = chunkify(content, ChunkifySpec(15 * KB, 600 * KBPS))
    assert out.times.tolist() == [10.0, 10.2, 10.4]
    assert [split_chunk_id(x)[1] for x in out.ids()] == [0, 1, 2]


def test_chunkify_rejects_zero_chunk_size():
    with pytest.raises(ValueError):
        chunkify(RequestStream([1]), ChunkifySpec(0))


@settings(max_examples=50, deadline=None)
@given(
    sizes=st.lists(st.integers(1, 200_000), min_size=1, max_size=30),
    chunk=st.sampled_from([1500, 15000, 60000]),
)
def test_chunkify_conserves_volume(sizes, chunk):
    content = RequestStream(np.arange(len(sizes)), np.arange(len(sizes), dtype=float), sizes)
    out = chunkify(content, ChunkifySpec(chunk))
    assert len(out) == sum(-(-s // chunk) for s in sizes)
    assert np.all(np.diff(out.times) >= 0)


def test_chunk_counts_ceiling():
    assert chunk_counts(np.array([1, 15000, 15001]), 15000).tolist() == [1, 1, 2]


def test_superimpose_identity_and_ties():
    s = RequestStream([5, 6, 7], [0.0, 1.0, 2.0])
    assert superimpose([s]).ids() == [5, 6, 7]
    a = RequestStream([1], [3.0])
    b = RequestStream([2], [3.0])
    assert superimpose([b, a]).ids() == [2, 1]
    assert superimpose([a, b]).times.tolist() == [0, 1]


def test_superimpose_keeps_session_order():
    rng = np.random.default_rng(0)
    sessions = []
    for k in range(100):
        start = float(rng.uniform(0, 50))
        n = int(rng.integers(1, 20))
        sessions.append(RequestStream(k * 1000 + np.arange(n), start + 0.2 * np.arange(n)))
    merged = superimpose(sessions).ids()
    assert len(merged) == sum(len(s) for s in sessions)
    for k, s in enumerate(sessions):
        assert [x for x in merged if x // 1000 == k] == s.ids()


def test_patterns():
    assert pattern_stream(PatternSpec("scan", length=5)).ids() == [1, 2, 3, 4, 5]
    assert pattern_stream(PatternSpec("loop", period=3, reps=2)).ids() == [1, 2, 3, 1, 2, 3]
    burst = pattern_stream(PatternSpec("correlated", set_size=2, burst_length=3, bursts=2)).ids()
    assert burst == [1, 2, 1, 3, 4, 3]
    fickle = pattern_stream(PatternSpec("fickle", phases=3, phase_length=50, alphabet=10, rotation=0.5, seed=1))
    assert len(fickle) == 150
    assert len(set(fickle.ids())) > 10
    with pytest.raises(ValueError):
        pattern_stream(PatternSpec("zigzag"))


def test_trace_roundtrip(tmp_path):
    s = zipf_stream(ZipfSpec(1000, 0.8, 10_000, 2, arrivals="poisson"))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    save_trace(s, p1)
    loaded = load_trace(p1)
    assert loaded.ids() == s.ids()
    assert loaded.times.tolist() == s.times.tolist()
    save_trace(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_trace_with_sizes_roundtrip(tmp_path):
    s = RequestStream([1, 2], [0, 5], [100, 200])
    save_trace(s, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text() == "# time,content_id,size_bytes\n0,1,100\n5,2,200\n"
    assert load_trace(tmp_path / "t.csv").sizes.tolist() == [100, 200]


def test_empty_trace(tmp_path):
    (tmp_path / "e.csv").write_text("")
    assert len(load_trace(tmp_path / "e.csv")) == 0


@pytest.mark.parametrize(
    "body,line",
    [("0,1\nxx,2\n", 2), ("0,1\n1\n", 2), ("5,1\n3,2\n", 2), ("0,1,3\n1,2\n", 2)],
)
def test_trace_errors_name_the_line(tmp_path, body, line):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(TraceFormatError) as exc:
        load_trace(path)
    assert exc.value.line == line


def test_profile_stream_exact_counts():
    s = profile_stream(1000, 300, 50, seed=4)
    ids, counts = popularity_histogram(s)
    assert len(s) == 1000
    assert len(ids) == 300
    assert int(np.count_nonzero(counts >= 2)) == 50


@pytest.mark.parametrize("row", sorted(TRACE_PROFILES))
def test_trace_profile_ratios(row):
    total, unique, repeated = TRACE_PROFILES[row]
    s = trace_profile_stream(row, 1e-3, seed=1)
    ids, counts = popularity_histogram(s)
    u, r = len(ids), int(np.count_nonzero(counts >= 2))
    assert abs(u / len(s) - unique / total) <= 0.1 * unique / total
    assert abs(r / u - repeated / unique) <= 0.1 * repeated / unique


def test_chunked_stream_uses_chunk_ids():
    s = chunked_stream(50, 1.2, 20, 1)
    assert len(s) == 20 * 40
    assert all(split_chunk_id(x)[1] < 40 for x in s.ids())


def test_build_workload_rejects_unknown_keys():
    with pytest.raises(ValueError):
        build_workload({"kind": "zipf", "contents": 5, "alpha": 1, "requests": 5, "seed": 1, "zeta": 2})
    with pytest.raises(ValueError):
        build_workload({"kind": "weird"})
    s = build_workload({"kind": "pattern", "pattern": "loop", "period": 2, "reps": 2})
    assert s.ids() == [1, 2, 1, 2]
