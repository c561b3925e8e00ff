import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from airban.errors import CorpusFormatError, InputError
from airban.ingest import (
    N_MONTHS,
    AirportRef,
    MonthlyObservation,
    RouteCorpus,
    RouteKey,
    RouteSeries,
    SyntheticProfile,
    filter_frequent,
    generate_synthetic_corpus,
    index_month,
    load_synthetic_profile,
    month_index,
    parse_airports,
    parse_route_corpus,
    passenger_share,
    write_route_corpus,
)

HEADER = "origin,dest,year,month,passengers,avg_fare\n"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_month_index_roundtrip():
    assert month_index(2010, 1) == 0
    assert month_index(2019, 10) == N_MONTHS - 1
    for i in range(N_MONTHS):
        assert month_index(*index_month(i)) == i


def test_parse_small_corpus(tmp_path):
    series = write(tmp_path / "s.csv", HEADER + "FCO,JFK,2018,7,1200,540.5\nFCO,JFK,2018,8,1300,\nAMS,FCO,2010,1,10,99\n")
    airports = write(tmp_path / "a.csv", "code,country,name\nFCO,IT,Rome\nJFK,US,New York\nAMS,NL,\n")
    corpus = parse_route_corpus(series, airports)
    assert [str(k) for k in corpus.keys] == ["AMS-FCO", "FCO-JFK"]
    s = corpus.series(RouteKey("FCO", "JFK"))
    assert [(o.year, o.month, o.passengers, o.avg_fare) for o in s.observations] == [
        (2018, 7, 1200, 540.5),
        (2018, 8, 1300, None),
    ]
    assert s.max_monthly_passengers == 1300
    assert corpus.airports["FCO"].country == "IT"
    assert not corpus.unresolved.any()


@pytest.mark.parametrize(
    "row, line, fragment",
    [
        ("FCO,JFK,2018,7,-3,1\n", 3, "passengers"),
        ("FCO,JFK,2019,11,3,1\n", 3, "outside"),
        ("FCO,JFK,2009,12,3,1\n", 3, "outside"),
        ("FCO,JFK,2018,13,3,1\n", 3, "outside"),
        ("fco,JFK,2018,7,3,1\n", 3, "origin"),
        ("FCO,FCO,2018,7,3,1\n", 3, "origin equals dest"),
        ("FCO,JFK,2018,7,,1\n", 3, "passengers missing"),
        ("FCO,JFK,2018,7,3,abc\n", 3, "avg_fare"),
        ("FCO,JFK,2018,6,3,1\n", 3, "duplicate"),
    ],
)
def test_bad_rows_report_line(tmp_path, row, line, fragment):
    path = write(tmp_path / "s.csv", HEADER + "FCO,JFK,2018,6,1,1\n" + row)
    with pytest.raises(CorpusFormatError) as info:
        parse_route_corpus(path)
    assert info.value.line == line
    assert fragment in str(info.value)
    assert f"s.csv:{line}:" in str(info.value)


def test_bad_header(tmp_path):
    with pytest.raises(CorpusFormatError):
        parse_route_corpus(write(tmp_path / "s.csv", "a,b\n1,2\n"))


def test_missing_file_is_input_error(tmp_path):
    with pytest.raises(InputError, match="nope.csv"):
        parse_route_corpus(tmp_path / "nope.csv")


def test_bad_airport_table(tmp_path):
    with pytest.raises(CorpusFormatError, match="country"):
        parse_airports(write(tmp_path / "a.csv", "code,country,name\nFCO,ITA,Rome\n"))
    with pytest.raises(CorpusFormatError, match="duplicate"):
        parse_airports(write(tmp_path / "a.csv", "code,country,name\nFCO,IT,Rome\nFCO,IT,x\n"))


def test_unresolved_airports_flagged(tmp_path):
    series = write(tmp_path / "s.csv", HEADER + "FCO,XYZ,2018,7,1,\n")
    airports = write(tmp_path / "a.csv", "code,country,name\nFCO,IT,Rome\n")
    assert parse_route_corpus(series, airports).unresolved.tolist() == [True]


def test_empty_corpus(tmp_path):
    corpus = parse_route_corpus(write(tmp_path / "s.csv", HEADER))
    assert len(corpus) == 0
    assert corpus.passengers.shape == (0, N_MONTHS)
    assert len(filter_frequent(corpus, 50)) == 0


def test_roundtrip(tmp_path):
    corpus = generate_synthetic_corpus(3, 40)
    write_route_corpus(corpus, tmp_path / "r.csv", tmp_path / "a.csv")
    assert parse_route_corpus(tmp_path / "r.csv", tmp_path / "a.csv") == corpus


def test_arrays_are_read_only():
    corpus = generate_synthetic_corpus(1, 5)
    with pytest.raises(ValueError):
        corpus.passengers[0, 0] = 1


def _corpus(peaks):
    series = [
        RouteSeries(RouteKey("AAA", code), (MonthlyObservation(2018, 1, p), MonthlyObservation(2018, 2, p // 2)))
        for code, p in zip(["BBB", "CCC", "DDD", "EEE"], peaks)
    ]
    return RouteCorpus.from_series(series)


def test_filter_threshold_is_inclusive():
    corpus = _corpus([49, 50, 51, 0])
    kept = filter_frequent(corpus, 50)
    assert [k.destination for k in kept.keys] == ["CCC", "DDD"]
    assert len(filter_frequent(corpus, 0)) == 4


def test_passenger_share():
    corpus = _corpus([100, 300, 0, 0])
    kept = filter_frequent(corpus, 200)
    assert passenger_share(corpus, kept, 2018) == pytest.approx(450 / 600)
    assert passenger_share(corpus, kept, 2015) == 1.0


@settings(max_examples=40, deadline=None)
@given(peaks=st.lists(st.integers(0, 10_000), min_size=1, max_size=4), t1=st.integers(0, 10_000),
       t2=st.integers(0, 10_000))
def test_filter_is_monotone(peaks, t1, t2):
    corpus = _corpus(peaks)
    lo, hi = sorted((t1, t2))
    small = set(filter_frequent(corpus, hi).keys)
    large = set(filter_frequent(corpus, lo).keys)
    assert small <= large
    assert all(corpus.series(k).max_monthly_passengers >= hi for k in small)


def test_synthetic_corpus_deterministic():
    a = generate_synthetic_corpus(7, 50)
    b = generate_synthetic_corpus(7, 50)
    c = generate_synthetic_corpus(8, 50)
    assert a == b and a != c
    assert len(a) == 50
    assert not np.isnan(a.passengers).any()
    assert all(code in a.airports for code in np.concatenate([a.origins, a.destinations]))


def test_synthetic_mean_follows_profile():
    profile = SyntheticProfile(base=5000.0, growth=0.0, season=(1.0,) * 12)
    corpus = generate_synthetic_corpus(0, 400, profile)
    assert corpus.passengers.mean() == pytest.approx(5000.0, rel=0.01)


def test_synthetic_profile_file(tmp_path):
    path = write(tmp_path / "p.cfg", "base = 200\ngrowth = 0.1\n")
    profile = load_synthetic_profile(path)
    assert profile.base == 200 and profile.growth == 0.1
    assert profile.mean_at(2011, 1) == pytest.approx(profile.means()[12])


def test_route_key_rejects_self_loop():
    with pytest.raises(ValueError):
        RouteKey("AAA", "AAA")


def test_airport_ref_validates_country():
    with pytest.raises(ValueError):
        AirportRef("AAA", "ita")
