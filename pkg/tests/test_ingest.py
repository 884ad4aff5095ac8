import math
from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risk_metrics import (
    AlignmentError,
    DomainError,
    EmptyInputError,
    InsufficientDataError,
    ParseError,
    ReturnSeries,
    RollingWindowConfig,
    SeriesFile,
    align_risk_free,
    annual_to_per_period,
    parse_series,
    rolling_windows,
    serialize_series,
    to_return_series,
)
from risk_metrics.ingest import per_period_to_annual, window_count


def dated(values, start=date(2020, 1, 1)):
    return ReturnSeries(tuple(values), dates=tuple(start + timedelta(days=i) for i in range(len(values))))


class TestParse:
    def test_prices(self):
        sf = parse_series(b"date,value\n2020-01-02,100\n2020-01-03,101\n", "prices")
        assert len(sf) == 2
        assert sf.rows[0] == (date(2020, 1, 2), 100.0)

    def test_single_return_row(self):
        sf = parse_series("date,value\n2020-01-02,0.01\n", "returns")
        assert sf.values == (0.01,)
        with pytest.raises(InsufficientDataError):
            from risk_metrics import moments

            moments(to_return_series(sf))

    def test_crlf_and_scientific(self):
        sf = parse_series(b"date,value\r\n2020-01-02,1e-3\r\n2020-01-03,-2.5E-2\r\n", "returns")
        assert sf.values == (0.001, -0.025)

    def test_decreasing_dates_names_line(self):
        with pytest.raises(ParseError) as info:
            parse_series("date,value\n2020-01-03,0.01\n2020-01-02,0.02\n", "returns")
        assert info.value.line == 3
        assert "line 3" in str(info.value)

    def test_duplicate_dates(self):
        with pytest.raises(ParseError):
            parse_series("date,value\n2020-01-03,0.01\n2020-01-03,0.02\n", "returns")

    @pytest.mark.parametrize(
        "body,line",
        [
            ("2020-01-02,\n", 2),
            ("2020-01-02,0.01\n\n2020-01-04,0.01\n", 3),
            ("2020-01-02,1,5\n", 2),
            ("2020-01-02,0,5\n", 2),
            ("2020-01-02,nan\n", 2),
            ("2020-01-02,inf\n", 2),
            ("2020-01-02,1_000\n", 2),
            ("02/01/2020,0.01\n", 2),
            ("2020-02-30,0.01\n", 2),
            ("2020-01-02,0.01\n2020-01-03,abc\n", 3),
        ],
    )
    def test_malformed(self, body, line):
        with pytest.raises(ParseError) as info:
            parse_series("date,value\n" + body, "returns")
        assert info.value.line == line

    def test_header_required(self):
        with pytest.raises(ParseError) as info:
            parse_series("day,price\n2020-01-02,1\n", "prices")
        assert info.value.line == 1

    @pytest.mark.parametrize("data", [b"", "date,value\n", "date,value"])
    def test_empty(self, data):
        with pytest.raises(EmptyInputError):
            parse_series(data, "returns")

    def test_not_utf8(self):
        with pytest.raises(ParseError):
            parse_series(b"date,value\n2020-01-02,\xff\n", "returns")


@st.composite
def series_files(draw):
    n = draw(st.integers(min_value=1, max_value=40))
    gaps = draw(st.lists(st.integers(min_value=1, max_value=5), min_size=n, max_size=n))
    values = draw(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=n, max_size=n))
    d = date(2000, 1, 1)
    rows = []
    for gap, v in zip(gaps, values):
        d += timedelta(days=gap)
        rows.append((d, v))
    return SeriesFile(draw(st.sampled_from(["returns", "prices"])), tuple(rows))


@given(series_files())
@settings(max_examples=300)
def test_serialize_round_trip(sf):
    text = serialize_series(sf)
    back = parse_series(text, sf.format)
    assert back == sf
    assert serialize_series(back) == text


def test_price_file_to_returns():
    sf = parse_series("date,value\n2020-01-02,100\n2020-01-03,800\n2020-01-06,400\n", "prices")
    s = to_return_series(sf)
    assert s.returns == (7.0, -0.5)
    assert s.dates == (date(2020, 1, 3), date(2020, 1, 6))


class TestRiskFree:
    def test_zero(self):
        rf = align_risk_free(dated([0.01, 0.02]), 0.0)
        assert rf.returns == (0.0, 0.0)

    def test_geometric_inverse(self):
        annual = 1.01**252 - 1
        rf = align_risk_free(dated([0.01, 0.02]), annual)
        assert rf.returns == pytest.approx((0.01, 0.01), rel=1e-12)

    def test_arithmetic(self):
        assert annual_to_per_period(0.0252, 252, arithmetic=True) == pytest.approx(0.0001)

    @given(st.floats(min_value=-0.5, max_value=2.0), st.sampled_from([1, 12, 52, 252, 365]))
    @settings(max_examples=300)
    def test_round_trip(self, annual, ppy):
        back = per_period_to_annual(annual_to_per_period(annual, ppy), ppy)
        assert back == pytest.approx(annual, rel=1e-12, abs=1e-15)

    def test_file_join(self):
        s = dated([0.01, 0.02, 0.03])
        rf_file = SeriesFile("returns", tuple((d, 0.0001 * i) for i, d in enumerate((date(2019, 12, 31),) + s.dates)))
        rf = align_risk_free(s, rf_file)
        assert rf.returns == pytest.approx((0.0001, 0.0002, 0.0003))

    def test_file_missing_date(self):
        s = dated([0.01, 0.02, 0.03])
        rf_file = SeriesFile("returns", ((s.dates[0], 0.0), (s.dates[2], 0.0)))
        with pytest.raises(AlignmentError, match=s.dates[1].isoformat()):
            align_risk_free(s, rf_file)

    def test_annual_total_loss(self):
        with pytest.raises(DomainError):
            annual_to_per_period(-1.0, 252)


class TestRolling:
    def test_exact_window(self):
        s = dated([0.001] * 252)
        wins = rolling_windows(s, RollingWindowConfig(252))
        assert len(wins) == 1
        assert wins[0][0] == s.dates[-1]

    def test_three_windows(self):
        s = dated([0.001 * i for i in range(254)])
        wins = rolling_windows(s, RollingWindowConfig(252, 1))
        assert len(wins) == 3
        assert wins[2][1].returns == s.returns[2:]

    def test_too_short(self):
        with pytest.raises(InsufficientDataError):
            rolling_windows(dated([0.0] * 100), RollingWindowConfig(252))

    def test_undated_ends_are_indices(self):
        wins = rolling_windows(ReturnSeries((0.0,) * 5), RollingWindowConfig(3, 2))
        assert [end for end, _ in wins] == [2, 4]

    def test_config_invariants(self):
        with pytest.raises(DomainError):
            RollingWindowConfig(1)
        with pytest.raises(DomainError):
            RollingWindowConfig(5, 0)

    @given(st.data())
    @settings(max_examples=300)
    def test_count_formula(self, data):
        window = data.draw(st.integers(min_value=2, max_value=60))
        length = data.draw(st.integers(min_value=window, max_value=200))
        step = data.draw(st.integers(min_value=1, max_value=30))
        cfg = RollingWindowConfig(window, step)
        wins = rolling_windows(ReturnSeries((0.0,) * length), cfg)
        assert len(wins) == (length - window) // step + 1 == window_count(length, cfg)
        assert all(len(w) == window for _, w in wins)
