import pytest
from hypothesis import given
from hypothesis import strategies as st

from tornado_damage.errors import MissingCpiMonth, SchemaMismatch
from tornado_damage.inflation import CpiSeries, adjust_inflation, load_cpi


@pytest.fixture
def cpi():
    return CpiSeries(values={(2010, 6): 125.0, (2018, 1): 250.0, (2015, 3): 200.0})


def test_reference_month_is_identity(cpi):
    assert adjust_inflation(1234.5, (2018, 1), cpi) == pytest.approx(1234.5)


def test_ratio_arithmetic(cpi):
    assert adjust_inflation(100.0, (2010, 6), cpi) == pytest.approx(200.0)


def test_zero_amount(cpi):
    assert adjust_inflation(0.0, (2015, 3), cpi) == 0.0


def test_missing_month(cpi):
    with pytest.raises(MissingCpiMonth):
        adjust_inflation(10.0, (1999, 9), cpi)
    with pytest.raises(MissingCpiMonth):
        adjust_inflation(10.0, (2015, 4), CpiSeries(values={(2015, 4): 1.0}))  # no 2018-01


def test_negative_amount_rejected(cpi):
    with pytest.raises(ValueError):
        adjust_inflation(-1.0, (2018, 1), cpi)


@given(amount=st.floats(0, 1e9), scale=st.floats(0.1, 10))
def test_linear_in_amount_multiplicative_in_ratio(amount, scale):
    cpi = CpiSeries(values={(2000, 1): 100.0 * scale, (2018, 1): 100.0})
    adjusted = adjust_inflation(amount, (2000, 1), cpi)
    assert adjusted == pytest.approx(amount / scale, rel=1e-12)
    doubled = adjust_inflation(2.0 * amount, (2000, 1), cpi)
    assert doubled == pytest.approx(2.0 * adjusted, rel=1e-12)


def test_load_cpi_file(tmp_path):
    path = tmp_path / "cpi.csv"
    path.write_text("month,index\n2018-01,250.0\n2010-06,125.0\n")
    series = load_cpi(path)
    assert series.get(2018, 1) == 250.0
    assert series.get(2010, 6) == 125.0


def test_load_cpi_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("2018-01,250.0,extra\n")
    with pytest.raises(SchemaMismatch):
        load_cpi(path)
