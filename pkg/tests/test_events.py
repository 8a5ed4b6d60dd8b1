import pytest

from tornado_damage.errors import EmptyFile, SchemaMismatch
from tornado_damage.events import ingest_events, write_reject_report

from conftest import make_events, write_events_csv

HEADER = "event_id,begin_lat,begin_lon,begin_datetime,duration_s,length,width,damage_usd,narrative\n"


def test_well_formed_fixture(tmp_path):
    path = tmp_path / "events.csv"
    write_events_csv(make_events(3), path)
    events, rejects = ingest_events(path)
    assert len(events) == 3
    assert rejects == []
    assert events[0].year == events[0].begin_time.year


def test_lat_out_of_range_rejected(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text(
        HEADER
        + "a,999,-98.0,2005-05-01T14:30,120,1.0,50,1000,text\n"
        + "b,35.0,-98.0,2005-05-01T14:30,120,1.0,50,1000,text\n"
    )
    events, rejects = ingest_events(path)
    assert len(events) == 1
    assert len(rejects) == 1
    assert rejects[0].reason == "lat out of range"
    assert rejects[0].event_id == "a"


def test_various_reject_reasons(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text(
        HEADER
        + "a,35,-999,2005-05-01T14:30,120,1,50,1000,t\n"
        + "b,35,-98,not-a-date,120,1,50,1000,t\n"
        + "c,35,-98,2005-05-01T14:30,120,1,50,-5,t\n"
        + "d,35,-98,1995-05-01T14:30,120,1,50,5,t\n"  # before study window
        + "e,35,-98,2005-05-01T14:30,120,1,50,xyz,t\n"
    )
    events, rejects = ingest_events(path)
    assert events == []
    reasons = [r.reason for r in rejects]
    assert "lon out of range" in reasons
    assert any("bad datetime" in r for r in reasons)
    assert "negative damage" in reasons
    assert any("study window" in r for r in reasons)
    assert any("non-numeric" in r for r in reasons)


def test_schema_mismatch(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("foo,bar\n1,2\n")
    with pytest.raises(SchemaMismatch):
        ingest_events(path)


def test_empty_file(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text("")
    with pytest.raises(EmptyFile):
        ingest_events(path)
    path.write_text(HEADER)
    with pytest.raises(EmptyFile):
        ingest_events(path)


def test_large_extract_counts(tmp_path):
    # a full-archive-sized file ingests cleanly; downstream drops are accounted separately
    path = tmp_path / "events.csv"
    with path.open("w") as fh:
        fh.write(HEADER)
        for i in range(22_123):
            fh.write(f"ev{i},35.0,-98.0,2005-05-01T14:30,120,1.0,50,1000,text\n")
    events, rejects = ingest_events(path)
    assert len(events) == 22_123
    assert rejects == []


def test_reject_report_written(tmp_path):
    path = tmp_path / "events.csv"
    path.write_text(HEADER + "a,999,-98.0,2005-05-01T14:30,120,1.0,50,1000,text\n")
    _, rejects = ingest_events(path)
    out = tmp_path / "rejects.csv"
    write_reject_report(rejects, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "line,event_id,reason"
    assert lines[1].startswith("2,a,")
