import json
import os

import numpy as np
import pytest

from genlang import io
from genlang.errors import InputError
from genlang.numerics import GridSpec, discretize_beta, BetaParams


def _write(path, text):
    path.write_text(text)
    return path


def test_elicitation_groups(tmp_path):
    p = _write(tmp_path / "e.csv", "participant_id,property,category,category_source,response_pct\n"
               "a,lays eggs,robin,typed,90\nb,lays eggs,lion,typed,0\n\na,lays eggs,robin,given,80\n")
    d = io.read_elicitation(p)
    np.testing.assert_array_equal(d.by_property["lays eggs"], [90, 0, 80])
    np.testing.assert_array_equal(d.by_referent[("robin", "lays eggs")], [90, 80])
    assert d.sources[("robin", "lays eggs")] == {"typed", "given"}
    assert d.participants == ["a", "b"]


@pytest.mark.parametrize("body,line,fragment", [
    ("a,x,c,s,50\nb,x,c,s,\n", 3, "empty 'response_pct'"),
    ("a,x,c,s,50\nb,x,c,s,abc\n", 3, "not a number"),
    ("a,x,c,s,150\n", 2, "outside [0, 100]"),
    ("a,x,c,s\n", 2, "expected 5 fields"),
])
def test_line_numbered_errors(tmp_path, body, line, fragment):
    p = _write(tmp_path / "bad.csv", ",".join(io.ELICITATION) + "\n" + body)
    with pytest.raises(InputError) as e:
        io.read_elicitation(p)
    assert f"bad.csv:{line}:" in str(e.value) and fragment in str(e.value)


def test_missing_column_and_aliases(tmp_path):
    p = _write(tmp_path / "e.csv", "workerid,property,category,category_source,pct\nw,x,c,s,10\n")
    with pytest.raises(InputError, match="missing column"):
        io.read_elicitation(p)
    d = io.read_elicitation(p, aliases={"workerid": "participant_id", "pct": "response_pct"})
    assert d.rows[0]["participant_id"] == "w"
    with pytest.raises(InputError, match="no such file"):
        io.read_elicitation(tmp_path / "nope.csv")
    with pytest.raises(InputError, match="empty file"):
        io.read_elicitation(_write(tmp_path / "empty.csv", ""))


def test_habituals(tmp_path):
    q1 = _write(tmp_path / "q1.csv", "participant_id,action,gender,numerator,denominator\n"
                "a,hikes,male,30,100\nb,hikes,male,5,0\n")
    q2 = _write(tmp_path / "q2.csv", "participant_id,action,gender,times,interval\na,hikes,male,3,5 years\n")
    with pytest.raises(InputError, match="q1.csv:3:"):
        io.read_habituals(q1, q2)
    _write(q1, "participant_id,action,gender,numerator,denominator\na,hikes,male,30,100\n")
    d = io.read_habituals(q1, q2)
    assert d.q1[("hikes", "male")][0] == pytest.approx(0.3)
    assert d.q2[("hikes", "male")][0] == 0.6
    _write(q2, "participant_id,action,gender,times,interval\na,hikes,male,3,fortnight\n")
    with pytest.raises(InputError, match="q2.csv:2:"):
        io.read_habituals(q1, q2)


def test_endorsements_and_world(tmp_path):
    p = _write(tmp_path / "end.csv", "item,category,property,n_agree,n_total,referent\n"
               "robins lay eggs,robin,lays eggs,9,10,0.5\nlions lay eggs,lion,lays eggs,1,10,\n")
    items = io.read_endorsements(p)
    assert items[0].referent == 0.5 and items[1].referent is None
    _write(p, "item,category,property,n_agree,n_total\nx,c,p,11,10\n")
    with pytest.raises(InputError, match="end.csv:2:"):
        io.read_endorsements(p)
    w = _write(tmp_path / "w.csv", "category,prior_prob,f\nA,0.5,0.9\nB,0.5,0.1\n")
    world = io.read_world(w)
    assert len(world.names) == 2


def test_free_production(tmp_path):
    p = _write(tmp_path / "fp.csv", "participant_id,property,response\n1,carries malaria,Mosquitos\n"
               "2,carries malaria,tick\n")
    assert io.read_free_production(p) == {"carries malaria": ["Mosquitos", "tick"]}


def test_grid_round_trip(tmp_path):
    d = discretize_beta(BetaParams(0.3, 7), GridSpec.unit(50))
    path = io.write_grid_distribution(tmp_path / "sub" / "g.csv", d)
    back = io.read_grid_distribution(path)
    np.testing.assert_array_equal(back.support, d.support)
    np.testing.assert_allclose(back.mass, d.mass, rtol=1e-15)


def test_atomic_write_leaves_old_file_on_failure(tmp_path):
    target = tmp_path / "t.csv"
    io.write_table(target, ("a",), [(1,)])

    def bad_rows():
        yield (2,)
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        io.write_table(target, ("a",), bad_rows())
    assert target.read_text() == "a\n1\n"
    assert os.listdir(tmp_path) == ["t.csv"]


def test_json_and_predictions(tmp_path):
    path = io.write_json(tmp_path / "s.json", {"b": np.float64(0.5), "a": np.arange(2)})
    assert json.loads(path.read_text()) == {"a": [0, 1], "b": 0.5}
    assert path.read_text().index('"a"') < path.read_text().index('"b"')
    io.write_predictions(tmp_path / "p.csv", ["x"], [0.1], [0.2])
    assert (tmp_path / "p.csv").read_text() == "item,human,model,lo,hi\nx,0.1,0.2,,\n"
