import numpy as np
import pandas as pd
import pytest

from qaoa_conc import optimize, reports
from qaoa_conc.errors import ParameterError
from qaoa_conc.qaoa_core import AngleSchedule
from qaoa_conc.streams import rng_stream


def test_angle_file(tmp_path):
    angles = AngleSchedule.random(3, rng_stream(1, 'angles'))
    path = reports.write_angles(tmp_path / 'angles.json', angles)
    assert reports.read_angles(path) == angles


def test_angles_from_optimize_report(prism):
    result = optimize.multistart(prism, 1, 2, optimize.MAXIMIZE, seed=1)
    doc = reports.document('optimize', {'p': 1}, {'root': 1}, result.to_dict())
    assert reports.angles_from_doc(doc) == result.best_angles


def test_no_angles_in_document():
    with pytest.raises(ParameterError):
        reports.angles_from_doc({'result': {'value': 1.0}})


def test_structured_text_is_stable(tmp_path):
    doc = {'b': np.float64(0.1) + np.float64(0.2), 'a': np.arange(3), 'c': np.int64(4)}
    first = reports.write_structured(tmp_path / 'one.json', doc).read_bytes()
    second = reports.write_structured(tmp_path / 'two.json', doc).read_bytes()
    assert first == second
    back = reports.read_structured(tmp_path / 'one.json')
    assert back['b'] == 0.1 + 0.2
    assert back['a'] == [0, 1, 2]
    assert list(back) == ['a', 'b', 'c']


def test_csv_with_header(tmp_path):
    frame = pd.DataFrame({'p': [2, 3], 'mean': [14.69123, 15.1]})
    path = reports.write_csv(tmp_path / 't.csv', frame, header={'seeds': {'root': 5}})
    lines = path.read_text().splitlines()
    assert lines[0] == '# seeds={"root": 5}'
    assert lines[2] == '2,14.6912'
    back = pd.read_csv(path, comment='#')
    assert list(back['p']) == [2, 3]
