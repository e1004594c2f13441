import csv

import numpy as np
import pytest

from powertail.data import (
    Dataset,
    SyntheticSpec,
    ccdf_series,
    export_ccdf,
    generate,
    load,
    save,
    summary_stats,
)
from powertail.errors import InputError
from powertail.fitting import fit_fixed_xmin


def test_plain_file_with_comments(tmp_path):
    path = tmp_path / "wealth.txt"
    path.write_text("# net worth, billions\n3.5\n\n1.2\n  7e1  \n# trailing\n")
    ds = load(path, year=2003)
    assert ds.values.tolist() == [1.2, 3.5, 70.0]
    assert ds.label == "wealth" and ds.year == 2003 and ds.source == str(path)
    assert not ds.values.flags.writeable


def test_bad_lines_are_all_reported(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1.0\nabc\n-2\n0\nnan\n5\n")
    with pytest.raises(InputError) as info:
        load(path)
    problems = info.value.problems
    assert len(problems) == 4
    assert [p.split(":")[0] for p in problems] == ["line 2", "line 3", "line 4", "line 5"]


def test_csv_by_name_and_index(tmp_path):
    path = tmp_path / "list.csv"
    path.write_text("name,worth\nA,2.5\nB,1.5\n\nC,9\n")
    assert load(path, "csv", "worth").values.tolist() == [1.5, 2.5, 9.0]
    assert load(path, "csv", 1).values.tolist() == [1.5, 2.5, 9.0]
    with pytest.raises(InputError):
        load(path, "csv")  # ambiguous without a column
    with pytest.raises(InputError):
        load(path, "csv", "missing")
    with pytest.raises(InputError):
        load(path, "csv", "name")


def test_missing_and_empty_inputs(tmp_path):
    with pytest.raises(InputError):
        load(tmp_path / "nope.txt")
    empty = tmp_path / "empty.txt"
    empty.write_text("# only a comment\n")
    with pytest.raises(InputError):
        load(empty)
    with pytest.raises(InputError):
        load(empty, fmt="xlsx")


def test_dataset_validation():
    assert Dataset([3.0, 1.0, 2.0]).values.tolist() == [1.0, 2.0, 3.0]
    for bad in ([], [1.0, -1.0], [1.0, np.inf]):
        with pytest.raises(InputError):
            Dataset(bad)


def test_save_round_trips(tmp_path):
    ds = generate(SyntheticSpec("lognormal", {"mu": 0.3, "sigma": 1.1, "x_min": 0.5}, 200, seed=4))
    save(ds, tmp_path / "out.txt")
    assert np.array_equal(load(tmp_path / "out.txt").values, ds.values)


def test_generate_is_reproducible_and_has_body():
    spec = SyntheticSpec("power_law", {"alpha": 2.5, "x_min": 3.0}, 1000, seed=1, body=(0.5, 3.0, 1000))
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.values, b.values)
    assert len(a) == 2000
    assert np.sum(a.values < 3.0) == 1000
    with pytest.raises(InputError):
        generate(SyntheticSpec("power_law", {"alpha": 0.5, "x_min": 1.0}, 10, seed=0))
    with pytest.raises(InputError):
        generate(SyntheticSpec("power_law", {"alpha": 2.0, "x_min": 1.0}, 0, seed=0))


def test_ccdf_series_with_ties():
    series = ccdf_series([1.0, 2.0, 2.0, 4.0])
    assert series.x.tolist() == [1.0, 2.0, 4.0]
    assert series.fraction.tolist() == [1.0, 0.75, 0.25]
    assert series.fit is None


def test_ccdf_overlay_restricted_to_tail(tmp_path):
    x = np.array([0.5, 0.8, 1.0, 2.0, 4.0, 8.0])
    fit = fit_fixed_xmin(x, 1.0)
    series = export_ccdf(x, fit, tmp_path / "ccdf.csv")
    assert series.x[0] == 1.0 and series.fraction[0] == 1.0
    assert series.fit[0] == 1.0
    with open(tmp_path / "ccdf.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "ccdf_empirical", "ccdf_fit"]
    assert len(rows) == 5
    assert float(rows[2][1]) == 0.75


def test_summary_stats():
    stats = summary_stats(Dataset([1.0, 2.0, 6.0]))
    assert stats == {"n": 3, "min": 1.0, "max": 6.0, "mean": 3.0, "median": 2.0}
