from fractions import Fraction

from hypothesis import given, strategies as st

from chacon_lab.report import Report, jsonable
from chacon_lab.triadic import Triadic

reports = st.builds(
    lambda c, f, w, n: Report("r", c + f, f, [{"j": x} for x in w], {"n": n}),
    st.integers(0, 50), st.integers(0, 5), st.lists(st.integers(0, 30), max_size=25), st.integers(1, 3),
)


@given(reports, reports, reports)
def test_merge_is_associative_and_commutative(a, b, c):
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.to_json() == right.to_json()
    assert a.merge(b).to_json() == b.merge(a).to_json()


def test_record_and_json():
    r = Report("x")
    r.record(True)
    r.record(False, {"at": Fraction(1, 3)})
    assert not r.ok and r.checked == 2
    assert r.to_json()["witnesses"] == [{"at": "1/3"}]
    assert jsonable({"p": Triadic(2, 3), "s": {2, 1}}) == {"p": "2/3^3", "s": [1, 2]}
