import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imprand.errors import DomainError, FormatError
from imprand.selection import (AfterOnes, AllSteps, EvenSteps, EveryK, NoSteps, OddSteps,
                               TableSelection, parse_selection)

bit_lists = st.lists(st.integers(0, 1), max_size=40)


@pytest.mark.parametrize("sel,expected", [
    (AllSteps(), [1, 1, 1, 1, 1]),
    (NoSteps(), [0, 0, 0, 0, 0]),
    (EvenSteps(), [1, 0, 1, 0, 1]),
    (OddSteps(), [0, 1, 0, 1, 0]),
    (EveryK(2), [1, 0, 1, 0, 1]),
    (EveryK(3), [1, 0, 0, 1, 0]),
])
def test_masks(sel, expected):
    assert sel.mask("0110").tolist() == expected


def test_after_ones():
    assert AfterOnes(1).mask("0110").tolist() == [0, 0, 1, 1, 0]
    assert AfterOnes(2).mask("1110").tolist() == [0, 0, 1, 1, 0]
    with pytest.raises(DomainError):
        AfterOnes(0)


def test_table_selection():
    t = TableSelection({"": 1, "01": 1})
    assert t.mask("011").tolist() == [1, 0, 1, 0]
    assert t.at("01") == 1 and t.at("1") == 0


@pytest.mark.parametrize("text,cls", [("all", AllSteps), ("even", EvenSteps), ("odd", OddSteps),
                                      ("none", NoSteps), ("every-k:4", EveryK),
                                      ("after-ones:2", AfterOnes)])
def test_parse(text, cls):
    sel = parse_selection(text)
    assert isinstance(sel, cls)
    assert parse_selection(sel.describe()) == sel


@pytest.mark.parametrize("text", ["", "some", "every-k:", "every-k:0", "after-ones:x"])
def test_parse_errors(text):
    with pytest.raises((FormatError, DomainError)):
        parse_selection(text)


@given(bit_lists)
def test_masks_are_non_anticipating(bits):
    # the mask in a situation does not depend on later outcomes
    for sel in (AfterOnes(2), EveryK(3), EvenSteps()):
        full = sel.mask(bits)
        for k in range(len(bits) + 1):
            assert sel.mask(bits[:k])[-1] == full[k]


@given(bit_lists)
def test_even_odd_partition(bits):
    assert np.all(EvenSteps().mask(bits) + OddSteps().mask(bits) == 1)
