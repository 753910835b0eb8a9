import pytest
from hypothesis import strategies as st

from mtsched.model import Task, TaskSystem

EX1 = TaskSystem((Task(0, (2,), 3, 3), Task(0, (3,), 4, 4), Task(0, (2, 2), 12, 12)), 2)
EX2 = TaskSystem((Task(0, (3, 3), 4, 4), Task(0, (1, 1), 5, 5), Task(0, (9,), 10, 10)), 3)


@pytest.fixture
def ex1():
    return EX1


@pytest.fixture
def ex2():
    return EX2


@st.composite
def tasks(draw, max_v=3, equal_wcets=False, max_period=12, max_offset=10):
    period = draw(st.integers(1, max_period))
    deadline = draw(st.integers(1, period))
    v = draw(st.integers(1, max_v))
    if equal_wcets:
        wcets = (draw(st.integers(1, deadline)),) * v
    else:
        wcets = tuple(draw(st.lists(st.integers(1, deadline), min_size=v, max_size=v)))
    offset = draw(st.integers(0, max_offset))
    return Task(offset, wcets, deadline, period)


@st.composite
def systems(draw, max_m=4, max_n=4, gang=False, **kw):
    m = draw(st.integers(1, max_m))
    ts = draw(st.lists(tasks(max_v=min(3, m) if gang else 3, equal_wcets=gang, **kw),
                       min_size=1, max_size=max_n))
    return TaskSystem(tuple(ts), m)
