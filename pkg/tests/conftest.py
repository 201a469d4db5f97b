import pytest

from structprompt.kernels import backends
from structprompt.tuples import Anchor, Color, ObjectTuple, Relation, RelationTuple, Shape, StructuredInfo

CUBES_PROMPT = "Add a purple cube at the center. Add a brown cube in front of it on the right."


@pytest.fixture
def cubes_info():
    return StructuredInfo(
        (ObjectTuple(1, Color.PURPLE, Shape.CUBE, Anchor.CENTER), ObjectTuple(2, Color.BROWN, Shape.CUBE)),
        (RelationTuple(2, Relation.FRONT_RIGHT_OF, 1),),
    )


@pytest.fixture(params=sorted(backends()))
def backend(request):
    return backends()[request.param]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
