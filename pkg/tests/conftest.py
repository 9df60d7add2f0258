import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import bipramsey
from bipramsey.graphs import BipartiteColoring

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_coloring(n: int, k: int, g: int, seed: int) -> BipartiteColoring:
    rng = np.random.default_rng(seed)
    return BipartiteColoring(n, k, rng.integers(0, g, size=(n, n)))


@pytest.fixture
def rainbow4():
    return BipartiteColoring(4, 3, np.arange(16).reshape(4, 4))


SCHEMA_DIR = Path(bipramsey.__file__).parent / "schemas"


def _registry():
    from referencing import Registry, Resource

    docs = {p.name: json.loads(p.read_text()) for p in SCHEMA_DIR.glob("*.json")}
    return docs, Registry().with_resources([(name, Resource.from_contents(doc)) for name, doc in docs.items()])


def validate(data, name: str) -> None:
    """Validate ``data`` against the published schema ``<name>.schema.json``."""
    import jsonschema

    docs, reg = _registry()
    jsonschema.Draft202012Validator(docs[f"{name}.schema.json"], registry=reg).validate(data)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Call with (criterion, passed, detail) to log one summary line."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def log(num: int, passed: bool, detail: str) -> bool:
        line = f"criterion {num}: {'PASS' if passed else 'FAIL'} | {detail}"
        lines.append((num, line))
        print(line)
        return passed

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
