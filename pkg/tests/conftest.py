import random

import pytest

from docsimp.core import AlignmentSequence, EditOperation, OpKind

KINDS = {"k": OpKind.KEEP, "i": OpKind.INSERT, "d": OpKind.DELETE}


def mkseq(spec, pair_id="p"):
    """Build a sequence from [("k", "a b"), ("i", "x"), ...] shorthand."""
    ops = tuple(
        EditOperation(index=i, kind=KINDS[kind], tokens=tuple(tokens.split()))
        for i, (kind, tokens) in enumerate(spec)
    )
    return AlignmentSequence(pair_id=pair_id, operations=ops)


_WORDS = (
    "the a of and to in theater opera city river old new famous historic "
    "was is built opened closed large small first second known called also "
    "north south people area time year part world name place"
).split()


def random_tokens(rng: random.Random, n: int) -> list[str]:
    return [rng.choice(_WORDS) for _ in range(n)]


def perturb(rng: random.Random, tokens: list[str]) -> list[str]:
    """A plausibly-edited variant: random substitutions, drops, insertions."""
    out = []
    for tok in tokens:
        roll = rng.random()
        if roll < 0.15:
            continue  # drop
        if roll < 0.3:
            out.append(rng.choice(_WORDS))  # replace
        else:
            out.append(tok)
        if rng.random() < 0.1:
            out.append(rng.choice(_WORDS))
    return out


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[-1]
    if report.when == "setup" and report.skipped:
        # skipif markers short-circuit before the call phase
        print(f"\nACCEPTANCE {name}: SKIP", flush=True)
    elif report.when == "call":
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        print(f"\nACCEPTANCE {name}: {status}", flush=True)


@pytest.fixture
def rng():
    return random.Random(90125)
