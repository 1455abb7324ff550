"""Replays the bundled fixtures and tabulates expected against computed orders."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import KSmoothError
from .order import crosscheck, exposed_nsmooth_check, smoothness_order
from .problem import load_json, problem_from_json, space_from_json


@dataclass
class FixtureResult:
    name: str
    expected: int
    computed: int | None
    method: str
    passed: bool
    seconds: float
    detail: str = ""


def fixture_dir() -> Path:
    return Path(str(resources.files("ksmooth") / "fixtures"))


def fixture_paths(directory: str | Path | None = None) -> list[Path]:
    root = Path(directory) if directory is not None else fixture_dir()
    return sorted(root.glob("*.json"))


def run_fixture(doc: dict) -> FixtureResult:
    name = doc.get("name", "?")
    start = time.perf_counter()
    try:
        if doc.get("kind") == "space":
            space = space_from_json(doc["space"], name=name)
            check = exposed_nsmooth_check(space)
            expected = doc.get("expected_order", space.dim)
            computed = space.dim if check.passed else None
            return FixtureResult(
                name, expected, computed, "VertexOrders", check.passed and computed == expected,
                time.perf_counter() - start, "; ".join(check.violations),
            )
        problem = problem_from_json(doc["problem"])
        T = problem.operator()
        expected = doc["expected_k"]
        if T.is_exact:
            joint = crosscheck(T)
            computed = joint.k
            method = "crosscheck(" + ",".join(joint.reports) + ")"
            r = joint.reports["RankOracle"].attainment.r
        else:
            auto = smoothness_order(T)
            rank = smoothness_order(T, "rank")
            computed = auto.k if auto.k == rank.k else None
            method = f"{auto.method.value}+RankOracle"
            r = auto.attainment.r
        detail = ""
        ok = computed == expected
        if "expected_r" in doc and doc["expected_r"] != r:
            ok = False
            detail = f"attainment r = {r}, expected {doc['expected_r']}"
        return FixtureResult(name, expected, computed, method, ok, time.perf_counter() - start, detail)
    except KSmoothError as exc:
        return FixtureResult(
            name, doc.get("expected_k", -1), None, "error", False,
            time.perf_counter() - start, f"{type(exc).__name__}: {exc}",
        )


def run_all(directory: str | Path | None = None) -> list[FixtureResult]:
    return [run_fixture(load_json(p)) for p in fixture_paths(directory)]


def format_table(results: list[FixtureResult]) -> str:
    head = f"{'fixture':32} {'expected':>8} {'computed':>8}  {'result':6} {'time':>7}  method"
    lines = [head, "-" * len(head)]
    for r in results:
        computed = "-" if r.computed is None else str(r.computed)
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.name:32} {r.expected:>8} {computed:>8}  {status:6} {r.seconds:6.3f}s  {r.method}"
        )
        if r.detail:
            lines.append(f"    {r.detail}")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} fixtures pass")
    return "\n".join(lines)
