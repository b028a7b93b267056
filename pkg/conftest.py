"""공용 fixture, hypothesis 프로필, 마커 등록

프로필:
  - default: 예제 100개, deadline 없음
  - ci: 예제 300개 (HYPOTHESIS_PROFILE=ci)
  - dev: 예제 20개 (빠른 로컬 반복)

slow 마커가 붙은 테스트는 시드 코퍼스 오라클 동치성 검사입니다.
  pytest -m "not slow"   # 빠른 테스트만
"""
from __future__ import annotations

import json
import logging
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "ci",
    max_examples=300,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("dev", max_examples=20, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: seeded corpus oracle-equivalence runs")


# ---------------------------------------------------------------------------
# 설정
# ---------------------------------------------------------------------------

@pytest.fixture(autouse=True)
def dmcut_env(monkeypatch):
    """테스트가 사용자 환경의 로그 레벨이나 설정 캐시에 의존하지 않도록 합니다."""
    from dmcut.config import get_settings

    monkeypatch.delenv("DMCUT_LOG_LEVEL", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def limits():
    from dmcut.config import CapacityLimits

    return CapacityLimits()


@pytest.fixture
def settings_default():
    from dmcut.config import Settings

    return Settings()


# ---------------------------------------------------------------------------
# 3-DMC 인스턴스
# ---------------------------------------------------------------------------

@pytest.fixture
def disjoint_paths_dmc():
    """s_i → a_i → t_i 세 개, k = 3. 유일한 해는 {a1, a2, a3}."""
    from dmcut.digraph import Digraph
    from dmcut.multicut import DmcInstance

    arcs = []
    for i in (1, 2, 3):
        arcs += [(f"s{i}", f"a{i}"), (f"a{i}", f"t{i}")]
    g = Digraph.from_arcs(arcs)
    return DmcInstance.from_graph(g, [(f"s{i}", f"t{i}") for i in (1, 2, 3)], 3)


@pytest.fixture
def shared_vertex_dmc():
    """s_i → c → t_i (i = 1..3), k = 1. 해는 {c}."""
    from dmcut.digraph import Digraph
    from dmcut.multicut import DmcInstance

    arcs = []
    for i in (1, 2, 3):
        arcs += [(f"s{i}", "c"), ("c", f"t{i}")]
    g = Digraph.from_arcs(arcs)
    return DmcInstance.from_graph(g, [(f"s{i}", f"t{i}") for i in (1, 2, 3)], 1)


@pytest.fixture
def shadowed_dmc():
    """disjoint_paths_dmc 에 d → a1 을 더한 것. d 는 {a1, a2, a3} 의 양방향 그림자입니다."""
    from dmcut.digraph import Digraph
    from dmcut.multicut import DmcInstance

    arcs = [("d", "a1")]
    for i in (1, 2, 3):
        arcs += [(f"s{i}", f"a{i}"), (f"a{i}", f"t{i}")]
    g = Digraph.from_arcs(arcs)
    return DmcInstance.from_graph(g, [(f"s{i}", f"t{i}") for i in (1, 2, 3)], 3)


@pytest.fixture
def crossing_flows_dmc():
    """쌍 1 의 유일한 경로 b, a, d, c 와 쌍 2 의 유일한 경로 c, a, d, b. 쌍 3 은 e, k = 2.

    두 경로의 순서가 2413 패턴으로 엇갈려 일관성 행렬에 2 × 2 grid minor 가 생깁니다.
    a 를 지우는 해 {a, e} 는 d 를 앞쪽 그림자로 가지므로 a 는 무관 정점입니다.
    """
    from dmcut.digraph import Digraph
    from dmcut.multicut import DmcInstance

    arcs = [
        ("s1", "b"), ("b", "a"), ("a", "d"), ("d", "c"), ("c", "t1"),
        ("s2", "c"), ("c", "a"), ("d", "b"), ("b", "t2"),
        ("s3", "e"), ("e", "t3"),
    ]
    g = Digraph.from_arcs(arcs)
    return DmcInstance.from_graph(g, [(f"s{i}", f"t{i}") for i in (1, 2, 3)], 2)


# ---------------------------------------------------------------------------
# 파일
# ---------------------------------------------------------------------------

@pytest.fixture
def write_json(tmp_path):
    """dict 를 tmp_path 아래 JSON 파일로 쓰고 경로 문자열을 반환합니다."""

    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def write_text(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

@pytest.fixture
def run_cli(capsys):
    """main(argv) 를 실행하고 (종료 코드, stdout) 을 반환합니다."""
    from dmcut.cli import main

    def run(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out

    yield run
    root = logging.getLogger()
    for handler in [h for h in root.handlers if h.get_name() == "dmcut"]:
        root.removeHandler(handler)
