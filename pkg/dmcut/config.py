"""설정 관리: configs/dmcut.yaml 로드, 환경 변수 해석, 용량 한도

configs/dmcut.yaml 을 읽어 타입이 있는 설정 객체로 변환합니다.
파일이 없으면 내장 기본값을 사용합니다.
"""
from __future__ import annotations

import functools
import json
import logging
import os
import re
from dataclasses import dataclass, field, replace
from typing import Any

import yaml

from dmcut.errors import CapacityError, InputError

logger = logging.getLogger(__name__)

CONFIG_PATH = os.path.join(os.path.dirname(__file__), "..", "configs", "dmcut.yaml")

_ENV_VAR_RE = re.compile(r"\$\{([^}]+)\}")

DEFAULT_CONFIG: dict[str, Any] = {
    "capacity": {
        "enforce": True,
        "max_deletable": 20,
        "max_subsets": 250_000,
        "max_search_nodes": 400_000,
        "max_csp_product": 2_000_000,
        "max_matrix_dim": 16,
        "max_assignments": 1_000_000,
    },
    "augmentation": {"q": 2, "p": 1, "c_cap": 64, "q_depth": None},
    "shadow_removal": {"strategy": "oracle", "rounds": 16, "sample_probability": 0.25},
    "irrelevant_vertex": {"zeta": 2, "rho": 8, "brute_check": True},
    "logging": {"level": ""},
}


# ---------------------------------------------------------------------------
# 설정 파일 로드
# ---------------------------------------------------------------------------

def read_config(file_path: str) -> dict[str, Any]:
    """JSON 또는 YAML 파일을 읽어 딕셔너리로 반환합니다.

    Args:
        file_path: 설정 파일 경로 (.json / .yaml / .yml)

    Returns:
        파싱된 딕셔너리

    Raises:
        FileNotFoundError: 파일이 없을 때
        ValueError: 지원하지 않는 확장자이거나 최상위가 매핑이 아닐 때
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Config file not found: {file_path}")

    with open(file_path, encoding="utf-8") as f:
        if file_path.endswith(".json"):
            data = json.load(f)
        elif file_path.endswith((".yaml", ".yml")):
            data = yaml.safe_load(f)
        else:
            raise ValueError(f"Unsupported config format: {file_path}")

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Config root must be a mapping: {file_path}")
    return data


def load_config(config_path: str | None = None) -> dict[str, Any]:
    """dmcut 설정을 로드하고 기본값과 병합합니다.

    Args:
        config_path: 설정 파일 경로 (미지정 시 configs/dmcut.yaml)

    Returns:
        섹션별로 기본값이 채워진 설정 딕셔너리
    """
    path = config_path or CONFIG_PATH
    loaded: dict[str, Any] = {}
    if os.path.exists(path):
        loaded = read_config(path)
    elif config_path:
        raise FileNotFoundError(f"Config file not found: {config_path}")

    merged: dict[str, Any] = {}
    for section, defaults in DEFAULT_CONFIG.items():
        values = dict(defaults)
        values.update(loaded.get(section) or {})
        merged[section] = _resolve_env(values)
    return merged


def _resolve_env(values: dict[str, Any]) -> dict[str, Any]:
    """문자열 값의 ${VAR} 참조를 환경 변수 값으로 대체합니다 (미설정 시 빈 문자열)."""
    resolved = {}
    for key, value in values.items():
        if isinstance(value, str):
            resolved[key] = _ENV_VAR_RE.sub(lambda m: os.getenv(m.group(1), ""), value)
        else:
            resolved[key] = value
    return resolved


# ---------------------------------------------------------------------------
# 용량 한도
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapacityLimits:
    """brute-force 오라클과 전수 탐색의 데스크 규모 한도."""

    enforce: bool = True
    max_deletable: int = 20
    max_subsets: int = 250_000
    max_search_nodes: int = 400_000
    max_csp_product: int = 2_000_000
    max_matrix_dim: int = 16
    max_assignments: int = 1_000_000

    def check(self, guard: str, value: int) -> None:
        """value 가 guard 한도를 넘으면 CapacityError 를 발생시킵니다.

        enforce=False 이면 경고만 남기고 통과합니다.
        """
        limit = getattr(self, guard, None)
        if limit is None:
            raise InputError(f"Unknown capacity guard: {guard}")
        if value <= limit:
            return
        if not self.enforce:
            logger.warning("Capacity guard %s overridden: %s > %s", guard, value, limit)
            return
        raise CapacityError(guard, value, limit)

    def relaxed(self) -> CapacityLimits:
        return replace(self, enforce=False)


@dataclass(frozen=True)
class AugmentationSettings:
    """q_depth 가 있으면 q 대신 재귀식 값 q_{q_depth}(p) 를 씁니다."""

    q: int = 2
    p: int = 1
    c_cap: int = 64
    q_depth: int | None = None

    def __post_init__(self) -> None:
        if self.q_depth is not None and self.q_depth < 0:
            raise InputError(f"q_depth must be non-negative: {self.q_depth}")


@dataclass(frozen=True)
class ShadowSettings:
    strategy: str = "oracle"
    rounds: int = 16
    sample_probability: float = 0.25


@dataclass(frozen=True)
class IrrelevantVertexConfig:
    """무관 정점 규칙 파라미터.

    zeta 는 격자 절반 크기, rho 는 탐색할 격자 minor 크기입니다.
    """

    zeta: int = 2
    rho: int = 8
    brute_check: bool = True

    def __post_init__(self) -> None:
        if self.zeta < 1 or self.rho < 2 * self.zeta:
            raise InputError(
                f"Irrelevant-vertex config requires rho >= 2*zeta >= 2 "
                f"(zeta={self.zeta}, rho={self.rho})"
            )


@dataclass(frozen=True)
class Settings:
    capacity: CapacityLimits = field(default_factory=CapacityLimits)
    augmentation: AugmentationSettings = field(default_factory=AugmentationSettings)
    shadow_removal: ShadowSettings = field(default_factory=ShadowSettings)
    irrelevant_vertex: IrrelevantVertexConfig = field(default_factory=IrrelevantVertexConfig)
    log_level: str = ""


def settings_from_config(config: dict[str, Any]) -> Settings:
    """load_config() 결과를 Settings 로 변환합니다."""
    try:
        return Settings(
            capacity=CapacityLimits(**config["capacity"]),
            augmentation=AugmentationSettings(**config["augmentation"]),
            shadow_removal=ShadowSettings(**config["shadow_removal"]),
            irrelevant_vertex=IrrelevantVertexConfig(**config["irrelevant_vertex"]),
            log_level=str(config["logging"].get("level") or ""),
        )
    except TypeError as e:
        raise InputError(f"Invalid configuration: {e}") from e


@functools.lru_cache(maxsize=None)
def get_settings() -> Settings:
    """기본 설정 파일로부터 Settings 를 한 번만 생성해 반환합니다."""
    return settings_from_config(load_config())


def default_limits() -> CapacityLimits:
    return get_settings().capacity
