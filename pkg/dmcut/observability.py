"""로깅 설정

DMCUT_LOG_LEVEL 환경 변수 또는 configs/dmcut.yaml 의 logging.level 을 읽어
루트 로거에 스트림 핸들러 하나를 설치합니다.

사용법:
  1. configure_env_defaults() 로 환경 변수 기본값 주입 (기존 값은 유지)
  2. configure_logging() 으로 핸들러 설치
"""
from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# 기본 설정값
# ---------------------------------------------------------------------------

DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

ENV_DEFAULTS: dict[str, str] = {
    "DMCUT_LOG_LEVEL": DEFAULT_LOG_LEVEL,
}

_HANDLER_NAME = "dmcut"


# ---------------------------------------------------------------------------
# 환경 변수 설정
# ---------------------------------------------------------------------------

def configure_env_defaults() -> dict[str, str]:
    """환경 변수 기본값을 os.environ 에 주입합니다.

    이미 설정된 변수는 덮어쓰지 않습니다.

    Returns:
        적용된 환경 변수 딕셔너리
    """
    configured = {}
    for key, value in ENV_DEFAULTS.items():
        if key not in os.environ:
            os.environ[key] = value
        configured[key] = os.environ[key]
    return configured


def resolve_log_level(level: str | None = None) -> int:
    """로그 레벨을 결정합니다.

    우선순위: 인자 → DMCUT_LOG_LEVEL → configs/dmcut.yaml → INFO
    """
    if not level:
        level = os.getenv("DMCUT_LOG_LEVEL")
    if not level:
        from dmcut.config import get_settings

        level = get_settings().log_level
    name = (level or DEFAULT_LOG_LEVEL).upper()
    resolved = logging.getLevelName(name)
    if not isinstance(resolved, int):
        return logging.INFO
    return resolved


def configure_logging(level: str | None = None) -> logging.Logger:
    """루트 로거에 dmcut 핸들러를 설치합니다. 여러 번 호출해도 핸들러는 하나입니다.

    Args:
        level: 로그 레벨 이름 (미지정 시 resolve_log_level 규칙)

    Returns:
        설정된 루트 로거
    """
    root = logging.getLogger()
    numeric = resolve_log_level(level)

    handler = next((h for h in root.handlers if h.get_name() == _HANDLER_NAME), None)
    if handler is None:
        handler = logging.StreamHandler()
        handler.set_name(_HANDLER_NAME)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)

    root.setLevel(numeric)
    logger.debug("Logging configured at %s", logging.getLevelName(numeric))
    return root
