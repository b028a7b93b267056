"""dmcut 예외 계층"""
from __future__ import annotations


class DmcutError(Exception):
    """dmcut 에서 발생하는 모든 예외의 루트."""


class InputError(DmcutError, ValueError):
    """입력이 연산의 사전 조건을 위반했습니다 (알 수 없는 정점, 잘못된 형식 등)."""


class CapacityError(DmcutError):
    """데스크 규모 용량 한도를 초과했습니다.

    Args:
        guard: 한도 이름 (configs/dmcut.yaml 의 capacity 키)
        value: 요청된 크기
        limit: 설정된 한도
    """

    def __init__(self, guard: str, value: int, limit: int) -> None:
        super().__init__(f"capacity guard '{guard}' exceeded: {value} > {limit}")
        self.guard = guard
        self.value = value
        self.limit = limit


class ExtractionError(InputError):
    """축약 인스턴스의 해가 예상한 구조(경로당 정확히 한 정점)를 따르지 않습니다."""
