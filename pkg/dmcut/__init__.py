"""dmcut: 3쌍 Directed Multicut FPT 도구 상자 (데스크 규모 구현 및 검증 오라클)"""

__version__ = "0.1.0"
