from collections import defaultdict
from dataclasses import dataclass, field

from loguru import logger

from swbench import __version__
from swbench.common.constants import VACUUM_THRESHOLD


def _default_toggles() -> dict[str, bool]:
    # Default Dict will return false for any unknown key, but will not give an error.
    return defaultdict(
        bool,
        {
            "rezero-density-mean": True,
            "measure-composition-aliasing": True,
            "write-checkpoints": False,
            "survey-mode": False,
        },
    )


@dataclass
class AppConfig:
    output_dir: str = "runs"
    seed: int = 0
    workers: int = 1
    vacuum_threshold: float = VACUUM_THRESHOLD
    version: str = __version__

    toggles: dict[str, bool] = field(default_factory=_default_toggles)


class ConfigSingleton:
    _instance: AppConfig | None = None

    class classproperty:
        def __init__(self, fget):
            self.fget = fget

        def __get__(self, obj, owner):
            return self.fget(owner)

    @classproperty
    def config(cls) -> AppConfig:
        """Returns the current configuration instance."""
        if cls._instance is None:
            raise RuntimeError(
                "Config has not been initialized. Must call ConfigSingleton.init() first."
            )
        return cls._instance

    @classmethod
    def init(
        cls,
        output_dir: str = "runs",
        seed: int = 0,
        workers: int = 1,
        vacuum_threshold: float = VACUUM_THRESHOLD,
        toggles: dict[str, bool] | None = None,
    ):
        if cls._instance is not None:
            raise RuntimeError("Config already initialized")
        if workers < 1:
            raise ValueError(f"workers must be >= 1, received {workers}")
        if not 0 < vacuum_threshold < 1:
            raise ValueError(
                f"vacuum_threshold must lie in (0, 1), received {vacuum_threshold}"
            )

        cls._instance = AppConfig(
            output_dir=output_dir,
            seed=seed,
            workers=workers,
            vacuum_threshold=vacuum_threshold,
        )
        for name, value in (toggles or {}).items():
            cls._instance.toggles[name] = value
        logger.info(
            f"[Setup] AppConfig initialized (output_dir={output_dir}, seed={seed}, workers={workers}, vacuum_threshold={vacuum_threshold:.1e})"
        )

    @classmethod
    def reset(cls):
        cls._instance = None

    @classmethod
    def is_initialized(cls):
        return cls._instance is not None


def vacuum_threshold() -> float:
    if ConfigSingleton.is_initialized():
        return ConfigSingleton.config.vacuum_threshold
    return VACUUM_THRESHOLD


def toggle(name: str) -> bool:
    if ConfigSingleton.is_initialized():
        return ConfigSingleton.config.toggles[name]
    return _default_toggles()[name]
