from dataclasses import asdict, dataclass
import logging
import os

from dotenv import load_dotenv

from utils.load import load_json, save_json, setting_base_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """CLI 런타임 설정값 (setting/config.json + 환경 변수)."""
    log_level: str = "INFO"
    grid_points: int = 1000
    half_width: float = 12.0
    workers: int = 4
    bisection_tol: float = 1e-6
    digits: int = 17
    display_digits: int = 5


class SettingManager:
    """
    설정 파일을 불러오고 저장하는 관리자입니다.

    JSON 파일의 값을 먼저 읽고, ``.env`` 또는 환경 변수(KG_*)가 있으면
    그 값으로 덮어씁니다.
    """
    _instance = None

    ENV_OVERRIDES = {
        "KG_LOG_LEVEL": ("log_level", str),
        "KG_GRID_POINTS": ("grid_points", int),
        "KG_HALF_WIDTH": ("half_width", float),
        "KG_WORKERS": ("workers", int),
    }

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._loaded = None
        return cls._instance

    def __init__(self, config_file=None):
        # .env 파일에서 환경 변수를 로드합니다.
        load_dotenv()
        self.config_file = config_file or os.getenv("KG_SETTINGS") or setting_base_path("config.json")

    @classmethod
    def reset(cls):
        cls._instance = None

    def load_config(self) -> Settings:
        if self._loaded is not None:
            return self._loaded

        values = {}
        if os.path.exists(self.config_file):
            config = load_json(self.config_file)
            values["log_level"] = config.get("log_level", Settings.log_level)
            harmonic = config.get("harmonic", {})
            values["grid_points"] = int(harmonic.get("grid_points", Settings.grid_points))
            values["half_width"] = float(harmonic.get("half_width", Settings.half_width))
            sweep = config.get("sweep", {})
            values["workers"] = int(sweep.get("workers", Settings.workers))
            values["bisection_tol"] = float(sweep.get("bisection_tol", Settings.bisection_tol))
            output = config.get("output", {})
            values["digits"] = int(output.get("digits", Settings.digits))
            values["display_digits"] = int(output.get("display_digits", Settings.display_digits))
        else:
            logger.warning("settings file %s not found, using defaults", self.config_file)

        for env_name, (field, cast) in self.ENV_OVERRIDES.items():
            raw = os.getenv(env_name)
            if raw:
                try:
                    values[field] = cast(raw)
                except ValueError:
                    logger.warning("ignoring %s=%r (not a valid %s)", env_name, raw, cast.__name__)

        self._loaded = Settings(**values)
        return self._loaded

    def save_config(self, settings: Settings, path=None):
        data = asdict(settings)
        config = {
            "log_level": data["log_level"],
            "harmonic": {"grid_points": data["grid_points"], "half_width": data["half_width"]},
            "sweep": {"workers": data["workers"], "bisection_tol": data["bisection_tol"]},
            "output": {"digits": data["digits"], "display_digits": data["display_digits"]},
        }
        save_json(config, path or self.config_file)


def get_settings() -> Settings:
    return SettingManager().load_config()
