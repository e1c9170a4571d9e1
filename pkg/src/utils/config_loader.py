# src/utils/config_loader.py

import json
import os

from utils.logger import logger
from utils.override_maps import DETECTOR_OVERRIDE_MAP, BENCH_OVERRIDE_MAP
from utils.override_maps import apply_overrides

DEFAULT_SEED = 0


class ConfigLoader:
    def __init__(self, detector_path=None, bench_path=None):
        """Initialize the config loader; explicit paths replace the bundled preset files."""
        default_paths = self.get_default_config_paths()
        self.paths = {
            'detector': detector_path or default_paths['detector'],
            'bench': bench_path or default_paths['bench'],
        }
        self.detector_config = None
        self.bench_config = None
        self.seed = None

    def load_config_file(self, config_file):
        try:
            if not os.path.exists(config_file):
                logger.warning(f"Config file not found: {config_file}")
                return {}
            with open(config_file, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError:
            logger.warning(f"Error decoding JSON from file: {config_file}")
            return {}
        except OSError as e:
            logger.warning(f"Unexpected error loading config file {config_file}: {e}")
            return {}

    def get_default_config_paths(self):
        """Gets default paths for config files relative to the project root."""
        project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
        config_dir = os.path.join(project_root, 'src', 'config')
        return {
            'detector': os.path.join(config_dir, 'conf_detector.json'),
            'bench': os.path.join(config_dir, 'conf_bench.json'),
        }

    def _clean_env_var(self, value_str, remove_comments=False):
        """Cleans environment variable string: strips whitespace, quotes, and optionally comments."""
        if not isinstance(value_str, str):
            return value_str

        cleaned = value_str
        if remove_comments:
            cleaned = cleaned.split('#')[0]
        cleaned = cleaned.strip().strip('"').strip("'")
        return cleaned

    def _load_preset_config(self, component_type, preset_name):
        conf_all = self.load_config_file(self.paths[component_type])
        if preset_name not in conf_all:
            if conf_all:
                logger.warning(f"Preset '{preset_name}' not found in {component_type} config; using empty preset.")
            return {}
        # deep copy so overrides never leak into a cached dict
        return json.loads(json.dumps(conf_all[preset_name]))

    def preset_names(self, component_type):
        """Names of the presets available for a component type."""
        return sorted(self.load_config_file(self.paths[component_type]).keys())

    def load_seed_from_env(self):
        raw = self._clean_env_var(os.getenv('CFTP_SEED'), remove_comments=True)
        if raw in (None, ''):
            return DEFAULT_SEED
        try:
            return int(raw, 0)
        except ValueError:
            logger.warning(f"Invalid CFTP_SEED '{raw}'. Using default seed {DEFAULT_SEED}.")
            return DEFAULT_SEED

    def load_configs_from_env(self, detector_preset=None, bench_preset=None):
        detector_preset = detector_preset or self._clean_env_var(os.getenv('DETECTOR_PRESET', 'default'), True)
        bench_preset = bench_preset or self._clean_env_var(os.getenv('BENCH_PRESET', 'default'), True)

        self.detector_config = self._load_preset_config('detector', detector_preset)
        self.bench_config = self._load_preset_config('bench', bench_preset)

        apply_overrides(self, self.detector_config, DETECTOR_OVERRIDE_MAP)
        apply_overrides(self, self.bench_config, BENCH_OVERRIDE_MAP)

        self.seed = self.load_seed_from_env()
        logger.debug(f"Configurations loaded (detector preset '{detector_preset}', bench preset '{bench_preset}').")
        return True

    def load_all(self, detector_preset=None, bench_preset=None):
        """Load all configurations from env/JSON. Returns the settings dictionary."""
        self.load_configs_from_env(detector_preset, bench_preset)
        return {
            'detector': self.detector_config,
            'bench': self.bench_config,
            'seed': self.seed,
        }
