import os

from utils.logger import logger


def _optional_float(value):
    """Float parser that accepts 'none'/'off'/'' as 'no value'."""
    if str(value).strip().lower() in ("", "none", "null", "off"):
        return None
    return float(value)


DETECTOR_OVERRIDE_MAP = {
    'WALK_R_EXP':         {'key': ('walk', 'r_exp'), 'type': int},
    'WALK_EPSILON':       {'key': ('walk', 'epsilon'), 'type': float},
    'WALK_LAZINESS':      {'key': ('walk', 'laziness'), 'type': float},
    'DETECTOR_COST':      {'key': 'cost', 'type': str, 'clean': True, 'clean_comments': True},
    'DETECTOR_N_MAX':     {'key': 'n_max', 'type': int},
    'DETECTOR_DELTA_T':   {'key': 'delta_t_factor', 'type': _optional_float},
    'DETECTOR_WORKERS':   {'key': 'workers', 'type': int},
}
BENCH_OVERRIDE_MAP = {
    'BENCH_RUNS':         {'key': 'runs', 'type': int},
}


def apply_overrides(loader_instance, config_dict, override_map):
    """
    Applies environment variable overrides to a configuration dictionary.

    Args:
        loader_instance: The ConfigLoader instance (to access _clean_env_var).
        config_dict (dict): The dictionary to modify.
        override_map (dict): Map from env var name to target details.
    """
    if not isinstance(config_dict, dict):
        logger.warning(f"Cannot apply overrides to non-dictionary: {type(config_dict)}")
        return

    for env_var, details in override_map.items():
        if env_var not in os.environ:
            continue
        value_str = os.environ[env_var]
        key_path = details['key']  # string or tuple
        type_converter = details.get('type', str)
        clean = details.get('clean', True)
        clean_comments = details.get('clean_comments', True)

        value_to_set = value_str
        if clean:
            value_to_set = loader_instance._clean_env_var(value_to_set, remove_comments=clean_comments)

        try:
            final_value = type_converter(value_to_set)
        except ValueError:
            logger.warning(
                f"Invalid value '{value_str}' for env var {env_var} "
                f"(expected {getattr(type_converter, '__name__', 'value')}). Ignoring override."
            )
            continue

        if isinstance(key_path, tuple):
            target_dict = config_dict
            for section_key in key_path[:-1]:
                section = target_dict.setdefault(section_key, {})
                if not isinstance(section, dict):
                    logger.warning(f"Cannot apply env var {env_var}: section '{section_key}' is not a mapping.")
                    break
                target_dict = section
            else:
                target_dict[key_path[-1]] = final_value
        else:
            config_dict[key_path] = final_value
