import configparser
import logging
from collections import UserDict
from os import getenv, makedirs, path

CONFIG_DIR = '.gfpmul/'
CONFIG_FILE = 'gfpmul.conf'
DEFAULTS = {
    'main': {
        'jobs': 1,
        'debug_logging': False,
    },
    'multiplier': {
        'gamma_shape': 'identity',
        'prime_mode': 'practical',
        'base_case_bits': 4096,
        'schoolbook_threshold': 64,
        'use_grouping': True,
        'cache_transformed_twiddles': True,
        'cyclic_top': False,
        'search_multiplier': 4,
        'top_lambda': 0,
    },
    'primes': {
        'density_k': 1000000,
        'scan_ceiling': 1000000,
        'trial_division_bound': 65536,
        'mr_rounds': 25,
    },
}

# Initiate logging
logging.basicConfig(level=logging.INFO, format='%(message)s')


class GfpmulSettings(UserDict):
    """Tunables of the multiplier and the prime searches."""

    def __init__(self, *args, **kwargs):
        UserDict.__init__(self, *args, **kwargs)
        self.home = getenv('HOME')
        self.conf_file = self.get_configfile()

        if not path.isfile(self.conf_file):
            logging.debug(
                'Config-file %s missing. Using defaults.', self.conf_file
            )
            self.use_defaults()
        else:
            self.load()
        self._apply_environment()

    def _get(self, config, section, field, default):
        try:
            if isinstance(default, bool):
                self[field] = config.getboolean(section, field)
            elif isinstance(default, int):
                self[field] = config.getint(section, field)
            else:
                self[field] = config.get(section, field)
        except (configparser.Error, ValueError) as e:
            logging.debug(
                "Could not parse setting '%s.%s': %s. "
                "Using default value: '%s'.",
                section,
                field,
                str(e),
                default,
            )
            self[field] = default

    def _set(self, config, section, field, default):
        if isinstance(default, bool):
            config.set(
                section, field, self.get(field, default) and 'on' or 'off'
            )
        else:
            config.set(section, field, str(self.get(field, default)))

    def _apply_environment(self):
        jobs = getenv('GFPMUL_JOBS')
        if not jobs:
            return
        try:
            self['jobs'] = max(1, int(jobs))
        except ValueError:
            logging.warning('Ignoring GFPMUL_JOBS=%r', jobs)

    def load(self):
        """Loads the latest settings from gfpmul.conf into memory."""
        logging.debug('Reading config-file...')
        config = configparser.ConfigParser()
        config.read(self.conf_file)

        for section, defaults in DEFAULTS.items():
            for field, default in defaults.items():
                self._get(config, section, field, default)

    def use_defaults(self):
        for defaults in DEFAULTS.values():
            for field, default in defaults.items():
                self[field] = default

    def save(self):
        # Write new settings to disk.
        config = configparser.ConfigParser()
        for section, defaults in DEFAULTS.items():
            config.add_section(section)
            for field, default in defaults.items():
                self._set(config, section, field, default)
        makedirs(path.dirname(self.conf_file), exist_ok=True)
        with open(self.conf_file, 'w') as f:
            config.write(f)
        self.load()

    def get_configdir(self):
        return path.join(self.home, CONFIG_DIR)

    def get_configfile(self):
        return path.join(self.home, CONFIG_DIR, CONFIG_FILE)


settings = GfpmulSettings()
