import os
import json
import logging
import time
from dataclasses import dataclass, fields
from functools import wraps
from numbers import Real
from collections.abc import MutableMapping

LOCAL_CONFIG = "hefcheck_conf.json"

# bitmasks are python ints, so the atom cap is a policy limit, not a width limit
MAX_ATOM_CAP = 1024
# the brute-force oracle materialises 2**max_subset masks at once
MAX_SUBSET_CAP = 26
# stable model and SAT enumeration index int64 masks
MAX_ENUM_CAP = 62

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

logger = logging.getLogger(__name__)


def _threads_from_env():
    raw = os.environ.get("HEFCHECK_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError:
        logger.warning("ignoring HEFCHECK_THREADS=%r, not an integer", raw)
        return 1
    return max(threads, 1)


def _defaults():
    return {
        "max_atoms": 64,
        "max_subset": 20,
        "max_stable_atoms": 20,
        "max_sat_vars": 24,
        "max_candidates": 100_000,
        "time_budget": None,
        "threads": _threads_from_env(),
        "pruning": True,
        "log_level": "WARNING",
    }


defaults = _defaults()


def _positive_int(key, value, upper=None):
    # bool is an int subclass but never a valid cap
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{key} must be an integer")
    if value < 1:
        raise ValueError(f"{key} must be positive, got {value}")
    if upper is not None and value > upper:
        raise ValueError(f"{key} must be at most {upper}, got {value}")


def _validate_conf(func):
    @wraps(func)
    def wrapper(self, key, value):
        if not isinstance(key, str):
            raise TypeError("Key must be a string")
        match key:
            case "max_atoms":
                _positive_int(key, value, MAX_ATOM_CAP)
            case "max_subset":
                _positive_int(key, value, MAX_SUBSET_CAP)
            case "max_stable_atoms" | "max_sat_vars":
                _positive_int(key, value, MAX_ENUM_CAP)
            case "max_candidates" | "threads":
                _positive_int(key, value)
            case "time_budget":
                if value is not None:
                    if isinstance(value, bool) or not isinstance(value, Real):
                        raise TypeError("time_budget must be None or a number of seconds")
                    if value <= 0:
                        raise ValueError(f"time_budget must be positive, got {value}")
            case "pruning":
                if not isinstance(value, bool):
                    raise TypeError("pruning must be a boolean")
            case "log_level":
                if not isinstance(value, str):
                    raise TypeError("log_level must be a string")
                if value.upper() not in LOG_LEVELS:
                    raise ValueError(
                        f"Invalid log level: {value}. Must be one of {LOG_LEVELS}"
                    )
                value = value.upper()

        return func(self, key, value)

    return wrapper


class Config(MutableMapping):
    """
    Configuration settings for the hefcheck package. Can be updated and saved to a local configuration file, 'hefcheck_conf.json', in the current working directory.

    If a local configuration file is found in the current working directory, it will be loaded automatically when the package is imported.

    Attributes
    ----------
    max_atoms : int
        Programs with more atoms are refused by the structural analyses. At most 1024.
    max_subset : int
        Largest set handed to the brute-force elementary-set oracle.
    max_stable_atoms : int
        Largest program handled by stable model enumeration. At most 62.
    max_sat_vars : int
        Largest formula handled by the brute-force SAT oracle. At most 62.
    max_candidates : int
        Masks the HEF search may enumerate inside one SCC larger than
        max_subset. Such a pool is searched by ascending size only up to the
        largest size that fits.

    time_budget : float or None
        Seconds allowed for one search; None disables the budget.
    threads : int
        Worker count for candidate and subset checks. Defaults to $HEFCHECK_THREADS or 1.
    pruning : bool
        Whether the HEF search restricts candidates with the dependency graph.
    log_level : str
        Level applied by the command-line front end.

    Examples
    --------
    View current configuration settings:
    >>> import hefcheck as hc
    >>> hc.config["max_subset"]
    20

    Update configuration settings:
    >>> hc.config.update(max_subset=16)
    >>> hc.config["time_budget"] = 30
    """

    _instance = None

    # override __new__ to enforce a single instance of Config
    def __new__(cls, conf_file=LOCAL_CONFIG, defaults=defaults):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.update(defaults)

            if os.path.exists(conf_file):
                with open(conf_file, "r") as f:
                    conf = json.load(f)

                cls._instance.update(conf)

        return cls._instance

    @_validate_conf
    def __setitem__(self, key, value):
        self.__dict__[key] = value

    def __getitem__(self, key):
        return self.__dict__[key]

    def __delitem__(self, key):
        del self.__dict__[key]

    def __iter__(self):
        return iter(self.__dict__)

    def __len__(self):
        return len(self.__dict__)

    def __repr__(self):
        return self.__dict__.__repr__()

    def save(self, conf_file=LOCAL_CONFIG):
        """
        Save a local configuration file.

        Parameters
        ----------
        conf_file : str, optional
            Path to save configuration file. Defaults to 'hefcheck_conf.json' in the current working directory.
        """
        with open(conf_file, "w") as f:
            json.dump(self.__dict__, f, indent=4)

    def load(self, conf_file=LOCAL_CONFIG):
        """
        Load settings from a configuration file.

        Parameters
        ----------
        conf_file : str, optional
            Path to configuration file. Defaults to 'hefcheck_conf.json' in the current working directory.
        """
        with open(conf_file, "r") as f:
            self.update(json.load(f))

    def reset(self):
        """
        Reset configuration settings to defaults.
        """
        self.__dict__.clear()
        self.update(defaults)


config = Config()


@dataclass(frozen=True)
class Limits:
    """
    Snapshot of the resource caps handed to one analysis.

    Build it with `Limits.from_config`, which reads the package configuration
    and applies keyword overrides (overrides set to None are ignored).
    """

    max_atoms: int = 64
    max_subset: int = 20
    max_stable_atoms: int = 20
    max_sat_vars: int = 24
    max_candidates: int = 100_000
    time_budget: float | None = None
    threads: int = 1
    pruning: bool = True

    @classmethod
    def from_config(cls, conf=None, **overrides):
        conf = config if conf is None else conf
        values = {f.name: conf.get(f.name, f.default) for f in fields(cls)}
        for key, value in overrides.items():
            if key not in values:
                raise TypeError(f"Unknown limit: {key}")
            if value is not None:
                values[key] = value
        # route through the same checks as the configuration
        for key, value in values.items():
            _validate_conf(lambda self, k, v: None)(None, key, value)
        return cls(**values)

    def deadline(self):
        """Monotonic deadline for the time budget, or None."""
        if self.time_budget is None:
            return None
        return time.monotonic() + self.time_budget
