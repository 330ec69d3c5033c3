from configparser import ConfigParser
import os


class Config:
    """Packaged defaults for every tunable constant, with hard-coded fallbacks."""

    def __init__(self, config_file=None):
        # defaults.ini ships inside the package, next to this module
        if config_file is None:
            config_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), "defaults.ini")

        self.config = ConfigParser()
        self.config.read(config_file)

    def _float(self, section: str, key: str, fallback: float) -> float:
        if not self.config.has_section(section):
            return fallback
        return self.config[section].getfloat(key, fallback=fallback)

    def _int(self, section: str, key: str, fallback: int) -> int:
        if not self.config.has_section(section):
            return fallback
        return self.config[section].getint(key, fallback=fallback)

    def _bool(self, section: str, key: str, fallback: bool) -> bool:
        if not self.config.has_section(section):
            return fallback
        return self.config[section].getboolean(key, fallback=fallback)

    def _str(self, section: str, key: str, fallback: str) -> str:
        if not self.config.has_section(section):
            return fallback
        value = self.config[section].get(key, fallback=fallback)
        return value.strip() if value else fallback

    def get_trap_options(self) -> dict:
        return {
            "rho": self._float("TRAP", "RHO", 0.5),
            "m": self._int("TRAP", "M", 5),
            "k": self._int("TRAP", "K", 2),
            "max_depth": self._int("TRAP", "MAX_DEPTH", 40),
            "memoise": self._bool("TRAP", "MEMOISE", False),
        }

    def get_model_options(self) -> dict:
        return {
            "nu": self._float("MODEL", "NU", 1.5),
            "field_kind": self._str("MODEL", "FIELD_KIND", "PiecewiseLinear"),
            "knots": self._int("MODEL", "KNOTS", 11),
            "constant_cells": self._int("MODEL", "CONSTANT_CELLS", 10),
            "jitter": self._float("MODEL", "JITTER", 1e-10),
            "lambda1": self._float("MODEL", "LAMBDA1", 30.0),
            "lambda2": self._float("MODEL", "LAMBDA2", 1.0),
            "lambda1_multi": self._float("MODEL", "LAMBDA1_MULTI", 9.0),
            "lambda2_multi": self._float("MODEL", "LAMBDA2_MULTI", 0.9),
            "lambda1_robot": self._float("MODEL", "LAMBDA1_ROBOT", 10.0),
            "lambda2_robot": self._float("MODEL", "LAMBDA2_ROBOT", 0.8),
            "std_penalty_multi": self._float("MODEL", "STD_PENALTY_MULTI", 2.0),
        }

    def get_bc_options(self) -> dict:
        return {
            "grid_n": self._int("BC", "GRID_N", 101),
            "candidates": self._int("BC", "CANDIDATES", 500),
            "bfgs_maxiter": self._int("BC", "BFGS_MAXITER", 200),
            "bfgs_gtol": self._float("BC", "BFGS_GTOL", 1e-5),
            "fd_step": self._float("BC", "FD_STEP", 1e-6),
        }

    def get_mcmc_options(self) -> dict:
        return {
            "steps": self._int("MCMC", "STEPS", 1040),
            "burn_in": self._int("MCMC", "BURN_IN", 1000),
            "thin": self._int("MCMC", "THIN", 5),
            "scale_start": self._float("MCMC", "SCALE_START", 0.3),
            "scale_slope": self._float("MCMC", "SCALE_SLOPE", 0.007),
            "scale_floor": self._float("MCMC", "SCALE_FLOOR", 0.01),
            "prior_mean": self._float("MCMC", "PRIOR_MEAN", -1.0),
            "prior_var": self._float("MCMC", "PRIOR_VAR", 2.0),
            "M": self._int("MCMC", "M", 8),
            "K": self._int("MCMC", "K", 8),
            "J": self._int("MCMC", "J", 50),
        }

    def get_harness_options(self) -> dict:
        return {
            "eval_timeout": self._float("HARNESS", "EVAL_TIMEOUT", 300.0),
            "eval_retries": self._int("HARNESS", "EVAL_RETRIES", 3),
            "plot_grid": self._int("HARNESS", "PLOT_GRID", 512),
        }
