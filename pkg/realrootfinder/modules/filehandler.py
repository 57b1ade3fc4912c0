import os
import csv
import json
import yaml
from time import time

from . import loggersetup
from .exceptions import PolynomialFormatError, InvalidConfig
from .structures import Polynomial, SignFlowConfig, SuiteConfig, BENCH_HEADER, DefaultStoragePath

FH_DIR_PATH = os.path.dirname(os.path.realpath(__file__))
DEFAULT_CONFIG_PATH = os.path.join(FH_DIR_PATH, "..", "data", "default_config.yaml")
DEFAULT_SUITES_PATH = os.path.join(FH_DIR_PATH, "..", "data", "suites.yaml")
CONFIG_SECTIONS = ("flow", "bench", "logging")


def polynomial_from_dict(d) -> Polynomial:
    """Polynomial from `{"degree": n, "coeffs": [[re, im], ...]}`.

    Plain numbers are accepted as real coefficients.
    """
    if not isinstance(d, dict) or "coeffs" not in d:
        raise PolynomialFormatError("Expected an object with a 'coeffs' list")
    raw = d["coeffs"]
    if not isinstance(raw, list) or not raw:
        raise PolynomialFormatError("'coeffs' must be a nonempty list")
    coeffs = []
    for i, c in enumerate(raw):
        if isinstance(c, (int, float)) and not isinstance(c, bool):
            coeffs.append(complex(c))
        elif isinstance(c, list) and len(c) in (1, 2) and all(isinstance(x, (int, float)) for x in c):
            coeffs.append(complex(c[0], c[1] if len(c) == 2 else 0.0))
        else:
            raise PolynomialFormatError(f"Coefficient {i} is neither a number nor a [re, im] pair: {c!r}")
    degree = d.get("degree", len(coeffs) - 1)
    return _checked(coeffs, degree)


def polynomial_from_text(text: str) -> Polynomial:
    """Polynomial from the text format: the degree n on the first line,
    then n + 1 lines `re [im]`, constant term first."""
    lines = [line.strip() for line in text.splitlines() if line.strip() and not line.strip().startswith("#")]
    if not lines:
        raise PolynomialFormatError("Empty polynomial file")
    try:
        degree = int(lines[0])
    except ValueError:
        raise PolynomialFormatError(f"First line must be the degree, got '{lines[0]}'")
    if len(lines) - 1 != degree + 1:
        raise PolynomialFormatError(f"Degree {degree} needs {degree + 1} coefficient lines, got {len(lines) - 1}")
    coeffs = []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) not in (1, 2):
            raise PolynomialFormatError(f"Line {number}: expected 're [im]', got '{line}'")
        try:
            coeffs.append(complex(float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0))
        except ValueError:
            raise PolynomialFormatError(f"Line {number}: not a number: '{line}'")
    return _checked(coeffs, degree)


def polynomial_to_text(p: Polynomial) -> str:
    lines = [str(p.degree)]
    for c in p.coeffs:
        c = complex(c)
        lines.append(repr(c.real) if c.imag == 0 else f"{c.real!r} {c.imag!r}")
    return "\n".join(lines) + "\n"


def _checked(coeffs, degree) -> Polynomial:
    if not isinstance(degree, int) or degree < 0:
        raise PolynomialFormatError(f"Invalid degree: {degree!r}")
    if len(coeffs) != degree + 1:
        raise PolynomialFormatError(f"Degree {degree} needs {degree + 1} coefficients, got {len(coeffs)}")
    if degree and coeffs[-1] == 0:
        raise PolynomialFormatError(f"Declared degree {degree} but the leading coefficient is zero")
    try:
        return Polynomial(coeffs)
    except InvalidConfig as e:
        raise PolynomialFormatError(str(e))


class FileHandler:
    """A class to manage polynomial, report, config and log files.

    Folder structure:
    Storage/
        Logs/
        Exports/
            suite_name.csv
            suite_name.json
            ...
    """

    def __init__(
        self,
        storage_path=None,
        log_fname="Logs",
        export_fname="Exports",
        disable_logs=False,
    ):
        self.storage_path = storage_path or DefaultStoragePath.get_path()
        self.log_path = os.path.join(self.storage_path, log_fname)
        self.export_path = os.path.join(self.storage_path, export_fname)
        self.logger = loggersetup.create_logger(__file__, None if disable_logs else self.log_path)
        self.logger.disabled = disable_logs

    def __repr__(self) -> str:
        return "Storing files into " + self.storage_path

    def delete_file(self, path):
        try:
            os.remove(path)
            self.logger.debug(f"{path} file removed")
        except FileNotFoundError:
            self.logger.warning(f"{path} could not be found")
        except PermissionError:
            self.logger.error(f"Access is denied to {path}")
        except Exception as e:
            self.logger.critical(f"Could not remove {path} - {e.__class__.__name__}:{e}")

    def create_dir_if_not_exists(self, path):
        if not os.path.exists(path):
            try:
                os.makedirs(path)
                self.logger.debug(f"'{path}' created")
            except PermissionError:
                self.logger.error(f"Permission denied to '{path}'")
                raise

    def read_polynomial(self, path) -> Polynomial:
        """Reads a polynomial in the JSON or the text format.

        A `solve --output json` report is accepted too; its embedded
        polynomial is returned.
        """

        self.logger.info(f"Reading polynomial from {path}")
        with open(path, "r", encoding="utf-8") as f:
            content = f.read()
        if path.lower().endswith(".json") or content.lstrip().startswith("{"):
            try:
                data = json.loads(content)
            except json.JSONDecodeError as e:
                self.logger.error(f"{path} is not valid JSON: {e}")
                raise PolynomialFormatError(f"{path} is not valid JSON: {e}")
            if isinstance(data, dict) and "polynomial" in data:
                data = data["polynomial"]
            p = polynomial_from_dict(data)
        else:
            p = polynomial_from_text(content)
        self.logger.debug(f"p={p.colorless_str}")
        return p

    def write_polynomial(self, p: Polynomial, path, fmt="json"):
        self.logger.info(f"Writing polynomial to {path}")
        if fmt == "json":
            self.write_json(p.to_dict(), path)
            return
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(polynomial_to_text(p))
        except Exception as e:
            self.delete_file(path)
            raise RuntimeError(f"Could not write polynomial: {e.__class__.__name__}:{e}")

    def read_report(self, path) -> dict:
        """Reads a `solve --output json` report."""

        self.logger.info(f"Reading report from {path}")
        with open(path, "r", encoding="utf-8") as f:
            try:
                report = json.load(f)
            except json.JSONDecodeError as e:
                raise PolynomialFormatError(f"{path} is not valid JSON: {e}")
        if not isinstance(report, dict) or "polynomial" not in report or "roots" not in report:
            msg = f"{path} is not a solve report (needs 'polynomial' and 'roots')"
            self.logger.error(msg)
            raise PolynomialFormatError(msg)
        return report

    def write_json(self, data, path):
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(data, indent=4, ensure_ascii=False) + "\n")
        except Exception as e:
            self.delete_file(path)
            raise RuntimeError(f"Could not write {path}: {e.__class__.__name__}:{e}")
        self.logger.debug(f"Wrote {path}")

    def write_csv(self, header, rows, path):
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
        except Exception as e:
            self.delete_file(path)
            raise RuntimeError(f"Could not write {path}: {e.__class__.__name__}:{e}")
        self.logger.debug(f"Wrote {path}")

    def read_config(self, path=None) -> dict:
        """The packaged defaults with the sections of a user YAML file laid over them.

        Returns a dict with the keys 'flow', 'bench' and 'logging'.
        """

        self.logger.info("Reading configuration")
        self.logger.debug(f"path={path}")
        config = self._load_yaml(DEFAULT_CONFIG_PATH)
        if path:
            user = self._load_yaml(path) or {}
            if not isinstance(user, dict):
                msg = f"{path} must hold a mapping"
                self.logger.error(msg)
                raise InvalidConfig(msg)
            unknown = set(user) - set(CONFIG_SECTIONS)
            if unknown:
                msg = f"Unknown configuration sections in {path}: {sorted(unknown)}"
                self.logger.error(msg)
                raise InvalidConfig(msg)
            for section, values in user.items():
                config[section] = {**config.get(section, {}), **(values or {})}
        SignFlowConfig.from_dict(config["flow"])
        return config

    def read_suites(self, path=None) -> dict:
        """Named benchmark suites, {name: SuiteConfig}."""

        path = path or DEFAULT_SUITES_PATH
        self.logger.info(f"Reading suites from {path}")
        data = self._load_yaml(path) or {}
        if not isinstance(data, dict):
            msg = f"{path} must map suite names to suite settings"
            self.logger.error(msg)
            raise InvalidConfig(msg)
        return {name: SuiteConfig.from_dict(name, values) for name, values in data.items()}

    def _load_yaml(self, path):
        with open(path, "r", encoding="utf-8") as f:
            try:
                return yaml.load(f, Loader=yaml.SafeLoader)
            except yaml.YAMLError as e:
                self.logger.error(f"Could not parse {path}: {e}")
                raise InvalidConfig(f"Could not parse {path}: {e}")

    def export_bench(self, records, name, dest=None, verbose=False):
        """Writes the records of one suite to `<name>.csv` and its JSON
        mirror `<name>.json` under dest (the export folder by default).

        Returns both paths. Output depends only on the records, so equal
        runs give equal bytes.
        """

        self.logger.info(f"Exporting suite '{name}'")
        folder = dest or self.export_path
        self.create_dir_if_not_exists(folder)
        csv_path = os.path.join(folder, name + ".csv")
        json_path = os.path.join(folder, name + ".json")
        self.write_csv(BENCH_HEADER, [record.to_row() for record in records], csv_path)
        self.write_json({"suite": name, "records": [record.to_dict(verbose) for record in records]}, json_path)
        return csv_path, json_path

    def _creation_time_in_days(self, path):
        """Returns difference between the creation time and
        the current time of the file in days"""

        if os.path.isfile(path):
            return int((time() - os.path.getctime(path)) // 86400)
        self.logger.debug(f"{path} is not a file")
        return 0

    def _delete_old_files(self, folder_path, time_limit_in_days):
        """Delete files in a folder older than the time limit."""

        if not os.path.isdir(folder_path):
            return
        for name in os.listdir(folder_path):
            fpath = os.path.join(folder_path, name)
            if self._creation_time_in_days(fpath) >= time_limit_in_days:
                self.delete_file(fpath)
