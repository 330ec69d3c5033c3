"""
Integrands served by an external process over a line protocol.

Request: the d coordinates with 17 significant digits, single-space separated, then "\n".
Response: one decimal number, then "\n". Anything else on stdout is a protocol violation.
"""

import logging
import math
import queue
import subprocess
import threading
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import EvaluationError, InvalidInputError, ProtocolError

logger = logging.getLogger(__name__)

_EOF = object()


def format_request(x) -> str:
    coords = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    return " ".join(f"{v:.17g}" for v in coords) + "\n"


def parse_response(line: str) -> float:
    if not line.endswith("\n"):
        raise ProtocolError(f"response {line!r} is not newline terminated")
    text = line[:-1]
    if not text or text != text.strip() or " " in text:
        raise ProtocolError(f"response {line!r} is not a single number")
    try:
        return float(text)
    except ValueError:
        raise ProtocolError(f"response {line!r} is not a decimal number") from None


class ExternalIntegrand:
    """Callable evaluator backed by a subprocess; results are cached by request line."""

    def __init__(self, command: Sequence[str], timeout: float = 300.0, retries: int = 3):
        """
        Args:
            command: argv of the integrand process
            timeout: Seconds allowed per evaluation
            retries: Restarts allowed per evaluation after the process dies
        """
        if not command:
            raise InvalidInputError("external integrand command must not be empty")
        self.command: List[str] = list(command)
        self.timeout = timeout
        self.retries = retries
        self.cache: Dict[str, float] = {}
        self.round_trips = 0
        self.restarts = 0
        self._proc: Optional[subprocess.Popen] = None
        self._lines: Optional[queue.Queue] = None

    def _start(self):
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc, self._lines), daemon=True).start()
        logger.debug(f"started integrand process {self._proc.pid}: {' '.join(self.command)}")

    @staticmethod
    def _pump(proc: subprocess.Popen, lines: queue.Queue):
        for line in proc.stdout:
            lines.put(line)
        lines.put(_EOF)

    def _alive(self) -> bool:
        return self._proc is not None and self._proc.poll() is None

    def _round_trip(self, request: str) -> float:
        if not self._alive():
            self._start()
        try:
            self._proc.stdin.write(request)
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise ConnectionError(f"integrand process closed its input: {e}") from e
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self.close()
            raise EvaluationError(f"integrand process gave no answer within {self.timeout} s", abscissa=request.strip()) from None
        if line is _EOF:
            raise ConnectionError("integrand process exited before answering")
        self.round_trips += 1
        return parse_response(line)

    def __call__(self, x) -> float:
        request = format_request(x)
        if request in self.cache:
            return self.cache[request]
        for attempt in range(self.retries + 1):
            try:
                value = self._round_trip(request)
                break
            except ConnectionError as e:
                self.close()
                if attempt == self.retries:
                    raise EvaluationError(f"Error: Failed to evaluate after {self.retries} restarts: {e}", abscissa=request.strip()) from e
                self.restarts += 1
                logger.warning(f"integrand process failed ({e}), restarting")
        if not math.isfinite(value):
            raise EvaluationError(f"integrand returned {value}", abscissa=request.strip())
        self.cache[request] = value
        return value

    def close(self):
        if self._proc is None:
            return
        proc, self._proc = self._proc, None
        try:
            if proc.stdin:
                proc.stdin.close()
        except OSError:
            pass
        if proc.poll() is None:
            proc.kill()
        proc.wait()

    def __enter__(self) -> "ExternalIntegrand":
        return self

    def __exit__(self, *exc):
        self.close()


def external_integrand(command: Sequence[str], timeout: float = 300.0, retries: int = 3) -> ExternalIntegrand:
    return ExternalIntegrand(command, timeout=timeout, retries=retries)
