"""Objectives served by a long-lived child process.

Wire protocol, UTF-8, one message per line: the parent writes the point as a
JSON array of coordinates, the child answers with a single JSON number
(lower is better).
"""
import json
import math
import os
import selectors
import shlex
import subprocess
import tempfile
import time

from .objectives import Objective


class ExternalObjectiveError(RuntimeError):
    pass


class ExternalProcess:
    def __init__(self, command, timeout=30.0):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._stderr = tempfile.TemporaryFile()
        self._proc = subprocess.Popen(self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                      stderr=self._stderr, bufsize=0)
        self._buf = b""
        self.calls = 0

    def _stderr_tail(self, limit=2000):
        self._stderr.seek(0)
        data = self._stderr.read().decode("utf-8", "replace")
        return data[-limit:]

    def _fail(self, msg):
        self.close()
        tail = self._stderr_tail()
        raise ExternalObjectiveError(f"{msg} (command: {' '.join(self.argv)})"
                                     + (f"\nchild stderr:\n{tail}" if tail else ""))

    def _readline(self):
        deadline = time.monotonic() + self.timeout
        fd = self._proc.stdout.fileno()
        with selectors.DefaultSelector() as sel:
            sel.register(fd, selectors.EVENT_READ)
            while b"\n" not in self._buf:
                remaining = deadline - time.monotonic()
                if remaining <= 0 or not sel.select(remaining):
                    self._fail(f"no reply within {self.timeout}s")
                chunk = os.read(fd, 65536)
                if not chunk:
                    code = self._proc.wait()
                    self._fail(f"child exited with status {code} before replying")
                self._buf += chunk
        line, _, self._buf = self._buf.partition(b"\n")
        return line.decode("utf-8")

    def __call__(self, x):
        if self._proc.poll() is not None:
            self._fail(f"child exited with status {self._proc.returncode}")
        msg = json.dumps([float(v) for v in x]) + "\n"
        try:
            self._proc.stdin.write(msg.encode("utf-8"))
            self._proc.stdin.flush()
        except BrokenPipeError:
            self._fail("child closed its input")
        line = self._readline()
        try:
            value = json.loads(line)
        except json.JSONDecodeError:
            self._fail(f"malformed reply {line!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            self._fail(f"reply is not a finite number: {line!r}")
        self.calls += 1
        return float(value)

    def close(self):
        proc = self._proc
        if proc.poll() is None:
            try:
                proc.stdin.close()
                proc.wait(timeout=1.0)
            except (OSError, subprocess.TimeoutExpired):
                proc.kill()
                proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def external_objective(command, domain, timeout=30.0, name="external", assume_zero_optimum=False):
    """Wrap ``command`` as a minimization objective on ``domain``.

    With ``assume_zero_optimum`` regret is reported against an optimum of 0,
    flagged as assumed.
    """
    proc = ExternalProcess(command, timeout)
    return Objective(name, domain, proc, 0.0 if assume_zero_optimum else None,
                     minimize=True, optimum_assumed=assume_zero_optimum)
