"""
Serve one surrogate over the integrand line protocol:

    python -m adacube.harness.surrogate_server z1
"""

import sys

import numpy as np

from .surrogates import SURROGATES


def serve(name: str, stdin=sys.stdin, stdout=sys.stdout) -> int:
    f = SURROGATES[name]
    for line in stdin:
        z = np.array([float(t) for t in line.split(" ")])
        stdout.write(f"{f(z):.17g}\n")
        stdout.flush()
    return 0


def main() -> int:
    if len(sys.argv) != 2 or sys.argv[1] not in SURROGATES:
        sys.stderr.write(f"usage: surrogate_server {{{','.join(SURROGATES)}}}\n")
        return 2
    return serve(sys.argv[1])


if __name__ == "__main__":
    sys.exit(main())
