"""Resource caps shared across modules.

Desk-scale honesty: anything beyond a cap raises CapsExceeded or
UnsupportedConfiguration instead of degrading silently.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    degree: int = 8                 # max [K:Q]
    disc: int = 10 ** 10            # max |field discriminant|
    enum_box: int = 64              # max coordinate box in relation search
    principal_box: int = 10 ** 6    # max candidates in a generator search
    witness_samples: int = 24       # sampling set size for valuation witnesses
    rewrite_box: int = 4096         # max candidates when rewriting a prime over T

    def scaled(self, **kw):
        return replace(self, **kw)


DEFAULT_CAPS = Caps()
