"""piforge: exact transformation and arbitrary-precision verification of
Ramanujan-type series for 1/pi.

The package is organised as eight units:

- ``surd``        exact arithmetic over Q and its multi-quadratic extensions
- ``series``      truncated formal power series and hypergeometric identities
- ``families``    the coefficient sequences appearing in the series
- ``transforms``  exact parameter-level transformations between series
- ``numeric``     arbitrary-precision floats, pi, and series summation
- ``modular``     eta quotients, the j-function, and related numeric checks
- ``congruence``  truncated-sum supercongruences modulo prime cubes
- ``catalog``     the embedded formula catalog, config, suites, and CLI
"""

__version__ = "1.0.0"
