import os

from django.conf import settings

if not settings.configured and "DJANGO_SETTINGS_MODULE" not in os.environ:
    settings.configure()

NO_CACHE = -1
INF = float("inf")

CACHE_PREFIX = getattr(settings, "HARDYLAB_CACHE_PREFIX", "")
CACHE_TIMEOUT = getattr(settings, "HARDYLAB_CACHE_TIMEOUT", None)

T_MIN = float(getattr(settings, "HARDYLAB_T_MIN", -12.0))
T_MAX = float(getattr(settings, "HARDYLAB_T_MAX", 12.0))
GRID_N = int(getattr(settings, "HARDYLAB_GRID_N", 2048))

QUAD_TOL = float(getattr(settings, "HARDYLAB_QUAD_TOL", 1e-8))
IDENTITY_TOL = float(getattr(settings, "HARDYLAB_IDENTITY_TOL", 1e-10))
ORACLE_TOL = float(getattr(settings, "HARDYLAB_ORACLE_TOL", 1e-3))
LEAK_TOL = float(getattr(settings, "HARDYLAB_LEAK_TOL", 1e-8))

NEAR_CELLS = int(getattr(settings, "HARDYLAB_NEAR_CELLS", 32))
JACOBI_NODES = int(getattr(settings, "HARDYLAB_JACOBI_NODES", 32))
LAGUERRE_NODES = int(getattr(settings, "HARDYLAB_LAGUERRE_NODES", 48))

THREADS = int(
    os.environ.get("HARDY_LAB_THREADS")
    or getattr(settings, "HARDYLAB_THREADS", None)
    or os.cpu_count()
    or 1
)

if not T_MIN < T_MAX:
    raise ValueError("HARDYLAB_T_MIN must be smaller than HARDYLAB_T_MAX")
if GRID_N < 16:
    raise ValueError("HARDYLAB_GRID_N must be at least 16, got %s" % GRID_N)
for _name, _value in (
    ("HARDYLAB_QUAD_TOL", QUAD_TOL),
    ("HARDYLAB_IDENTITY_TOL", IDENTITY_TOL),
    ("HARDYLAB_ORACLE_TOL", ORACLE_TOL),
    ("HARDYLAB_LEAK_TOL", LEAK_TOL),
):
    if not _value > 0:
        raise ValueError("%s must be positive, got %r" % (_name, _value))
if min(NEAR_CELLS, JACOBI_NODES, LAGUERRE_NODES) < 4:
    raise ValueError("quadrature rule sizes must be at least 4")
if THREADS < 1:
    raise ValueError("HARDY_LAB_THREADS must be a positive integer")
