from .settings import *  # noqa

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.dummy.DummyCache",
    },
    "hardylab": {
        "BACKEND": "django.core.cache.backends.dummy.DummyCache",
    },
}
