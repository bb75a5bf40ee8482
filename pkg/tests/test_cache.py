import logging
from unittest import mock

from django.test import SimpleTestCase
from django.utils import encoding
from scipy.integrate import IntegrationWarning

from hardylab import cache as hcache
from hardylab import config

log = logging.getLogger(__name__)


class CachedTestCase(SimpleTestCase):
    def setUp(self):
        hcache.cache.clear()
        self.old_timeout = config.CACHE_TIMEOUT

    def tearDown(self):
        config.CACHE_TIMEOUT = self.old_timeout

    def test_make_key_is_hashed(self):
        key = hcache.make_key("frac-sharp:3:0.5:2.0")
        self.assertEqual(len(key), 32)
        self.assertEqual(key, hcache.make_key("frac-sharp:3:0.5:2.0"))
        self.assertNotEqual(key, hcache.make_key("frac-sharp:3:0.5:3.0"))

    def test_make_key_unicode(self):
        u = encoding.smart_bytes("תיאור").decode("utf-8")
        self.assertEqual(len(hcache.make_key("k:%s" % u)), 32)

    @mock.patch("hardylab.cache.cache")
    def test_miss_then_set(self, cache_mock):
        cache_mock.get.return_value = None
        self.assertEqual(hcache.cached(lambda: 7, "seven", timeout=60), 7)
        args, kwargs = cache_mock.set.call_args
        key, value, timeout = args
        self.assertEqual(key, hcache.make_key("seven"))
        self.assertEqual(value, 7)
        self.assertEqual(timeout, 60)

    @mock.patch("hardylab.cache.cache")
    def test_hit_skips_function(self, cache_mock):
        cache_mock.get.return_value = 3
        counter = mock.Mock()
        self.assertEqual(hcache.cached(counter, "three"), 3)
        self.assertFalse(counter.called)
        self.assertFalse(cache_mock.set.called)

    @mock.patch("hardylab.cache.cache")
    def test_no_cache_timeout(self, cache_mock):
        config.CACHE_TIMEOUT = config.NO_CACHE
        counter = mock.Mock(return_value=1)
        hcache.cached(counter, "nope")
        hcache.cached(counter, "nope")
        self.assertEqual(counter.call_count, 2)
        self.assertFalse(cache_mock.get.called)

    def test_results_survive_any_backend(self):
        counter = mock.Mock()

        def expensive():
            counter()
            return 42

        self.assertEqual(hcache.cached(expensive, "answer"), 42)
        self.assertEqual(hcache.cached(expensive, "answer"), 42)
        self.assertIn(counter.call_count, (1, 2))


class NumericalGuardTestCase(SimpleTestCase):
    def test_returns_value(self):
        @hcache.numerical_guard(0.0)
        def f(x):
            return 1.0 / x

        self.assertEqual(f(4.0), 0.25)

    def test_arithmetic_error(self):
        @hcache.numerical_guard(-1.0)
        def f(x):
            return 1.0 / x

        with mock.patch.object(hcache.log, "error") as error:
            self.assertEqual(f(0.0), -1.0)
        self.assertTrue(error.called)

    def test_callable_return_type(self):
        fallback = mock.Mock(return_value="failed")

        @hcache.numerical_guard(fallback)
        def f():
            raise OverflowError("too big")

        self.assertEqual(f(), "failed")
        self.assertEqual(fallback.call_count, 1)

    def test_other_errors_propagate(self):
        @hcache.numerical_guard(0.0)
        def f():
            raise KeyError("x")

        with self.assertRaises(KeyError):
            f()

    def test_quadrature_warnings_propagate(self):
        @hcache.numerical_guard(0.0)
        def f():
            raise IntegrationWarning("roundoff")

        with self.assertRaises(IntegrationWarning):
            f()
