import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from corridor.network import (
    DomainError, LinkSpec, NetworkSpec, NotApplicableError, critical_density,
    jam_density, receiving_flow, routing_ratio, sending_flow,
)


def table_network(**changes):
    links = {
        'e0': LinkSpec.buffer(1.0, 80.0, 8000.0),
        'e1': LinkSpec.routed(1.0, 100.0, 4000.0, 4800.0, 20.0),
        'e2': LinkSpec.routed(1.0, 50.0, 2000.0, 2400.0, 10.0),
    }
    links.update(changes)
    dt = links.pop('dt', 0.005)
    alpha = links.pop('alpha', None)
    return NetworkSpec(dt=dt, alpha=alpha, **links)


class FlowFunctionTestCase(SimpleTestCase):
    def setUp(self):
        self.net = table_network()

    def test_sending_flow(self):
        self.assertEqual(sending_flow(self.net.e1, 20), 2000)
        self.assertEqual(sending_flow(self.net.e1, 0), 0)
        self.assertEqual(sending_flow(self.net.e0, 150), 8000)

    def test_sending_flow_negative_density(self):
        with self.assertRaises(DomainError):
            sending_flow(self.net.e1, -1)

    def test_receiving_flow(self):
        self.assertEqual(receiving_flow(self.net.e1, 0), 4000)
        self.assertEqual(receiving_flow(self.net.e1, 240), 0)
        self.assertEqual(receiving_flow(self.net.e2, 100), 1400)

    def test_receiving_flow_outside_domain(self):
        with self.assertRaises(DomainError):
            receiving_flow(self.net.e1, 241)
        with self.assertRaises(NotApplicableError):
            receiving_flow(self.net.e0, 10)

    def test_flows_on_arrays(self):
        x = np.array([0.0, 20.0, 60.0])
        np.testing.assert_array_equal(sending_flow(self.net.e1, x), [0, 2000, 4000])
        np.testing.assert_array_equal(receiving_flow(self.net.e1, x), [4000, 4000, 3600])

    def test_critical_density(self):
        self.assertEqual(critical_density(self.net.e0), 100)
        self.assertEqual(critical_density(self.net.e1), 40)
        self.assertEqual(critical_density(LinkSpec.buffer(1.0, 1.0, 0.0)), 0)

    def test_jam_density(self):
        self.assertEqual(jam_density(self.net.e1), 240)
        self.assertEqual(jam_density(self.net.e2), 240)
        self.assertEqual(jam_density(LinkSpec.routed(1.0, 1.0, 3.0, 3.0, 3.0)), 1)
        with self.assertRaises(NotApplicableError):
            jam_density(self.net.e0)

    @given(st.floats(min_value=0, max_value=240), st.floats(min_value=0, max_value=240))
    def test_sending_flow_monotone(self, a, b):
        ''' Sending flows never decrease and receiving flows never increase with density. '''
        low, high = sorted((a, b))
        for link in (self.net.e1, self.net.e2):
            self.assertLessEqual(sending_flow(link, low), sending_flow(link, high))
            self.assertGreaterEqual(receiving_flow(link, low), receiving_flow(link, high))
            self.assertLessEqual(sending_flow(link, high), link.capacity)


class NetworkSpecTestCase(SimpleTestCase):
    def test_routing_ratio(self):
        self.assertAlmostEqual(routing_ratio(table_network()), 2 / 3)
        equal = table_network(e2=LinkSpec.routed(1.0, 50.0, 4000.0, 4800.0, 20.0))
        self.assertEqual(routing_ratio(equal), 0.5)
        only_e1 = table_network(e2=LinkSpec.routed(1.0, 50.0, 0.0, 2400.0, 10.0))
        self.assertEqual(routing_ratio(only_e1), 1)

    def test_routing_ratio_override(self):
        self.assertEqual(routing_ratio(table_network(alpha=0.25)), 0.25)
        with self.assertRaises(ValueError):
            table_network(alpha=1.5)

    def test_max_stable_step(self):
        self.assertEqual(table_network().max_stable_step(), 0.01)

    def test_time_step_too_large(self):
        with self.assertRaises(ValueError) as error:
            table_network(dt=0.02)
        self.assertIn('dt=0.02', str(error.exception))

    def test_invalid_diagrams(self):
        with self.assertRaises(ValueError):
            LinkSpec.routed(1.0, 100.0, 4000.0, 3000.0, 20.0)
        with self.assertRaises(ValueError):
            LinkSpec.routed(1.0, 100.0, 4000.0, 4800.0, 0.0)
        with self.assertRaises(ValueError):
            LinkSpec.buffer(0.0, 80.0, 8000.0)
        with self.assertRaises(ValueError):
            LinkSpec.buffer(1.0, -80.0, 8000.0)
