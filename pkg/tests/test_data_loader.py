import os
import tempfile
import unittest

import numpy as np

from data.data_loader import (
    MEASUREMENT_COLUMNS, EdgeListParseError, builtin_network, format_edge_list, load_data_from_json, load_network,
    measurement_frame, parse_edge_list, save_data_to_json, save_network,
)
from data.simulator import simulate
from models.graph_model import NetworkError, laplacian
from utils.utils import parse_decimal_input, parse_lambda_grid, parse_pairs


class TestEdgeList(unittest.TestCase):

    def test_parse_with_comments(self):
        net = parse_edge_list("# sieć testowa\n1 2 1.5\n2 3 0.5  # komentarz\n\n")
        self.assertEqual((net.n, net.m), (3, 2))
        self.assertEqual(net.weight_of(2, 1), 1.5)

    def test_nodes_directive_keeps_isolated_nodes(self):
        net = parse_edge_list("# nodes: 5\n1 2 1.0\n")
        self.assertEqual(net.n, 5)

    def test_bad_line(self):
        with self.assertRaises(EdgeListParseError) as cm:
            parse_edge_list("1 2 1.0\n2 3\n")
        self.assertIn("Linia 2", str(cm.exception))
        self.assertEqual(cm.exception.line, 2)
        self.assertIsInstance(cm.exception, NetworkError)
        with self.assertRaises(EdgeListParseError) as cm:
            parse_edge_list("# nodes: pięć\n1 2 1.0\n")
        self.assertEqual(cm.exception.line, 1)

    def test_file_round_trip(self):
        net = builtin_network("synthetic8")
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "net.txt")
            save_network(net, path)
            self.assertEqual(load_network(path), net)
        self.assertTrue(format_edge_list(net).startswith("# nodes: 8\n"))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_network("/nonexistent/net.txt")

    def test_unknown_builtin(self):
        with self.assertRaises(ValueError):
            builtin_network("ring5")


class TestFrames(unittest.TestCase):

    def test_measurement_frame(self):
        ms = simulate(laplacian(builtin_network("synthetic8")), 4, 0.1, 0)
        frame = measurement_frame(ms)
        self.assertEqual(list(frame.columns), MEASUREMENT_COLUMNS)
        self.assertEqual(len(frame), 32)
        first = frame.iloc[8]
        self.assertEqual((first["t"], first["node"]), (2, 1))
        self.assertEqual(first["u_true"], ms.u_true[0, 1])

    def test_measurement_frame_labels(self):
        ms = simulate(laplacian(builtin_network("synthetic8")), 2, 0.0, 0)
        frame = measurement_frame(ms, labels=list(range(101, 109)))
        self.assertEqual(frame["node"].iloc[7], 108)

    def test_json_with_numpy_values(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out.json")
            save_data_to_json({"a": np.int64(3), "b": np.arange(3), "c": frozenset({2, 1})}, path)
            self.assertEqual(load_data_from_json(path), {"a": 3, "b": [0, 1, 2], "c": [1, 2]})


class TestParsing(unittest.TestCase):

    def test_decimal_comma(self):
        self.assertEqual(parse_decimal_input("0,25"), 0.25)
        with self.assertRaises(ValueError):
            parse_decimal_input("abc")

    def test_lambda_grid(self):
        np.testing.assert_allclose(parse_lambda_grid("0.1:0.5:5"), [0.1, 0.2, 0.3, 0.4, 0.5])
        np.testing.assert_array_equal(parse_lambda_grid("0.3:0.3:1"), [0.3])
        for bad in ("0.5:0.1:3", "0.1:0.5", "0.1:0.5:0", "-1:1:3"):
            with self.assertRaises(ValueError, msg=bad):
                parse_lambda_grid(bad)

    def test_pairs(self):
        self.assertEqual(parse_pairs("2-3,4-1"), [(2, 3), (4, 1)])
        self.assertEqual(parse_pairs("2:3 7:5"), [(2, 3), (7, 5)])
        with self.assertRaises(ValueError):
            parse_pairs("2-3-4")


if __name__ == "__main__":
    unittest.main()
