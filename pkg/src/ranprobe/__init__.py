"""ranprobe: black-box tester for 5G cores.

Simulates a gNodeB and UEs over the N1/N2/N3 reference points, runs a
conformance and robustness catalog against any core endpoint, and ships a
reference core stub so the whole suite can run in loopback.
"""

__version__ = "0.1.0"
