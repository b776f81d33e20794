"""mlgo: a compiler from a small ML-style functional language to a
functional fragment of Go, with a reference interpreter and an evaluator
for the emitted fragment used for differential testing."""

__version__ = "0.1.0"
