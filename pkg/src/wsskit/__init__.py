"""wsskit: weak-social-supervision toolkit for desk-scale disinformation work.

Subpackages cover the pipeline end to end: corpus ingestion, engagement
signals, weak labeling and calibration, tri-relationship factorization,
multi-source weak-supervision training, propagation-network features, and
transmitter attribution, plus a synthetic-corpus generator and a CLI.
"""

__version__ = "0.1.0"
