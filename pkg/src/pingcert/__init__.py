"""Exact ping-pong certificates for free products of parabolic lattice isometries."""

__version__ = "0.1.0"

from .errors import BudgetExhausted, InvalidInput, PingcertError, TranslationRankZero  # noqa: E402
from .exact import Interval, QMatrix  # noqa: E402
from .lattice import infer_cusp, make_cusp, validate_isometry, validate_lattice  # noqa: E402
from .engine import Options, certify_free_product  # noqa: E402
from .certificate import certificate_to_dict, recheck  # noqa: E402
from .words import falsify_relations, reduce_word  # noqa: E402
from .moebius import psl2_witness, verify_moebius_pingpong  # noqa: E402

__all__ = [
    "BudgetExhausted", "InvalidInput", "PingcertError", "TranslationRankZero",
    "Interval", "QMatrix", "infer_cusp", "make_cusp", "validate_isometry", "validate_lattice",
    "Options", "certify_free_product", "certificate_to_dict", "recheck",
    "falsify_relations", "reduce_word", "psl2_witness", "verify_moebius_pingpong",
]
