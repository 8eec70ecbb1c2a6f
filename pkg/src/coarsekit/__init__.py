"""Toolkit for finite metric spaces: covers, decomposition certificates,
nerve complexes, large-scale doubling, feature-map gluing, and an
interactive decomposition game."""

from coarsekit.spaces import (
    FiniteMetricSpace,
    MetricFamily,
    FamilyMap,
    build_space,
    r_components,
    mesh,
    max_separated_net,
    verify_family_map,
)
from coarsekit.covers import Cover, multiplicity, d_multiplicity, lebesgue_number, enlarge
from coarsekit.decompose import (
    DecompositionCertificate,
    OracleVerdict,
    verify_certificate,
    compose_certificates,
    certificate_from_cover,
    pullback_certificate,
    pushforward_expansion,
    net_cover_strategy,
    defend,
    exhaustive_decompose,
)
from coarsekit.game import GameSession, start_session, challenge, replay_transcript

__all__ = [
    "FiniteMetricSpace",
    "MetricFamily",
    "FamilyMap",
    "build_space",
    "r_components",
    "mesh",
    "max_separated_net",
    "verify_family_map",
    "Cover",
    "multiplicity",
    "d_multiplicity",
    "lebesgue_number",
    "enlarge",
    "DecompositionCertificate",
    "OracleVerdict",
    "verify_certificate",
    "compose_certificates",
    "certificate_from_cover",
    "pullback_certificate",
    "pushforward_expansion",
    "net_cover_strategy",
    "defend",
    "exhaustive_decompose",
    "GameSession",
    "start_session",
    "challenge",
    "replay_transcript",
]

__version__ = "0.1.0"
