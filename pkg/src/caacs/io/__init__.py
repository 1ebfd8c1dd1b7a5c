"""Instance ingestion: GTSPLIB files, random generation, geographic builders."""

from .generate import GeneratorSpec, default_clusters, generate_random
from .geo import (
    GeoPoint,
    aircraft_carbon_simple,
    build_flight_chain,
    build_geo_instance,
    chain_distance_km,
    elbow_sse,
    haversine_km,
    haversine_matrix,
    kmeans,
    read_geo_csv,
    write_geo_csv,
)
from .gtsplib import (
    GtspFormatError,
    parse_gtsplib,
    parse_instance_name,
    read_gtsplib,
    serialize_gtsplib,
    write_gtsplib,
)

__all__ = [
    "GeneratorSpec",
    "GeoPoint",
    "GtspFormatError",
    "aircraft_carbon_simple",
    "build_flight_chain",
    "build_geo_instance",
    "chain_distance_km",
    "default_clusters",
    "elbow_sse",
    "generate_random",
    "haversine_km",
    "haversine_matrix",
    "kmeans",
    "parse_gtsplib",
    "parse_instance_name",
    "read_geo_csv",
    "read_gtsplib",
    "serialize_gtsplib",
    "write_geo_csv",
    "write_gtsplib",
]
