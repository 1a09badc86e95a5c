import json
import logging
import math

from collections.abc import Sequence
from pathlib import Path
from typing import Any

from gridrecovery.config.presets import NetworkPreset
from gridrecovery.domain import Component, ComponentKind, GridCell, Network
from gridrecovery.validation.validator import validate_network


logger = logging.getLogger(__name__)


def build_synthetic_network(
    n_cells: int,
    transmission_len: int,
    segment_spacing_m: float,
    populations: Sequence[int],
    feeder_lengths_m: Sequence[float] | None = None,
) -> Network:
    """
    Build a radial network: substation, transmission chain, one feeder per cell.

    Component 0 is the substation. The transmission chain hangs below it and
    every cell gets its own chain of distribution segments starting at the
    end of the transmission chain. A feeder of length x meters is split into
    max(1, ceil(x / segment_spacing_m)) segments.

    Args:
        n_cells: Number of populated grid cells
        transmission_len: Number of transmission segments
        segment_spacing_m: Distance between distribution components (meters)
        populations: Persons per cell
        feeder_lengths_m: Feeder length per cell, defaults to one spacing

    Returns:
        Validated Network

    Raises:
        ValueError: If sizes are inconsistent or nonpositive

    Example:
        >>> net = build_synthetic_network(1, 1, 100.0, [10])
        >>> net.size
        3
    """
    if n_cells < 1:
        msg = f"n_cells must be at least 1, got {n_cells}"
        raise ValueError(msg)

    if transmission_len < 1:
        msg = f"transmission_len must be at least 1, got {transmission_len}"
        raise ValueError(msg)

    if segment_spacing_m <= 0:
        msg = f"segment_spacing_m must be positive, got {segment_spacing_m}"
        raise ValueError(msg)

    if len(populations) != n_cells:
        msg = f"Expected {n_cells} populations, got {len(populations)}"
        raise ValueError(msg)

    if any(p < 0 for p in populations):
        msg = "Populations must be nonnegative"
        raise ValueError(msg)

    if feeder_lengths_m is None:
        feeder_lengths_m = [segment_spacing_m] * n_cells
    elif len(feeder_lengths_m) != n_cells:
        msg = f"Expected {n_cells} feeder lengths, got {len(feeder_lengths_m)}"
        raise ValueError(msg)

    components = [Component(0, ComponentKind.SUBSTATION)]
    for _ in range(transmission_len):
        components.append(
            Component(len(components), ComponentKind.TRANSMISSION, len(components) - 1)
        )
    feed_point = len(components) - 1

    cells = []
    for cell_id, (population, length) in enumerate(
        zip(populations, feeder_lengths_m, strict=True)
    ):
        parent = feed_point
        for _ in range(max(1, math.ceil(length / segment_spacing_m))):
            components.append(
                Component(len(components), ComponentKind.DISTRIBUTION, parent)
            )
            parent = len(components) - 1
        cells.append(GridCell(cell_id, int(population), parent))

    network = Network(tuple(components), tuple(cells))
    validate_network(network)

    logger.debug(
        "Built network with %d components and %d cells (population %d)",
        network.size,
        len(network.cells),
        network.total_population,
    )
    return network


def network_from_preset(preset: NetworkPreset) -> Network:
    return build_synthetic_network(
        preset.n_cells,
        preset.transmission_len,
        preset.segment_spacing_m,
        preset.populations,
        preset.feeder_lengths_m,
    )


def network_to_json(network: Network) -> dict[str, Any]:
    """Serialize with stable field order"""
    return {
        "components": [
            {"id": c.id, "kind": c.kind.value, "parent": c.parent}
            for c in network.components
        ],
        "cells": [
            {
                "id": cell.id,
                "population": cell.population,
                "serving_leaf": cell.serving_leaf,
            }
            for cell in network.cells
        ],
    }


def network_from_json(document: dict[str, Any]) -> Network:
    """
    Rebuild a network from its JSON document.

    Raises:
        ValueError: If fields are missing or have the wrong type
        ValidationError: If the resulting network is not a valid tree
    """
    try:
        components = tuple(
            Component(int(c["id"]), ComponentKind(c["kind"]), c["parent"])
            for c in document["components"]
        )
        cells = tuple(
            GridCell(int(c["id"]), int(c["population"]), int(c["serving_leaf"]))
            for c in document["cells"]
        )
    except (KeyError, TypeError) as e:
        msg = f"Malformed network document: {e}"
        raise ValueError(msg) from e

    network = Network(components, cells)
    validate_network(network)
    return network


def save_network(path: Path, network: Network) -> None:
    path.write_text(json.dumps(network_to_json(network), indent=2), encoding="utf-8")


def load_network(path: Path) -> Network:
    return network_from_json(json.loads(path.read_text(encoding="utf-8")))
