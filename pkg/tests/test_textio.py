"""Text format tests: round trips and line-numbered failures."""

from __future__ import annotations

import random

import numpy as np
import pytest

from oracles import ring_mask
from sdamap.mapgen import BuilderConfig, LevelMap, RoomKind, RoomProposal, Side, build_map
from sdamap.sda import SdaGenome, StateRecord, random_genome
from sdamap.textio import (
    ParseError,
    parse_genome,
    parse_map_text,
    parse_mask,
    render_map_text,
    serialize_genome,
    serialize_mask,
)

SAMPLE_GENOME_TEXT = """states 3
init 10
01 2 1
1 0 0
10 1 2
"""


def test_genome_serialize_matches_sample():
    g = SdaGenome(
        "10", (StateRecord("01", 2, 1), StateRecord("1", 0, 0), StateRecord("10", 1, 2))
    )
    assert serialize_genome(g) == SAMPLE_GENOME_TEXT
    assert parse_genome(SAMPLE_GENOME_TEXT) == g


def test_genome_round_trips():
    for seed in range(30):
        g = random_genome(12, random.Random(seed))
        assert parse_genome(serialize_genome(g)) == g
    text = serialize_genome(random_genome(5, random.Random(1)))
    assert serialize_genome(parse_genome(text)) == text


def test_genome_parse_errors_carry_line_numbers():
    cases = [
        ("", 1),
        ("nodes 2\ninit 1\n1 0 0\n1 0 0\n", 1),
        ("states x\n", 1),
        ("states 0\n", 1),
        ("states 1\n", 2),
        ("states 1\nboot 1\n1 0 0\n", 2),
        ("states 1\ninit 210\n1 0 0\n", 2),
        ("states 1\ninit 1\n111 0 0\n", 3),
        ("states 1\ninit 1\n1 0\n", 3),
        ("states 2\ninit 1\n1 0 0\n1 0 2\n", 4),
        ("states 2\ninit 1\n1 0 0\n1 0 q\n", 4),
        ("states 2\ninit 1\n1 0 0\n", 4),
        ("states 1\ninit 1\n1 0 0\nleftover\n", 4),
    ]
    for text, line in cases:
        with pytest.raises(ParseError) as err:
            parse_genome(text)
        assert err.value.line_no == line, f"wrong line for {text!r}"
        assert f"line {line}:" in str(err.value)


def test_genome_parse_tolerates_trailing_blank_lines():
    g = parse_genome(SAMPLE_GENOME_TEXT + "\n\n")
    assert g.num_states == 3


def test_mask_round_trips():
    mask = ring_mask(17, 9, 2)
    text = serialize_mask(mask)
    assert text.startswith("17 9\n")
    assert np.array_equal(parse_mask(text), mask)
    assert serialize_mask(parse_mask(text)) == text


def test_mask_parse_errors():
    cases = [
        ("", 1),
        ("4\n....\n", 1),
        ("a 4\n", 1),
        ("0 4\n", 1),
        ("4 2\n....\n", 3),
        ("4 2\n...\n....\n", 2),
        ("4 2\n....\n..x.\n", 3),
        ("4 2\n....\n....\njunk\n", 4),
    ]
    for text, line in cases:
        with pytest.raises(ParseError) as err:
            parse_mask(text)
        assert err.value.line_no == line, f"wrong line for {text!r}"


def test_fully_forbidden_mask_blocks_the_build():
    mask = parse_mask("8 8\n" + "########\n" * 8)
    assert mask.all()
    with pytest.raises(ValueError):
        LevelMap(BuilderConfig(width=8, height=8, forbidden_mask=mask))


def test_map_dump_layout():
    level = LevelMap(BuilderConfig(width=6, height=6))
    assert render_map_text(level) == (
        "6 6\n"
        "......\n"
        ".SSSS.\n"
        ".SSSS.\n"
        ".SSSS.\n"
        ".SSSS.\n"
        "......\n"
    )


def test_map_dump_distinguishes_kinds_and_forbidden():
    mask = np.zeros((8, 8), dtype=bool)
    mask[0, :] = True
    level = LevelMap(
        BuilderConfig(width=8, height=8, forbidden_mask=mask, initial_rooms=((2, 2, 2, 2),))
    )
    level.place(RoomProposal(0, Side.RIGHT, RoomKind.ROOM, 4, 2, 2, 2, 0))
    level.place(RoomProposal(0, Side.BELOW, RoomKind.CORRIDOR, 2, 4, 1, 3, 0))
    text = render_map_text(level)
    assert text.splitlines()[1] == "########"
    flat = "".join(text.splitlines()[1:])
    assert flat.count("S") == 4
    assert flat.count("R") == 4
    assert flat.count("C") == 3
    assert flat.count("#") == 8
    width, height, rows = parse_map_text(text)
    assert (width, height) == (8, 8)
    assert rows == text.splitlines()[1:]


def test_map_dump_round_trips_through_parse():
    level = build_map(random_genome(12, random.Random(4)), BuilderConfig(proposal_budget=300))
    text = render_map_text(level)
    width, height, rows = parse_map_text(text)
    assert (width, height) == (80, 80)
    assert "\n".join([f"{width} {height}"] + rows) + "\n" == text


def test_map_parse_errors():
    with pytest.raises(ParseError) as err:
        parse_map_text("4 1\n..z.\n")
    assert err.value.line_no == 2
    with pytest.raises(ParseError) as err:
        parse_map_text("4 2\n....\n")
    assert err.value.line_no == 3
