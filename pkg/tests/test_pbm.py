import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zenocfc import pbm
from zenocfc.messaging import BitmapMessage, random_message


def test_single_white_pixel():
    msg = BitmapMessage(1, 1, [1])
    text = pbm.encode(msg)
    assert text.startswith("P1\n1 1\n")
    assert pbm.decode(text) == msg


def test_netpbm_black_is_one():
    # file digit 1 is a black pixel, i.e. logic 0
    msg = pbm.decode("P1\n2 1\n1 0\n")
    assert msg.bits.tolist() == [0, 1]


def test_comments_and_packed_digits():
    text = "P1 # magic\n# a comment line\n3 2\n101\n0 1\n0\n"
    msg = pbm.decode(text)
    assert (msg.width, msg.height) == (3, 2)
    assert msg.bits.tolist() == [0, 1, 0, 1, 0, 1]


def test_line_limit():
    text = pbm.encode(random_message(200, 3, 0.5, 1))
    assert max(len(line) for line in text.splitlines()) <= 70


@pytest.mark.parametrize("seed", range(10))
def test_roundtrip_corpus(seed):
    rng = np.random.default_rng(seed)
    msg = random_message(int(rng.integers(1, 150)), int(rng.integers(1, 40)), rng.random(), seed)
    text = pbm.encode(msg)
    assert pbm.decode(text) == msg
    assert pbm.encode(pbm.decode(text)) == text


@given(st.integers(1, 90), st.integers(1, 12), st.floats(0, 1), st.integers(0, 2**32))
def test_roundtrip_property(w, h, frac, seed):
    msg = random_message(w, h, frac, seed)
    assert pbm.decode(pbm.encode(msg)) == msg


@pytest.mark.parametrize(
    "text, match",
    [
        ("P4\n1 1\n\x00", "unsupported"),
        ("P2\n1 1\n255\n0\n", "unsupported"),
        ("XX\n1 1\n1\n", "bad magic"),
        ("", "bad magic"),
        ("P1\n2 2\n1 0 1\n", "truncated data"),
        ("P1\n2\n", "truncated header"),
        ("P1\n0 3\n", "width must be"),
        ("P1\n99999 99999\n", "exceed"),
        ("P1\n2 1\n1 2\n", "invalid pixel"),
        ("P1\n1 1\n1 1\n", "after last pixel"),
        ("P1\n2x 1\n", "whitespace"),
        ("P1x\n1 1\n1\n", "whitespace"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(pbm.PbmError, match=match):
        pbm.decode(text)


def test_error_position():
    with pytest.raises(pbm.PbmError) as info:
        pbm.decode("P1\n3 1\n1 0\n7\n")
    assert (info.value.line, info.value.col) == (4, 1)


def test_file_roundtrip(tmp_path):
    msg = random_message(33, 7, 0.8, 4)
    path = tmp_path / "img.pbm"
    pbm.write(path, msg)
    assert pbm.read(path) == msg
    assert b"\r" not in path.read_bytes()
