"""Tests for unit conversions, logging setup and atomic output."""

import logging

import pytest

from wgmsqueeze.utils import atomic_output, khz_to_hz, mhz_to_hz, setup_logger, uw_to_w, w_to_uw


def test_unit_conversions():
    """Test the frequency and power conversions."""
    assert mhz_to_hz(5.333) == pytest.approx(5.333e6)
    assert khz_to_hz(300.0) == pytest.approx(3e5)
    assert uw_to_w(12.3) == pytest.approx(12.3e-6)
    assert w_to_uw(uw_to_w(400.0)) == pytest.approx(400.0)


def test_setup_logger_levels():
    """Test that verbose switches the level to DEBUG."""
    assert setup_logger("wgmsqueeze.util-test", verbose=True).level == logging.DEBUG
    assert setup_logger("wgmsqueeze.util-test").level == logging.INFO


def test_setup_logger_single_handler():
    """Test that repeated setup does not stack handlers."""
    logger = setup_logger("wgmsqueeze.handler-test")
    setup_logger("wgmsqueeze.handler-test")
    assert len(logger.handlers) == 1


def test_atomic_output_success(tmp_path):
    """Test that the file appears only after the block completes."""
    target = tmp_path / "nested" / "out.csv"
    with atomic_output(target) as stream:
        stream.write("a,b\n")
        assert not target.exists()
    assert target.read_text() == "a,b\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_atomic_output_failure(tmp_path):
    """Test that a failing block leaves neither the target nor a temporary file."""
    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with atomic_output(target) as stream:
            stream.write("partial")
            raise RuntimeError("boom")
    assert list(tmp_path.iterdir()) == []


def test_atomic_output_keeps_previous(tmp_path):
    """Test that a failed rewrite keeps the previous file intact."""
    target = tmp_path / "out.csv"
    target.write_text("old\n")
    with pytest.raises(RuntimeError):
        with atomic_output(target) as stream:
            stream.write("new")
            raise RuntimeError("boom")
    assert target.read_text() == "old\n"


def test_atomic_output_permissions(tmp_path):
    """Test that the result gets the same mode as a plainly created file."""
    reference = tmp_path / "reference.csv"
    reference.write_text("")
    target = tmp_path / "out.csv"
    with atomic_output(target) as stream:
        stream.write("a\n")
    assert target.stat().st_mode & 0o777 == reference.stat().st_mode & 0o777
