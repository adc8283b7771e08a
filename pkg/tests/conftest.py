"""Shared fixtures: the expensive flagship datasets are built once per session."""

from __future__ import annotations

import numpy as np
import pytest

import oscidmd as od
from oscidmd.mrdmd import DEFAULT_BIN_RULE

GAP_START = 2000
GAP_LENGTH = 250  # 0.1 s at 2500 Hz


@pytest.fixture(scope="session")
def lfo_clean():
    rec, profile = od.generate_profile("lfo_udc", seed=0)
    return rec, profile


@pytest.fixture(scope="session")
def lfo_gapped(lfo_clean):
    rec, profile = lfo_clean
    return od.inject_gap(rec, GAP_START, GAP_LENGTH), profile


@pytest.fixture(scope="session")
def lfo_clean_embedded(lfo_clean):
    rec, _ = lfo_clean
    return od.delay_embed(rec, "u_dc", 1000)


@pytest.fixture(scope="session")
def lfo_gapped_embedded(lfo_gapped):
    rec, _ = lfo_gapped
    return od.delay_embed(rec, "u_dc", 1000)


@pytest.fixture(scope="session")
def lfo_clean_dmd(lfo_clean, lfo_clean_embedded):
    rec, _ = lfo_clean
    x1, x2 = od.shifted_pair(lfo_clean_embedded)
    result = od.dmd(x1, x2, od.DEFAULT_RULE, dt=rec.dt)
    reports = od.classify(
        od.reports_from_dmd(result, f_sp=1.0 / rec.dt, horizon_steps=x1.shape[1])
    )
    return result, reports


@pytest.fixture(scope="session")
def lfo_gapped_dmd(lfo_gapped, lfo_gapped_embedded):
    rec, _ = lfo_gapped
    x1, x2 = od.shifted_pair(lfo_gapped_embedded)
    result = od.dmd(x1, x2, od.DEFAULT_RULE, dt=rec.dt)
    reports = od.classify(
        od.reports_from_dmd(result, f_sp=1.0 / rec.dt, horizon_steps=x1.shape[1])
    )
    return result, reports


@pytest.fixture(scope="session")
def lfo_gapped_mrdmd(lfo_gapped, lfo_gapped_embedded):
    rec, _ = lfo_gapped
    mrdmd_plan = od.plan(4000, rec.dt, mu=16, g=4)
    result = od.decompose(lfo_gapped_embedded.data[:, :4000], mrdmd_plan, DEFAULT_BIN_RULE)
    reports = od.classify(list(result.all_modes))
    return result, reports


@pytest.fixture(scope="session")
def ac_mrdmd():
    rec, profile = od.generate_profile("ac_in", seed=0)
    snap = od.delay_embed(rec, "i_ac", 1000)
    mrdmd_plan = od.plan(4000, rec.dt, mu=50, g=4, termination_level=6)
    result = od.decompose(snap.data[:, :4000], mrdmd_plan, DEFAULT_BIN_RULE)
    reports = od.classify(list(result.all_modes))
    return rec, profile, result, reports


def series_metrics(record, channel: str, series: np.ndarray) -> tuple[float, float]:
    """(rmse, signal_rms) over covered, non-missing samples."""
    raw = record.channel(channel)
    mask = record.channel_mask(channel)
    cover = min(series.size, raw.size)
    ok = ~mask[:cover]
    err = series[:cover][ok] - raw[:cover][ok]
    return float(np.sqrt(np.mean(err**2))), float(np.sqrt(np.mean(raw[:cover][ok] ** 2)))
