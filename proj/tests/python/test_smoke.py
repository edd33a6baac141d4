"""End-to-end smoke test for the python surface: synthesis, estimation,
metrics, and a single compliance case."""

import math

import pmulab


def test_synthesis_and_estimation():
    spec = pmulab.TestSignalSpec()
    spec.kind = pmulab.SignalKind.SteadyState
    spec.f1 = 60.0
    spec.duration = 4.0
    spec.validate()

    out = pmulab.synthesize(spec, 3840.0)
    assert len(out.signal) == 4 * 3840
    assert out.signal.fs == 3840.0

    cfg = pmulab.EstimatorConfig()
    cfg.validate()
    est = pmulab.Estimator(cfg, out.signal.t0)
    frames = est.process(out.signal, out.signal)
    assert len(frames) > 150

    settled = [f for f in frames if 2.0 <= f.timestamp <= 3.5]
    assert settled
    for f in settled:
        assert abs(f.v_mag - 1.0 / math.sqrt(2.0)) < 1e-3
        assert abs(f.frequency - 60.0) < 1e-4

    truth = out.truth
    worst = max(
        pmulab.tve_percent(complex(f.v_mag * math.cos(f.v_phase),
                                   f.v_mag * math.sin(f.v_phase)),
                           truth.phasor(f.timestamp))
        for f in settled
    )
    assert worst < 0.1


def test_metric_identities():
    assert pmulab.tve_percent(complex(1.0, 0.0), complex(1.0, 0.0)) == 0.0
    assert abs(pmulab.tve_percent(complex(1.001, 0.0), complex(1.0, 0.0)) - 0.1) < 1e-9
    assert pmulab.fe_hz(60.01, 60.0) == abs(60.01 - 60.0)


def test_limit_table_and_enumeration():
    limits = pmulab.LimitTable.defaults()
    assert limits.value("steady_state.tve_pct") == 1.0
    assert limits.value("steady_state.fe_hz") == 0.005
    assert len(limits.entries()) == 16

    suite = pmulab.enumerate_tests(60.0, 60.0, limits)
    assert suite.total() == 353
    assert suite.reference_total == 523
    assert suite.class_counts["steady_state"] == 101


def test_single_compliance_case():
    limits = pmulab.LimitTable.defaults()
    suite = pmulab.enumerate_tests(60.0, 60.0, limits)
    case = next(c for c in suite.cases if c.id == "steady/f60.0")

    opts = pmulab.RunOptions()
    result = pmulab.run_test(case, opts)
    assert result.verdict.overall
    assert result.verdict.tve.measured < 0.1
    assert result.verdict.tve.limit == 1.0
    assert result.series.max_fe() < 0.005


def main():
    test_synthesis_and_estimation()
    test_metric_identities()
    test_limit_table_and_enumeration()
    test_single_compliance_case()
    print("python smoke: ok")


if __name__ == "__main__":
    main()
