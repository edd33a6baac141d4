// Python bindings covering the main operations: waveform synthesis,
// estimation, error metrics, and the compliance suite.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmu/compliance.hpp"
#include "pmu/estimator.hpp"
#include "pmu/filter.hpp"
#include "pmu/metrics.hpp"
#include "pmu/signalgen.hpp"

namespace py = pybind11;
using namespace pmu;

PYBIND11_MODULE(_pmu, m) {
    m.doc() = "software synchrophasor estimator and M-class compliance lab";

    py::class_<SampledSignal>(m, "SampledSignal")
        .def(py::init<>())
        .def_readwrite("fs", &SampledSignal::fs)
        .def_readwrite("t0", &SampledSignal::t0)
        .def_readwrite("samples", &SampledSignal::samples)
        .def("time_at", &SampledSignal::time_at)
        .def("duration", &SampledSignal::duration)
        .def("__len__", [](const SampledSignal& s) { return s.samples.size(); });

    py::enum_<SignalKind>(m, "SignalKind")
        .value("SteadyState", SignalKind::SteadyState)
        .value("Harmonic", SignalKind::Harmonic)
        .value("AmplitudeModulation", SignalKind::AmplitudeModulation)
        .value("PhaseModulation", SignalKind::PhaseModulation)
        .value("FrequencyRamp", SignalKind::FrequencyRamp)
        .value("OutOfBand", SignalKind::OutOfBand)
        .value("MagnitudeStep", SignalKind::MagnitudeStep)
        .value("PhaseStep", SignalKind::PhaseStep);

    m.def("signal_kind_name", &signal_kind_name);

    py::class_<TestSignalSpec>(m, "TestSignalSpec")
        .def(py::init<>())
        .def_readwrite("kind", &TestSignalSpec::kind)
        .def_readwrite("f0", &TestSignalSpec::f0)
        .def_readwrite("f1", &TestSignalSpec::f1)
        .def_readwrite("amplitude", &TestSignalSpec::amplitude)
        .def_readwrite("phase0", &TestSignalSpec::phase0)
        .def_readwrite("harmonic_order", &TestSignalSpec::harmonic_order)
        .def_readwrite("interference_level", &TestSignalSpec::interference_level)
        .def_readwrite("interference_freq", &TestSignalSpec::interference_freq)
        .def_readwrite("fm", &TestSignalSpec::fm)
        .def_readwrite("kx", &TestSignalSpec::kx)
        .def_readwrite("ka", &TestSignalSpec::ka)
        .def_readwrite("ramp_rate", &TestSignalSpec::ramp_rate)
        .def_readwrite("ramp_start", &TestSignalSpec::ramp_start)
        .def_readwrite("ramp_end", &TestSignalSpec::ramp_end)
        .def_readwrite("step_size", &TestSignalSpec::step_size)
        .def_readwrite("step_time", &TestSignalSpec::step_time)
        .def_readwrite("step_stagger", &TestSignalSpec::step_stagger)
        .def_readwrite("reporting_rate", &TestSignalSpec::reporting_rate)
        .def_readwrite("duration", &TestSignalSpec::duration)
        .def_readwrite("lead_in", &TestSignalSpec::lead_in)
        .def("step_instant", &TestSignalSpec::step_instant)
        .def("validate", &TestSignalSpec::validate);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def(py::init<>())
        .def_readwrite("spec", &GroundTruth::spec)
        .def("phasor", &GroundTruth::phasor)
        .def("magnitude", &GroundTruth::magnitude)
        .def("phase", &GroundTruth::phase)
        .def("frequency", &GroundTruth::frequency)
        .def("rocof", &GroundTruth::rocof)
        .def("discontinuities", &GroundTruth::discontinuities);

    py::class_<SynthesisResult>(m, "SynthesisResult")
        .def_readonly("signal", &SynthesisResult::signal)
        .def_readonly("truth", &SynthesisResult::truth);

    m.def("synthesize", &synthesize, py::arg("spec"), py::arg("fs") = 3840.0);

    py::class_<SensorModel>(m, "SensorModel")
        .def(py::init<>())
        .def_readwrite("epsilon", &SensorModel::epsilon)
        .def_readwrite("plate_area", &SensorModel::plate_area)
        .def_readwrite("feedback_resistance", &SensorModel::feedback_resistance)
        .def_readwrite("hall_sensitivity", &SensorModel::hall_sensitivity)
        .def_readwrite("lpf_cutoff", &SensorModel::lpf_cutoff)
        .def_readwrite("lpf_order", &SensorModel::lpf_order);

    m.def("ddot_transfer", &ddot_transfer);
    m.def("sensor_lpf", &sensor_lpf);

    py::class_<AdcModel>(m, "AdcModel")
        .def(py::init<>())
        .def_readwrite("resolution_bits", &AdcModel::resolution_bits)
        .def_readwrite("enob", &AdcModel::enob)
        .def_readwrite("full_scale", &AdcModel::full_scale);

    py::class_<AdcResult>(m, "AdcResult")
        .def_readonly("signal", &AdcResult::signal)
        .def_readonly("clipped", &AdcResult::clipped);

    m.def("apply_adc", &apply_adc, py::arg("signal"), py::arg("adc"), py::arg("seed"));

    py::enum_<Backend>(m, "Backend")
        .value("Float", Backend::Float)
        .value("Fixed", Backend::Fixed);

    py::class_<EstimatorConfig>(m, "EstimatorConfig")
        .def(py::init<>())
        .def_readwrite("f_nominal", &EstimatorConfig::f_nominal)
        .def_readwrite("fs", &EstimatorConfig::fs)
        .def_readwrite("reporting_rate", &EstimatorConfig::reporting_rate)
        .def_readwrite("filter_order", &EstimatorConfig::filter_order)
        .def_readwrite("f_reference", &EstimatorConfig::f_reference)
        .def_readwrite("cordic_iterations", &EstimatorConfig::cordic_iterations)
        .def_readwrite("backend", &EstimatorConfig::backend)
        .def_readwrite("fixed_truncate", &EstimatorConfig::fixed_truncate)
        .def("decimation", &EstimatorConfig::decimation)
        .def("reporting_interval", &EstimatorConfig::reporting_interval)
        .def("validate", &EstimatorConfig::validate);

    py::class_<PhasorFrame>(m, "PhasorFrame")
        .def_readonly("index", &PhasorFrame::index)
        .def_readonly("timestamp", &PhasorFrame::timestamp)
        .def_readonly("v_mag", &PhasorFrame::v_mag)
        .def_readonly("v_phase", &PhasorFrame::v_phase)
        .def_readonly("i_mag", &PhasorFrame::i_mag)
        .def_readonly("i_phase", &PhasorFrame::i_phase)
        .def_readonly("frequency", &PhasorFrame::frequency)
        .def_readonly("rocof", &PhasorFrame::rocof)
        .def_readonly("saturation_count", &PhasorFrame::saturation_count)
        .def("__repr__", [](const PhasorFrame& f) {
            char buf[128];
            std::snprintf(buf, sizeof buf,
                          "PhasorFrame(n=%lld, t=%.6f, mag=%.6f, phase=%.6f, f=%.4f)",
                          static_cast<long long>(f.index), f.timestamp, f.v_mag,
                          f.v_phase, f.frequency);
            return std::string(buf);
        });

    py::class_<Estimator>(m, "Estimator")
        .def(py::init<const EstimatorConfig&, double>(), py::arg("config"),
             py::arg("t0") = 0.0)
        .def("process", &Estimator::process, py::arg("v"), py::arg("i"))
        .def("saturation_total", &Estimator::saturation_total);

    m.def("write_frames_csv", &write_frames_csv);
    m.def("tve_percent", &tve_percent, py::arg("estimate"), py::arg("truth"));
    m.def("fe_hz", &fe_hz);
    m.def("rfe_hzps", &rfe_hzps);

    py::class_<ErrorSample>(m, "ErrorSample")
        .def_readonly("timestamp", &ErrorSample::timestamp)
        .def_readonly("tve_pct", &ErrorSample::tve_pct)
        .def_readonly("fe", &ErrorSample::fe)
        .def_readonly("rfe", &ErrorSample::rfe);

    py::class_<ErrorSeries>(m, "ErrorSeries")
        .def_readonly("samples", &ErrorSeries::samples)
        .def("max_tve", &ErrorSeries::max_tve)
        .def("max_fe", &ErrorSeries::max_fe)
        .def("max_rfe", &ErrorSeries::max_rfe);

    m.def("score_frames", &score_frames, py::arg("frames"), py::arg("truth"),
          py::arg("t_begin"), py::arg("t_end"));

    py::class_<StepMetrics>(m, "StepMetrics")
        .def_readonly("overshoot", &StepMetrics::overshoot)
        .def_readonly("delay_time", &StepMetrics::delay_time)
        .def_readonly("delay_defined", &StepMetrics::delay_defined)
        .def_readonly("response_time_tve", &StepMetrics::response_time_tve)
        .def_readonly("response_time_fe", &StepMetrics::response_time_fe)
        .def_readonly("response_time_rfe", &StepMetrics::response_time_rfe)
        .def_readonly("pre_value", &StepMetrics::pre_value)
        .def_readonly("post_value", &StepMetrics::post_value);

    py::class_<LimitEntry>(m, "LimitEntry")
        .def_readonly("value", &LimitEntry::value)
        .def_readonly("unit", &LimitEntry::unit)
        .def_readonly("provenance", &LimitEntry::provenance)
        .def_readonly("fixed", &LimitEntry::fixed);

    py::class_<LimitTable>(m, "LimitTable")
        .def_static("defaults", &LimitTable::defaults)
        .def_static("load", &LimitTable::load)
        .def("save", &LimitTable::save)
        .def("value", &LimitTable::value)
        .def("entries", &LimitTable::entries);

    py::class_<CaseLimits>(m, "CaseLimits")
        .def_readonly("tve_pct", &CaseLimits::tve_pct)
        .def_readonly("fe_hz", &CaseLimits::fe_hz)
        .def_readonly("rfe_hzps", &CaseLimits::rfe_hzps)
        .def_readonly("overshoot_fraction", &CaseLimits::overshoot_fraction)
        .def_readonly("delay_s", &CaseLimits::delay_s)
        .def_readonly("response_s", &CaseLimits::response_s);

    py::class_<StepLimits>(m, "StepLimits")
        .def(py::init<>())
        .def_readwrite("tve_pct", &StepLimits::tve_pct)
        .def_readwrite("fe", &StepLimits::fe)
        .def_readwrite("rfe", &StepLimits::rfe);

    py::class_<TestCase>(m, "TestCase")
        .def_readonly("id", &TestCase::id)
        .def_readonly("test_class", &TestCase::test_class)
        .def_readonly("spec", &TestCase::spec)
        .def_readonly("limits", &TestCase::limits)
        .def_readonly("step_limits", &TestCase::step_limits)
        .def_readonly("eval_begin", &TestCase::eval_begin)
        .def_readonly("eval_end", &TestCase::eval_end)
        .def_readonly("description", &TestCase::description);

    py::class_<EnumeratedSuite>(m, "EnumeratedSuite")
        .def_readonly("cases", &EnumeratedSuite::cases)
        .def_readonly("class_counts", &EnumeratedSuite::class_counts)
        .def_readonly("reference_total", &EnumeratedSuite::reference_total)
        .def("total", &EnumeratedSuite::total);

    m.def("enumerate_tests", &enumerate_tests, py::arg("f0"), py::arg("rate"),
          py::arg("limits"));

    py::class_<MetricVerdict>(m, "MetricVerdict")
        .def_readonly("measured", &MetricVerdict::measured)
        .def_readonly("limit", &MetricVerdict::limit)
        .def_readonly("passed", &MetricVerdict::pass);

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("id", &Verdict::id)
        .def_readonly("tve", &Verdict::tve)
        .def_readonly("fe", &Verdict::fe)
        .def_readonly("rfe", &Verdict::rfe)
        .def_readonly("overshoot", &Verdict::overshoot)
        .def_readonly("delay", &Verdict::delay)
        .def_readonly("response", &Verdict::response)
        .def_readonly("overall", &Verdict::overall)
        .def_readonly("saturations", &Verdict::saturations);

    py::class_<RunOptions>(m, "RunOptions")
        .def(py::init<>())
        .def_readwrite("estimator", &RunOptions::estimator)
        .def_readwrite("enob", &RunOptions::enob)
        .def_readwrite("seed", &RunOptions::seed)
        .def_readwrite("adc_full_scale", &RunOptions::adc_full_scale);

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("id", &TestResult::id)
        .def_readonly("verdict", &TestResult::verdict)
        .def_readonly("series", &TestResult::series)
        .def_readonly("step", &TestResult::step);

    m.def("run_test", &run_test, py::arg("test"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<SuiteOptions>(m, "SuiteOptions")
        .def(py::init<>())
        .def_readwrite("run", &SuiteOptions::run)
        .def_readwrite("id_filter", &SuiteOptions::id_filter)
        .def_readwrite("threads", &SuiteOptions::threads);

    py::class_<SuiteResult>(m, "SuiteResult")
        .def_readonly("results", &SuiteResult::results)
        .def_readonly("class_counts", &SuiteResult::class_counts)
        .def_readonly("reference_total", &SuiteResult::reference_total)
        .def_readonly("overall", &SuiteResult::overall)
        .def_readonly("failed", &SuiteResult::failed);

    m.def("run_suite", &run_suite, py::arg("suite"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());
    m.def("id_matches", &id_matches, py::arg("pattern"), py::arg("id"));
    m.def("write_report_json", &write_report_json);
    m.def("write_summary_csv", &write_summary_csv);
    m.def("suite_exit_code", &suite_exit_code);
}
