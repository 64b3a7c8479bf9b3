#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twomode/circuit.hpp"
#include "twomode/commands.hpp"
#include "twomode/errors.hpp"
#include "twomode/hamiltonian.hpp"
#include "twomode/io.hpp"
#include "twomode/locator.hpp"
#include "twomode/noise.hpp"
#include "twomode/ramsey.hpp"
#include "twomode/tight_binding.hpp"

namespace py = pybind11;
using namespace twomode;

namespace {

ResultBundle run_command(const std::string& verb, const std::string& config_json) {
    RunConfig cfg = config_json.empty() ? RunConfig{} : parse_config_text(config_json);
    if (verb == "spectrum") return cmd_spectrum(cfg);
    if (verb == "dispersion-sweep") return cmd_dispersion_sweep(cfg);
    if (verb == "ramsey") return cmd_ramsey(cfg);
    if (verb == "track") return cmd_track(cfg);
    if (verb == "localize") return cmd_localize(cfg);
    if (verb == "end2end") return cmd_end2end(cfg);
    throw InvalidParameterError("unknown verb: " + verb);
}

}  // namespace

PYBIND11_MODULE(_twomode, m) {
    m.doc() = "two-mode transmon charge-sensitivity laboratory";

    py::register_exception<Error>(m, "TwomodeError");

    py::class_<CircuitParams>(m, "CircuitParams")
        .def(py::init<double, double, double, double>(), py::arg("ej1"),
             py::arg("ej2"), py::arg("ec"), py::arg("ep"))
        .def_readwrite("ej1", &CircuitParams::ej1)
        .def_readwrite("ej2", &CircuitParams::ej2)
        .def_readwrite("ec", &CircuitParams::ec)
        .def_readwrite("ep", &CircuitParams::ep)
        .def("ec_sigma", &CircuitParams::ec_sigma)
        .def("ec_delta", &CircuitParams::ec_delta)
        .def("validate", &CircuitParams::validate)
        .def_static("symmetric", &CircuitParams::symmetric_params, py::arg("ej"),
                    py::arg("ec"), py::arg("ep"));

    m.def("derive_energies", &derive_energies, py::arg("c_fF"), py::arg("cm_fF"),
          "(EC, EP) in GHz*h from shunt and coupling capacitances in fF");

    py::class_<ChargeConfig>(m, "ChargeConfig")
        .def(py::init<double, double>(), py::arg("ng1"), py::arg("ng2"))
        .def_readwrite("ng1", &ChargeConfig::ng1)
        .def_readwrite("ng2", &ChargeConfig::ng2)
        .def("ng_sigma", &ChargeConfig::ng_sigma)
        .def("ng_delta", &ChargeConfig::ng_delta)
        .def_static("from_sum_diff", &ChargeConfig::from_sum_diff,
                    py::arg("ng_sigma"), py::arg("ng_delta"));

    py::class_<LabeledSpectrum>(m, "LabeledSpectrum")
        .def_readonly("ambiguous", &LabeledSpectrum::ambiguous)
        .def("energy", &LabeledSpectrum::energy, py::arg("m"), py::arg("n"))
        .def("levels", [](const LabeledSpectrum& s) {
            std::vector<std::tuple<int, int, double>> out;
            for (const auto& l : s.levels)
                out.emplace_back(l.label.m, l.label.n, l.energy);
            return out;
        });

    m.def("solve_spectrum", &solve_spectrum, py::arg("params"), py::arg("charge"),
          py::arg("cutoff") = kDefaultCutoff, py::arg("k") = 9);

    py::class_<ModeParams>(m, "ModeParams")
        .def_readonly("omega_sigma", &ModeParams::omega_sigma)
        .def_readonly("omega_delta", &ModeParams::omega_delta)
        .def_readonly("eta_sigma", &ModeParams::eta_sigma)
        .def_readonly("eta_delta", &ModeParams::eta_delta)
        .def_readonly("chi_sigma_delta", &ModeParams::chi_sigma_delta);

    m.def(
        "mode_parameters",
        [](const CircuitParams& p, const std::string& method, int cutoff) {
            const ModeMethod mm = method == "perturbative" ? ModeMethod::Perturbative
                                                           : ModeMethod::Numerical;
            return mode_parameters(p, mm, cutoff);
        },
        py::arg("params"), py::arg("method") = "numerical",
        py::arg("cutoff") = kDefaultCutoff);

    m.def(
        "dispersion_epsilon",
        [](const CircuitParams& p, int mm, int nn, int cutoff) {
            DispersionOptions opts;
            opts.cutoff = cutoff;
            opts.check_extrema = false;
            return dispersion_epsilon(p, mm, nn, opts);
        },
        py::arg("params"), py::arg("m"), py::arg("n"),
        py::arg("cutoff") = kDefaultCutoff,
        "peak-to-peak charge dispersion of level (m, n), GHz*h");

    m.def(
        "delta_fs",
        [](double ngs, double ngd, double eps) {
            const SplittingPair s = delta_fs(ngs, ngd, eps);
            return std::make_pair(s.df1_MHz, s.df2_MHz);
        },
        py::arg("ng_sigma"), py::arg("ng_delta"), py::arg("eps"));

    m.def(
        "invert_delta_fs",
        [](double df1, double df2, double eps) {
            return invert_delta_fs({df1, df2}, eps);
        },
        py::arg("df1_MHz"), py::arg("df2_MHz"), py::arg("eps"));

    m.def("analytic_epsilon", &analytic_epsilon, py::arg("params"), py::arg("m"),
          py::arg("n"), py::arg("a0"));

    m.def("branch_offsets_MHz", &branch_offsets_MHz, py::arg("ng_sigma"),
          py::arg("ng_delta"), py::arg("eps"));
    m.def("uniform_delays", &uniform_delays, py::arg("n"), py::arg("span_us"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("detuning_MHz", &ExperimentConfig::detuning_MHz)
        .def_readwrite("shots", &ExperimentConfig::shots)
        .def_readwrite("delays_us", &ExperimentConfig::delays_us)
        .def_readwrite("t2_us", &ExperimentConfig::t2_us)
        .def_readwrite("noiseless", &ExperimentConfig::noiseless);

    py::class_<RamseyTrace>(m, "RamseyTrace")
        .def_readonly("delays_us", &RamseyTrace::delays_us)
        .def_readonly("probabilities", &RamseyTrace::probabilities);

    m.def("synthesize_trace",
          [](const std::array<double, 4>& freqs, const std::array<double, 4>& w,
             const ExperimentConfig& cfg, std::uint64_t seed) {
              return synthesize_trace(freqs, w, cfg, seed);
          },
          py::arg("branch_freqs_MHz"), py::arg("weights"), py::arg("config"),
          py::arg("seed"));

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("freq_MHz", &Spectrum::freq_MHz)
        .def_readonly("magnitude", &Spectrum::magnitude)
        .def_readonly("bin_MHz", &Spectrum::bin_MHz);

    m.def("spectrum",
          [](const RamseyTrace& t) { return spectrum(t); }, py::arg("trace"));

    py::class_<PeakFit>(m, "PeakFit")
        .def_readonly("f_center_MHz", &PeakFit::f_center_MHz)
        .def_readonly("df1_MHz", &PeakFit::df1_MHz)
        .def_readonly("df2_MHz", &PeakFit::df2_MHz)
        .def_readonly("width_MHz", &PeakFit::width_MHz)
        .def_readonly("sigma_df1_MHz", &PeakFit::sigma_df1_MHz)
        .def_readonly("sigma_df2_MHz", &PeakFit::sigma_df2_MHz)
        .def_readonly("resolved", &PeakFit::resolved)
        .def_readonly("bin_MHz", &PeakFit::bin_MHz);

    m.def("fit_peaks",
          [](const Spectrum& s) { return fit_peaks(s); }, py::arg("spectrum"));

    py::class_<ChargeSolution>(m, "ChargeSolution")
        .def_readonly("ng_sigma", &ChargeSolution::ng_sigma)
        .def_readonly("ng_delta", &ChargeSolution::ng_delta)
        .def_readonly("sigma_ng_sigma", &ChargeSolution::sigma_ng_sigma)
        .def_readonly("sigma_ng_delta", &ChargeSolution::sigma_ng_delta);

    m.def("charge_config_from_fit", &charge_config_from_fit, py::arg("fit"),
          py::arg("eps"));

    py::class_<DeviceGeometry>(m, "DeviceGeometry")
        .def(py::init<>())
        .def_readwrite("inner_radius_um", &DeviceGeometry::inner_radius_um)
        .def_readwrite("gap_um", &DeviceGeometry::gap_um)
        .def_static("device_a", &DeviceGeometry::device_a);

    py::class_<SensitivityMap>(m, "SensitivityMap")
        .def_readonly("provenance", &SensitivityMap::provenance)
        .def_readonly("symmetric", &SensitivityMap::symmetric);

    m.def(
        "surrogate_map",
        [](const DeviceGeometry& g, double half_um, int n) {
            return surrogate_map(g, GridSpec::centered(half_um, n));
        },
        py::arg("geometry"), py::arg("half_um"), py::arg("n"));
    m.def("surrogate_offsets", &surrogate_offsets, py::arg("geometry"),
          py::arg("x_um"), py::arg("y_um"));
    m.def("induced_offsets", &induced_offsets, py::arg("map"), py::arg("x_um"),
          py::arg("y_um"), py::arg("q") = 1.0);
    m.def("save_map", &save_map, py::arg("map"), py::arg("path"));
    m.def("load_map", &load_map, py::arg("path"));

    py::class_<LocalizationRegion>(m, "LocalizationRegion")
        .def_readonly("best_x_um", &LocalizationRegion::best_x_um)
        .def_readonly("best_y_um", &LocalizationRegion::best_y_um)
        .def_readonly("min_chi2", &LocalizationRegion::min_chi2)
        .def_readonly("no_solution", &LocalizationRegion::no_solution)
        .def("contains", &LocalizationRegion::contains, py::arg("x_um"),
             py::arg("y_um"), py::arg("level") = kChi2Level1Sigma)
        .def("area_um2", &LocalizationRegion::area_um2,
             py::arg("level") = kChi2Level1Sigma);

    m.def("biangulate",
          [](double ngs, double ngd, double ss, double sd, const SensitivityMap& map,
             double q) { return biangulate(ngs, ngd, ss, sd, map, q); },
          py::arg("ng_sigma"), py::arg("ng_delta"), py::arg("sigma_sigma"),
          py::arg("sigma_delta"), py::arg("map"), py::arg("q_assumed") = 1.0);

    py::class_<Table>(m, "Table")
        .def_readonly("name", &Table::name)
        .def_readonly("columns", &Table::columns)
        .def_readonly("rows", &Table::rows);

    py::class_<ResultBundle>(m, "ResultBundle")
        .def_readonly("command", &ResultBundle::command)
        .def_readonly("tables", &ResultBundle::tables)
        .def_readonly("metrics", &ResultBundle::metrics)
        .def_readonly("info", &ResultBundle::info)
        .def("write", &ResultBundle::write, py::arg("dir"));

    m.def("run_command", &run_command, py::arg("verb"),
          py::arg("config_json") = std::string(),
          "run a CLI verb from a JSON config string");

    m.attr("__version__") = kVersion;
}
