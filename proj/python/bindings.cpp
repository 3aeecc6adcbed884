#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wdmqkd/commands.hpp"
#include "wdmqkd/scan_fit.hpp"

namespace py = pybind11;
using namespace wdmqkd;

PYBIND11_MODULE(_wdmqkd, m) {
  m.doc() = "Biphoton polarization model, scan fitting and BBM92 over WDM channels";
  m.attr("__version__") = "0.1.0";

  py::class_<BiphotonPureState>(m, "BiphotonPureState")
      .def(py::init<double, double>(), py::arg("f"), py::arg("alpha_rad"))
      .def_static("from_degrees", &BiphotonPureState::from_degrees, py::arg("f"),
                  py::arg("alpha_deg"))
      .def_property_readonly("f", &BiphotonPureState::f)
      .def_property_readonly("alpha", &BiphotonPureState::alpha)
      .def_property_readonly("alpha_deg", &BiphotonPureState::alpha_deg)
      .def("__repr__", [](const BiphotonPureState& s) {
        return "BiphotonPureState(f=" + std::to_string(s.f()) +
               ", alpha_deg=" + std::to_string(s.alpha_deg()) + ")";
      });
  py::class_<ProductState>(m, "ProductState").def(py::init<>());

  py::class_<MeasurementSetting>(m, "MeasurementSetting")
      .def(py::init<double, double>(), py::arg("theta_s_deg"), py::arg("theta_i_deg"))
      .def_property_readonly("theta_s", &MeasurementSetting::theta_s)
      .def_property_readonly("theta_i", &MeasurementSetting::theta_i);

  py::class_<JointOutcomeDistribution>(m, "JointOutcomeDistribution")
      .def_readonly("p_tt", &JointOutcomeDistribution::p_tt)
      .def_readonly("p_tr", &JointOutcomeDistribution::p_tr)
      .def_readonly("p_rt", &JointOutcomeDistribution::p_rt)
      .def_readonly("p_rr", &JointOutcomeDistribution::p_rr);

  m.def("coincidence_amplitude", &coincidence_amplitude, py::arg("state"), py::arg("setting"));
  m.def("coincidence_probability",
        py::overload_cast<const Source&, const MeasurementSetting&>(&coincidence_probability),
        py::arg("source"), py::arg("setting"));
  m.def("rate_expanded_eq4", &rate_expanded_eq4, py::arg("f"), py::arg("alpha_rad"),
        py::arg("setting"));
  m.def("rate_product_eq6", &rate_product_eq6, py::arg("setting"));
  m.def("joint_outcome_distribution", &joint_outcome_distribution, py::arg("source"),
        py::arg("setting"));
  m.def("correlation_E", &correlation_E, py::arg("source"), py::arg("setting"));

  py::enum_<Arm>(m, "Arm").value("signal", Arm::signal).value("idler", Arm::idler);

  py::class_<ThetaMaxResult>(m, "ThetaMaxResult")
      .def_readonly("theta_max", &ThetaMaxResult::theta_max)
      .def_readonly("r_max", &ThetaMaxResult::r_max)
      .def_readonly("r_min", &ThetaMaxResult::r_min)
      .def_readonly("visibility", &ThetaMaxResult::visibility)
      .def_readonly("degenerate", &ThetaMaxResult::degenerate);
  m.def("find_theta_max", py::overload_cast<const Source&, double>(&find_theta_max),
        py::arg("source"), py::arg("theta_s_deg"));
  m.def(
      "shift_table",
      [](const Source& source, const std::vector<double>& list, double reference) {
        py::list rows;
        for (const auto& r : shift_table(source, list, reference)) {
          rows.append(py::make_tuple(r.theta_s, r.result.degenerate ? py::none()
                                                                    : py::cast(r.result.theta_max),
                                     r.shift ? py::cast(*r.shift) : py::none()));
        }
        return rows;
      },
      py::arg("source"), py::arg("theta_s_list"), py::arg("reference_deg") = 0.0);
  m.def("visibility", &visibility, py::arg("source"), py::arg("theta_s_deg"));

  py::class_<ChshSettings>(m, "ChshSettings")
      .def(py::init<double, double, double, double>(), py::arg("a"), py::arg("a_prime"),
           py::arg("b"), py::arg("b_prime"))
      .def_readwrite("a", &ChshSettings::a)
      .def_readwrite("a_prime", &ChshSettings::a_prime)
      .def_readwrite("b", &ChshSettings::b)
      .def_readwrite("b_prime", &ChshSettings::b_prime);
  m.def("chsh_value", &chsh_value, py::arg("source"), py::arg("settings"));
  m.def(
      "chsh_optimize",
      [](const Source& s) {
        const auto r = chsh_optimize(s);
        return py::make_tuple(r.settings, r.s_max);
      },
      py::arg("source"));
  m.def(
      "estimate_f",
      [](double hv, double vh) {
        const auto e = estimate_f(hv, vh);
        return py::make_tuple(e.f_hat, e.f_hat_inverse);
      },
      py::arg("rate_hv"), py::arg("rate_vh"));

  py::class_<PumpConfig>(m, "PumpConfig")
      .def(py::init([](double l) { return PumpConfig{l}; }), py::arg("lambda_pump") = kDefaultPumpNm)
      .def_readwrite("lambda_pump", &PumpConfig::lambda_pump);
  py::class_<SpectralProfile>(m, "SpectralProfile")
      .def(py::init([](double c, double w, double p) { return SpectralProfile{c, w, p}; }),
           py::arg("center"), py::arg("width"), py::arg("peak"))
      .def_readwrite("center", &SpectralProfile::center)
      .def_readwrite("width", &SpectralProfile::width)
      .def_readwrite("peak", &SpectralProfile::peak)
      .def("__call__", &SpectralProfile::operator());
  m.def("default_profiles", &default_profiles);
  py::class_<SpectralChannel>(m, "SpectralChannel")
      .def_readonly("lambda_signal", &SpectralChannel::lambda_signal)
      .def_readonly("lambda_idler", &SpectralChannel::lambda_idler)
      .def_readonly("rate_hv", &SpectralChannel::rate_hv)
      .def_readonly("rate_vh", &SpectralChannel::rate_vh)
      .def_readonly("alpha", &SpectralChannel::alpha);
  py::enum_<FConvention>(m, "FConvention")
      .value("ratio_as_f", FConvention::ratio_as_f)
      .value("ratio_as_inverse_f", FConvention::ratio_as_inverse_f);
  m.def("idler_wavelength", &idler_wavelength, py::arg("lambda_signal_nm"),
        py::arg("pump") = PumpConfig{});
  m.def("build_channels",
        py::overload_cast<const SpectralProfile&, const SpectralProfile&, double,
                          std::pair<double, double>, int, const PumpConfig&>(&build_channels),
        py::arg("hv"), py::arg("vh"), py::arg("alpha_rad"), py::arg("lambda_range"),
        py::arg("n_channels"), py::arg("pump") = PumpConfig{});
  m.def("channel_state", &channel_state, py::arg("channel"), py::arg("convention"));

  py::class_<DetectionConfig>(m, "DetectionConfig")
      .def(py::init<>())
      .def_readwrite("pair_rate", &DetectionConfig::pair_rate)
      .def_readwrite("efficiency_signal", &DetectionConfig::efficiency_signal)
      .def_readwrite("efficiency_idler", &DetectionConfig::efficiency_idler)
      .def_readwrite("accidental_rate", &DetectionConfig::accidental_rate)
      .def_readwrite("integration_time", &DetectionConfig::integration_time)
      .def_readwrite("seed", &DetectionConfig::seed);
  py::class_<ScanData>(m, "ScanData")
      .def_readonly("theta_fixed_arm", &ScanData::theta_fixed_arm)
      .def_readonly("theta_fixed", &ScanData::theta_fixed)
      .def_readonly("angles", &ScanData::angles)
      .def_readonly("counts", &ScanData::counts);
  m.def("simulate_scan", &simulate_scan, py::arg("source"), py::arg("fixed_arm"),
        py::arg("fixed_deg"), py::arg("angles"), py::arg("config"), py::arg("channel_id") = 0);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("c", &FitResult::c)
      .def_readonly("v", &FitResult::v)
      .def_readonly("theta0", &FitResult::theta0)
      .def_readonly("period", &FitResult::period)
      .def_readonly("chi2_reduced", &FitResult::chi2_reduced)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("covariance", &FitResult::covariance)
      .def_property_readonly("c_err", &FitResult::c_err)
      .def_property_readonly("v_err", &FitResult::v_err)
      .def_property_readonly("theta0_err", &FitResult::theta0_err);
  m.def(
      "fit_sinusoid",
      [](const std::vector<double>& x, const std::vector<double>& y, double period) {
        return fit_sinusoid(x, y, period);
      },
      py::arg("angles_deg"), py::arg("values"), py::arg("period_deg") = 180.0);
  m.def("fit_scan", &fit_scan, py::arg("data"), py::arg("period_deg") = 180.0);

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init<>())
      .def_readwrite("n_pairs", &ProtocolConfig::n_pairs)
      .def_readwrite("flip_rectilinear", &ProtocolConfig::flip_rectilinear)
      .def_readwrite("flip_diagonal", &ProtocolConfig::flip_diagonal)
      .def_readwrite("seed", &ProtocolConfig::seed);
  py::class_<ChannelKeyReport>(m, "ChannelKeyReport")
      .def_readonly("lambda_signal", &ChannelKeyReport::lambda_signal)
      .def_readonly("sifted_bits", &ChannelKeyReport::sifted_bits)
      .def_readonly("qber_rect", &ChannelKeyReport::qber_rect)
      .def_readonly("qber_diag", &ChannelKeyReport::qber_diag)
      .def_readonly("secret_fraction", &ChannelKeyReport::secret_fraction)
      .def_readonly("secret_bits_estimate", &ChannelKeyReport::secret_bits_estimate);
  m.def("run_bbm92", &run_bbm92, py::arg("source"), py::arg("config"), py::arg("channel_id"),
        py::arg("lambda_signal") = 0.0);
  m.def("secret_fraction", &secret_fraction, py::arg("qber_rect"), py::arg("qber_diag"));
  m.def(
      "wdm_aggregate",
      [](const std::vector<ChannelKeyReport>& reports) {
        const auto s = wdm_aggregate(reports);
        return py::make_tuple(s.total_secret_bits, s.total_sifted_bits);
      },
      py::arg("reports"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_property("seed", [](const RunConfig& c) { return c.seed; }, &RunConfig::set_seed);
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "parse_config", [](const std::string& text) { return parse_config(text); },
      py::arg("text"));
  m.def("cmd_spectrum", &cmd_spectrum, py::arg("config"));
  m.def(
      "cmd_qkd",
      [](const RunConfig& c) {
        const auto s = cmd_qkd(c);
        return py::make_tuple(s.total_secret_bits, s.channels);
      },
      py::arg("config"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
