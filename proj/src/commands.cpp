#include "wdmqkd/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <stdexcept>

#include "wdmqkd/angles.hpp"
#include "wdmqkd/format.hpp"
#include "wdmqkd/scan_fit.hpp"

namespace wdmqkd {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kUnits = "angles in degrees, wavelengths in nm, rates in counts/s";

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const fs::path& path, const json& doc) {
  auto os = open_output(path);
  os << doc.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json describe(const Source& source) {
  if (const auto* s = std::get_if<BiphotonPureState>(&source)) {
    return {{"kind", "entangled"}, {"f", s->f()}, {"alpha_deg", s->alpha_deg()}};
  }
  return {{"kind", "product"}};
}

// Closed-form maximum of a scan over the non-fixed arm.
ThetaMaxResult scan_theory(const Source& source, Arm fixed_arm, double fixed_deg) {
  if (fixed_arm == Arm::signal) return find_theta_max(source, fixed_deg);
  const auto k = scan_coefficients(source, fixed_arm, fixed_deg);
  ThetaMaxResult r;
  const double amp = k.amplitude();
  r.theta_max = wrap(0.5 * rad_to_deg(std::atan2(k.sin_amp, k.cos_amp)), 180.0);
  r.r_max = k.mean + amp;
  r.r_min = std::max(0.0, k.mean - amp);
  r.degenerate = is_degenerate(k);
  r.visibility = r.degenerate ? 0.0 : amp / k.mean;
  return r;
}

std::vector<double> scan_angles(double step) {
  std::vector<double> angles;
  const int n = static_cast<int>(std::floor(180.0 / step + 1e-9));
  for (int k = 0; k <= n; ++k) angles.push_back(k * step);
  return angles;
}

struct SettingOutcome {
  double fixed_deg = 0.0;
  ScanData scan;
  std::optional<FitResult> fit;
  std::string error;
  ThetaMaxResult theory;
};

struct ChannelOutcome {
  SpectralChannel channel;
  Source source;
  std::vector<SettingOutcome> settings;
};

ChannelOutcome simulate_channel(const RunConfig& config, const SpectralChannel& channel,
                                std::uint64_t index) {
  ChannelOutcome out{channel, channel_source(config, channel), {}};
  const auto angles = scan_angles(config.fit.scan_step_deg);
  for (std::size_t j = 0; j < config.fit.fixed_angles_deg.size(); ++j) {
    const double fixed = config.fit.fixed_angles_deg[j];
    SettingOutcome s;
    s.fixed_deg = fixed;
    // stream key: channel in the high bits, setting in the low 16
    s.scan = simulate_scan(out.source, config.fit.fixed_arm, fixed, angles, config.detection,
                           (index << 16) | j);
    try {
      s.fit = fit_scan(s.scan, config.fit.period_deg);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    s.theory = scan_theory(out.source, config.fit.fixed_arm, fixed);
    out.settings.push_back(std::move(s));
  }
  return out;
}

std::string angle_tag(double deg) { return format_number(deg); }

}  // namespace

void write_config_echo(const RunConfig& config) {
  fs::create_directories(config.output_dir);
  write_json(config.output_dir / "resolved_config.json", to_json(config));
}

json cmd_theory_scan(const Source& source, const std::vector<double>& theta_s_list,
                     const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto rows = shift_table(source, theta_s_list, 0.0);
  json summary = describe(source);
  summary["units"] = kUnits;
  summary["reference_theta_s_deg"] = 0.0;
  summary["rows"] = json::array();
  for (const auto& row : rows) {
    auto os = open_output(out_dir / ("theory_ts" + angle_tag(row.theta_s) + ".csv"));
    os << "# theta_s_deg=" << format_number(row.theta_s) << '\n'
       << "# units: angles in degrees, rate is the normalized coincidence probability\n"
       << "theta_i_deg,rate\n";
    for (int k = 0; k <= 180; ++k) {
      os << k << ','
         << format_number(coincidence_probability(source, MeasurementSetting(row.theta_s, k)))
         << '\n';
    }
    json r = {{"theta_s_deg", row.theta_s},
              {"degenerate", row.result.degenerate},
              {"theta_max_deg", row.result.degenerate ? json(nullptr) : json(row.result.theta_max)},
              {"shift_deg", row.shift ? json(*row.shift) : json(nullptr)},
              {"visibility", row.result.degenerate ? json(nullptr) : json(row.result.visibility)}};
    // the product state keeps its factorized maximizer even on a zero scan
    if (row.result.degenerate && std::holds_alternative<ProductState>(source)) {
      r["theta_max_deg"] = row.result.theta_max;
    }
    summary["rows"].push_back(r);
  }
  write_json(out_dir / "theory_summary.json", summary);
  return summary;
}

json cmd_simulate_and_fit(const RunConfig& config) {
  write_config_echo(config);
  const auto channels = make_channels(config);

  std::vector<std::future<ChannelOutcome>> jobs;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    jobs.push_back(std::async(std::launch::async, simulate_channel, std::cref(config),
                              std::cref(channels[k]), k));
  }

  json summary = {{"units", kUnits},
                  {"fixed_arm", to_string(config.fit.fixed_arm)},
                  {"period_deg", config.fit.period_deg},
                  {"channels", json::array()}};
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const ChannelOutcome ch = jobs[k].get();
    json entry = {{"channel", k},
                  {"lambda_signal_nm", ch.channel.lambda_signal},
                  {"lambda_idler_nm", ch.channel.lambda_idler},
                  {"source", describe(ch.source)},
                  {"settings", json::array()}};
    const SettingOutcome* ref = nullptr;
    for (const auto& s : ch.settings) {
      if (s.fixed_deg == 0.0) ref = &s;
    }
    if (!ref) ref = &ch.settings.front();

    for (const auto& s : ch.settings) {
      const std::string tag = "ch" + std::to_string(k) + "_fixed" + angle_tag(s.fixed_deg);
      {
        auto os = open_output(config.output_dir / ("scan_" + tag + ".csv"));
        write_scan_csv(os, s.scan);
      }
      json row = {{"fixed_deg", s.fixed_deg},
                  {"theory_theta_max_deg",
                   s.theory.degenerate ? json(nullptr) : json(s.theory.theta_max)},
                  {"theory_visibility",
                   s.theory.degenerate ? json(nullptr) : json(s.theory.visibility)},
                  {"theory_degenerate", s.theory.degenerate}};
      if (!s.fit) {
        row["error"] = s.error;
        entry["settings"].push_back(row);
        continue;
      }
      json fit_doc = to_json(*s.fit);
      fit_doc["units"] = kUnits;
      write_json(config.output_dir / ("fit_" + tag + ".json"), fit_doc);
      row["converged"] = s.fit->converged;
      if (s.fit->converged) {
        const auto m = scan_metrics(*s.fit);
        row["theta_max_deg"] = m.theta_max;
        row["theta_max_err_deg"] = number_or_null(m.theta_max_err);
        row["visibility"] = m.visibility;
        row["visibility_err"] = number_or_null(m.visibility_err);
        if (ref->fit && ref->fit->converged) {
          const auto r = scan_metrics(*ref->fit);
          row["shift_deg"] = signed_diff_mod180(m.theta_max, r.theta_max);
          row["shift_err_deg"] = number_or_null(std::hypot(m.theta_max_err, r.theta_max_err));
        }
      }
      entry["settings"].push_back(row);
    }
    summary["channels"].push_back(entry);
  }
  write_json(config.output_dir / "simulate_fit_summary.json", summary);
  return summary;
}

std::vector<SpectralChannel> cmd_spectrum(const RunConfig& config) {
  write_config_echo(config);
  const auto channels = make_channels(config);
  auto os = open_output(config.output_dir / "spectrum.csv");
  os << "# pump_nm=" << format_number(config.source.pump.lambda_pump) << '\n'
     << "# units: wavelengths in nm, rates in counts/s\n"
     << "lambda_signal_nm,lambda_idler_nm,rate_hv,rate_vh,f_hat,f_hat_inv\n";
  for (const auto& ch : channels) {
    const auto est = estimate_f(ch.rate_hv, ch.rate_vh);
    os << format_number(ch.lambda_signal) << ',' << format_number(ch.lambda_idler) << ','
       << format_number(ch.rate_hv) << ',' << format_number(ch.rate_vh) << ','
       << format_number(est.f_hat) << ',' << format_number(est.f_hat_inverse) << '\n';
  }
  if (!os) throw std::runtime_error("write failed: spectrum.csv");
  return channels;
}

WdmSummary cmd_qkd(const RunConfig& config) {
  write_config_echo(config);
  const auto channels = make_channels(config);

  std::vector<std::future<ChannelKeyReport>> jobs;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    jobs.push_back(std::async(std::launch::async, [&config, &channels, k] {
      const auto& ch = channels[k];
      const Source source = channel_source(config, ch);
      ProtocolConfig protocol = config.qkd.protocol;
      if (config.qkd.calibrate_flips) {
        std::tie(protocol.flip_rectilinear, protocol.flip_diagonal) =
            calibrate_flips(source, protocol);
      }
      return run_bbm92(source, protocol, k, ch.lambda_signal);
    }));
  }
  std::vector<ChannelKeyReport> reports;
  for (auto& j : jobs) reports.push_back(j.get());
  WdmSummary summary = wdm_aggregate(reports);

  {
    auto os = open_output(config.output_dir / "qkd_channels.csv");
    write_reports_csv(os, summary.channels);
  }
  json doc = to_json(summary);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto& ch = channels[k];
    doc["channels"][k]["single_term"] = ch.rate_hv == 0.0 || ch.rate_vh == 0.0;
    doc["channels"][k]["source"] = describe(channel_source(config, ch));
  }
  write_json(config.output_dir / "qkd_channels.json", doc["channels"]);
  doc["units"] = kUnits;
  write_json(config.output_dir / "qkd_summary.json", doc);
  return summary;
}

json cmd_reproduce_figures(const RunConfig& config) {
  write_config_echo(config);
  struct Panel {
    const char* name;
    double f;
    double alpha_deg;
  };
  const Panel panels[] = {{"fig2a", 1.0, 0.0},
                          {"fig2b", 1.0, 180.0},
                          {"fig2c", 1.0, 60.0},
                          {"fig2d", 1.73, 0.0}};
  json index = json::object();
  for (const auto& p : panels) {
    index[p.name] = cmd_theory_scan(BiphotonPureState::from_degrees(p.f, p.alpha_deg),
                                    {0.0, 45.0, 90.0, 135.0}, config.output_dir / p.name);
  }
  write_json(config.output_dir / "figures.json", index);
  return index;
}

}  // namespace wdmqkd
