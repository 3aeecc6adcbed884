#include "wdmqkd/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "wdmqkd/angles.hpp"

namespace wdmqkd {
namespace {

using nlohmann::json;

// Reads a JSON object while tracking which keys were consumed, so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) fail(name(key), "expected an integer");
      if (std::is_unsigned_v<T> && !it->is_number_unsigned()) {
        fail(name(key), "expected a nonnegative integer");
      }
    }
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      fail(name(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  bool has(const char* key) const {
    auto it = obj_.find(key);
    return it != obj_.end() && !it->is_null();
  }

  void skip(const char* key) { seen_.insert(key); }

  Reader child(const char* key) {
    seen_.insert(key);
    return Reader(obj_.at(key), name(key));
  }

  std::string name(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(name(key), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_profile(Reader& parent, const char* key, SpectralProfile& p) {
  if (!parent.has(key)) {
    parent.skip(key);
    return;
  }
  Reader r = parent.child(key);
  r.get("center_nm", p.center);
  r.get("fwhm_nm", p.width);
  r.get("peak", p.peak);
  r.finish();
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) Reader::fail(key, what);
}

json profile_json(const SpectralProfile& p) {
  return {{"center_nm", p.center}, {"fwhm_nm", p.width}, {"peak", p.peak}};
}

}  // namespace

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  detection.seed = s;
  qkd.protocol.seed = s;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig c;
  Reader root(doc, "");
  std::uint64_t seed = 0;
  root.get("seed", seed);
  c.set_seed(seed);
  std::string out_dir = c.output_dir.string();
  root.get("output_dir", out_dir);
  c.output_dir = out_dir;

  if (root.has("source")) {
    Reader s = root.child("source");
    std::string kind = "entangled";
    s.get("kind", kind);
    if (kind == "entangled") {
      c.source.kind = SourceKind::entangled;
    } else if (kind == "product") {
      c.source.kind = SourceKind::product;
    } else {
      Reader::fail("source.kind", "expected 'entangled' or 'product', got '" + kind + "'");
    }
    s.get("pump_nm", c.source.pump.lambda_pump);
    s.get("alpha_deg", c.source.alpha_deg);
    std::string conv = to_string(c.source.f_convention);
    s.get("f_convention", conv);
    try {
      c.source.f_convention = parse_f_convention(conv);
    } catch (const std::invalid_argument& e) {
      Reader::fail("source.f_convention", e.what());
    }
    read_profile(s, "hv_profile", c.source.hv_profile);
    read_profile(s, "vh_profile", c.source.vh_profile);
    std::string file;
    s.get("spectrum_file", file);
    if (!file.empty()) {
      std::filesystem::path p(file);
      if (p.is_relative()) p = base_dir / p;
      c.source.spectrum_file = p.lexically_normal();
    }
    s.get("lambda_min_nm", c.source.lambda_min_nm);
    s.get("lambda_max_nm", c.source.lambda_max_nm);
    s.get("n_channels", c.source.n_channels);
    s.finish();
  }

  if (root.has("detection")) {
    Reader d = root.child("detection");
    d.get("pair_rate", c.detection.pair_rate);
    d.get("efficiency_signal", c.detection.efficiency_signal);
    d.get("efficiency_idler", c.detection.efficiency_idler);
    d.get("accidental_rate", c.detection.accidental_rate);
    d.get("integration_time", c.detection.integration_time);
    d.finish();
  }

  if (root.has("fit")) {
    Reader f = root.child("fit");
    f.get("period_deg", c.fit.period_deg);
    std::string arm = to_string(c.fit.fixed_arm);
    f.get("fixed_arm", arm);
    try {
      c.fit.fixed_arm = parse_arm(arm);
    } catch (const std::invalid_argument& e) {
      Reader::fail("fit.fixed_arm", e.what());
    }
    f.get("fixed_angles_deg", c.fit.fixed_angles_deg);
    f.get("scan_step_deg", c.fit.scan_step_deg);
    f.finish();
  }

  if (root.has("qkd")) {
    Reader q = root.child("qkd");
    q.get("n_pairs", c.qkd.protocol.n_pairs);
    q.get("flip_rectilinear", c.qkd.protocol.flip_rectilinear);
    q.get("flip_diagonal", c.qkd.protocol.flip_diagonal);
    q.get("calibrate_flips", c.qkd.calibrate_flips);
    q.finish();
  }
  // explicit nulls for whole sections are treated as omitted
  for (const char* key : {"source", "detection", "fit", "qkd"}) root.skip(key);
  root.finish();

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate(const RunConfig& c) {
  const auto& s = c.source;
  require(std::isfinite(s.pump.lambda_pump) && s.pump.lambda_pump > 0.0, "source.pump_nm",
          "must be > 0");
  require(std::isfinite(s.alpha_deg), "source.alpha_deg", "must be finite");
  for (const auto& [key, p] : {std::pair{"source.hv_profile", s.hv_profile},
                               std::pair{"source.vh_profile", s.vh_profile}}) {
    require(std::isfinite(p.center), std::string(key) + ".center_nm", "must be finite");
    require(std::isfinite(p.width) && p.width > 0.0, std::string(key) + ".fwhm_nm",
            "must be > 0");
    require(std::isfinite(p.peak) && p.peak >= 0.0, std::string(key) + ".peak",
            "must be >= 0");
  }
  if (s.spectrum_file) {
    require(std::filesystem::exists(*s.spectrum_file), "source.spectrum_file",
            "file not found: " + s.spectrum_file->string());
  }
  require(s.lambda_min_nm > s.pump.lambda_pump, "source.lambda_min_nm",
          "must exceed the pump wavelength");
  require(std::isfinite(s.lambda_max_nm) && s.lambda_max_nm >= s.lambda_min_nm,
          "source.lambda_max_nm", "must be >= lambda_min_nm");
  require(s.n_channels >= 1, "source.n_channels", "must be >= 1");

  try {
    c.detection.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    Reader::fail(msg.substr(0, colon), msg.substr(colon + 2));
  }

  require(c.fit.period_deg == 180.0 || c.fit.period_deg == 360.0, "fit.period_deg",
          "must be 180 or 360");
  require(!c.fit.fixed_angles_deg.empty(), "fit.fixed_angles_deg", "must not be empty");
  for (double a : c.fit.fixed_angles_deg) {
    require(std::isfinite(a), "fit.fixed_angles_deg", "angles must be finite");
  }
  require(std::isfinite(c.fit.scan_step_deg) && c.fit.scan_step_deg > 0.0 &&
              c.fit.scan_step_deg <= 45.0,
          "fit.scan_step_deg", "must be in (0, 45]");
  require(c.qkd.protocol.n_pairs >= 1, "qkd.n_pairs", "must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  json source = {{"kind", c.source.kind == SourceKind::entangled ? "entangled" : "product"},
                 {"pump_nm", c.source.pump.lambda_pump},
                 {"alpha_deg", c.source.alpha_deg},
                 {"f_convention", to_string(c.source.f_convention)},
                 {"hv_profile", profile_json(c.source.hv_profile)},
                 {"vh_profile", profile_json(c.source.vh_profile)},
                 {"spectrum_file", c.source.spectrum_file
                                       ? json(c.source.spectrum_file->string())
                                       : json(nullptr)},
                 {"lambda_min_nm", c.source.lambda_min_nm},
                 {"lambda_max_nm", c.source.lambda_max_nm},
                 {"n_channels", c.source.n_channels}};
  json detection = {{"pair_rate", c.detection.pair_rate},
                    {"efficiency_signal", c.detection.efficiency_signal},
                    {"efficiency_idler", c.detection.efficiency_idler},
                    {"accidental_rate", c.detection.accidental_rate},
                    {"integration_time", c.detection.integration_time}};
  json fit = {{"period_deg", c.fit.period_deg},
              {"fixed_arm", to_string(c.fit.fixed_arm)},
              {"fixed_angles_deg", c.fit.fixed_angles_deg},
              {"scan_step_deg", c.fit.scan_step_deg}};
  json qkd = {{"n_pairs", c.qkd.protocol.n_pairs},
              {"flip_rectilinear", c.qkd.protocol.flip_rectilinear},
              {"flip_diagonal", c.qkd.protocol.flip_diagonal},
              {"calibrate_flips", c.qkd.calibrate_flips}};
  return {{"seed", c.seed},       {"output_dir", c.output_dir.string()},
          {"source", source},     {"detection", detection},
          {"fit", fit},           {"qkd", qkd}};
}

std::vector<SpectralChannel> make_channels(const RunConfig& c) {
  const auto& s = c.source;
  const double alpha = deg_to_rad(s.alpha_deg);
  const std::pair range{s.lambda_min_nm, s.lambda_max_nm};
  if (s.spectrum_file) {
    return build_channels(TabulatedSpectrum::load_csv(*s.spectrum_file), alpha, range,
                          s.n_channels, s.pump);
  }
  return build_channels(s.hv_profile, s.vh_profile, alpha, range, s.n_channels, s.pump);
}

Source channel_source(const RunConfig& c, const SpectralChannel& channel) {
  if (c.source.kind == SourceKind::product) return ProductState{};
  if (channel.rate_hv == 0.0 || channel.rate_vh == 0.0) {
    // single-term state; f = 0 after swapping labels if needed
    return BiphotonPureState(0.0, channel.alpha);
  }
  return channel_state(channel, c.source.f_convention);
}

}  // namespace wdmqkd
