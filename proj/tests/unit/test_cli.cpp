#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "wdmqkd_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(WDMQKD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 180.0);
  if (d <= -90.0) d += 180.0;
  if (d > 90.0) d -= 180.0;
  return d;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("") != 0);
  CHECK(run("bogus") != 0);
  const auto bad = write_config("bad.json", R"({"detection": {"efficiency_signal": 1.5}})");
  CHECK(run("--config " + bad.string() + " spectrum --out " + (kRoot / "bad").string()) == 1);
  const auto unknown = write_config("unknown.json", R"({"sed": 1})");
  CHECK(run("--config " + unknown.string() + " spectrum") == 1);
  CHECK(run("--period 90 spectrum") != 0);
  CHECK(run("--out " + (kRoot / "ok").string() + " spectrum") == 0);
  CHECK(fs::exists(kRoot / "ok" / "resolved_config.json"));
}

TEST_CASE("every command is byte-identical on repeat") {
  const auto cfg = write_config("det.json", R"({"seed": 99,
      "source": {"lambda_min_nm": 866, "lambda_max_nm": 870, "n_channels": 2},
      "qkd": {"n_pairs": 20000}})");
  for (const std::string cmd :
       {"theory-scan --f 1.73 --alpha 20", "simulate-fit", "spectrum", "qkd", "reproduce-figures"}) {
    const fs::path a = kRoot / "rep_a";
    fs::remove_all(a);
    REQUIRE(run("--config " + cfg.string() + " --out " + a.string() + " " + cmd) == 0);
    const auto first = tree(a);
    fs::remove_all(a);
    REQUIRE(run("--config " + cfg.string() + " --out " + a.string() + " " + cmd) == 0);
    CHECK(first.size() > 1);
    CHECK(first == tree(a));
  }
  // a different seed changes the stochastic outputs
  const fs::path c = kRoot / "rep_c";
  fs::remove_all(c);
  REQUIRE(run("--config " + cfg.string() + " --seed 100 --out " + c.string() + " qkd") == 0);
  REQUIRE(run("--config " + cfg.string() + " --out " + (kRoot / "rep_a").string() + " qkd") == 0);
  CHECK(slurp(c / "qkd_channels.csv") != slurp(kRoot / "rep_a" / "qkd_channels.csv"));
}

TEST_CASE("theory-scan summaries") {
  const fs::path out = kRoot / "theory";
  REQUIRE(run("--out " + out.string() + " theory-scan --f 1 --alpha 0") == 0);
  auto rows = read_json(out / "theory_summary.json")["rows"];
  CHECK(rows[0]["shift_deg"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rows[1]["shift_deg"].get<double>() == doctest::Approx(-45.0).epsilon(1e-9));
  CHECK(rows[3]["shift_deg"].get<double>() == doctest::Approx(45.0).epsilon(1e-9));
  CHECK(fs::exists(out / "theory_ts45.csv"));
  CHECK(slurp(out / "theory_ts0.csv").find("theta_i_deg,rate\n0,") != std::string::npos);

  REQUIRE(run("--out " + out.string() + " theory-scan --f 1.73 --alpha 0") == 0);
  rows = read_json(out / "theory_summary.json")["rows"];
  CHECK(rows[1]["shift_deg"].get<double>() == doctest::Approx(-30.0).epsilon(1e-3));
  CHECK(rows[3]["shift_deg"].get<double>() == doctest::Approx(30.0).epsilon(1e-3));

  REQUIRE(run("--out " + out.string() + " theory-scan --f 1 --alpha 60 --theta-s 0,45") == 0);
  rows = read_json(out / "theory_summary.json")["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["visibility"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));

  // degenerate settings are flagged but still succeed
  REQUIRE(run("--out " + out.string() + " theory-scan --source product") == 0);
  rows = read_json(out / "theory_summary.json")["rows"];
  CHECK(rows[3]["degenerate"].get<bool>());
}

TEST_CASE("spectrum rows at 866 and 870 nm") {
  const fs::path out = kRoot / "spectrum";
  REQUIRE(run("--out " + out.string() + " spectrum") == 0);
  std::istringstream in(slurp(out / "spectrum.csv"));
  std::string line;
  std::map<double, std::pair<double, double>> rates;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'l') continue;
    std::istringstream row(line);
    double ls, li, hv, vh;
    char comma;
    row >> ls >> comma >> li >> comma >> hv >> comma >> vh;
    CHECK(1.0 / ls + 1.0 / li == doctest::Approx(1.0 / 429.7).epsilon(1e-12));
    rates[ls] = {hv, vh};
  }
  CHECK(rates.size() == 8);
  REQUIRE(rates.count(866.0));
  REQUIRE(rates.count(870.0));
  CHECK(rates[866.0].first / rates[866.0].second == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(rates[870.0].first / rates[870.0].second == doctest::Approx(1.0).epsilon(1e-9));

  const auto one = write_config("one.json", R"({"source": {"n_channels": 1}})");
  REQUIRE(run("--config " + one.string() + " --out " + (kRoot / "one").string() + " spectrum") == 0);
  const auto text = slurp(kRoot / "one" / "spectrum.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("qkd over the default spectrum") {
  const fs::path out = kRoot / "qkd";
  REQUIRE(run("--seed 5 --out " + out.string() + " qkd") == 0);
  const auto summary = read_json(out / "qkd_summary.json");
  const auto& channels = summary["channels"];
  REQUIRE(channels.size() == 8);
  double q866 = -1, q870 = -1, total = 0;
  for (const auto& ch : channels) {
    if (ch["lambda_nm"] == 866.0) q866 = ch["qber_diag"].get<double>();
    if (ch["lambda_nm"] == 870.0) q870 = ch["qber_diag"].get<double>();
    total += ch["secret_bits"].get<double>();
  }
  CHECK(q870 < q866);
  CHECK(summary["total_secret_bits"].get<double>() == doctest::Approx(total).epsilon(1e-12));
  CHECK(slurp(out / "qkd_channels.csv").find("lambda_nm,sifted_bits,qber_rect,qber_diag") !=
        std::string::npos);
}

TEST_CASE("simulate-fit peaks and shifts") {
  const auto product = write_config("product.json", R"({"seed": 3,
      "source": {"kind": "product", "n_channels": 1},
      "fit": {"fixed_angles_deg": [0, 45, 90]}})");
  const fs::path out = kRoot / "simfit_product";
  REQUIRE(run("--config " + product.string() + " --out " + out.string() + " simulate-fit") == 0);
  auto settings = read_json(out / "simulate_fit_summary.json")["channels"][0]["settings"];
  REQUIRE(settings.size() == 3);
  for (std::size_t j = 1; j < settings.size(); ++j) {
    const double d = settings[j]["shift_deg"].get<double>();
    const double err = settings[j]["shift_err_deg"].get<double>();
    CHECK(std::abs(d) < 3 * err);
  }
  CHECK(fs::exists(out / "scan_ch0_fixed45.csv"));
  CHECK(fs::exists(out / "fit_ch0_fixed45.json"));

  const auto bell = write_config("bell.json", R"({"seed": 4,
      "source": {"lambda_min_nm": 870, "lambda_max_nm": 870, "n_channels": 1}})");
  const fs::path out2 = kRoot / "simfit_bell";
  REQUIRE(run("--config " + bell.string() + " --out " + out2.string() + " simulate-fit") == 0);
  settings = read_json(out2 / "simulate_fit_summary.json")["channels"][0]["settings"];
  REQUIRE(settings.size() == 4);
  CHECK(std::abs(angle_diff(settings[1]["shift_deg"].get<double>(), -45.0)) < 1.5);
  CHECK(std::abs(angle_diff(settings[3]["shift_deg"].get<double>(), 45.0)) < 1.5);
}
