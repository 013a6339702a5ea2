#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>

// End-to-end checks against the installed command-line binary. The path is
// baked in at configure time so the tests always exercise the freshly built
// tool.

namespace {

struct CommandResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path();
  const auto out_path = dir / ("ecsim_cli_out_" + std::to_string(++counter));
  const auto err_path = dir / ("ecsim_cli_err_" + std::to_string(counter));

  std::string cmd = env_prefix.empty() ? std::string() : env_prefix + " ";
  cmd += std::string(ECSIM_CLI_PATH) + " " + args;
  cmd += " >" + out_path.string() + " 2>" + err_path.string();

  const int status = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(err_path);
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("single round csv is frozen byte for byte") {
    const auto r = run_cli("run --protocol circuit --state bell --alpha-sq 0.8");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "round,alpha_sq,p_k,cumulative\n1,0.8,0.32,0.32\n");
  }

  TEST_CASE("two round csv carries the recycled round") {
    const auto r = run_cli("run --protocol circuit --state bell --alpha-sq 0.8 --rounds 2");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "round,alpha_sq,p_k,cumulative");
    CHECK(lines[1] == "1,0.8,0.32,0.32");
    CHECK(lines[2] == "2,0.941176470588,0.110726643599,0.395294117647");
  }

  TEST_CASE("all three protocols agree on the emitted first round") {
    const auto circuit = run_cli("run --protocol circuit --state ghz3 --alpha-sq 0.7");
    const auto optics = run_cli("run --protocol optics --state ghz3 --alpha-sq 0.7");
    const auto qnd = run_cli("run --protocol qnd --state ghz3 --alpha-sq 0.7");
    REQUIRE(circuit.exit_code == 0);
    REQUIRE(optics.exit_code == 0);
    REQUIRE(qnd.exit_code == 0);
    CHECK(lines_of(circuit.out)[1] == lines_of(optics.out)[1]);
    CHECK(lines_of(circuit.out)[1] == lines_of(qnd.out)[1]);
  }

  TEST_CASE("thirty rounds converge to the asymptotic bound") {
    const auto r = run_cli("run --protocol circuit --state bell --alpha-sq 0.8 --rounds 30");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 2);
    const auto cells = split_csv(lines.back());
    REQUIRE(cells.size() == 4);
    CHECK(std::abs(std::stod(cells[3]) - 0.4) <= 1e-6);
  }

  TEST_CASE("json format mirrors the csv records") {
    const auto r = run_cli(
        "run --protocol circuit --state bell --alpha-sq 0.8 --rounds 2 --format json");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("protocol") == "circuit");
    CHECK(doc.at("state") == "bell");
    CHECK(doc.at("asymptotic_bound").get<double>() == doctest::Approx(0.4).epsilon(1e-12));
    REQUIRE(doc.at("records").size() == 2);
    CHECK(doc.at("records")[0].at("p_k").get<double>() == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(doc.at("records")[1].at("cumulative").get<double>() ==
          doctest::Approx(0.3952941176470588).epsilon(1e-12));
  }

  TEST_CASE("reruns are byte identical") {
    const std::string args =
        "run --protocol qnd --state cluster4 --alpha-sq 0.65 --rounds 5 --format json";
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);
  }

  TEST_CASE("configuration mistakes exit with code 2") {
    CHECK(run_cli("run --protocol teleport --state bell --alpha-sq 0.8").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state bell").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state bell --alpha-sq 0.5").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state bell --alpha-sq 1.2").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state nosuchstate --alpha-sq 0.8").exit_code == 2);
    CHECK(run_cli("run --protocol optics --state bell --alpha-sq 0.8 --rounds 2").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state bell --alpha-sq 0.8 --no-such-flag").exit_code ==
          2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state bell --alpha-sq 0.8 --mode montecarlo "
                  "--format json")
              .exit_code == 2);
    CHECK(run_cli("run --protocol circuit --state /no/such/file.json").exit_code == 2);
  }

  TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("run --help").exit_code == 0);
    CHECK(run_cli("sweep --help").exit_code == 0);
  }

  TEST_CASE("sampling emits a deterministic trial table") {
    const std::string args =
        "run --protocol circuit --state bell --alpha-sq 0.8 --mode montecarlo --trials 2000 "
        "--seed 42";
    const auto r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 2000 + 1 + 6);  // header, trials, six footer lines
    CHECK(lines[0] == "trial,success_round");
    CHECK(lines[1].substr(0, 2) == "0,");

    double frequency = -1.0;
    for (const auto& line : lines) {
      if (line.rfind("# frequency=", 0) == 0) frequency = std::stod(line.substr(12));
    }
    REQUIRE(frequency >= 0.0);
    CHECK(std::abs(frequency - 0.32) < 0.04);  // ~4 sigma at 2000 trials

    const auto again = run_cli(args);
    CHECK(again.out == r.out);

    const auto reseeded = run_cli(
        "run --protocol circuit --state bell --alpha-sq 0.8 --mode montecarlo --trials 2000 "
        "--seed 43");
    CHECK(reseeded.out != r.out);
  }

  TEST_CASE("seed precedence: flag beats environment beats default") {
    const std::string base =
        "run --protocol circuit --state bell --alpha-sq 0.8 --mode montecarlo --trials 500";
    const auto flag_43 = run_cli(base + " --seed 43");
    const auto env_43 = run_cli(base, "ECP_SIM_SEED=43");
    const auto flag_wins = run_cli(base + " --seed 43", "ECP_SIM_SEED=99");
    const auto defaulted = run_cli(base);
    const auto default_42 = run_cli(base + " --seed 42");
    REQUIRE(flag_43.exit_code == 0);
    CHECK(env_43.out == flag_43.out);
    CHECK(flag_wins.out == flag_43.out);
    CHECK(defaulted.out == default_42.out);
    CHECK(run_cli(base, "ECP_SIM_SEED=notanumber").exit_code == 2);
  }

  TEST_CASE("sweep tabulates the default grid") {
    const auto r = run_cli("sweep --state bell");
    REQUIRE(r.exit_code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "alpha_sq,single_round_prob,asymptotic_bound,cumulative_at_N");
    const auto first = split_csv(lines[1]);
    REQUIRE(first.size() == 4);
    CHECK(first[0] == "0.55");
    CHECK(first[1] == "0.495");
    CHECK(first[2] == "0.9");
    CHECK(std::abs(std::stod(first[3]) - 0.9) <= 1e-6);
    const auto last = split_csv(lines[9]);
    CHECK(last[0] == "0.95");
    CHECK(std::abs(std::stod(last[3]) - 0.1) <= 1e-6);
  }

  TEST_CASE("sweep rejects a grid that touches the balanced point") {
    CHECK(run_cli("sweep --state bell --alpha-sq-min 0.5 --alpha-sq-max 0.5 --steps 1")
              .exit_code == 2);
    CHECK(run_cli("sweep --state bell --alpha-sq-min 0.3 --alpha-sq-max 0.7 --steps 5")
              .exit_code == 2);
    CHECK(run_cli("sweep --state /tmp/nope.json").exit_code == 2);
  }

  TEST_CASE("verify passes on the healthy build and fails under an injected fault") {
    const auto healthy = run_cli("verify");
    REQUIRE(healthy.exit_code == 0);
    CHECK(healthy.out.find("[PASS]") != std::string::npos);
    CHECK(healthy.out.find("[FAIL]") == std::string::npos);
    CHECK(healthy.out.find("verification passed") != std::string::npos);

    const auto broken = run_cli("verify --inject-fault pbs-portmap");
    CHECK(broken.exit_code == 1);
    CHECK(broken.out.find("[FAIL]") != std::string::npos);

    CHECK(run_cli("verify --inject-fault no-such-fault").exit_code == 2);
  }

  TEST_CASE("verify writes a conservation report") {
    const auto path = std::filesystem::temp_directory_path() / "ecsim_report.json";
    std::filesystem::remove(path);
    const auto r = run_cli("verify --report " + path.string());
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(slurp(path));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() > 0);
    for (const auto& row : doc) {
      const double expected = 2.0 * (1.0 - row.at("alpha_sq").get<double>());
      for (const auto& v : row.at("espp_by_depth")) {
        CHECK(std::abs(v.get<double>() - expected) <= 1e-9);
      }
    }
    std::filesystem::remove(path);
  }

  TEST_CASE("exported documents feed back into run") {
    const auto path = std::filesystem::temp_directory_path() / "ecsim_state.json";
    std::filesystem::remove(path);
    const auto exported = run_cli("export-state --state q5 --alpha-sq 0.8 --output " +
                                  path.string());
    REQUIRE(exported.exit_code == 0);
    CHECK(nlohmann::json::parse(exported.out).at("alpha").get<double>() ==
          doctest::Approx(std::sqrt(0.8)).epsilon(1e-12));

    const auto rerun = run_cli("run --protocol circuit --state " + path.string());
    REQUIRE(rerun.exit_code == 0);
    CHECK(lines_of(rerun.out)[1] == "1,0.8,0.32,0.32");

    CHECK(run_cli("run --protocol circuit --state " + path.string() + " --alpha-sq 0.8")
              .exit_code == 2);
    std::filesystem::remove(path);
  }
}
