// End-to-end tests of the swapsim command-line tool. Each case invokes the
// installed binary through the shell, then inspects exit status, stdout, and
// the JSON report / record files it writes.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using Catch::Approx;
using nlohmann::json;

namespace {

const std::string kCliPath = SWAPSIM_CLI_PATH;

struct CliRun {
  int exit_code;
  std::string output;  // stdout
  std::string errors;  // stderr
};

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("swapsim_cli_" + std::to_string(::getpid()) + "_" + name);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

CliRun run_cli(const std::string& args) {
  const std::filesystem::path out_path = temp_path("stdout.txt");
  const std::filesystem::path err_path = temp_path("stderr.txt");
  const std::string command = "\"" + kCliPath + "\" " + args + " > \"" + out_path.string() +
                              "\" 2> \"" + err_path.string() + "\"";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return CliRun{WEXITSTATUS(status), read_file(out_path), read_file(err_path)};
}

json report_from(const std::filesystem::path& path) { return json::parse(read_file(path)); }

bool all_checks_pass(const json& report) {
  for (const json& check : report.at("checks")) {
    if (!check.at("pass").get<bool>()) return false;
  }
  return true;
}

const json* find_check(const json& report, const std::string& name) {
  for (const json& check : report.at("checks")) {
    if (check.at("name") == name) return &check;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("cli verify", "[cli]") {
  SECTION("all identities hold and the exit status is 0") {
    const auto report_path = temp_path("verify_report.json");
    const CliRun run = run_cli("verify --report " + report_path.string());
    REQUIRE(run.exit_code == 0);
    REQUIRE(run.output.find("result: PASS") != std::string::npos);

    const json report = report_from(report_path);
    REQUIRE(report.at("config").at("command") == "verify");
    REQUIRE(report.at("checks").size() == 13);
    REQUIRE(all_checks_pass(report));
    REQUIRE(report.at("results").at("max_residual").get<double>() < 1e-12);
  }
  SECTION("an injected amplitude fault flips the verdict and the exit status") {
    const auto report_path = temp_path("verify_corrupt.json");
    const CliRun run = run_cli("verify --corrupt --report " + report_path.string());
    REQUIRE(run.exit_code == 1);
    REQUIRE(run.output.find("result: FAIL") != std::string::npos);

    const json report = report_from(report_path);
    const json* check = find_check(report, "joint-state-amplitudes");
    REQUIRE(check != nullptr);
    REQUIRE_FALSE(check->at("pass").get<bool>());
  }
}

TEST_CASE("cli chsh", "[cli]") {
  const double root8 = 2.0 * std::sqrt(2.0);
  SECTION("default settings give the four known exact values") {
    const auto report_path = temp_path("chsh_report.json");
    const CliRun run = run_cli("chsh --report " + report_path.string());
    REQUIRE(run.exit_code == 0);

    const json s = report_from(report_path).at("results").at("s_exact");
    REQUIRE(s.at("psi-").get<double>() == Approx(-root8));
    REQUIRE(s.at("phi+").get<double>() == Approx(root8));
    REQUIRE(s.at("psi+").get<double>() == Approx(0.0).margin(1e-12));
    REQUIRE(s.at("phi-").get<double>() == Approx(0.0).margin(1e-12));
    REQUIRE(s.at("mixed").get<double>() == Approx(0.0).margin(1e-12));
  }
  SECTION("rotated settings move every conditioned value inside the bound") {
    const auto report_path = temp_path("chsh_rotated.json");
    const CliRun run =
        run_cli("chsh --settings 10,100,55,145 --report " + report_path.string());
    REQUIRE(run.exit_code == 0);
    const json report = report_from(report_path);
    REQUIRE(all_checks_pass(report));
    // The whole problem is invariant under a common rotation in the x-z
    // plane, so shifting all four angles by 10 degrees reproduces the same
    // extremal values.
    const json s = report.at("results").at("s_exact");
    REQUIRE(s.at("psi-").get<double>() == Approx(-root8));
    REQUIRE(s.at("phi+").get<double>() == Approx(root8));
  }
  SECTION("the report lands on stdout when --report is not given") {
    const CliRun run = run_cli("chsh");
    REQUIRE(run.exit_code == 0);
    REQUIRE(run.output.find("\"command\": \"chsh\"") != std::string::npos);
  }
}

TEST_CASE("cli swap", "[cli]") {
  SECTION("bell mode: post-selected CHSH violation with records on disk") {
    const auto report_path = temp_path("swap_report.json");
    const auto records_path = temp_path("swap_records.jsonl");
    const CliRun run = run_cli("swap --trials 10000 --seed 42 --out " + records_path.string() +
                               " --report " + report_path.string());
    REQUIRE(run.exit_code == 0);

    const json report = report_from(report_path);
    REQUIRE(all_checks_pass(report));
    REQUIRE(report.at("results").at("num_records") == 10000);

    const json selected = report.at("results").at("selected");
    REQUIRE(selected.at("target") == "psi-");
    REQUIRE(selected.at("s_exact").get<double>() == Approx(-2.0 * std::sqrt(2.0)));
    const double s_value = selected.at("s_value").get<double>();
    const double s_err = selected.at("s_std_error").get<double>();
    REQUIRE(std::abs(s_value - selected.at("s_exact").get<double>()) < 4.0 * s_err);
    REQUIRE(selected.at("excess_sigma_over_2").get<double>() > 4.0);

    // A chance subset of equal size shows no violation.
    const json chance = report.at("results").at("chance_subset");
    REQUIRE(chance.at("count") == selected.at("count"));
    REQUIRE(std::abs(chance.at("s_value").get<double>()) <
            2.0 + 4.0 * chance.at("s_std_error").get<double>());

    // Record file: one JSON object per trial, all in bell mode.
    const std::string records_text = read_file(records_path);
    REQUIRE(count_lines(records_text) == 10000);
    std::istringstream lines(records_text);
    std::string line;
    REQUIRE(std::getline(lines, line));
    const json first = json::parse(line);
    REQUIRE(first.at("trial_id") == 0);
    REQUIRE(first.at("d_action") == "bell");
    REQUIRE(first.at("message_delivered") == true);
  }
  SECTION("selecting a different Bell outcome flips the sign of S") {
    const auto report_path = temp_path("swap_phiplus.json");
    const CliRun run = run_cli("swap --trials 10000 --seed 42 --select phi+ --report " +
                               report_path.string());
    REQUIRE(run.exit_code == 0);
    const json selected = report_from(report_path).at("results").at("selected");
    REQUIRE(selected.at("s_exact").get<double>() == Approx(2.0 * std::sqrt(2.0)));
    REQUIRE(selected.at("s_value").get<double>() > 2.0);
  }
  SECTION("zz mode writes CSV records and an exact consistency verdict") {
    const auto report_path = temp_path("swap_zz.json");
    const auto records_path = temp_path("swap_records.csv");
    const CliRun run = run_cli("swap --trials 400 --seed 3 --d-action zz --format csv --out " +
                               records_path.string() + " --report " + report_path.string());
    REQUIRE(run.exit_code == 0);

    const json report = report_from(report_path);
    REQUIRE(report.at("results").at("consistency_violations") == 0);
    const json* consistency = find_check(report, "zz-outcome-consistency");
    REQUIRE(consistency != nullptr);
    REQUIRE(consistency->at("pass").get<bool>());

    const std::string csv = read_file(records_path);
    REQUIRE(count_lines(csv) == 401);  // header + one row per trial
    REQUIRE(csv.rfind("trial_id,d_action,d_outcome,message_delivered,setting_pair,outcome1,"
                      "outcome4\n", 0) == 0);
  }
  SECTION("none mode reports uncorrelated outcome products") {
    const auto report_path = temp_path("swap_none.json");
    const CliRun run =
        run_cli("swap --trials 2000 --seed 4 --d-action none --report " + report_path.string());
    REQUIRE(run.exit_code == 0);
    const json report = report_from(report_path);
    REQUIRE(all_checks_pass(report));
    REQUIRE(report.at("results").at("mean_products").size() == 4);
  }
  SECTION("identical invocations produce byte-identical record files") {
    const auto first_path = temp_path("swap_repeat_a.jsonl");
    const auto second_path = temp_path("swap_repeat_b.jsonl");
    REQUIRE(run_cli("swap --trials 500 --seed 9 --out " + first_path.string()).exit_code == 0);
    REQUIRE(run_cli("swap --trials 500 --seed 9 --out " + second_path.string()).exit_code == 0);
    REQUIRE(read_file(first_path) == read_file(second_path));
  }
}

TEST_CASE("cli marginals", "[cli]") {
  SECTION("full three-action comparison stays under the statistical budget") {
    const auto report_path = temp_path("marginals_report.json");
    const CliRun run =
        run_cli("marginals --trials 10000 --seed 7 --report " + report_path.string());
    REQUIRE(run.exit_code == 0);

    const json report = report_from(report_path);
    REQUIRE(all_checks_pass(report));
    const json exact = report.at("results").at("exact_distance");
    REQUIRE(exact.at("bell").get<double>() < 1e-12);
    REQUIRE(exact.at("zz").get<double>() < 1e-12);
    REQUIRE(exact.at("none").get<double>() < 1e-12);
    const json sampled = report.at("results").at("sampled");
    REQUIRE(sampled.at("max_tv").get<double>() < sampled.at("threshold").get<double>());
    REQUIRE(sampled.at("threshold").get<double>() == Approx(0.08));
  }
  SECTION("restricting to one action degenerates to a self-comparison") {
    const auto report_path = temp_path("marginals_bell.json");
    const CliRun run = run_cli("marginals --trials 10000 --d-action bell --report " +
                               report_path.string());
    REQUIRE(run.exit_code == 0);
    const json report = report_from(report_path);
    REQUIRE(report.at("results").at("sampled").at("max_tv").get<double>() == 0.0);
    REQUIRE(report.at("results").at("exact_distance").contains("bell"));
    REQUIRE_FALSE(report.at("results").at("exact_distance").contains("zz"));
  }
}

TEST_CASE("cli usage errors exit with status 2", "[cli]") {
  SECTION("a subcommand is required") {
    REQUIRE(run_cli("").exit_code == 2);
  }
  SECTION("unknown d-action values are rejected at parse time") {
    REQUIRE(run_cli("swap --d-action hadamard").exit_code == 2);
  }
  SECTION("selection is tied to Bell mode") {
    const CliRun run = run_cli("swap --trials 10 --d-action zz --select psi-");
    REQUIRE(run.exit_code == 2);
    REQUIRE(run.errors.find("error:") != std::string::npos);
  }
  SECTION("swap requires at least one trial") {
    REQUIRE(run_cli("swap --trials 0").exit_code == 2);
  }
  SECTION("marginals enforces its statistical minimum") {
    const CliRun run = run_cli("marginals --trials 100");
    REQUIRE(run.exit_code == 2);
    REQUIRE(run.errors.find("10000") != std::string::npos);
  }
  SECTION("settings must be exactly four angles") {
    REQUIRE(run_cli("chsh --settings 0,90,45").exit_code == 2);
  }
  SECTION("unknown flags are rejected") {
    REQUIRE(run_cli("verify --frobnicate").exit_code == 2);
  }
  SECTION("help is not an error") {
    const CliRun run = run_cli("--help");
    REQUIRE(run.exit_code == 0);
    REQUIRE(run.output.find("verify") != std::string::npos);
  }
}
