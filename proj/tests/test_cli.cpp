#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;   // path to the schedlaw binary, from argv
fs::path g_tmp;      // scratch directory, removed at exit

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_raw(const std::string& command) {
  CmdResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.out.append(buf, n);
  }
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Runs the CLI with stderr dropped.
CmdResult run(const std::string& args) {
  return run_raw("\"" + g_cli + "\" " + args + " 2>/dev/null");
}

// Runs the CLI with stderr folded into stdout.
CmdResult run_merged(const std::string& args) {
  return run_raw("\"" + g_cli + "\" " + args + " 2>&1");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

const char* kLinear100 = R"({"kind":"linear_decay","eta_peak":0.1,"T":100})";

// Records lying exactly on loss = 0.9 + (1/eta + eta)/sqrt(T).
fs::path write_reference_records() {
  const fs::path path = g_tmp / "records.csv";
  std::string text = "eta_ref,T_or_tokens,unit,final_loss\n";
  char row[128];
  for (double eta : {0.5, 1.0, 2.0}) {
    for (double T : {4000.0, 10000.0, 40000.0, 100000.0}) {
      const double loss = 0.9 + (1.0 / eta + eta) / std::sqrt(T);
      std::snprintf(row, sizeof(row), "%.17g,%.17g,steps,%.17g\n", eta, T,
                    loss);
      text += row;
    }
  }
  spit(path, text);
  return path;
}

}  // namespace

TEST_CASE("argument errors exit 1 and help exits 0") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("bound").code == 1);  // --schedule is required
  const CmdResult help = run("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("bound") != std::string::npos);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("bound writes csv to stdout by default") {
  const CmdResult r =
      run(std::string("bound --schedule '") + kLinear100 + "' --grid lin:4");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("tau,bound\n", 0) == 0);
  CHECK(r.out.find("\n100,") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
}

TEST_CASE("bound json report embeds tool, version, and resolved config") {
  const CmdResult r = run(std::string("bound --schedule '") + kLinear100 +
                          "' --grid log:10 --format json --kind averaged");
  REQUIRE(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("tool") == "schedlaw");
  CHECK(report.at("version") == "0.1.0");
  CHECK(report.at("subcommand") == "bound");
  CHECK(report.at("config").at("schedule").at("kind") == "linear_decay");
  CHECK(report.at("config").at("kind") == "averaged");
  CHECK(report.at("config").at("grid") == "log:10");
  REQUIRE(report.at("tau").size() == report.at("bound").size());
  CHECK(report.at("tau").size() == 10);
  for (const auto& v : report.at("bound")) CHECK(v.get<double>() > 0.0);
}

TEST_CASE("bound rejects malformed schedules and grids") {
  CHECK(run("bound --schedule '{\"kind\":\"nope\",\"eta_peak\":1,\"T\":4}'")
            .code == 1);
  CHECK(run("bound --schedule 'no-such-file.json'").code == 1);
  CHECK(run(std::string("bound --schedule '") + kLinear100 +
            "' --grid log:0").code == 1);
  CHECK(run(std::string("bound --schedule '") + kLinear100 +
            "' --kind best").code == 1);
}

TEST_CASE("bound svg artifact lands next to the report and reruns are byte-identical") {
  const fs::path report_path = g_tmp / "bound_report.json";
  const fs::path svg_path = g_tmp / "bound_report.svg";
  const std::string cmd = std::string("bound --schedule '") + kLinear100 +
                          "' --grid log:20 --format svg --out " +
                          report_path.string();
  REQUIRE(run(cmd).code == 0);
  REQUIRE(fs::exists(report_path));
  REQUIRE(fs::exists(svg_path));

  const std::string report_bytes = slurp(report_path);
  const std::string svg_bytes = slurp(svg_path);
  const json report = json::parse(report_bytes);
  CHECK(report.at("artifact") == svg_path.string());
  CHECK(svg_bytes.find("<svg") != std::string::npos);
  CHECK(svg_bytes.find("<polyline") != std::string::npos);
  CHECK(svg_bytes.find("</svg>") != std::string::npos);

  REQUIRE(run(cmd).code == 0);
  CHECK(slurp(report_path) == report_bytes);
  CHECK(slurp(svg_path) == svg_bytes);
}

TEST_CASE("qualify prints the verdict and only emits json") {
  CmdResult r = run("qualify --kind cosine_decay");
  REQUIRE(r.code == 0);
  json report = json::parse(r.out);
  CHECK(report.at("subcommand") == "qualify");
  CHECK(report.at("report").at("verdict") == "qualified");
  const double alpha = report.at("report").at("alpha").get<double>();
  CHECK(alpha > 0.48);
  CHECK(alpha < 0.52);

  r = run("qualify --kind constant");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("report").at("verdict") == "not_qualified");

  r = run("qualify --kind wsd --c 0.8");
  REQUIRE(r.code == 0);
  report = json::parse(r.out);
  CHECK(report.at("report").at("verdict") == "qualified");
  CHECK(report.at("config").at("c") == 0.8);

  CHECK(run("qualify --kind cosine_decay --format csv").code == 1);
  CHECK(run("qualify --kind cosine_decay --exam-grid 10,abc").code == 1);
}

TEST_CASE("simulate emits a mean trace that fit can consume") {
  const fs::path sim_report = g_tmp / "sim.json";
  const fs::path sim_csv = g_tmp / "sim.csv";
  const std::string schedule =
      R"({"kind":"constant","eta_peak":0.05,"T":400})";
  const CmdResult sim = run("simulate --schedule '" + schedule +
                            "' --problem l1_distance --d 2 --noise 0.25"
                            " --seeds 2 --grid log:40 --format csv --out " +
                            sim_report.string());
  REQUIRE(sim.code == 0);
  REQUIRE(fs::exists(sim_csv));

  const json report = json::parse(slurp(sim_report));
  CHECK(report.at("subcommand") == "simulate");
  CHECK(report.at("artifact") == sim_csv.string());
  CHECK(report.at("summary").at("problem").at("kind") == "l1_distance");
  CHECK(report.at("summary").at("clipped_steps") == 0);

  const std::string trace = slurp(sim_csv);
  CHECK(trace.rfind("step,loss,lr\n", 0) == 0);
  CHECK(trace.find(",0.05\n") != std::string::npos);

  const CmdResult fit = run("fit --trace " + sim_csv.string());
  REQUIRE(fit.code == 0);
  const json fit_report = json::parse(fit.out).at("report");
  for (const char* key : {"L_inf", "D_tilde", "G_tilde", "r2_predict"}) {
    CHECK(std::isfinite(fit_report.at(key).get<double>()));
  }
  CHECK(fit_report.at("L_inf").get<double>() >= 0.0);

  CHECK(run("fit --trace no-such-trace.csv").code == 1);
}

TEST_CASE("identical simulations are reproducible across thread settings") {
  const std::string schedule =
      R"({"kind":"constant","eta_peak":0.05,"T":300})";
  const std::string args = "simulate --schedule '" + schedule +
                           "' --d 3 --noise 0.3 --seeds 4 --grid log:10"
                           " --format json";
  const CmdResult one =
      run_raw("SCHEDLAW_THREADS=1 \"" + g_cli + "\" " + args + " 2>/dev/null");
  const CmdResult four =
      run_raw("SCHEDLAW_THREADS=4 \"" + g_cli + "\" " + args + " 2>/dev/null");
  REQUIRE(one.code == 0);
  REQUIRE(four.code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("scale fits the reference records and tabulates predictions") {
  const fs::path records = write_reference_records();

  const CmdResult r = run("scale --records " + records.string());
  REQUIRE(r.code == 0);
  const json scaling = json::parse(r.out).at("scaling");
  CHECK(scaling.at("eta_ref_star").get<double>() == 1.0);
  CHECK(scaling.at("Q_star").get<double>() == doctest::Approx(2.0));
  CHECK(scaling.at("L_inf_star").get<double>() == doctest::Approx(0.9));

  const CmdResult table = run("scale --records " + records.string() +
                              " --format csv --grid log:10");
  REQUIRE(table.code == 0);
  REQUIRE(table.out.rfind("T,predicted_loss\n", 0) == 0);
  std::vector<double> horizons;
  size_t pos = table.out.find('\n') + 1;
  while (pos < table.out.size()) {
    horizons.push_back(std::stod(table.out.substr(pos)));
    pos = table.out.find('\n', pos) + 1;
  }
  REQUIRE(horizons.size() == 10);
  // Table spans the fitted horizons extended one decade upward.
  CHECK(horizons.front() == doctest::Approx(4000.0));
  CHECK(horizons.back() == doctest::Approx(1e6));
}

TEST_CASE("predict reports the loss and optional transfer rate") {
  const fs::path records = write_reference_records();

  CmdResult r = run("predict --records " + records.string() + " --T 1000000");
  REQUIRE(r.code == 0);
  json report = json::parse(r.out);
  CHECK(report.at("predicted_loss").get<double>() ==
        doctest::Approx(0.902).epsilon(1e-9));
  CHECK(!report.contains("transfer"));

  r = run("predict --records " + records.string() +
          " --T 1000000 --eta-small 0.02 --T-small 4000");
  REQUIRE(r.code == 0);
  report = json::parse(r.out);
  CHECK(report.at("transfer").at("eta_peak").get<double>() ==
        doctest::Approx(0.02 / std::sqrt(250.0)).epsilon(1e-12));
  CHECK(report.at("transfer").at("extrapolation_warning") == false);
  CHECK(report.at("config").at("eta_small") == 0.02);

  r = run("predict --records " + records.string() +
          " --T 1000000 --eta-small 0.01 --T-small 40000000000");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("transfer").at("extrapolation_warning") == true);

  CHECK(run("predict --records " + records.string() + " --T 0.5").code == 1);
}

TEST_CASE("insufficient records exit 2 with a diagnostic") {
  const fs::path path = g_tmp / "two_horizons.csv";
  spit(path,
       "eta_ref,T_or_tokens,unit,final_loss\n"
       "0.1,4000,steps,1.5\n0.1,8000,steps,1.4\n"
       "0.2,4000,steps,1.6\n0.2,8000,steps,1.45\n");
  const CmdResult r =
      run_merged("predict --records " + path.string() + " --T 1000000");
  CHECK(r.code == 2);
  CHECK(r.out.find("distinct") != std::string::npos);
}

int main(int argc, char** argv) {
  std::vector<char*> doctest_args{argv[0]};
  for (int i = 1; i < argc; ++i) {
    if (g_cli.empty() && argv[i][0] != '-') {
      g_cli = argv[i];
    } else {
      doctest_args.push_back(argv[i]);
    }
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: cli_tests <schedlaw-binary> [doctest args]\n");
    return 1;
  }

  char tmpl[] = "/tmp/schedlaw_cli_XXXXXX";
  const char* dir = mkdtemp(tmpl);
  if (dir == nullptr) {
    std::perror("mkdtemp");
    return 1;
  }
  g_tmp = dir;

  doctest::Context context(static_cast<int>(doctest_args.size()),
                           doctest_args.data());
  const int rc = context.run();
  std::error_code ec;
  fs::remove_all(g_tmp, ec);
  return rc;
}
