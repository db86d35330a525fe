// End-to-end checks of the command-line front end. The binary path comes in
// through QBELL_CLI_PATH; commands run via popen with stderr folded into the
// captured stream.

#include "qbell/functionals.hpp"
#include "qbell/json_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QBELL_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  f << content;
}

}  // namespace

TEST_CASE("derive prints the solved forms and honors --format json") {
  const auto r = run_cli("derive --targets 2,4,9,11,13,18,20,24,25,28,32,36");
  CHECK(r.exit_code == 0);
  const auto ls = lines(r.output);
  REQUIRE(ls.size() == 12);
  CHECK(ls[0].rfind("p2 = 1/3 - 2/3*p1 - 1/3*p3", 0) == 0);
  CHECK(ls[11].rfind("p36 = 1/3 + 1/3*p1", 0) == 0);

  const auto rj = run_cli("derive --format json --targets 3,4,8,11,15,16,21,22,26,30,31,35");
  CHECK(rj.exit_code == 0);
  CHECK(rj.output.find("\"target\": 22") != std::string::npos);
  CHECK(rj.output.find("\"constant\": \"1/3\"") != std::string::npos);
}

TEST_CASE("derive rejects dependent selections with exit 1") {
  const auto r = run_cli("derive --targets 1,2,3,4,5,6,7,8,9,10,11,12");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("unsolvable selection") != std::string::npos);
  CHECK(r.output.find("dependent target subset") != std::string::npos);
}

TEST_CASE("equivalence reports relations and residuals") {
  const auto eq = run_cli("equivalence I3 K3");
  CHECK(eq.exit_code == 0);
  CHECK(eq.output.find("I3 = 2 + 3*K3 (modulo no-signaling)") != std::string::npos);

  const auto eqp = run_cli("equivalence I3p K3p");
  CHECK(eqp.exit_code == 0);
  CHECK(eqp.output.find("I3p = 2 + 3*K3p") != std::string::npos);

  const auto ne = run_cli("equivalence I3 W3");
  CHECK(ne.exit_code == 0);
  CHECK(ne.output.find("NOT EQUIVALENT") != std::string::npos);
  CHECK(ne.output.find("-p1 + p2 + p13 - p14 + p19 - p20 - p28 + p29") !=
        std::string::npos);

  CHECK(run_cli("equivalence I3 W3 --expect-equivalent").exit_code == 1);
  CHECK(run_cli("equivalence I3 'CGLMP(0,1,0,0)'").output.find("= 0 + 1*CGLMP(0,1,0,0)") !=
        std::string::npos);
  CHECK(run_cli("equivalence W3 'W(0,0,0,0)'").exit_code == 0);
  CHECK(run_cli("equivalence I3 NoSuchThing").exit_code == 2);

  SUBCASE("functionals load from JSON files") {
    write_file("cli_k3.json", qbell::io::functional_to_json(qbell::k3_functional()).dump());
    const auto from_file = run_cli("equivalence I3 cli_k3.json");
    CHECK(from_file.exit_code == 0);
    CHECK(from_file.output.find("I3 = 2 + 3*K3") != std::string::npos);
    std::remove("cli_k3.json");
  }
}

TEST_CASE("bounds tables") {
  const auto named = run_cli("bounds --family named");
  CHECK(named.exit_code == 0);
  const auto ls = lines(named.output);
  REQUIRE(ls.size() == 6);
  CHECK(ls[0] == "name,classical_bound,n_maximizers");
  CHECK(ls[1].rfind("I3,2,", 0) == 0);
  CHECK(ls[2].rfind("K3,0,", 0) == 0);
  CHECK(ls[3].rfind("W3,0,", 0) == 0);
  CHECK(ls[4].rfind("K3p,0,", 0) == 0);
  CHECK(ls[5].rfind("I3p,2,", 0) == 0);

  const auto cglmp = run_cli("bounds --family cglmp");
  const auto cl = lines(cglmp.output);
  CHECK(cl.size() == 55);
  for (size_t t = 1; t < cl.size(); ++t) CHECK(cl[t].find(",2,") != std::string::npos);

  const auto wfam = run_cli("bounds --family wfamily");
  const auto wl = lines(wfam.output);
  CHECK(wl.size() == 37);
  for (size_t t = 1; t < wl.size(); ++t) CHECK(wl[t].find(",0,") != std::string::npos);
}

TEST_CASE("scan emits the expected rows") {
  const auto r = run_cli("scan --theta-min 0 --theta-max 90 --step 45");
  CHECK(r.exit_code == 0);
  const auto ls = lines(r.output);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "theta_deg,I3,K3,i3_minus_2_minus_3k3");
  CHECK(ls[1].rfind("0,0,-0.666667,", 0) == 0);
  CHECK(ls[3].rfind("90,2,", 0) == 0);
  // Identical invocations are byte identical.
  CHECK(run_cli("scan --theta-min 0 --theta-max 90 --step 45").output == r.output);
  CHECK(run_cli("scan --step -3").exit_code == 2);
}

TEST_CASE("thresholds modes") {
  const auto opt = run_cli("thresholds --mode optimum");
  CHECK(opt.exit_code == 0);
  const auto ls = lines(opt.output);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "lambda_min,eta_ch,eta_chsh,I3_max,theta_max_deg");
  CHECK(ls[1] == "0.686141,0.813859,0.828336,2.91485,60.7411");

  const auto curve = run_cli("thresholds --mode eta_curve --step 5");
  CHECK(curve.exit_code == 0);
  const auto cl = lines(curve.output);
  CHECK(cl[0] == "theta_deg,I3,K3,lambda_min,eta_ch,eta_chsh");
  CHECK(cl.size() > 5);
  for (size_t t = 1; t < cl.size(); ++t) {
    // eta_chsh (last column) strictly dominates eta_ch (fifth column).
    const auto fields = [&] {
      std::vector<std::string> f;
      std::string cur;
      for (char c : cl[t] + ",") {
        if (c == ',') {
          f.push_back(cur);
          cur.clear();
        } else
          cur += c;
      }
      return f;
    }();
    REQUIRE(fields.size() == 6);
    CHECK(std::stod(fields[5]) > std::stod(fields[4]));
  }

  const auto fig2 = run_cli("thresholds --mode eta_scan_fig2 --eta-step 0.5");
  const auto fl = lines(fig2.output);
  REQUIRE(fl.size() == 4);
  CHECK(fl[0] == "eta,I3_eta,K3_eta,S3");
  CHECK(fl[1].rfind("0,0,0,2", 0) == 0);
  CHECK(fl[3].rfind("1,2.91485,0.304951,2.91485", 0) == 0);
}

TEST_CASE("prbox pipes into lpcheck as nonlocal") {
  const auto box = run_cli("prbox");
  CHECK(box.exit_code == 0);
  write_file("cli_prbox.json", box.output);
  const auto check = run_cli("lpcheck cli_prbox.json");
  CHECK(check.exit_code == 0);
  CHECK(check.output == "nonlocal\n");
  std::remove("cli_prbox.json");
}

TEST_CASE("lpcheck verdicts and error codes") {
  write_file("cli_uniform.json", R"({"numeric":"rational","p":["1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9"]})");
  const auto local = run_cli("lpcheck cli_uniform.json --weights");
  CHECK(local.exit_code == 0);
  CHECK(lines(local.output)[0] == "local");
  CHECK(local.output.find("1/9") != std::string::npos);
  std::remove("cli_uniform.json");

  write_file("cli_malformed.json", "{not json");
  CHECK(run_cli("lpcheck cli_malformed.json").exit_code == 2);
  std::remove("cli_malformed.json");

  write_file("cli_invalid.json", R"({"numeric":"rational","p":["1/3","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9"]})");
  CHECK(run_cli("lpcheck cli_invalid.json").exit_code == 3);
  std::remove("cli_invalid.json");

  write_file("cli_signaling.json", R"({"numeric":"rational","p":["1","0","0","0","0","0","0","0","0","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9","1/9"]})");
  CHECK(run_cli("lpcheck cli_signaling.json").exit_code == 4);
  std::remove("cli_signaling.json");

  write_file("cli_float.json",
             qbell::io::distribution_to_json(qbell::to_double(qbell::uniform_distribution()))
                 .dump());
  const auto floaty = run_cli("lpcheck cli_float.json");
  CHECK(floaty.exit_code == 0);
  CHECK(floaty.output == "local\n");
  std::remove("cli_float.json");

  CHECK(run_cli("lpcheck does_not_exist.json").exit_code == 2);
}

TEST_CASE("unknown flags are rejected") {
  CHECK(run_cli("scan --bogus").exit_code == 2);
  CHECK(run_cli("").exit_code == 2);
}
