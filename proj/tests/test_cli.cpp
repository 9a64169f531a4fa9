// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the command-line tool: CSV shapes, exit codes, and
// byte-level determinism. Each test shells out to the installed binary.

#include <catch2/catch_amalgamated.hpp>

#include <twistlab/analytic.hpp>
#include <twistlab/fock.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace twistlab;

const std::string kBin = std::string("\"") + TWISTLAB_BIN + "\"";
const std::string kTmp = "cli_tmp";

std::string path(const std::string& name) {
  std::filesystem::create_directories(kTmp);
  return kTmp + "/" + name;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = kBin + " " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > " + stdout_file;
  cmd += " 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string read_file(const std::string& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Parse "k,v1[,v2...]" rows, skipping comment lines.
std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.find("k,") == 0) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("bell command emits the closed-form spectrum") {
  const std::string out = path("bell1.csv");
  const std::string log = path("bell1.log");
  REQUIRE(run("--no-timestamp bell --copies 1 --out " + out, log) == 0);

  const std::string expected =
      "k,omega\n"
      "0,1.0000000000000000e+00\n"
      "1,1.0000000000000000e+00\n"
      "2,1.0000000000000000e+00\n";
  REQUIRE(read_file(out) == expected);
  REQUIRE(read_file(log).find("bell: copies=1") != std::string::npos);

  const std::string out3 = path("bell3.csv");
  REQUIRE(run("bell --copies 3 --out " + out3 + " --no-timestamp") == 0);
  const auto rows = csv_rows(read_file(out3));
  const std::vector<double> want = {1, 3, 6, 7, 6, 3, 1};
  REQUIRE(rows.size() == 7);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    REQUIRE(rows[k][0] == static_cast<double>(k));
    REQUIRE(rows[k][1] == Catch::Approx(want[k]).margin(1e-12));
  }
}

TEST_CASE("purity command handles stored states") {
  const std::string bell_file = path("bell_state.json");
  save_state(bell_pair(), bell_file);

  SECTION("bell pair spectrum") {
    const std::string out = path("purity_bell.csv");
    REQUIRE(run("--no-timestamp purity " + bell_file + " --out " + out) == 0);
    const auto rows = csv_rows(read_file(out));
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) REQUIRE(r[1] == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("slater determinant closes at order one") {
    const std::string slater_file = path("slater_state.json");
    save_state(basis_state(4, 2, ModeSet({1, 2})), slater_file);
    const std::string out = path("purity_slater.csv");
    REQUIRE(run("--no-timestamp purity " + slater_file + " --out " + out) == 0);
    const std::string text = read_file(out);
    REQUIRE(text.find("0,1.0000000000000000e+00") != std::string::npos);
    REQUIRE(text.find("1,0.0000000000000000e+00") != std::string::npos);
  }

  SECTION("method=all emits three agreeing columns") {
    const std::string out = path("purity_all.csv");
    REQUIRE(run("--no-timestamp purity " + bell_file +
                " --method all --out " + out) == 0);
    const std::string text = read_file(out);
    REQUIRE(text.find("k,omega_rdm,omega_residual,omega_tensor") !=
            std::string::npos);
    for (const auto& r : csv_rows(text)) {
      REQUIRE(r.size() == 4);
      REQUIRE(r[1] == Catch::Approx(r[2]).margin(1e-10));
      REQUIRE(r[1] == Catch::Approx(r[3]).margin(1e-10));
    }
  }
}

TEST_CASE("exit codes follow the documented contract") {
  SECTION("malformed input file") {
    const std::string bad = path("bad.json");
    std::ofstream(bad) << "this is not json";
    REQUIRE(run("purity " + bad) == 2);
  }

  SECTION("missing input file") {
    REQUIRE(run("purity " + path("no_such_file.json")) == 2);
  }

  SECTION("unnormalized state") {
    StateVector v = bell_pair();
    v.amps() *= 2.0;
    const std::string f = path("unnormalized.json");
    save_state(v, f);
    REQUIRE(run("purity " + f) == 3);
  }

  SECTION("dimension cap") {
    REQUIRE(run("hubbard --sites 8 --out-spectrum " + path("h8.csv")) == 4);
  }

  SECTION("parse errors") {
    REQUIRE(run("no_such_command") == 2);
    REQUIRE(run("bell --no-such-flag") == 2);
    REQUIRE(run("") == 2);
  }

  SECTION("help exits zero") { REQUIRE(run("--help") == 0); }
}

TEST_CASE("output is deterministic for fixed seed and flags") {
  const std::string base =
      "haar --l 6 --n 3 --samples 25 --seed 7 --kmax 2 --no-timestamp --out ";
  const std::string f1 = path("haar1.csv");
  const std::string f2 = path("haar2.csv");
  REQUIRE(run(base + f1) == 0);
  REQUIRE(run(base + f2) == 0);
  REQUIRE(read_file(f1) == read_file(f2));
  REQUIRE(!read_file(f1).empty());

  // With the timestamp enabled the only extra content is the comment line.
  const std::string f3 = path("haar3.csv");
  REQUIRE(run("haar --l 6 --n 3 --samples 25 --seed 7 --kmax 2 --out " + f3) ==
          0);
  const std::string text = read_file(f3);
  REQUIRE(text.find("# generated ") == 0);
  REQUIRE(text.substr(text.find('\n') + 1) == read_file(f1));

  // Exact values agree with the library closed form.
  const auto rows = csv_rows(read_file(f1));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0][3] == Catch::Approx(haar_average_exact(6, 3, 1)).margin(1e-14));
  REQUIRE(rows[1][3] == Catch::Approx(haar_average_exact(6, 3, 2)).margin(1e-14));
}

TEST_CASE("fit and build round trip through files") {
  GaussianRng rng(11);
  const ModeSet S0({1, 2, 3, 4, 5});
  StateVector v = random_ci_state(10, 5, S0, 1, rng);
  v = single_particle_rotate(v, 0.2 * random_hermitian(10, rng));
  v.normalize();
  const std::string state_file = path("ci_state.json");
  save_state(v, state_file);

  const std::string params_file = path("ci_params.json");
  const std::string rebuilt_file = path("ci_rebuilt.json");
  REQUIRE(run("fit " + state_file + " --G 1,2,3,4,5 --k 3 --out-params " +
              params_file) == 0);
  REQUIRE(run("build " + params_file + " --normalize --out-state " +
              rebuilt_file) == 0);

  const StateVector w = load_state(rebuilt_file);
  const double fid = std::abs(v.amps().dot(w.amps())) / (v.norm() * w.norm());
  REQUIRE(fid > 1.0 - 1e-10);
}

TEST_CASE("hubbard command emits energy, spectrum, and state") {
  const std::string spec_file = path("hub2.csv");
  const std::string state_file = path("hub2_state.json");
  REQUIRE(run("--no-timestamp hubbard --sites 2 --t 1 --U 0 --out-spectrum " +
                  spec_file + " --out-state " + state_file,
              path("hub2.log")) == 0);

  const std::string text = read_file(spec_file);
  REQUIRE(text.find("# model=hubbard sites=2") != std::string::npos);
  REQUIRE(text.find("# energy=-4.0000000000000000e+00") != std::string::npos);
  const auto rows = csv_rows(text);
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[1][1] == Catch::Approx(0.0).margin(1e-10));

  const StateVector ground = load_state(state_file);
  REQUIRE(ground.l() == 4);
  REQUIRE(ground.norm() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(read_file(path("hub2.log")).find("hubbard: dim=6") !=
          std::string::npos);
}

TEST_CASE("syk command is reproducible") {
  const std::string f1 = path("syk1.csv");
  const std::string f2 = path("syk2.csv");
  const std::string cmd =
      "--no-timestamp syk --modes 8 --seed 3 --out-spectrum ";
  REQUIRE(run(cmd + f1) == 0);
  REQUIRE(run(cmd + f2) == 0);
  REQUIRE(read_file(f1) == read_file(f2));
  REQUIRE(read_file(f1).find("# model=syk modes=8 seed=3") !=
          std::string::npos);
  REQUIRE(csv_rows(read_file(f1)).size() == 5);
}

TEST_CASE("verify suites run clean") {
  REQUIRE(run("verify --suite invariants --l 6 --n 3 --trials 4 --seed 2") ==
          0);
  REQUIRE(run("verify --suite oddeven --l 6 --n 3 --trials 2 --seed 2",
              path("oddeven.log")) == 0);
  const std::string log = read_file(path("oddeven.log"));
  REQUIRE(log.find("built_order=1") != std::string::npos);
  REQUIRE(log.find("report only, no assertion") != std::string::npos);
}
