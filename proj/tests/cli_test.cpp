#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

const std::string kCli = TTKIT_CLI_PATH;
const std::string kData = TTKIT_DATA_DIR;
const std::string kTmp = TTKIT_TEST_TMPDIR;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string out_path = kTmp + "/cli_out.txt";
  std::string cmd = kCli + " " + args + " > " + out_path + " 2>&1";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

}  // namespace

TEST_CASE("validate: exit 0 and all-true report on a catalog track") {
  RunResult r = run("validate " + kData + "/S05A.tt");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("slot_consistent: true") != std::string::npos);
  CHECK(r.output.find("maximal: true") != std::string::npos);
}

TEST_CASE("exit codes: 1 for domain errors, 2 for usage errors") {
  CHECK(run("validate /nope/missing.tt").exit_code == 1);
  CHECK(run("frobnicate x").exit_code == 2);
  CHECK(run("validate").exit_code == 2);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("regions and recurrent") {
  RunResult r = run("regions " + kData + "/S20A.tt");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("genus=2 punctures=0") != std::string::npos);
  RunResult w = run("recurrent " + kData + "/S12A.tt");
  CHECK(w.exit_code == 0);
  CHECK(w.output.rfind("recurrent", 0) == 0);
  CHECK(w.output.find("measure v1") != std::string::npos);
}

TEST_CASE("apply round trips a split/collapse pair") {
  std::string word = kTmp + "/word.txt";
  std::ofstream(word) << "split 11 R\ncollapse 11 R\n";
  RunResult r = run("apply " + kData + "/S05A.tt " + word);
  CHECK(r.exit_code == 0);
  std::ifstream orig(kData + "/S05A.tt");
  std::ostringstream buf;
  buf << orig.rdbuf();
  CHECK(r.output == buf.str());
}

TEST_CASE("cone json at radius 0 has one vertex at the origin") {
  // write the recurrence witness to a measure file first
  RunResult w = run("recurrent " + kData + "/S05A.tt");
  std::string mfile = kTmp + "/m05.tt";
  std::ofstream(mfile) << w.output.substr(w.output.find("measure v1"));
  RunResult r =
      run("cone " + kData + "/S05A.tt --measure " + mfile + " --radius 0 --json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"schema\": \"ttkit-1\"") != std::string::npos);
  CHECK(r.output.find("[0,0,0,0,0,0,0,0,0,0,0,0]") != std::string::npos);

  // dist on the exported ball
  std::string cfile = kTmp + "/cone.json";
  RunResult c =
      run("cone " + kData + "/S05A.tt --measure " + mfile + " --radius 3 --json");
  CHECK(c.exit_code == 0);
  std::ofstream(cfile) << c.output;
  RunResult d = run("dist " + cfile + " 0,0,0,0,0,0,0,0,0,0,0,0 " +
                    "0,0,0,0,0,0,0,0,0,0,0,0");
  CHECK(d.exit_code == 0);
  CHECK(d.output == "0\n");
  RunResult bad = run("dist " + cfile + " 9,9,9,9,9,9,9,9,9,9,9,9 " +
                      "0,0,0,0,0,0,0,0,0,0,0,0");
  CHECK(bad.exit_code == 1);
}

TEST_CASE("orbit verbs") {
  RunResult cert = run("orbit-cert " + kData + "/S05A.tt");
  CHECK(cert.exit_code == 0);
  CHECK(cert.output.find_first_not_of("0123456789abcdef\n") ==
        std::string::npos);
  RunResult same = run("same-orbit " + kData + "/S05A.tt " + kData + "/S05A.tt");
  CHECK(same.exit_code == 0);
  CHECK(same.output == "same orbit\n");
  RunResult diff = run("same-orbit " + kData + "/S05A.tt " + kData + "/S12A.tt");
  CHECK(diff.exit_code == 1);
}

TEST_CASE("tt-ball, distortion and twist-growth run on catalog inputs") {
  RunResult ball = run("tt-ball " + kData + "/S05A.tt --radius 3");
  CHECK(ball.exit_code == 0);
  CHECK(ball.output.find("total tracks: 27") != std::string::npos);

  RunResult w = run("recurrent " + kData + "/S05A.tt");
  std::string mfile = kTmp + "/m05b.tt";
  std::ofstream(mfile) << w.output.substr(w.output.find("measure v1"));
  RunResult dist =
      run("distortion " + kData + "/S05A.tt --measure " + mfile + " --radius 4");
  CHECK(dist.exit_code == 0);
  CHECK(dist.output.find("max d_cone / d_ambient") != std::string::npos);

  RunResult tg = run("twist-growth " + kData + "/pants_S05.tt --n 3");
  CHECK(tg.exit_code == 0);
  CHECK(tg.output.find("twist words commute: yes") != std::string::npos);
}

TEST_CASE("byte-identical outputs on identical inputs") {
  RunResult a = run("orbit-cert " + kData + "/S20A.tt");
  RunResult b = run("orbit-cert " + kData + "/S20A.tt");
  CHECK(a.output == b.output);
  RunResult c1 = run("tt-ball " + kData + "/S12A.tt --radius 3");
  RunResult c2 = run("tt-ball " + kData + "/S12A.tt --radius 3");
  CHECK(c1.output == c2.output);
}
