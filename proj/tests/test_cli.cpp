#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "stereoct/imageio.hpp"

using nlohmann::json;
using stereoct::test::TempDir;

namespace {

#ifndef STEREOCT_BIN_PATH
#error "STEREOCT_BIN_PATH must point at the CLI binary"
#endif

int run(const std::string& args) {
  const std::string cmd = std::string(STEREOCT_BIN_PATH) + " " + args;
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("cli drives the full synth / match / eval / attack / report loop") {
  TempDir dir("cli");
  const std::string scene = dir.file("scene");
  const std::string quiet = " > " + dir.file("stdout.txt") + " 2> " + dir.file("stderr.txt");

  REQUIRE(run("synth --out-dir " + scene + " --size 32x64 --plane 4 --seed 3" + quiet) == 0);
  CHECK(std::ifstream(scene + "/left.pgm").good());
  CHECK(std::ifstream(scene + "/right.pgm").good());
  CHECK(std::ifstream(scene + "/gt.pfm").good());
  CHECK(std::ifstream(scene + "/occl.pgm").good());
  const json synth_manifest = load_json(scene + "/manifest.json");
  CHECK(synth_manifest.at("command") == "synth");
  CHECK(synth_manifest.at("config").at("kind") == "plane");
  CHECK(synth_manifest.contains("duration_ms"));

  const std::string pred = dir.file("pred.pfm");
  REQUIRE(run("match --left " + scene + "/left.pgm --right " + scene + "/right.pgm --out " +
              pred + " --max-disp 16 --scales 3,5 --color " + dir.file("pred.ppm") + quiet) == 0);
  const stereoct::DisparityMap disp = stereoct::read_pfm(pred);
  CHECK(disp.width == 64);
  CHECK(disp.height == 32);
  const json match_manifest = load_json(pred + ".manifest.json");
  CHECK(match_manifest.at("config").at("descriptor") == "census");
  CHECK(match_manifest.at("config").at("aggregator") == "sgm");
  for (const char* input : {"left", "right"}) {
    const std::string digest = match_manifest.at("inputs").at(input).at("fnv1a64");
    CHECK(digest.size() == 16);
  }
  CHECK(std::ifstream(dir.file("pred.ppm")).good());

  REQUIRE(run("eval --pred " + pred + " --gt " + scene + "/gt.pfm --occl " + scene +
              "/occl.pgm --max-disp 16 --out " + dir.file("metrics.json") + quiet) == 0);
  const json metrics = load_json(dir.file("metrics.json"));
  for (const char* key : {"epe", "bad1", "bad3", "pixels", "mask_fraction"})
    CHECK(metrics.contains(key));
  CHECK(metrics.at("epe").get<double>() < 1.0);  // plane scenes are easy for SGM

  // metrics also print to stdout when --out is omitted
  REQUIRE(run("eval --pred " + pred + " --gt " + scene + "/gt.pfm --max-disp 16 > " +
              dir.file("eval_stdout.json") + " 2> /dev/null") == 0);
  CHECK(json::parse(slurp(dir.file("eval_stdout.json"))).contains("bad3"));

  const std::string runs = dir.file("runs");
  REQUIRE(run("attack --left " + scene + "/left.pgm --right " + scene + "/right.pgm --gt " +
              scene + "/gt.pfm --occl " + scene + "/occl.pgm --out-dir " + runs +
              "/a1 --steps 3 --max-disp 16 --scales 3,5 --descriptor sad" + quiet) == 0);
  for (const char* name : {"perturbation.pfm", "left_adv.pgm", "right_adv.pgm", "trace.csv",
                           "manifest.json"})
    CHECK(std::ifstream(runs + std::string("/a1/") + name).good());

  const std::string trace = slurp(runs + "/a1/trace.csv");
  CHECK(trace.rfind("step,loss\n0,", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 5);  // header + T+1 rows

  const json attack_manifest = load_json(runs + "/a1/manifest.json");
  CHECK(attack_manifest.at("scene") == "scene");
  CHECK(attack_manifest.at("config").at("eps") == 0.03);
  CHECK(attack_manifest.at("metrics_clean").contains("bad3"));
  CHECK(attack_manifest.at("metrics_adv").contains("epe"));

  REQUIRE(run("report --dir " + runs + " --out " + dir.file("report.csv") + quiet) == 0);
  const std::string csv = slurp(dir.file("report.csv"));
  CHECK(csv.rfind("scene,descriptor,aggregator,mode,eps,steps,"
                  "epe,bad1,bad3,epe_adv,bad1_adv,bad3_adv\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one run
  CHECK(csv.find("scene,sad,soft,constrained,0.03,3,") != std::string::npos);
}

TEST_CASE("cli exit codes distinguish usage and runtime failures") {
  TempDir dir("cliexit");
  const std::string quiet = " > /dev/null 2> /dev/null";
  CHECK(run("--help" + quiet) == 0);
  CHECK(run("--version" + quiet) == 0);
  CHECK(run("eval --pred a.pfm" + quiet) == 2);              // missing required --gt
  CHECK(run("frobnicate" + quiet) == 2);                     // unknown subcommand
  CHECK(run("match --left missing.pgm --right missing.pgm --out " + dir.file("x.pfm") +
            quiet) == 1);                                    // unreadable input
  CHECK(run("report --dir " + dir.path.string() + quiet) == 1);  // no manifests
  CHECK(run("synth --out-dir " + dir.file("s") + " --size 8x16 --plane 3 --step 1:2" + quiet) ==
        1);                                                  // conflicting kinds
}

TEST_CASE("cli rejects the hard census descriptor for attacks") {
  TempDir dir("clihard");
  const std::string scene = dir.file("scene");
  const std::string quiet = " > /dev/null 2> /dev/null";
  REQUIRE(run("synth --out-dir " + scene + " --size 24x48 --plane 3 --seed 1" + quiet) == 0);
  CHECK(run("attack --left " + scene + "/left.pgm --right " + scene + "/right.pgm --gt " +
            scene + "/gt.pfm --out-dir " + dir.file("r") +
            " --steps 2 --max-disp 8 --scales 3 --descriptor census" + quiet) == 1);
}
