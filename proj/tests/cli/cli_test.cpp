#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lnop/blocks/param_count.hpp"
#include "lnop/data/dataset.hpp"
#include "lnop/io/binary.hpp"

using namespace lnop;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::path(LNOP_CLI_WORKDIR);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
};

// Runs the tool in a child process; stdout and stderr are captured together.
Run run_cli(const std::string& args) {
  const fs::path log = workdir() / "last_run.txt";
  const std::string cmd = std::string("\"") + LNOP_CLI_BINARY + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_text(log);
  INFO(cmd, "\n", r.out);
  return r;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::string digest_line(const std::string& out) {
  const auto pos = out.find("sha256 ");
  REQUIRE(pos != std::string::npos);
  return out.substr(pos + 7, 64);
}

nlohmann::json read_json(const std::string& p) { return nlohmann::json::parse(io::read_text(p)); }

// Burgers pair used by the train/eval cases: 32-point training data and a
// 64-point test set generated from the same solver grid.
void ensure_burgers_data() {
  if (fs::exists(path("b32.lnop"))) return;
  REQUIRE(run_cli("gen burgers --res 32 --count 6 --seed 3 --nu 0.05 --refine 4 -o " + path("b32.lnop")).code == 0);
  REQUIRE(run_cli("gen burgers --res 64 --count 3 --seed 4 --nu 0.05 --refine 2 -o " + path("b64.lnop")).code == 0);
}

}  // namespace

TEST_CASE("gen burgers is reproducible across processes") {
  const auto a = run_cli("gen burgers --nu 1e-3 --res 256 --count 8 --seed 7 -o " + path("g1.lnop"));
  REQUIRE(a.code == 0);
  const auto b = run_cli("gen burgers --nu 1e-3 --res 256 --count 8 --seed 7 -o " + path("g2.lnop"));
  REQUIRE(b.code == 0);
  CHECK(digest_line(a.out) == digest_line(b.out));
  const PdeDataset ds = dataset_read(path("g1.lnop"));
  CHECK(ds.samples.size() == 8);
  CHECK(ds.grid.extents == Shape{256});
  CHECK(ds.generator.at("seed") == 7);
  CHECK(ds.generator.at("nu") == 1e-3);
}

TEST_CASE("gen advection at t = 0 copies inputs") {
  REQUIRE(run_cli("gen advection --t 0 --res 64 --count 5 -o " + path("adv.lnop")).code == 0);
  const PdeDataset ds = dataset_read(path("adv.lnop"));
  for (const auto& s : ds.samples) CHECK(s.input == s.target);
}

TEST_CASE("gen darcy produces non-negative solutions") {
  REQUIRE(run_cli("gen darcy --res 32 --count 4 --threads 2 -o " + path("darcy.lnop")).code == 0);
  const PdeDataset ds = dataset_read(path("darcy.lnop"));
  CHECK(ds.grid.layout == GridLayout::cell);
  for (const auto& s : ds.samples)
    for (double u : s.target.data()) CHECK(u >= 0.0);
}

TEST_CASE("train both architectures with isolated reports") {
  ensure_burgers_data();
  const std::string common = " --data " + path("b32.lnop") + " --test " + path("b64.lnop") +
                             " --epochs 3 --seed 11 --set model.width=4 --set model.modes=4 --set model.blocks=2";
  REQUIRE(run_cli("train --arch learnable --out " + path("run_l") + common).code == 0);
  REQUIRE(run_cli("train --arch fourier --out " + path("run_f") + common).code == 0);
  auto l = read_json(path("run_l") + "/report.json");
  auto f = read_json(path("run_f") + "/report.json");
  CHECK(l.at("config").at("model").at("arch") == "learnable");
  CHECK(f.at("config").at("model").at("arch") == "fourier");
  CHECK(l.at("param_counts") != f.at("param_counts"));
  auto lc = l.at("config"), fc = f.at("config");
  lc["model"].erase("arch");
  fc["model"].erase("arch");
  lc["output"].erase("dir");
  fc["output"].erase("dir");
  CHECK(lc == fc);
  CHECK(fs::exists(path("run_l") + "/model.lnop"));
  CHECK(fs::exists(path("run_l") + "/eval.csv"));
  CHECK(l.at("train_loss").size() == 3);
  CHECK(run_cli("report --in " + path("run_l") + "/report.json").code == 0);
}

TEST_CASE("superres table row 1 equals native eval") {
  ensure_burgers_data();
  if (!fs::exists(path("run_l") + "/model.lnop")) {
    REQUIRE(run_cli("train --arch learnable --epochs 2 --out " + path("run_l") + " --data " + path("b32.lnop") + " --test " +
                 path("b64.lnop") + " --set model.width=4 --set model.modes=4")
                .code == 0);
  }
  const std::string model = path("run_l") + "/model.lnop";
  REQUIRE(run_cli("superres --model " + model + " --data " + path("b64.lnop") + " --resolutions 32,64 --out " +
               path("sr.json"))
              .code == 0);
  REQUIRE(run_cli("eval --model " + model + " --data " + path("b64.lnop") + " --resolutions 32 --out " + path("ev.json"))
              .code == 0);
  const auto sr = read_json(path("sr.json")).at("test_rel_l2");
  const auto ev = read_json(path("ev.json")).at("test_rel_l2");
  REQUIRE(sr.size() == 2);
  CHECK(sr[0] == ev[0]);
  CHECK(sr[1].at("resolution") == 64);
  CHECK(sr[1].at("pipeline") != "native");
}

TEST_CASE("bench parameter columns follow the count formulas") {
  REQUIRE(run_cli("gen darcy --res 16 --count 2 --refine 1 -o " + path("d16.lnop")).code == 0);
  const auto r = run_cli("bench --data " + path("d16.lnop") +
                      " --width 4 --modes 3 --blocks 1 --warmup 1 --epochs 2 --batch-size 2 --out " + path("bench.json"));
  REQUIRE(r.code == 0);
  const auto j = read_json(path("bench.json"));
  for (const auto& e : j.at("entries")) {
    const auto arch = parse_architecture(e.at("arch").get<std::string>());
    const auto want = block_param_count(arch, 4, {16, 16}, {3, 3});
    CHECK(e.at("per_block").at("forward") == want.forward);
    CHECK(e.at("per_block").at("mix") == want.mix);
    CHECK(e.at("per_block").at("inverse") == want.inverse);
    CHECK(e.at("fourier_minus_learnable_per_block") == fourier_minus_learnable(4, {16, 16}, {3, 3}));
  }
  CHECK(r.out.find("fourier - learnable per block") != std::string::npos);
}

TEST_CASE("verify passes, is repeatable, and catches a corrupted backward rule") {
  const auto a = run_cli("verify --instances 10");
  CHECK(a.code == 0);
  const auto b = run_cli("verify --instances 10");
  CHECK(a.out == b.out);
  const auto neg = run_cli("verify --suite gradients --negative-control");
  CHECK(neg.code != 0);
  CHECK(neg.out.find("FAIL gradients") != std::string::npos);
}

TEST_CASE("errors map to exit codes before any work") {
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("train --data x.lnop --test y.lnop --set optim.warp=9 --out " + path("never")).code == 1);
  CHECK_FALSE(fs::exists(path("never")));
  CHECK(run_cli("eval --model " + path("missing.lnop") + " --data " + path("missing.lnop")).code == 3);
  CHECK(run_cli("gen darcy --res 8 --count 1 --refine 4 -o " + path("bad.lnop")).code == 1);
}
