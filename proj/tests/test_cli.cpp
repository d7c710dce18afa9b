#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mnol/json_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("mnol_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string(MNOL_CLI_PATH) + " " + args + " > " + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("prescribe writes JSON and exits cleanly") {
  Workspace ws;
  CHECK(run("prescribe --set bounds.eps=0.5", ws.path("p.json")) == 0);
  const auto j = mnol::read_json_file(ws.path("p.json"));
  CHECK(j.at("N").get<double>() == 128.0);
  CHECK(j.at("P").get<double>() == 8.0);
}

TEST_CASE("configuration problems exit with status 2") {
  Workspace ws;
  CHECK(run("prescribe --set nosuch.key=1") == 2);
  CHECK(run("prescribe --set bounds.eps=0") == 2);
  CHECK(run("train") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("gen-data -c " + ws.path("missing.ini")) == 2);
}

TEST_CASE("failed oracle checks exit with status 3") {
  CHECK(run("oracle --set oracle.check=burgers --set oracle.grid_n=8") == 3);
  CHECK(run("oracle --set oracle.check=green") == 0);
}

TEST_CASE("dump-config prints resolved values without running") {
  Workspace ws;
  CHECK(run("sweep --dump-config --set train.steps=9", ws.path("dump.ini")) == 0);
  const std::string text = slurp(ws.path("dump.ini"));
  CHECK(text.find("[train]") != std::string::npos);
  CHECK(text.find("steps=9") != std::string::npos);
  CHECK(run("sweep -c " + ws.path("dump.ini") + " --dump-config", ws.path("dump2.ini")) == 0);
  CHECK(slurp(ws.path("dump2.ini")) == text);
}

TEST_CASE("gen-data, train and eval pipeline") {
  Workspace ws;
  const std::string io = " --set io.dataset=" + ws.path("d.json") + " --set io.model=" + ws.path("m.json");
  CHECK(run("gen-data --set data.n_alpha=3 --set data.n_u=2 --set data.n_x=4" + io) == 0);
  const auto d = mnol::read_json_file(ws.path("d.json"));
  CHECK(d.at("alpha_disc").size() == 3);
  CHECK(run("train --set train.steps=20 --set io.loss_csv=" + ws.path("loss.csv") + io) == 0);
  const std::string loss = slurp(ws.path("loss.csv"));
  CHECK(loss.rfind("step,loss\n", 0) == 0);
  CHECK(run("eval --set eval.m_alpha=4 --set eval.m_u=2 --set eval.m_x=4" + io, ws.path("e.json")) == 0);
  const auto e = mnol::read_json_file(ws.path("e.json"));
  CHECK(e.at("test_error").get<double>() >= 0.0);
}

TEST_CASE("bounds and oracle reports") {
  Workspace ws;
  CHECK(run("bounds --set bounds.eps=0.5 --set bounds.eta=0.01", ws.path("b.json")) == 0);
  const auto b = mnol::read_json_file(ws.path("b.json"));
  CHECK(b.contains("entropy"));
  CHECK(run("oracle --set oracle.check=heat -o " + ws.path("o.json")) == 0);
  CHECK(mnol::read_json_file(ws.path("o.json")).size() == 2);
}
