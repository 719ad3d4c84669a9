#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "doctest.h"

#include "ciagrid/json_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using ciagrid::read_json_file;
using ciagrid::read_text_file;
using ciagrid::write_text_file;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "ciagrid_cli_test";

int run(const std::string& args) {
    const std::string cmd = "CIAGRID_THREADS=1 " + std::string(CIAGRID_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& rel) { return (kScratch / rel).string(); }

void fresh() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
}

} // namespace

TEST_CASE("round on a one-hot instance copies the modes") {
    fresh();
    write_text_file(path("onehot.json"),
                    R"({"domain":{"dim":1,"origin":[0],"lengths":[1]},"M":3,"L":2,)"
                    R"("alpha":[[0,0,1],[1,0,0],[0,1,0],[0,1,0]]})");
    REQUIRE(run("round --method sur --instance " + path("onehot.json") + " --depth0 2 --out " + path("r")) == 0);
    CHECK(read_json_file(path("r/omega.json"))["modes"] == nlohmann::json{3, 1, 2, 2});
    CHECK(read_json_file(path("r/report.json"))["distance_exact"] == "0");
    const auto manifest = read_json_file(path("r/manifest.json"));
    CHECK(manifest["inputs"].contains(path("onehot.json")));
    CHECK(manifest["config_hash"] == read_json_file(path("r/omega.json"))["config_hash"]);
}

TEST_CASE("model export reparses") {
    fresh();
    REQUIRE(run("generate --family radial_bump --dim 2 --ref-depth 4 --seed 4 --out " + path("g")) == 0);
    REQUIRE(run("model --instance " + path("g/instance.json") + " --delta 1/32 --cuts all --out " + path("m")) == 0);
    const auto lp = oracle::parse_lp(read_text_file(path("m/model.lp")));
    const auto inst = read_json_file(path("m/instance.json"));
    const std::size_t cells = inst["cells"].get<std::size_t>();
    CHECK(lp.binaries.size() == cells * 2);
    std::size_t onehot = 0;
    for (const auto& r : lp.rows) {
        onehot += r.name.rfind("onehot_", 0) == 0 ? 1 : 0;
    }
    CHECK(onehot == cells);
    CHECK(fs::exists(path("m/grid.json")));
    CHECK(fs::exists(path("m/history.csv")));
}

TEST_CASE("identical runs give identical artifacts") {
    fresh();
    REQUIRE(run("generate --family linear_front --dim 2 --ref-depth 5 --seed 9 --out " + path("g")) == 0);
    const std::string args = "solve --instance " + path("g/instance.json") + " --delta 1/48 --cuts all --out ";
    REQUIRE(run(args + path("a")) == 0);
    REQUIRE(run(args + path("b")) == 0);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(path("a"))) {
        const std::string name = entry.path().filename().string();
        CHECK_MESSAGE(read_text_file(entry.path().string()) == read_text_file(path("b/" + name)), name);
        ++compared;
    }
    CHECK(compared >= 6);
    CHECK(fs::exists(path("a/modes.pgm")));
}

TEST_CASE("exit codes") {
    fresh();
    write_text_file(path("half.json"),
                    R"({"domain":{"dim":1,"origin":[0],"lengths":[1]},"M":2,"L":1,"alpha":[[0.5,0.5],[0.5,0.5]]})");
    CHECK(run("refine --instance " + path("half.json") + " --delta 0.1 --out " + path("x")) == 3);
    CHECK(run("solve --instance " + path("half.json") + " --delta 0.1 --out " + path("x")) == 3);
    write_text_file(path("grid.json"), R"({"dim":1,"origin":[0],"lengths":[1],"cells":[{"depth":1,"index":[0]},)"
                                       R"({"depth":1,"index":[1]}]})");
    CHECK(run("solve --instance " + path("half.json") + " --grid " + path("grid.json") + " --delta 0.1 --out " +
              path("x")) == 2);
    CHECK(run("solve --instance " + path("half.json") + " --grid " + path("grid.json") + " --delta 0.25 --out " +
              path("x")) == 0);

    REQUIRE(run("generate --family constant_blend --dim 2 --modes 3 --ref-depth 3 --seed 2 --out " + path("c")) == 0);
    CHECK(run("solve --instance " + path("c/instance.json") + " --depth0 3 --delta 1/16 --node-budget 2 "
              "--no-heuristic --out " + path("y")) == 4);
    CHECK(read_json_file(path("y/manifest.json"))["status"] == "budget exhausted without incumbent");

    CHECK(run("solve --instance " + path("half.json") + " --cuts some --delta 1 --out " + path("x")) == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("refine --instance " + path("missing.json") + " --delta 1 --out " + path("x")) == 1);
}

TEST_CASE("experiment: adaptive grids are smaller on smooth instances") {
    fresh();
    REQUIRE(run("experiment --count 8 --time-budget 2 --out " + path("e")) == 0);
    std::istringstream csv(read_text_file(path("e/experiment.csv")));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "instance,variant,N,primal,dual,gap,nodes,status");
    std::map<std::string, std::map<std::string, long>> cells;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string x;
        while (std::getline(ls, x, ',')) {
            f.push_back(x);
        }
        if (f.size() >= 3 && !f[2].empty()) {
            cells[f[0]][f[1]] = std::stol(f[2]);
        }
    }
    std::size_t smooth = 0;
    for (const auto& [name, v] : cells) {
        if (name.rfind("linear_front", 0) == 0 || name.rfind("radial_bump", 0) == 0) {
            REQUIRE(v.count("uniform"));
            REQUIRE(v.count("adaptive"));
            CHECK_MESSAGE(v.at("adaptive") < v.at("uniform"), name);
            ++smooth;
        }
    }
    CHECK(smooth == 8);
}
