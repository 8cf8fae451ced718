// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef PIRLAB_CLI_PATH
#error "PIRLAB_CLI_PATH must name the pirlab executable"
#endif

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PIRLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("cli exit codes") {
    CHECK(run_cli("run ctrex-2422 --theta 1 --seed 3") == 0);
    CHECK(run_cli("run disjoint-2423 --seed 3") == 2);
    CHECK(run_cli("run no-such-scheme") == 64);
    CHECK(run_cli("frobnicate") == 64);
    CHECK(run_cli("verify cyclic-2422 --suite privacy --p 3 --collude 1,3 --samples 10000") == 1);
    CHECK(run_cli("verify tab-2322 --suite all --trials 4") == 0);
    CHECK(run_cli("search --kind combiner --scheme ctrex-2422 --p 2 --tries 3") == 3);
    CHECK(run_cli("capacity --kind theorem3 --n 4 --t 3 --kc 3") == 0);
    CHECK(run_cli("capacity --kind theorem3 --n 4 --t 5 --kc 3") == 64);
}

TEST_CASE("cli transcripts replay byte-identically") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "pirlab_cli_a.json").string(), b = (dir / "pirlab_cli_b.json").string();
    REQUIRE(run_cli("run class-t2 --theta 2 --seed 42 --out " + a) == 0);
    REQUIRE(run_cli("run class-t2 --theta 2 --seed 42 --out " + b) == 0);
    const std::string ta = slurp(a);
    CHECK_FALSE(ta.empty());
    CHECK(ta == slurp(b));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}
