#include "ppgbp/io.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string("'") + PPGBP_CLI_PATH + "' " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ppgbp_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string q(const char* name) const { return "'" + (path / name).string() + "'"; }
};

}  // namespace

TEST_CASE("missing input reports a machine-parsable error") {
    TempDir d;
    const auto r = run("detect --signals " + d.q("nope.csv") + " --out " + d.q("beats.csv"));
    CHECK(r.status == 2);
    CHECK(r.output.find("error: code=IoError message=\"") != std::string::npos);
    CHECK_FALSE(fs::exists(d.path / "beats.csv"));
}

TEST_CASE("malformed signals name the line") {
    TempDir d;
    ppgbp::atomic_write(d.path / "sig.csv", "fs_hz=100,unit_bp=mmHg,unit_ppg=au,start_s=0\n1,2\n1,x\n");
    const auto r = run("detect --signals " + d.q("sig.csv") + " --out " + d.q("beats.csv"));
    CHECK(r.status == 2);
    CHECK(r.output.find("code=ParseError") != std::string::npos);
    CHECK(r.output.find("line 3") != std::string::npos);
}

TEST_CASE("synth, fit and an unknown interval") {
    TempDir d;
    const std::string files = " --signals " + d.q("sig.csv") + " --annotations " + d.q("ann.csv");
    REQUIRE(run("synth --seed 3 --preset exact" + files).status == 0);
    const auto ok = run("fit" + files + " --interval BH1 --channel dbp --model-out " + d.q("m.txt"));
    CHECK(ok.status == 0);
    const auto model = ppgbp::read_model(d.path / "m.txt");
    CHECK(model.b.front() == doctest::Approx(100.0).epsilon(1e-9));

    const auto bad = run("fit" + files + " --interval BH9 --channel sbp --model-out " + d.q("m9.txt"));
    CHECK(bad.status == 2);
    CHECK(bad.output.find("code=MissingAnnotation") != std::string::npos);
}
