#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fanclose/cli.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int rc;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "fanclose");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = fc::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("fanclose_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Runs the installed binary and returns its exit status.
int exec_status(const std::string& args) {
    const std::string cmd = std::string(FANCLOSE_BIN) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

struct EnvGuard {
    explicit EnvGuard(const char* v) { setenv("FANCLOSE_DIGITS", v, 1); }
    ~EnvGuard() { unsetenv("FANCLOSE_DIGITS"); }
};

}  // namespace

TEST_CASE("verify-triple 1 12 succeeds with a JSON report") {
    auto r = run({"verify-triple", "1", "12"});
    REQUIRE(r.rc == 0);
    auto d = r.doc();
    CHECK(d["provenance"]["tool"] == "fanclose");
    CHECK(d["provenance"]["subcommand"] == "verify-triple");
    CHECK(d["provenance"].contains("config_hash"));
    CHECK(d["is_triple"] == true);
}

TEST_CASE("verify-triple on a non-triple reports a failed check") {
    auto r = run({"verify-triple", "2", "4"});
    CHECK(r.rc == 1);
    CHECK(r.doc()["is_triple"] == false);
    CHECK(run({"verify-triple", "5", "3"}).rc == 2);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({"verify-triple", "1", "12", "--bogus"}).rc == 2);
    CHECK(run({}).rc == 2);
    CHECK(run({"frobnicate"}).rc == 2);
    CHECK(run({"pell", "unit", "4"}).rc == 2);
    CHECK(run({"sieve", "--from", "1", "--to", "1"}).rc == 2);
    CHECK(run({"fexpand", "--level", "9", "--r", "1", "--s", "12"}).rc == 2);
    CHECK(run({"--help"}).rc == 0);
}

TEST_CASE("the binary's process exit codes follow the contract") {
    CHECK(exec_status("verify-triple 1 12") == 0);
    CHECK(exec_status("verify-triple 2 4") == 1);
    CHECK(exec_status("verify-triple 1 12 --bogus") == 2);
}

TEST_CASE("sieve F = 2 at level 1 resolves everything") {
    auto r = run({"sieve", "--from", "2", "--to", "2", "--level", "1"});
    REQUIRE(r.rc == 0);
    auto d = r.doc();
    CHECK(d["unresolved"] == 0);
    CHECK(d["reduced"].get<long>() > 0);
    CHECK(d["F_values"] == 2);
    CHECK(d["enumerated"].get<long>() == d["filtered"].get<long>() + d["reduced"].get<long>());
}

TEST_CASE("sieve checkpoints resume and refuse a level mismatch") {
    auto dir = scratch("ck");
    auto a = run({"sieve", "--from", "2", "--to", "3", "--level", "1", "--checkpoint", dir.string()});
    REQUIRE(a.rc == 0);
    const std::string first = slurp(dir / "shard-0.jsonl");
    CHECK(first.find("\"F\":-3") != std::string::npos);
    auto b = run({"sieve", "--from", "2", "--to", "3", "--level", "1", "--checkpoint", dir.string()});
    REQUIRE(b.rc == 0);
    CHECK(b.doc()["resumed"] == 4);
    CHECK(b.doc()["hash"] == a.doc()["hash"]);
    CHECK(slurp(dir / "shard-0.jsonl") == first);
    auto c = run({"sieve", "--from", "2", "--to", "3", "--level", "2", "--checkpoint", dir.string()});
    CHECK(c.rc != 0);
    CHECK(c.err.find("level mismatch") != std::string::npos);
}

TEST_CASE("output is deterministic and independent of --jobs") {
    std::vector<std::string> cmd = {"sieve", "--from", "2", "--to", "6", "--level", "2", "--shards", "3"};
    auto a = run(cmd);
    auto j1 = cmd;
    j1.insert(j1.begin(), {"--jobs", "1"});
    auto j3 = cmd;
    j3.insert(j3.begin(), {"--jobs", "3"});
    auto b = run(j1), c = run(j3);
    REQUIRE(a.rc == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    auto p1 = run({"prsec", "--case", "all"}), p2 = run({"prsec", "--case", "all"});
    CHECK(p1.out == p2.out);
}

TEST_CASE("config values apply and explicit flags win") {
    auto dir = scratch("cfg");
    auto cfg = write_file(dir / "c.json", R"j({"x-hi": 120, "step": "0.01", "from": "1.16", "to": "1.2"})j");
    auto base = run({"--config", cfg, "sweep"});
    REQUIRE(base.rc == 0);
    std::istringstream lines(base.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "mu_lo,mu_hi,method,n_upper,log10_b,log10_c,fallback");
    std::size_t rows = 0;
    while (std::getline(lines, row) && !row.empty() && row[0] != '{') ++rows;
    CHECK(rows == 4);
    CHECK(base.out.find("\n1.16,1.17,") != std::string::npos);

    auto over = run({"--config", cfg, "sweep", "--to", "1.18"});
    REQUIRE(over.rc == 0);
    CHECK(over.out.find("1.17,1.18,") != std::string::npos);
    CHECK(over.out.find("1.18,1.19,") == std::string::npos);

    auto bad = write_file(dir / "bad.json", R"j({"no-such-flag": 1})j");
    CHECK(run({"--config", bad, "sweep"}).rc == 2);
    CHECK(run({"--config", (dir / "missing.json").string(), "sweep"}).rc == 2);
}

TEST_CASE("FANCLOSE_DIGITS raises the working precision and rejects nonsense") {
    const std::string cand = R"j({"r":3200001,"s":20480012800001})j";
    {
        EnvGuard g("200");
        auto r = run({"reduce", "--candidate", cand});
        REQUIRE(r.rc == 0);
        CHECK(r.doc()["digits"] == 200);
        CHECK(r.doc()["final_bound"] == "1");
    }
    {
        EnvGuard g("5");
        CHECK(run({"reduce", "--candidate", cand}).rc == 2);
    }
    auto r = run({"reduce", "--candidate", cand});
    REQUIRE(r.rc == 0);
    CHECK(r.doc()["digits"] == 173);
    CHECK(r.doc()["resolved"] == true);
}

TEST_CASE("reduce accepts a raw linear form from a file") {
    auto dir = scratch("red");
    auto f = write_file(dir / "c.json", R"j({"kappa":"sqrt(2)","mu":"sqrt(3)/7","M":"10^19","A":"1000","B":"3"})j");
    auto r = run({"reduce", "--candidate", f});
    REQUIRE(r.rc == 0);
    auto d = r.doc();
    CHECK(d["trail"][0]["new_bound"] == "49");
    CHECK(d["trail"][0]["q"] == "165326326037771920630");
    CHECK(run({"reduce", "--candidate", R"j({"kappa":"sqrt(2)"})j"}).rc == 2);
}

TEST_CASE("prsec certifies the shipped caps and fails on loose ones") {
    auto ok = run({"prsec", "--case", "all"});
    CHECK(ok.rc == 0);
    CHECK(ok.doc()["certified"] == true);
    auto dir = scratch("prsec");
    auto loose = write_file(dir / "caps.json", R"j({"caps": {"a": [{"upper": "1e400", "lower": "1e400"}]}})j");
    auto r = run({"--config", loose, "prsec", "--case", "a"});
    CHECK(r.rc == 1);
    CHECK(r.doc()["certified"] == false);
}

TEST_CASE("a precision ceiling exits 3") {
    // q must exceed 6M ~ 1e180, far past what 173 digits can resolve
    auto r = run({"--digits-max", "173", "reduce", "--candidate",
                  R"j({"kappa":"sqrt(2)","mu":"sqrt(3)/7","M":"10^179","A":"1000","B":"3"})j"});
    CHECK(r.rc == 3);
}

TEST_CASE("family, pell and fexpand smoke") {
    auto p = run({"pell", "unit", "13"});
    REQUIRE(p.rc == 0);
    CHECK(p.out.find("649") != std::string::npos);
    auto f = run({"family", "--f", "2", "--k", "1", "--check", "pr34"});
    CHECK(f.rc == 0);
    auto e = run({"fexpand", "--level", "1", "--r", "4", "--s", "1000"});
    REQUIRE(e.rc == 0);
    CHECK(e.doc()["exact_F"].is_null());
    CHECK(run({"fexpand", "--level", "1", "--r", "1", "--s", "12"}).rc == 2);
}
