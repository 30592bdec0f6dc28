#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TOUCHAUTH_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("touchauth_cli_" + name);
    fs::remove_all(d);
    return d;
}

std::string field(const std::string& csv_line, std::size_t index) {
    std::stringstream ss(csv_line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(ss, cell, ',');
    return cell;
}

}  // namespace

TEST_CASE("synth writes one trace per placement, byte identical on rerun") {
    const fs::path a = fresh_dir("synth_a"), b = fresh_dir("synth_b");
    REQUIRE(run("synth --seed 42 --length 2 --out " + a.string()) == 0);
    REQUIRE(run("synth --seed 42 --length 2 --out " + b.string()) == 0);
    for (const char* id : {"authenticator", "valid_authenticatee", "invalid_authenticatee"}) {
        const std::string name = std::string("trace_") + id + ".csv";
        const std::string text = slurp(a / name);
        CHECK(line_count(text) == 1 + 1000);
        CHECK(text == slurp(b / name));
    }
    const fs::path c = fresh_dir("synth_c");
    REQUIRE(run("synth --seed 43 --length 2 --out " + c.string()) == 0);
    CHECK(slurp(a / "trace_authenticator.csv") != slurp(c / "trace_authenticator.csv"));
}

TEST_CASE("usage and runtime errors") {
    const fs::path d = fresh_dir("errors");
    CHECK(run("roc --trials 0 --out " + d.string()) == 2);
    CHECK(run("nonsense") == 2);
    CHECK(run("roc --metric cosine --out " + d.string()) == 2);
    CHECK(run("synth --scenario /nonexistent/scenario.json --out " + d.string()) == 1);
    CHECK(run("synth --set placements.0.bogus=1 --out " + d.string()) == 1);
    CHECK(run("session --adversary teleport --trials 2 --out " + d.string()) != 0);
}

TEST_CASE("detect on synthesized traces") {
    const fs::path d = fresh_dir("detect");
    REQUIRE(run("synth --seed 5 --out " + d.string()) == 0);
    REQUIRE(run("detect --eta 0.5 --s " + (d / "trace_authenticator.csv").string() + " --s-prime " +
                (d / "trace_valid_authenticatee.csv").string() + " --out " + d.string()) == 0);
    const std::string text = slurp(d / "decisions.csv");
    CHECK(text.rfind("metric,eta,length_s,outcome,score\n", 0) == 0);
    CHECK(line_count(text) == 2);
}

TEST_CASE("roc with a loose bound reports the best detection rate") {
    const fs::path d = fresh_dir("roc");
    REQUIRE(run("roc --trials 50 --seed 3 --alpha-bound 1 --out " + d.string()) == 0);
    const std::string roc = slurp(d / "roc.csv");
    CHECK(roc.rfind("eta,alpha,beta,frr\n", 0) == 0);
    std::stringstream ss(roc);
    std::string line;
    std::getline(ss, line);
    double best = 0.0;
    while (std::getline(ss, line)) best = std::max(best, std::stod(field(line, 2)));
    CHECK(best == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fs::exists(d / "sdr.csv"));
}

TEST_CASE("session echo attack never passes the committed protocol") {
    const fs::path d = fresh_dir("session_echo");
    REQUIRE(run("session --trials 20 --seed 9 --adversary echo-mitm --authenticatee invalid_authenticatee "
                "--out " + d.string()) == 0);
    std::stringstream ss(slurp(d / "sessions.csv"));
    std::string line;
    std::getline(ss, line);
    CHECK(line == "seed,mode,adversary,outcome,score");
    std::size_t rows = 0;
    while (std::getline(ss, line)) {
        ++rows;
        CHECK(field(line, 3) != "ACCEPTED");
    }
    CHECK(rows == 20);
}

TEST_CASE("lightweight transcript exposes s' on the wire") {
    const fs::path d = fresh_dir("lightweight");
    REQUIRE(run("session --trials 1 --seed 4 --mode lightweight --adversary passive --transcript --out " +
                d.string()) == 0);
    const std::string t = slurp(d / "transcripts" / "run_0.csv");
    CHECK(t.rfind("time,actor,event,detail\n", 0) == 0);
    CHECK(t.find("secure=0;payload=08") != std::string::npos);

    const fs::path f = fresh_dir("full");
    REQUIRE(run("session --trials 1 --seed 4 --adversary passive --transcript --out " + f.string()) == 0);
    // Only the HELLO and key exchange travel in the clear.
    const std::string full = slurp(f / "transcripts" / "run_0.csv");
    for (const char* leak : {"payload=04", "payload=06", "payload=07", "payload=08", "secure=1;payload"}) {
        CHECK(full.find(leak) == std::string::npos);
    }
}

TEST_CASE("every command is reproducible") {
    const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
    for (const fs::path& d : {a, b}) {
        REQUIRE(run("roc --trials 40 --seed 8 --out " + d.string()) == 0);
        REQUIRE(run("sweep --trials 20 --seed 8 --lengths 0.5 1 --out " + d.string()) == 0);
        REQUIRE(run("session --trials 5 --seed 8 --eta 0.6 --transcript --out " + d.string()) == 0);
        REQUIRE(run("attack --kind echo --trials 5 --seed 8 --eta 0.6 --out " + d.string()) == 0);
    }
    for (const char* name : {"roc.csv", "sdr.csv", "sweep.csv", "sessions.csv", "echo.csv",
                             "transcripts/run_0.csv", "transcripts/run_4.csv"}) {
        CAPTURE(name);
        const std::string x = slurp(a / name);
        CHECK(!x.empty());
        CHECK(x == slurp(b / name));
    }
}
