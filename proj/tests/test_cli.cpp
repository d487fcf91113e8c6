#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

// Everything below drives the installed binary end to end through a shell.

int run_tool(const std::string& args) {
    const std::string cmd = std::string(WAVETOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

struct Workspace {
    fs::path root;

    Workspace() : root(fs::temp_directory_path() / "wavecoh_cli_test") {
        fs::remove_all(root);
        fs::create_directories(root);

        const std::size_t n = 128;
        const auto carrier = testutil::sinusoid(n, 32.0);
        const auto shifted = testutil::sinusoid(n, 32.0, -1.0);
        const auto e1 = testutil::random_series(n, 1001);
        const auto e2 = testutil::random_series(n, 1002);
        const auto e3 = testutil::random_series(n, 1003);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = carrier[i] + 0.4 * e1[i];
            y[i] = shifted[i] + 0.4 * e2[i];
        }
        write("x.csv", testutil::monthly_csv(2000, 1, x));
        write("y.csv", testutil::monthly_csv(2000, 1, y));
        write("z.csv", testutil::monthly_csv(2000, 1, e3));
    }

    ~Workspace() { fs::remove_all(root); }

    void write(const char* name, const std::string& content) {
        std::ofstream out(root / name, std::ios::binary);
        out << content;
    }

    [[nodiscard]] std::string arg(const char* name) const {
        return "\"" + (root / name).string() + "\"";
    }
};

}  // namespace

TEST_CASE("coherence command produces its full output set deterministically") {
    Workspace ws;
    const std::string common = "coherence --x " + ws.arg("x.csv") + " --y " + ws.arg("y.csv") +
                               " --runs 100 --seed 42 --out ";
    REQUIRE(run_tool(common + ws.arg("run1")) == 0);
    REQUIRE(run_tool(common + ws.arg("run2")) == 0);

    for (const char* name : {"coherence.csv", "phase.csv", "arrows.csv", "coherence.png"}) {
        CHECK(fs::exists(ws.root / "run1" / name));
    }

    const std::string a = slurp(ws.root / "run1" / "coherence.csv");
    const std::string b = slurp(ws.root / "run2" / "coherence.csv");
    CHECK(a == b);
    CHECK(slurp(ws.root / "run1" / "phase.csv") == slurp(ws.root / "run2" / "phase.csv"));
    CHECK(slurp(ws.root / "run1" / "coherence.png") ==
          slurp(ws.root / "run2" / "coherence.png"));

    const auto rows = lines_of(a);
    REQUIRE(!rows.empty());
    CHECK(rows.front() == "time_index,scale,value,significant");

    const auto arrows = lines_of(slurp(ws.root / "run1" / "arrows.csv"));
    REQUIRE(arrows.size() > 1);
    CHECK(arrows.front() == "time_index,scale,phase,class");

    const std::string png = slurp(ws.root / "run1" / "coherence.png");
    REQUIRE(png.size() > 8);
    CHECK(static_cast<unsigned char>(png[0]) == 0x89);
    CHECK(png.substr(1, 3) == "PNG");
}

TEST_CASE("weem command tabulates the requested level range") {
    Workspace ws;
    const auto wn = testutil::random_series(512, 2024);
    ws.write("w.csv", testutil::monthly_csv(1980, 1, wn));
    REQUIRE(run_tool("weem --x " + ws.arg("w.csv") + " --levels 1:4 --filter haar --out " +
                     ws.arg("entropy")) == 0);

    const auto rows = lines_of(slurp(ws.root / "entropy" / "weem.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "J,WE,WE_wn,WEEM");
    for (std::size_t j = 1; j <= 4; ++j) {
        CHECK(rows[j].rfind(std::to_string(j) + ",", 0) == 0);
    }
}

TEST_CASE("cweem command reports both directions per level") {
    Workspace ws;
    REQUIRE(run_tool("cweem --x " + ws.arg("x.csv") + " --y " + ws.arg("y.csv") +
                     " --levels 2 --filter haar --out " + ws.arg("cent")) == 0);
    const auto rows = lines_of(slurp(ws.root / "cent" / "cweem.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "J,direction,KL,WE_wn,CWEEM");
    CHECK(rows[1].rfind("2,x->y,", 0) == 0);
    CHECK(rows[2].rfind("2,y->x,", 0) == 0);
}

TEST_CASE("stats command summarises every given series") {
    Workspace ws;
    REQUIRE(run_tool("stats --x " + ws.arg("x.csv") + " --y " + ws.arg("y.csv") + " --out " +
                     ws.arg("st")) == 0);
    const auto rows = lines_of(slurp(ws.root / "st" / "stats.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("series,n,mean,std_dev,min,max", 0) == 0);
    CHECK(rows[1].rfind("x:", 0) == 0);
    CHECK(rows[2].rfind("y:", 0) == 0);
}

TEST_CASE("format selection limits the outputs") {
    Workspace ws;
    REQUIRE(run_tool("cwt --x " + ws.arg("x.csv") + " --format csv --out " + ws.arg("po")) == 0);
    CHECK(fs::exists(ws.root / "po" / "power.csv"));
    CHECK(!fs::exists(ws.root / "po" / "power.png"));
}

TEST_CASE("pcoh command writes magnitude and phase grids") {
    Workspace ws;
    REQUIRE(run_tool("pcoh --x " + ws.arg("x.csv") + " --y " + ws.arg("y.csv") + " --z " +
                     ws.arg("z.csv") + " --format csv --out " + ws.arg("pc")) == 0);
    CHECK(fs::exists(ws.root / "pc" / "pcoh.csv"));
    CHECK(fs::exists(ws.root / "pc" / "pcoh_phase.csv"));
    const auto rows = lines_of(slurp(ws.root / "pc" / "pcoh.csv"));
    REQUIRE(!rows.empty());
    CHECK(rows.front() == "time_index,scale,value");
}

TEST_CASE("config file supplies defaults that flags can override") {
    Workspace ws;
    ws.write("grid.cfg", "s0=4.0\n");
    REQUIRE(run_tool("cwt --x " + ws.arg("x.csv") + " --config " + ws.arg("grid.cfg") +
                     " --format csv --out " + ws.arg("cfgd")) == 0);
    const auto rows = lines_of(slurp(ws.root / "cfgd" / "power.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[1].rfind("0,4,", 0) == 0);

    REQUIRE(run_tool("cwt --x " + ws.arg("x.csv") + " --config " + ws.arg("grid.cfg") +
                     " --s0 2.0 --format csv --out " + ws.arg("cfgo")) == 0);
    const auto over = lines_of(slurp(ws.root / "cfgo" / "power.csv"));
    REQUIRE(over.size() > 1);
    CHECK(over[1].rfind("0,2,", 0) == 0);
}

TEST_CASE("usage errors exit with status two") {
    Workspace ws;
    CHECK(run_tool("coherence --x " + ws.arg("x.csv") + " --y " + ws.arg("y.csv") +
                   " --no-such-flag") == 2);
    CHECK(run_tool("") == 2);                       // missing subcommand
    CHECK(run_tool("coherence --y " + ws.arg("y.csv")) == 2);  // missing required --x
    CHECK(run_tool("cwt --x " + ws.arg("x.csv") + " --format pdf") == 2);
}

TEST_CASE("runtime failures exit with status one") {
    Workspace ws;
    CHECK(run_tool("cwt --x \"" + (ws.root / "missing.csv").string() + "\" --out " +
                   ws.arg("o")) == 1);
    // negative values make the log transform fail after parsing succeeds
    CHECK(run_tool("cwt --x " + ws.arg("x.csv") + " --transform log --out " + ws.arg("o2")) == 1);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_tool("--help") == 0);
    CHECK(run_tool("coherence --help") == 0);
}
