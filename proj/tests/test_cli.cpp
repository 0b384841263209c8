#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>

#include "volcano/csv.hpp"

using namespace volcano;

namespace {

struct RunResult {
    int         code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// spawn the installed binary through the shell; the environment prefix lets
// tests exercise VOLCANO_JOBS
RunResult run_tool(const std::string& args, const std::string& env_prefix = "") {
    const char* bin = std::getenv("VOLCANO_BIN");
#ifdef VOLCANO_BIN
    if (bin == nullptr)
        bin = VOLCANO_BIN; // baked in at configure time; env var overrides
#endif
    if (bin == nullptr)
        throw std::runtime_error("VOLCANO_BIN is not set");
    const std::string out_path = "/tmp/volcano_test_stdout.txt";
    const std::string err_path = "/tmp/volcano_test_stderr.txt";
    const std::string cmd = env_prefix + "\"" + bin + "\" " + args + " >" +
                            out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    RunResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out  = slurp(out_path);
    res.err  = slurp(err_path);
    return res;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

//------------------------------------------------------------------------------
// CSV layer
//------------------------------------------------------------------------------

TEST_CASE("doubles survive the format -> parse round trip bitwise") {
    std::mt19937_64 rng(0xABCDEFu);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 250; ++i) {
        const double v = std::ldexp(u(rng), ex(rng));
        const std::string s = format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.125) == "0.125");
    CHECK(format_double(-2.0) == "-2");
}

TEST_CASE("csv writer and reader agree") {
    std::ostringstream os;
    write_csv(os, {"# meta version = test"}, {"a", "b"},
              {{1.0, 0.1}, {-2.5, 3.0e-17}}, {"# event none t=0"});
    const std::string text = os.str();
    CHECK(contains(text, "a,b\n"));
    CHECK(text.find('\r') == std::string::npos);

    std::istringstream is(text);
    const CsvTable t = read_csv(is);
    REQUIRE(t.columns.size() == 2);
    CHECK(t.columns[0] == "a");
    CHECK(t.columns[1] == "b");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == 1.0);
    CHECK(t.rows[0][1] == 0.1);
    CHECK(t.rows[1][1] == 3.0e-17);
    REQUIRE(t.comments.size() == 2);
    CHECK(contains(t.comments[0], "meta version"));
    CHECK(contains(t.comments[1], "event"));
}

TEST_CASE("csv reader rejects malformed input") {
    SUBCASE("ragged row") {
        std::istringstream is("a,b\n1,2\n3\n");
        CHECK_THROWS_AS((void)read_csv(is), std::runtime_error);
    }
    SUBCASE("unparseable cell") {
        std::istringstream is("a,b\n1,zap\n");
        CHECK_THROWS_AS((void)read_csv(is), std::runtime_error);
    }
    SUBCASE("missing header") {
        std::istringstream is("# only a comment\n");
        CHECK_THROWS_AS((void)read_csv(is), std::runtime_error);
    }
    SUBCASE("carriage returns are tolerated") {
        std::istringstream is("a,b\r\n1,2\r\n");
        const CsvTable t = read_csv(is);
        CHECK(t.rows[0][0] == 1.0);
        CHECK(t.columns[1] == "b");
    }
}

//------------------------------------------------------------------------------
// tool plumbing
//------------------------------------------------------------------------------

TEST_CASE("version and help") {
    const RunResult v = run_tool("--version");
    CHECK(v.code == 0);
    CHECK(contains(v.out, "0.1.0"));
    const RunResult h = run_tool("--help");
    CHECK(h.code == 0);
    CHECK(contains(h.out, "potential"));
    CHECK(contains(h.out, "sweep"));
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_tool("").code == 1);
    CHECK(run_tool("warp --ratio 3").code == 1);
    CHECK(run_tool("classify --x0 0.5 --w0 0.1").code == 1); // no drive given
    const RunResult both =
        run_tool("classify --ratio 3 --epsilon 100 --omega-drive 57 --x0 0.5");
    CHECK(both.code == 1);
    CHECK(contains(both.err, "not both"));
    CHECK(run_tool("classify --ratio 3 --epsilon 100 --x0 0.5").code == 1);
    CHECK(run_tool("classify --ratio 3 --mode sideways --x0 0.5").code == 1);
    CHECK(run_tool("classify --ratio 3 --x0 nan").code == 1);
    CHECK(run_tool("simulate --ratio 3 --method leapfrog").code == 1);
    CHECK(run_tool("potential --ratio 3 --samples 1").code == 1);
    CHECK(run_tool("sweep --ratio 3", "VOLCANO_JOBS=soup ").code == 1);
    CHECK(run_tool("potential --ratio 3 -o /nonexistent/dir/out.csv").code == 1);
}

TEST_CASE("potential writes the canonical curve") {
    const RunResult r = run_tool(
        "potential --omega2 1 --lambda 0.1 --ratio 3 --xmin -2 --xmax 2 --samples 401");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "x,V\n"));
    CHECK(contains(r.out, "\n1,0.125\n"));     // barrier top
    CHECK(contains(r.out, "\n0,0\n"));         // well bottom
    CHECK(contains(r.out, "# meta command = potential"));
}

TEST_CASE("classify prints a single verdict word") {
    const RunResult b =
        run_tool("classify --mode full --lambda 0.1 --ratio 3 --x0 0.72 --w0 0.1");
    CHECK(b.code == 0);
    CHECK(b.out == "BOUNDED\n");

    const RunResult e =
        run_tool("classify --mode partial --lambda 0.1 --ratio 3 --x0 0.9 --w0 0.1");
    CHECK(e.code == 0);
    CHECK(e.out == "ESCAPED\n");

    const RunResult c =
        run_tool("classify --mode full --lambda 0.1 --ratio 0 --x0 0.3 --w0 0.1");
    CHECK(c.code == 0);
    CHECK(c.out == "CLOSURE_BREAKDOWN\n");
}

TEST_CASE("simulate records escape events and breakdown exits with 2") {
    const RunResult esc = run_tool(
        "simulate --mode uncoupled --ratio 3 --lambda 0.1 --x0 1.01 --w0 0.001 "
        "--horizon 50");
    CHECK(esc.code == 0);
    CHECK(contains(esc.out, "t,x,v,W,Wdot,Wddot,energy\n"));
    CHECK(contains(esc.out, "# event escape t="));

    const RunResult bad = run_tool(
        "simulate --mode full --ratio 0 --lambda 0.1 --x0 0.3 --w0 0.1 --horizon 50");
    CHECK(bad.code == 2);
    CHECK(contains(bad.out, "# event width_nonpositive t="));
    CHECK(contains(bad.err, "breakdown"));
}

TEST_CASE("sweep output: parseable, ordered, and byte-stable") {
    const std::string f1 = "/tmp/volcano_test_sweep1.csv";
    const std::string f2 = "/tmp/volcano_test_sweep2.csv";
    const std::string args =
        "sweep --mode partial --lambda 0.1 --ratio 3 --w0-min 0.05 --w0-max 0.25 "
        "--w0-steps 3 --horizon 150 -o ";
    CHECK(run_tool(args + f1).code == 0);
    CHECK(run_tool(args + f2, "VOLCANO_JOBS=2 ").code == 0);
    const std::string text1 = slurp(f1);
    CHECK(text1 == slurp(f2)); // parallelism must not leak into the bytes
    CHECK(!contains(text1, "jobs"));

    std::ifstream f(f1);
    const CsvTable t = read_csv(f);
    REQUIRE(t.columns.size() == 3);
    CHECK(t.columns[0] == "W0");
    CHECK(t.columns[1] == "x_max");
    CHECK(t.columns[2] == "flag");
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == 0.05);
    CHECK(t.rows[2][0] == 0.25);
    CHECK(t.rows[0][1] > t.rows[1][1]);
    CHECK(t.rows[1][1] > t.rows[2][1]);
    for (const auto& row : t.rows)
        CHECK(row[2] == 0.0);
    std::remove(f1.c_str());
    std::remove(f2.c_str());
}

TEST_CASE("compare at eps = 0 reports exactly zero deviation") {
    const RunResult r = run_tool(
        "compare --system quantum --epsilon 0 --omega-drive 10 --lambda 0.1 "
        "--x0 0.3 --w0 0.1 --horizon 2.5");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "t,slow,strobe,fast_corrected,abs_err\n"));
    CHECK(contains(r.out, "# summary max_dev=0 rms_dev=0"));
}

TEST_CASE("compare refuses out-of-regime drives with exit 2") {
    const RunResult r = run_tool(
        "compare --system classical --epsilon 1 --omega-drive 2 --x0 0.5");
    CHECK(r.code == 2);
    CHECK(contains(r.err, "validity"));
}

TEST_CASE("config file supplies defaults, flags override") {
    const std::string cfg_path = "/tmp/volcano_test_cfg.ini";
    {
        std::ofstream cfg(cfg_path);
        cfg << "ratio = 3\nlambda = 0.1\nmode = full\nx0 = 0.72\nw0 = 0.1\n";
    }
    const RunResult base = run_tool("classify --config " + cfg_path);
    CHECK(base.code == 0);
    CHECK(base.out == "BOUNDED\n");
    // the command line wins over the file
    const RunResult over = run_tool("classify --config " + cfg_path + " --x0 0.95");
    CHECK(over.code == 0);
    CHECK(over.out == "ESCAPED\n");
    std::remove(cfg_path.c_str());
}

TEST_CASE("simulate trajectories are reproducible and re-readable") {
    const std::string f1 = "/tmp/volcano_test_sim1.csv";
    const std::string f2 = "/tmp/volcano_test_sim2.csv";
    const std::string args =
        "simulate --mode partial --ratio 3 --lambda 0.1 --x0 0.5 --w0 0.1 "
        "--horizon 20 --stride 10 -o ";
    CHECK(run_tool(args + f1).code == 0);
    CHECK(run_tool(args + f2).code == 0);
    CHECK(slurp(f1) == slurp(f2));

    std::ifstream f(f1);
    const CsvTable t = read_csv(f);
    REQUIRE(t.columns.size() == 7);
    REQUIRE(t.rows.size() > 3);
    CHECK(t.rows[0][0] == 0.0);   // t starts at zero
    CHECK(t.rows[0][1] == 0.5);   // x0 echoed exactly
    CHECK(t.rows[0][3] == 0.1);   // W0 echoed exactly
    // energy column matches 0.5 v^2 + V_s(x) recomputed from the data
    for (const auto& row : t.rows) {
        const double x = row[1], v = row[2], e = row[6];
        const double vs = 0.25 * x * x - 0.125 * x * x * x * x;
        CHECK(e == doctest::Approx(0.5 * v * v + vs).epsilon(1e-12));
    }
    std::remove(f1.c_str());
    std::remove(f2.c_str());
}
