#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("omitlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& stdout_file = "out.txt") {
    const std::string cmd = std::string(OMITLAB_CLI) + " " + args + " > " + (scratch() / stdout_file).string() +
                            " 2> " + (scratch() / "err.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string out() { return slurp(scratch() / "out.txt"); }

} // namespace

TEST_CASE("steady-state report") {
    REQUIRE(run("steady-state") == 0);
    CHECK(out().find("x_s,") != std::string::npos);
    REQUIRE(run("steady-state --format json") == 0);
    const auto j = nlohmann::json::parse(out());
    CHECK(j.at("beta").get<double>() > 0.0);
    CHECK(j.at("bistable").get<bool>() == false);
}

TEST_CASE("configuration file and overrides") {
    {
        std::ofstream cfg(scratch() / "cfg.txt");
        cfg << "gamma_tip = 19.29\n";
    }
    REQUIRE(run("lit-scan --config " + (scratch() / "cfg.txt").string() + " --format json") == 0);
    CHECK(nlohmann::json::parse(out()).at("gamma_tp").get<double>() == doctest::Approx(19.29e6));
    CHECK(run("steady-state --set gamma_tip=-1") == 1);
    CHECK(slurp(scratch() / "err.txt").find("gamma_tip") != std::string::npos);
    CHECK(run("steady-state --config /nonexistent/file") == 1);
    CHECK(run("no-such-command") != 0);
}

TEST_CASE("spectra subcommands") {
    REQUIRE(run("optical-spectrum --from -11e6 --to 11e6 --count 3") == 0);
    CHECK(out().rfind("axis1,value\n", 0) == 0);
    REQUIRE(run("omit-spectrum --count 5 --set gamma_tip=19.29") == 0);
    const auto text = out();
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
    REQUIRE(run("group-delay --from -3e6 --to 3e6 --count 3") == 0);
    REQUIRE(run("sideband2 --count 4 --format json") == 0);
    CHECK(nlohmann::json::parse(out()).at("grids").size() == 1);
    REQUIRE(run("eigenmodes --count 9") == 0);
    CHECK(out().rfind("gamma_tip,re_plus,re_minus,im_plus,im_minus,splitting\n", 0) == 0);
    REQUIRE(run("shift-report") == 0);
    CHECK(out().find("shift2,") != std::string::npos);
}

TEST_CASE("oracle check with trace") {
    const auto trace = scratch() / "trace.csv";
    REQUIRE(run("oracle-check --from -3e6 --to 3e6 --count 2 --trace " + trace.string()) == 0);
    CHECK(out().rfind("Delta_P,T_P,T_P_oracle,", 0) == 0);
    CHECK(slurp(trace).rfind("t,x,re_a1,im_a1,re_a2,im_a2\n", 0) == 0);
}

TEST_CASE("sweep files, per-cell errors and figure reproduction") {
    {
        std::ofstream spec(scratch() / "bad.json");
        spec << R"({"observable":"T_P","axis1":{"parameter":"J","start":-1e6,"stop":1e6,"count":3}})";
    }
    const auto csv = scratch() / "bad.csv";
    CHECK(run("sweep --spec " + (scratch() / "bad.json").string() + " --out " + csv.string()) == 2);
    CHECK(slurp(csv).find("nan") != std::string::npos);
    CHECK(fs::exists(csv.string() + ".errors.csv"));

    {
        std::ofstream spec(scratch() / "invalid.json");
        spec << R"({"observable":"T_P","axis1":{"parameter":"J","start":1,"stop":0,"count":3}})";
    }
    CHECK(run("sweep --spec " + (scratch() / "invalid.json").string()) == 1);

    REQUIRE(run("reproduce-figure --list") == 0);
    CHECK(out().find("fig3f\n") != std::string::npos);
    CHECK(run("reproduce-figure fig9") == 1);

    const auto a = scratch() / "a.csv";
    const auto b = scratch() / "b.csv";
    REQUIRE(run("reproduce-figure fig3f --threads 1 --out " + a.string()) == 0);
    REQUIRE(run("reproduce-figure fig3f --threads 4 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));

    const auto multi = scratch() / "cd.csv";
    REQUIRE(run("reproduce-figure fig2cd --out " + multi.string()) == 0);
    CHECK(fs::exists(scratch() / "cd.fig2c.csv"));
    CHECK(fs::exists(scratch() / "cd.fig2d.csv"));
}
