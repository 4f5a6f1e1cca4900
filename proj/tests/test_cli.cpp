#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string("'") + SIEVECRAFT_CLI_PATH + "' " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

nlohmann::json run_json(const std::string& args) {
    const RunResult r = run(args);
    REQUIRE(r.status == 0);
    return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("exit codes") {
        CHECK(run("density --poly 'x^3+2' --B 100").status == 0);
        CHECK(run("").status == 64);
        CHECK(run("frobnicate").status == 64);
        CHECK(run("density --poly x --bogus 1").status == 64);
        CHECK(run("density").status == 64);
        CHECK(run("census --poly x --form 'x*z' --N 10").status == 64);
        CHECK(run("density --poly 'x^2'").status == 2);
        CHECK(run("density --poly 'x^+'").status == 2);
        CHECK(run("census --poly x --N 0").status == 2);
        CHECK(run("census --poly '100000000000*x^2+1' --N 1000000").status == 3);
    }

    TEST_CASE("reports embed the schema and the resolved config") {
        const nlohmann::json j = run_json("density --poly 'x^3+2' --B 10000");
        CHECK(j["schema"] == "sievecraft/1");
        CHECK(j["config"]["command"] == "density");
        CHECK(j["config"]["poly"] == "x^3+2");
        CHECK(j["config"]["B"] == 10000);
        const double lo = j["lower"], hi = j["upper"];
        CHECK(lo <= hi);
        CHECK(lo > 0.9374);
        CHECK(hi < 0.9376);
    }

    TEST_CASE("census report") {
        const nlohmann::json j = run_json("census --poly x --N 100");
        CHECK(j["observed"] == 61);
        CHECK(j["poly"] == "x");
        const double lo = j["main_lo"], hi = j["main_hi"];
        CHECK(lo <= 100 * 6 / (3.14159265358979 * 3.14159265358979));
        CHECK(hi >= 100 * 6 / (3.14159265358979 * 3.14159265358979));
        CHECK(run_json("census --poly x --N 100 --m 3")["observed"] == 85);
        CHECK(run_json("census --poly 'x^3-x^2+2' --N 10")["poly"] == "x^3 - x^2 + 2");
    }

    TEST_CASE("output is identical across thread counts") {
        for (const char* args : {"census --poly 'x^3+2' --N 3000", "census --form 'x^3+2*z^3' --N 30",
                                 "sievecheck --soils 20 --poly-soils 2", "delta --poly 'x^2+1' --N 300"}) {
            const RunResult a = run(std::string("--threads 1 ") + args);
            const RunResult b = run(std::string("--threads 4 ") + args);
            INFO(args);
            CHECK(a.status == 0);
            CHECK(a.out == b.out);
        }
    }

    TEST_CASE("tables csv") {
        const RunResult r = run("tables --alpha paper");
        REQUIRE(r.status == 0);
        std::istringstream in(r.out);
        std::string line;
        std::getline(in, line);
        CHECK(line == "group,order,c0,c1,c2,c3,c4,delta,beta,table_delta,table_beta,match");
        int rows = 0;
        while (std::getline(in, line) && !line.empty()) {
            ++rows;
            CHECK(line.substr(line.rfind(',') + 1) == "true");
        }
        CHECK(rows == 16);
        CHECK(run("tables --alpha -1").status == 2);
    }

    TEST_CASE("csv and text formats") {
        const RunResult csv = run("census --poly x --N 100 --format csv");
        REQUIRE(csv.status == 0);
        std::istringstream in(csv.out);
        std::string line;
        std::getline(in, line);
        CHECK(line == "key,value");
        std::getline(in, line);
        CHECK(line == "schema,sievecraft/1");
        CHECK(csv.out.find("\nobserved,61\n") != std::string::npos);
        CHECK(csv.out.find("\nconfig.command,census\n") != std::string::npos);
        CHECK(csv.out.find("\nconfig.N,100\n") != std::string::npos);
        const RunResult text = run("density --poly 'x^2+1' --B 100 --format text");
        REQUIRE(text.status == 0);
        CHECK(text.out.rfind("schema: sievecraft/1\n", 0) == 0);
    }
}
