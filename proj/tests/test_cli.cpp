#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// End-to-end checks of the command-line tool.  The binary path arrives in
// KEXT_CLI_BIN (set by ctest); outputs land in a scratch directory.

namespace {

std::string cli_path()
{
    const char* p = std::getenv("KEXT_CLI_BIN");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args)
{
    const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("integrate subcommand", "[cli]")
{
    const std::string out = "/tmp/kext_test_traj.csv";
    REQUIRE(run("integrate --p 0.6123724 --y-end 50 --out " + out) == 0);
    const auto rows = lines(slurp(out));
    REQUIRE(rows.size() > 100);
    CHECK(rows[0] == "y,phi1,phi2,dphi1,dphi2,H1,H2");

    // drift column stays near the conserved value -4p^2(3-4p^2)
    const double p = 0.6123724;
    const double k = -4.0 * p * p * (3.0 - 4.0 * p * p);
    for (std::size_t i : {std::size_t{1}, rows.size() / 2, rows.size() - 1}) {
        std::stringstream ss(rows[i]);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ','))
            vals.push_back(std::stod(field));
        REQUIRE(vals.size() == 7);
        CHECK(std::abs(vals[5] - k) < 1e-7);
        CHECK(std::abs(vals[6] - k) < 1e-7);
    }
}

TEST_CASE("separated trajectory export", "[cli]")
{
    REQUIRE(run("integrate --p 0.5 --y-end 10 --out /tmp/kext_test_t2.csv"
                " --separated-out /tmp/kext_test_sep.csv") == 0);
    const auto rows = lines(slurp("/tmp/kext_test_sep.csv"));
    REQUIRE(rows.size() > 100);
    CHECK(rows[0] == "tau,y,u,v,du,dv");
    // u stays in [0, 1/2] and v in [-1, -1/2] for p = 1/2
    for (std::size_t i = 1; i < rows.size(); i += 97) {
        std::stringstream ss(rows[i]);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ','))
            vals.push_back(std::stod(field));
        REQUIRE(vals.size() == 6);
        CHECK(vals[2] >= -1e-9);
        CHECK(vals[2] <= 0.5 + 1e-9);
        CHECK(vals[3] >= -1.0 - 1e-9);
        CHECK(vals[3] <= -0.5 + 1e-9);
    }
}

TEST_CASE("usage errors exit with code 2", "[cli]")
{
    CHECK(run("integrate --p 1.5") == 2);
    CHECK(run("integrate") == 2);
    CHECK(run("") == 2);
    CHECK(run("nonsense") == 2);
}

TEST_CASE("numerical failures exit with code 1", "[cli]")
{
    // the period integrals diverge at p = sqrt(3)/2
    CHECK(run("periods --p-min 0.86602540378443865 --p-max 0.867 --count 2"
              " --out /tmp/kext_test_fail.csv") == 1);
}

TEST_CASE("periods subcommand", "[cli]")
{
    const std::string out = "/tmp/kext_test_periods.csv";
    REQUIRE(run("periods --p-min 0.05 --p-max 0.8 --count 40 --threads 4"
                " --out " + out) == 0);
    const auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 41);
    CHECK(rows[0] == "p,T_u,T_v,R,err_u,err_v");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ','))
            vals.push_back(std::stod(field));
        REQUIRE(vals.size() == 6);
        CHECK(vals[2] > vals[1]);               // T_v > T_u
        CHECK(vals[3] > 1.480473);
        CHECK(vals[3] < 1.507784);
    }

    // byte-identical across runs and thread counts
    REQUIRE(run("periods --p-min 0.05 --p-max 0.8 --count 40 --threads 1"
                " --out /tmp/kext_test_periods2.csv") == 0);
    CHECK(slurp(out) == slurp("/tmp/kext_test_periods2.csv"));
}

TEST_CASE("classify subcommand emits the report schema", "[cli]")
{
    const std::string out = "/tmp/kext_test_class.json";
    REQUIRE(run("classify --p 0.61237243569579452 --out " + out) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("kind") == "periodic");
    CHECK(j.at("shape") == "degenerate_hyperbola");
    CHECK(j.at("zeros_phi1") == 2);
    CHECK(j.at("phi2_min").get<double>() > 0.0);
    CHECK(j.at("R").get<double>() > 1.5);
    CHECK(j.contains("period"));
    CHECK(j.contains("fraction"));
    CHECK(j.contains("p"));

    REQUIRE(run("classify --p 0.8660254037844386 --out " + out) == 0);
    const nlohmann::json jd = nlohmann::json::parse(slurp(out));
    CHECK(jd.at("kind") == "decaying");

    // determinism
    REQUIRE(run("classify --p 0.29 --out /tmp/kext_test_c1.json") == 0);
    REQUIRE(run("classify --p 0.29 --out /tmp/kext_test_c2.json") == 0);
    CHECK(slurp("/tmp/kext_test_c1.json") == slurp("/tmp/kext_test_c2.json"));
}

TEST_CASE("scan subcommand", "[cli]")
{
    const std::string out = "/tmp/kext_test_scan.json";
    REQUIRE(run("scan --denom-cap 3 --r-min 1.49 --r-max 1.51 --grid 300"
                " --threads 4 --out " + out) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.at("fractions").size() == 1); // only 3/2 qualifies
    const auto& fr = j.at("fractions")[0];
    CHECK(fr.at("q") == 3);
    CHECK(fr.at("m") == 2);
    REQUIRE(fr.at("roots").size() >= 2);
    for (const auto& r : fr.at("roots")) {
        CHECK(r.at("zeros_phi1").get<long>() >= 6);
        CHECK(r.at("condition9") == false);
    }
    // the constant-v orbit is the single Condition-(9) solution
    CHECK(j.at("sqrt38").at("condition9") == true);
    CHECK(j.at("summary").at("condition9_count") == 1);

    // empty target range
    REQUIRE(run("scan --denom-cap 3 --r-min 1.95 --r-max 1.99 --out "
                "/tmp/kext_test_scan_empty.json") == 0);
    const nlohmann::json je =
        nlohmann::json::parse(slurp("/tmp/kext_test_scan_empty.json"));
    CHECK(je.at("fractions").empty());
}

TEST_CASE("config file and environment overrides", "[cli]")
{
    {
        std::ofstream cfg("/tmp/kext_test.cfg");
        cfg << "[periods]\np-min=0.1\np-max=0.7\ncount=5\n"
               "out=/tmp/kext_test_cfg.csv\n";
    }
    REQUIRE(run("--config /tmp/kext_test.cfg periods") == 0);
    CHECK(lines(slurp("/tmp/kext_test_cfg.csv")).size() == 6);

    const std::string cmd = "KEXT_OUT=/tmp/kext_test_env.csv " + cli_path() +
                            " periods --p-min 0.1 --p-max 0.7 --count 5"
                            " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(slurp("/tmp/kext_test_env.csv") ==
          slurp("/tmp/kext_test_cfg.csv"));
}

TEST_CASE("verify subcommand", "[cli]")
{
    const std::string out = "/tmp/kext_test_verify.json";
    REQUIRE(run("verify --grid 1024 --out " + out) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    for (const char* key : {"from_ode", "closed_form"}) {
        const auto& rep = j.at(key);
        CHECK(std::abs(rep.at("lambda1").get<double>() - 2.0) < 1e-5);
        CHECK(rep.at("multiplicity") == 5);
        CHECK(std::abs(rep.at("product_over_pi").get<double>() - 13.365) <
              1e-3);
        CHECK(rep.at("eigenvalues").contains("k0_even"));
        CHECK(rep.at("eigenvalues").contains("k1_odd"));
        CHECK(rep.at("eigenvalues").contains("k2_even"));
    }
    CHECK(j.at("product_rel_difference").get<double>() < 1e-6);
}
