#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hotspot/io.hpp"

using namespace hotspot;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HOTSPOT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        REQUIRE(std::strtod(fmt17(x).c_str(), nullptr) == x);
    }
    REQUIRE(std::strtod(fmt17(0.0).c_str(), nullptr) == 0.0);
}

TEST_CASE("config round-trips") {
    Config cfg{{"dim", "2"}, {"eps", fmt17(0.05)}, {"D0", fmt17(1234.5678)}, {"out", "x_y"}};
    std::istringstream in(print_config(cfg));
    REQUIRE(parse_config(in) == cfg);
}

TEST_CASE("config parser ignores comments and blank lines") {
    std::istringstream in("# comment\n\n a = 1 \nb=2#trailing\nnot_a_pair\n");
    Config cfg = parse_config(in);
    REQUIRE(cfg == Config{{"a", "1"}, {"b", "2"}});
}

TEST_CASE("CSV output is deterministic") {
    const std::vector<std::string> hdr{"a", "b"};
    const std::vector<std::vector<double>> rows{{1.0 / 3.0, 2e-17}, {-0.0, 1e300}};
    write_csv("io_det_1.csv", hdr, rows);
    write_csv("io_det_2.csv", hdr, rows);
    REQUIRE(slurp("io_det_1.csv") == slurp("io_det_2.csv"));
    REQUIRE(slurp("io_det_1.csv").find("\r") == std::string::npos);
}

TEST_CASE("cli: ground-state writes moments and passes identities") {
    REQUIRE(run_cli("ground-state --dim 1 --grid-n 2000 --out cli_gs1") == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("cli_gs1_moments.json"));
    REQUIRE(std::abs(j["m2"].get<double>() - 4.0) < 1e-8);
    const std::string profile = slurp("cli_gs1_profile.csv");
    REQUIRE(profile.rfind("r,w,dw,w0\n", 0) == 0);
}

TEST_CASE("cli: exit codes") {
    SECTION("unsupported dimension is a usage error") {
        REQUIRE(run_cli("ground-state --dim 3") == 2);
    }
    SECTION("unknown flag is a usage error") {
        REQUIRE(run_cli("ground-state --dim 1 --nonsense 3") == 2);
    }
    SECTION("coarse grid fails the identity suite") {
        REQUIRE(run_cli("ground-state --dim 2 --grid-n 100 --out cli_coarse") == 1);
    }
    SECTION("verify-identities passes at the default grid") {
        REQUIRE(run_cli("verify-identities --dim 1 --tol 1e-6") == 0);
        REQUIRE(run_cli("verify-identities --dim 2 --tol 1e-3") == 0);
    }
    SECTION("1D hopf reports no crossing") {
        REQUIRE(run_cli("nlep hopf --dim 1 --grid-n 2000 --tau-lo 0.5 --tau-hi 100 "
                        "--out cli_h1") == 1);
    }
    SECTION("2D hopf succeeds with a finite positive threshold") {
        REQUIRE(run_cli("nlep hopf --dim 2 --grid-n 2000 --tau-lo 0.5 --tau-hi 100 "
                        "--out cli_h2") == 0);
        nlohmann::json j = nlohmann::json::parse(slurp("cli_h2_hopf.json"));
        REQUIRE(j["tau_tilde_h"].get<double>() > 0.0);
        REQUIRE(std::abs(j["lambda_h_im"].get<double>()) > 0.1);
    }
}

TEST_CASE("cli: byte-identical reruns") {
    REQUIRE(run_cli("ground-state --dim 1 --grid-n 1500 --out cli_det_a") == 0);
    REQUIRE(run_cli("ground-state --dim 1 --grid-n 1500 --out cli_det_b") == 0);
    REQUIRE(slurp("cli_det_a_profile.csv") == slurp("cli_det_b_profile.csv"));
    REQUIRE(slurp("cli_det_a_moments.json") == slurp("cli_det_b_moments.json"));
}

TEST_CASE("cli: config file with flag override") {
    {
        std::ofstream cfg("cli_cfg.txt");
        cfg << "dim=1\ngrid-n=1200\nout=cli_cfg_run\n";
    }
    REQUIRE(run_cli("ground-state --config cli_cfg.txt --grid-n 1400") == 0);
    nlohmann::json man = nlohmann::json::parse(slurp("cli_cfg_run_manifest.json"));
    // flag wins over the config file; config supplies the rest
    REQUIRE(man["config"]["grid-n"] == "1400");
    REQUIRE(man["config"]["dim"] == "1");
    // resolved configuration round-trips through the flat format
    Config cfg;
    for (auto& [k, v] : man["config"].items()) cfg[k] = v.get<std::string>();
    std::istringstream in(print_config(cfg));
    REQUIRE(parse_config(in) == cfg);
}

TEST_CASE("cli: steady and simulate produce artifacts") {
    REQUIRE(run_cli("steady --dim 1 --eps 0.1 --D0 100 --out cli_st") == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("cli_st_summary.json"));
    REQUIRE(j["residual"].get<double>() < 1e-10);
    const std::string profile = slurp("cli_st_profile.csv");
    REQUIRE(profile.rfind("r,u,v,A,V\n", 0) == 0);

    REQUIRE(run_cli("simulate --dim 1 --eps 0.1 --D0 100 --tau-tilde 1 --T 2 "
                    "--dt 0.01 --out cli_sim") == 0);
    nlohmann::json s = nlohmann::json::parse(slurp("cli_sim_summary.json"));
    REQUIRE(s.contains("sigma"));
    REQUIRE(slurp("cli_sim_timeseries.csv").rfind("t,u0,v0,amp\n", 0) == 0);
}
