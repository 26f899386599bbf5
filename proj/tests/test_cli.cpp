#include <doctest.h>

#include <filesystem>

#include "gawcga/cli.hpp"
#include "support.hpp"

using namespace gawcga;

namespace {

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("gawcga_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

const char* kRunConfig = R"(
# two-step exact run
[space]
kind = lq
q = 2

[dictionary]
kind = canonical
i0 = 1
n = 8

[element]
coords = 1:1.0 2:0.5

[run]
policy = exact
max_steps = 8
stop_tol = 0
seed = 7
)";

}  // namespace

TEST_CASE("config round-trips losslessly") {
    RunConfig cfg = parse_config(kRunConfig);
    CHECK(cfg.space.q == 2.0);
    CHECK(cfg.element.coords.size() == 2);

    const std::string once = serialize_config(cfg);
    RunConfig reparsed = parse_config(once);
    CHECK(serialize_config(reparsed) == once);

    // every sequence kind and a witness survive the round trip
    RunConfig rich;
    rich.space.kind = "smooth-x";
    rich.space.pseq = GeometricPSeq{1.0, 0.5};
    rich.space.horizon = 24;
    rich.dict.kind = "g";
    rich.dict.kmax = 20;
    rich.element.kind = "witness";
    rich.element.witness_name = "smooth-space";
    rich.sched.t = ConstantSeq{0.3};
    rich.sched.t_prime = PowerDecaySeq{0.1, 2.0};
    rich.sched.delta = ExplicitSeq{{0.1, 0.2, 0.30000000000000004}, 1};
    rich.sched.eta = IndicatorSeq{{10, 20, 30}, 0.5, 0.25};
    rich.witness.alpha = 0.1;
    rich.witness.kmax = 20;
    rich.sweep.t = {0.25, 0.5, 1.0};
    const std::string a = serialize_config(rich);
    const std::string b = serialize_config(parse_config(a));
    CHECK(a == b);
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(parse_config("[space]\nkind = lq\nq = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[space\nkind = lq\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nnonsense line\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[element]\ncoords = 1:abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[check]\nalphas = 0.1 -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\npolicy = nonsense\n"), ConfigError);
}

TEST_CASE("cmd_run: two-step trace and summary") {
    const std::string out = temp_dir("run");
    CHECK(cmd_run(parse_config(kRunConfig), out) == kExitOk);

    const std::string csv = read_file(out + "/trace.csv");
    CHECK(csv.find("step,atom_index,atom_sign,residual_norm,E_n,margin_functional,"
                   "margin_select,margin_approx") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows

    const auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary["final_residual"].get<double>() == 0.0);
    CHECK(summary["steps"].get<int>() == 2);
    CHECK(summary["stop_reason"] == "zero_residual");
}

TEST_CASE("cmd_run: witness element reports divergence at the horizon") {
    RunConfig cfg;
    cfg.element.kind = "witness";
    cfg.element.witness_name = "smooth-space";
    cfg.witness.kmax = 8;
    const std::string out = temp_dir("run_witness");
    CHECK(cmd_run(cfg, out) == kExitOk);
    const auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    CHECK(summary["witness"]["diverged_at_horizon"].get<bool>());
    CHECK(summary["witness"]["predicate_passed"].get<bool>());
    CHECK(summary["witness"]["divergence_floor"].get<double>() ==
          doctest::Approx(0.416).epsilon(0.01));
}

TEST_CASE("cmd_witness exit codes") {
    const std::string out = temp_dir("witness");

    RunConfig good;
    good.element.witness_name = "smooth-space";
    good.witness.kmax = 6;
    CHECK(cmd_witness(good, out) == kExitOk);

    RunConfig bad;
    bad.element.witness_name = "unbounded-eta";
    bad.witness.alpha = 0.5;
    bad.witness.horizon = 40;
    bad.witness.spikes = {10, 11, 12};  // gaps of 1: tail bound fails
    CHECK(cmd_witness(bad, out) == kExitConstruction);

    RunConfig unknown;
    unknown.element.witness_name = "no-such-witness";
    CHECK_THROWS_AS(build_witness(unknown), ConfigError);
}

TEST_CASE("cmd_check emits the condition report") {
    RunConfig cfg;
    cfg.check.p = 2.0;
    cfg.check.horizon = 100;
    cfg.check.alphas = {0.1};
    cfg.sched.delta = ConstantSeq{0.5};
    const std::string out = temp_dir("check");
    CHECK(cmd_check(cfg, out) == kExitOk);
    const auto j = nlohmann::json::parse(read_file(out + "/conditions.json"));
    CHECK(j["per_alpha"][0]["lambda1_size"].get<int>() == 99);
    CHECK(j["note"].get<std::string>().find("finite-horizon") != std::string::npos);
}

TEST_CASE("cmd_modulus tabulates rho and xi") {
    RunConfig cfg;  // defaults: l2-exact
    const std::string out = temp_dir("modulus");
    CHECK(cmd_modulus(cfg, out) == kExitOk);
    const auto j = nlohmann::json::parse(read_file(out + "/modulus.json"));
    CHECK(j["xi"][0]["theta"].get<double>() == 0.5);
    CHECK(j["xi"][0]["xi_at_t1"].get<double>() ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    const std::string csv = read_file(out + "/modulus.csv");
    CHECK(csv.rfind("u,rho", 0) == 0);
}

TEST_CASE("cmd_sweep: cartesian grid, deterministic csv") {
    RunConfig cfg;
    cfg.element.kind = "random";
    cfg.element.random_support = 6;
    cfg.element.random_max_index = 20;
    cfg.dict.n = 20;
    cfg.max_steps = 50;
    cfg.stop_tol = 1e-8;
    cfg.sweep.t = {0.25, 0.5, 1.0};
    cfg.sweep.delta = {0.0, 0.1};

    const std::string out1 = temp_dir("sweep1");
    CHECK(cmd_sweep(cfg, out1) == kExitOk);
    const std::string csv = read_file(out1 + "/sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);  // header + 6 rows
    CHECK(csv.find("row,t,delta,status") == 0);

    const std::string out2 = temp_dir("sweep2");
    CHECK(cmd_sweep(cfg, out2) == kExitOk);
    CHECK(read_file(out2 + "/sweep.csv") == csv);  // byte-identical rerun

    RunConfig empty = cfg;
    empty.sweep = SweepSpec{};
    CHECK_THROWS_AS(cmd_sweep(empty, out1), ConfigError);
}

TEST_CASE("determinism: identical config + seed gives byte-identical outputs") {
    RunConfig cfg;
    cfg.element.kind = "random";
    cfg.element.random_support = 8;
    cfg.element.random_max_index = 30;
    cfg.dict.n = 30;
    cfg.max_steps = 40;
    cfg.seed = 1234;
    cfg.sched.delta = PowerDecaySeq{0.05, 2.0};

    const std::string out1 = temp_dir("det1");
    const std::string out2 = temp_dir("det2");
    CHECK(cmd_run(cfg, out1) == kExitOk);
    CHECK(cmd_run(cfg, out2) == kExitOk);
    CHECK(read_file(out1 + "/trace.csv") == read_file(out2 + "/trace.csv"));
    CHECK(read_file(out1 + "/summary.json") == read_file(out2 + "/summary.json"));
}
