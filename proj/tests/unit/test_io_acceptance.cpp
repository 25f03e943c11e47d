#include "instanton/errors.hpp"
#include "instanton/acceptance.hpp"
#include "instanton/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

using namespace instanton;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

/// Fresh scratch directory removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("instanton_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string config_text(const fs::path& out, const std::string& extra_optimizer = "") {
    return R"({"model": "doublewell1d_validation", "grid": {"Nt": 200},
               "optimizer": {"tol": 1e-3)" +
           extra_optimizer + R"(}, "output": {"dir": ")" + out.string() + R"("}})";
}

} // namespace

TEST_CASE("configuration parsing") {
    SUBCASE("full document") {
        const RunConfig c = parse_config(R"({
            "model": "barkley",
            "params": {"r": 0.7},
            "grid": {"Nx": 96, "Nt": 100, "T": 5.0},
            "optimizer": {"tol": 1e-3, "max_iters": 10, "lambda": 50, "memory": 5,
                          "continuation": {"lambda0": 1, "growth": 10, "stages": 3},
                          "warmup": false, "debug_checks": true},
            "output": {"dir": "out", "checkpoint_interval": 5, "plot_resolution": 50}})");
        CHECK(c.model == "barkley");
        CHECK(c.params.at("r") == 0.7);
        CHECK(*c.grid.Nx == 96);
        CHECK(*c.grid.T == 5.0);
        CHECK(*c.max_iters == 10);
        CHECK(c.continuation->stages == 3);
        CHECK(c.warmup_disabled);
        CHECK(c.debug_checks);
        CHECK(c.checkpoint_interval == 5);
        // The echo parses back to the same configuration.
        CHECK(parse_config(c.to_json()).to_json() == c.to_json());
    }
    SUBCASE("unknown keys are named") {
        auto message = [](const std::string& text) {
            try {
                parse_config(text);
            } catch (const ConfigError& e) {
                return std::string(e.what());
            }
            return std::string("no error");
        };
        CHECK(message(R"({"model": "barkley", "colour": 1})").find("colour") != std::string::npos);
        CHECK(message(R"({"model": "barkley", "optimizer": {"tolerance": 1}})")
                  .find("optimizer.tolerance") != std::string::npos);
        CHECK(message(R"({"model": "barkley", "params": {"alpha": 1}})").find("params.alpha") !=
              std::string::npos);
        CHECK(message(R"({"model": "nope"})").find("nope") != std::string::npos);
    }
    SUBCASE("types are checked") {
        CHECK_THROWS_AS(parse_config(R"({"model": "barkley", "grid": {"Nt": 1.5}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"model": "barkley", "optimizer": {"tol": "small"}})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"model": 3})"), ConfigError);
        CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    }
}

TEST_CASE("dotted overrides") {
    std::string text = R"({"model": "doublewell2d"})";
    text = apply_override(text, "optimizer.tol=1e-3");
    text = apply_override(text, "params.offset=0.3");
    text = apply_override(text, "model=doublewell1d_validation");
    const json j = json::parse(text);
    CHECK(j["optimizer"]["tol"].get<double>() == 1e-3);
    CHECK(j["model"] == "doublewell1d_validation");
    CHECK_THROWS_AS(apply_override(text, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(text, "model.x=1"), ConfigError);
}

TEST_CASE("atomic writes and trajectory files") {
    TempDir dir;
    write_atomic(dir.path / "a.txt", "hello");
    CHECK(slurp(dir.path / "a.txt") == "hello");
    CHECK_FALSE(fs::exists(dir.path / "a.txt.tmp"));
    CHECK_THROWS_AS(write_atomic(dir.path / "missing" / "b.txt", "x"), IoError);

    Trajectory t(3, 2, 4);
    for (std::size_t i = 0; i < t.values().size(); ++i) t.values()[i] = 0.5 * static_cast<double>(i);
    const auto domain = SpatialDomain::periodic(10.0, 4);
    write_trajectory(dir.path, "phi", t, TimeGrid(1.0, 2), domain);
    const json shape = json::parse(slurp(dir.path / "phi.shape.json"));
    CHECK(shape["shape"] == json::array({3, 2, 4}));
    CHECK(shape["dtype"] == "float64");
    CHECK(fs::file_size(dir.path / "phi.bin") == 3 * 2 * 4 * sizeof(double));
    const Trajectory back = read_trajectory(dir.path / "phi.bin");
    CHECK(back.same_shape(t));
    CHECK(std::equal(back.values().begin(), back.values().end(), t.values().begin()));
}

TEST_CASE("downsampled CSV stays within the plotting budget") {
    Trajectory t(1001, 2, 300, 1.0);
    const std::string csv =
        downsampled_csv(t, TimeGrid(10.0, 1000), SpatialDomain::periodic(1.0, 300), 200, 200);
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        if (rows == 0) columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
        ++rows;
    }
    CHECK(rows == 201);  // header + 200 samples
    CHECK(columns <= 200);
    CHECK(csv.rfind("t,", 0) == 0);
}

TEST_CASE("run writes the documented outputs") {
    TempDir dir;
    const RunConfig config = parse_config(config_text(dir.path));
    CHECK(run(config, {false, true}) == exit_converged);
    for (const char* f : {"meta.json", "convergence.csv", "hamiltonian.csv", "phi.bin", "theta.bin",
                          "mu.bin", "noise.bin", "phi.shape.json", "noise.shape.json", "phi.csv",
                          "mu.csv"})
        CHECK(fs::exists(dir.path / f));
    CHECK_FALSE(fs::exists(dir.path / "checkpoint.bin"));
    const json meta = json::parse(slurp(dir.path / "meta.json"));
    CHECK(meta["status"] == "converged");
    CHECK(meta["action"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
    CHECK(meta.contains("wall_time"));
    CHECK(meta["config"]["model"] == "doublewell1d_validation");
    CHECK(slurp(dir.path / "convergence.csv").rfind("stage,iter,lambda,J,grad_norm", 0) == 0);

    SUBCASE("identical configurations give bit-identical arrays") {
        TempDir second;
        RunConfig again = config;
        again.output_dir = second.path.string();
        CHECK(run(again, {false, true}) == exit_converged);
        for (const char* f : {"phi.bin", "theta.bin", "mu.bin", "noise.bin"})
            CHECK(slurp(dir.path / f) == slurp(second.path / f));
    }
}

TEST_CASE("run exit codes") {
    TempDir dir;
    SUBCASE("iteration budget") {
        const RunConfig c = parse_config(config_text(dir.path, R"(, "max_iters": 1)"));
        CHECK(run(c, {false, true}) == exit_max_iters);
        CHECK(json::parse(slurp(dir.path / "meta.json"))["status"] == "max_iters");
        CHECK(fs::exists(dir.path / "phi.bin"));
    }
    SUBCASE("resume demanded without a checkpoint") {
        const RunConfig c = parse_config(config_text(dir.path));
        CHECK(run(c, {true, true}) == exit_io);
    }
    SUBCASE("unwritable output") {
        const fs::path blocker = dir.path / "file";
        write_atomic(blocker, "x");
        const RunConfig c = parse_config(config_text(blocker / "sub"));
        CHECK(run(c, {false, true}) == exit_io);
    }
    SUBCASE("invalid optimizer settings") {
        const RunConfig c = parse_config(config_text(dir.path, R"(, "memory": 0)"));
        CHECK(run(c, {false, true}) == exit_config);
    }
}

TEST_CASE("checkpoint round trip and resume") {
    TempDir dir;
    const RunConfig config = parse_config(config_text(dir.path));
    const std::string echo = config.problem_json();

    const ModelPreset p = build_preset(config);
    const OptimizerConfig opt = build_optimizer(config, p);
    InstantonProblem full_problem = p.problem();
    const InstantonResult full = solve_instanton(full_problem, opt);

    // Interrupt a run after a few iterations, leaving its checkpoint behind.
    struct Interrupt {};
    InstantonProblem partial = p.problem();
    try {
        solve_instanton(partial, opt, nullptr, [&](const SolverCheckpoint& cp) {
            if (cp.state.iteration == 12) {
                save_checkpoint(dir.path / "checkpoint.bin", cp, echo);
                throw Interrupt{};
            }
        });
    } catch (const Interrupt&) {
    }
    const auto loaded = load_checkpoint(dir.path / "checkpoint.bin", echo);
    REQUIRE(loaded.has_value());
    CHECK(loaded->state.iteration == 12);
    CHECK_THROWS_AS(load_checkpoint(dir.path / "checkpoint.bin", "{}"), ConfigError);
    CHECK_FALSE(load_checkpoint(dir.path / "none.bin", echo).has_value());

    CHECK(run(config, {true, true}) == exit_converged);
    const json meta = json::parse(slurp(dir.path / "meta.json"));
    CHECK(meta["resumed"] == true);
    CHECK(std::abs(meta["action"].get<double>() - full.action) <= 1e-8);
    CHECK_FALSE(fs::exists(dir.path / "checkpoint.bin"));

    write_atomic(dir.path / "bad.bin", "garbage");
    CHECK_THROWS_AS(load_checkpoint(dir.path / "bad.bin", echo), IoError);
}

TEST_CASE("acceptance measurements") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(Measurement{"m", 0.5, -inf, 1.0}.pass());
    CHECK_FALSE(Measurement{"m", 1.5, -inf, 1.0}.pass());
    CHECK_FALSE(Measurement{"m", nan, -inf, inf}.pass());
    CHECK(Measurement{"m", 1.0, 1.0, 1.0}.pass());
    CHECK(parse_tier("full") == Tier::full);
    CHECK_THROWS_AS(parse_tier("medium"), ConfigError);
}

TEST_CASE("acceptance registry covers A1 to A9") {
    const auto& criteria = acceptance_criteria();
    REQUIRE(criteria.size() == 9);
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        CHECK(criteria[i].id == "A" + std::to_string(i + 1));
        CHECK(criteria[i].tier == (i < 6 ? Tier::fast : Tier::full));
        CHECK(criteria[i].budget > 0.0);
    }
    AcceptanceOptions o;
    o.only = {"A42"};
    CHECK_THROWS_AS(run_acceptance(o), ConfigError);
}

TEST_CASE("acceptance runner isolates, times out and summarises") {
    AcceptanceOptions o;
    o.only = {"A5"};
    const AcceptanceSummary ok = run_acceptance(o);
    REQUIRE(ok.criteria.size() == 1);
    CHECK(ok.criteria[0].pass);
    CHECK(ok.pass);
    const json j = json::parse(ok.to_json());
    CHECK(j["tier"] == "fast");
    CHECK(j["criteria"][0]["id"] == "A5");
    CHECK(j["criteria"][0].contains("runtime"));
    CHECK(j["criteria"][0].contains("threshold"));
    CHECK(format_line(ok.criteria[0]).rfind("A5 PASS", 0) == 0);

    // A budget far too small must fail the criterion and keep going.
    o.only = {"A6", "A5"};
    o.budget_scale = 1e-6;
    const AcceptanceSummary late = run_acceptance(o);
    REQUIRE(late.criteria.size() == 2);
    for (const auto& c : late.criteria) {
        CHECK(c.timed_out);
        CHECK_FALSE(c.pass);
    }
    CHECK_FALSE(late.pass);

    // Naming a full-tier id selects it even though the tier is fast.
    o.only = {"A7"};
    const AcceptanceSummary named = run_acceptance(o);
    REQUIRE(named.criteria.size() == 1);
    CHECK(named.criteria[0].id == "A7");
    CHECK(named.criteria[0].timed_out);
}
