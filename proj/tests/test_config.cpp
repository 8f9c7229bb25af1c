#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fimstar/config.hpp"
#include "fimstar/experiments.hpp"

using namespace fimstar;

namespace {

ConfigError::Kind error_kind(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ConfigError::Kind::parse;
}

}  // namespace

TEST_CASE("empty file gives the full-scale defaults") {
    const ExperimentConfig c = parse_config("");
    CHECK(c.profile == "table1");
    CHECK(c.scenario.antennas() == 16);
    CHECK(c.scenario.elements == 400);
    CHECK(c.scenario.users == 6);
    CHECK(c.scenario.paths == 16);
    CHECK(c.scenario.noise_dbm_per_hz == -22.2);
    CHECK(c.td3.gamma == 0.99);
    CHECK(c.td3.lr == 1e-4);
    CHECK(c.td3.batch == 64);
    CHECK(c.td3.noise_clip == 0.5);
    CHECK(c.td3.hidden == std::vector<int>{500, 400, 300});
}

TEST_CASE("desk profile") {
    const ExperimentConfig c = parse_config("scenario.paths = 3\nrun.profile = desk\n");
    CHECK(c.profile == "desk");
    CHECK(c.scenario.antennas() == 4);
    CHECK(c.scenario.elements == 16);
    CHECK(c.scenario.users == 2);
    CHECK(c.scenario.paths == 3);
    CHECK(c.scenario.gamma_min_db == std::vector<double>{-10.0});
    CHECK(c.episodes == 300);
}

TEST_CASE("values, lists and comments") {
    const ExperimentConfig c = parse_config(
        "# comment\n"
        "agent.hidden = [64, 32]   # trailing comment\n"
        "run.seeds = 4, 5\n"
        "run.agents = td3,random\n"
        "scenario.gamma_min_db = 0, 3, 1, 2, 2, 2\n"
        "sweep.kind = power\n"
        "sweep.grid = 10, 20\n"
        "agent.first_order = true\n");
    CHECK(c.td3.hidden == std::vector<int>{64, 32});
    CHECK(c.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(c.agents == std::vector<AgentKind>{AgentKind::td3, AgentKind::random});
    CHECK(c.scenario.gamma_min_db.size() == 6);
    CHECK(c.sweep.kind == SweepKind::power);
    CHECK(c.meta.first_order);
}

TEST_CASE("sweep grid defaults per kind") {
    CHECK(parse_config("sweep.kind = power").sweep.grid == std::vector<double>{10, 20, 30, 40});
    CHECK(parse_config("sweep.kind = sinr_min").sweep.grid == std::vector<double>{0, 2, 4, 6});
    CHECK(parse_config("sweep.kind = ris_elements").sweep.grid == std::vector<double>{16, 36, 64, 100});
    CHECK(parse_config("sweep.kind = power\nsweep.grid = 5").sweep.grid == std::vector<double>{5});
}

TEST_CASE("distinct diagnostics") {
    CHECK(error_kind("agent.gamma = 1.5") == ConfigError::Kind::invalid);
    CHECK(error_kind("agent.gama = 0.5") == ConfigError::Kind::unknown_key);
    CHECK(error_kind("agent.gamma 0.5") == ConfigError::Kind::parse);
    CHECK(error_kind("agent.gamma = fast") == ConfigError::Kind::parse);
    CHECK(error_kind("agent.gamma = 0.5\nagent.gamma = 0.6") == ConfigError::Kind::parse);
    CHECK(error_kind("run.seeds = ") == ConfigError::Kind::invalid);
    CHECK(error_kind("sweep.kind = power\nsweep.grid = ") == ConfigError::Kind::invalid);
    CHECK(error_kind("sweep.kind = ris_elements\nsweep.grid = 16, 2.5") == ConfigError::Kind::invalid);
    CHECK(error_kind("run.profile = huge") == ConfigError::Kind::parse);
    try {
        parse_config("agent.gamma = 1.5");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("agent.gamma") != std::string::npos);
    }
    try {
        load_config("/nonexistent/fimstar.cfg");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.kind() == ConfigError::Kind::missing_file);
    }
}

TEST_CASE("dump is canonical and round trips") {
    const ExperimentConfig a = parse_config("run.profile = desk\nagent.lr = 0.001\nscenario.x_max = 0.1\n");
    const std::string d = dump_config(a);
    const ExperimentConfig b = parse_config(d);
    CHECK(dump_config(b) == d);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(d.find("agent.lr = 0.001\n") != std::string::npos);

    ExperimentConfig c = a;
    c.td3.lr = 0.002;
    CHECK(config_hash(c) != config_hash(a));
    c = a;
    c.output_dir = "elsewhere";
    c.jobs = 4;
    CHECK(config_hash(c) == config_hash(a));
    CHECK(hex64(0xabc) == "0000000000000abc");
}

TEST_CASE("loading from disk") {
    const auto path = std::filesystem::temp_directory_path() / "fimstar_test.cfg";
    {
        std::ofstream out(path);
        out << "run.profile = desk\nrun.episodes = 7\n";
    }
    CHECK(load_config(path).episodes == 7);
    std::filesystem::remove(path);
}

TEST_CASE("sweep scenarios") {
    ExperimentConfig c = parse_config("run.profile = desk\nsweep.kind = ris_elements\nsweep.grid = 16, 36\n");
    const EnvConfig e = sweep_scenario(c, 36);
    CHECK(e.elements == 36);
    CHECK(e.action_dim() == 4 + 16 + 4 * 36);
    c.sweep.kind = SweepKind::power;
    CHECK(sweep_scenario(c, 40).p_max_dbm == 40);
    c.sweep.kind = SweepKind::sinr_min;
    CHECK(sweep_scenario(c, 6).gamma_min_db == std::vector<double>{6});
}
