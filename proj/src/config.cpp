#include "fimstar/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fimstar/experiments.hpp"

namespace fimstar {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    throw ConfigError(ConfigError::Kind::parse, key + ": cannot parse '" + value + "' as " + expected);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        bad_value(key, v, "a finite number");
    }
    return out;
}

long long parse_integer(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        bad_value(key, v, "an integer");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    const long long x = parse_integer(key, v);
    if (x < -2147483647LL || x > 2147483647LL) {
        bad_value(key, v, "a 32-bit integer");
    }
    return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        bad_value(key, v, "an unsigned integer");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    bad_value(key, v, "true or false");
}

std::vector<std::string> split_list(const std::string& v) {
    std::string body = v;
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> items;
    if (trim(body).empty()) {
        return items;
    }
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        items.push_back(trim(item));
    }
    return items;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F&& one) {
    std::vector<T> out;
    for (const std::string& item : split_list(v)) {
        out.push_back(one(key, item));
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? ", " : "") + items[i];
    }
    return out;
}

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T, class F>
std::string fmt_list(const std::vector<T>& v, F&& one) {
    std::vector<std::string> items;
    for (const T& x : v) {
        items.push_back(one(x));
    }
    return join(items);
}

struct Field {
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
    bool affects_results = true;
};

#define FIELD_REAL(name, expr)                                                                   \
    Field {                                                                                      \
        name, [](const ExperimentConfig& c) { return format_number(c.expr); },                   \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = parse_double(k, v); } \
    }
#define FIELD_INT(name, expr)                                                                    \
    Field {                                                                                      \
        name, [](const ExperimentConfig& c) { return fmt(c.expr); },                             \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = parse_int(k, v); } \
    }
#define FIELD_BOOL(name, expr)                                                                   \
    Field {                                                                                      \
        name, [](const ExperimentConfig& c) { return fmt(c.expr); },                             \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.expr = parse_bool(k, v); } \
    }
#define FIELD_REALS(name, expr)                                                                  \
    Field {                                                                                      \
        name, [](const ExperimentConfig& c) { return fmt_list(c.expr, [](double x) { return format_number(x); }); }, \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
                c.expr = parse_list<double>(k, v, parse_double);                                 \
            }                                                                                    \
    }
#define FIELD_INTS(name, expr)                                                                   \
    Field {                                                                                      \
        name, [](const ExperimentConfig& c) { return fmt_list(c.expr, [](int x) { return fmt(x); }); }, \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) {                \
                c.expr = parse_list<int>(k, v, parse_int);                                       \
            }                                                                                    \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"run.profile", [](const ExperimentConfig& c) { return c.profile; },
                     [](ExperimentConfig&, const std::string&, const std::string&) {}});
        f.push_back({"run.agents",
                     [](const ExperimentConfig& c) {
                         return fmt_list(c.agents, [](AgentKind k) { return std::string(agent_name(k)); });
                     },
                     [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         c.agents.clear();
                         for (const std::string& item : split_list(v)) {
                             try {
                                 c.agents.push_back(parse_agent(item));
                             } catch (const DomainError& e) {
                                 throw ConfigError(ConfigError::Kind::parse, k + ": " + e.what());
                             }
                         }
                     }});
        f.push_back({"run.seeds",
                     [](const ExperimentConfig& c) {
                         return fmt_list(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
                     },
                     [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         c.seeds = parse_list<std::uint64_t>(k, v, parse_u64);
                     }});
        f.push_back(FIELD_INT("run.episodes", episodes));
        f.push_back(FIELD_INT("run.eval_draws", eval_draws));
        f.push_back({"run.output_dir", [](const ExperimentConfig& c) { return c.output_dir.string(); },
                     [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }, false});
        {
            Field jobs = FIELD_INT("run.jobs", jobs);
            jobs.affects_results = false;
            f.push_back(jobs);
        }

        f.push_back(FIELD_INT("scenario.p_y", scenario.p_y));
        f.push_back(FIELD_INT("scenario.p_z", scenario.p_z));
        f.push_back(FIELD_INT("scenario.elements", scenario.elements));
        f.push_back(FIELD_INT("scenario.users", scenario.users));
        f.push_back(FIELD_INT("scenario.paths", scenario.paths));
        f.push_back(FIELD_REAL("scenario.lambda", scenario.lambda));
        f.push_back(FIELD_REAL("scenario.spacing", scenario.spacing));
        f.push_back(FIELD_REAL("scenario.x_max", scenario.x_max));
        f.push_back(FIELD_REAL("scenario.noise_dbm_per_hz", scenario.noise_dbm_per_hz));
        f.push_back(FIELD_REAL("scenario.bandwidth_hz", scenario.bandwidth_hz));
        f.push_back(FIELD_REAL("scenario.eps", scenario.eps));
        f.push_back(FIELD_INT("scenario.m_d", scenario.m_d));
        f.push_back(FIELD_REALS("scenario.gamma_min_db", scenario.gamma_min_db));
        f.push_back(FIELD_REAL("scenario.p_max_dbm", scenario.p_max_dbm));
        f.push_back(FIELD_REAL("scenario.direct_ref_gain_db", scenario.direct_loss.ref_gain_db));
        f.push_back(FIELD_REAL("scenario.direct_ref_distance", scenario.direct_loss.ref_distance));
        f.push_back(FIELD_REAL("scenario.direct_exponent", scenario.direct_loss.exponent));
        f.push_back(FIELD_REAL("scenario.ris_ref_gain_db", scenario.ris_loss.ref_gain_db));
        f.push_back(FIELD_REAL("scenario.ris_ref_distance", scenario.ris_loss.ref_distance));
        f.push_back(FIELD_REAL("scenario.ris_exponent", scenario.ris_loss.exponent));
        f.push_back(FIELD_REALS("scenario.user_distance", scenario.user_distance));
        f.push_back(FIELD_REAL("scenario.bs_ris_distance", scenario.bs_ris_distance));
        f.push_back(FIELD_REALS("scenario.ris_user_distance", scenario.ris_user_distance));
        f.push_back(FIELD_INT("scenario.transmit_users", scenario.transmit_users));
        f.push_back(FIELD_INT("scenario.episode_len", scenario.episode_len));
        f.push_back(FIELD_BOOL("scenario.redraw_per_episode", scenario.redraw_per_episode));

        f.push_back(FIELD_REAL("agent.gamma", td3.gamma));
        f.push_back(FIELD_REAL("agent.tau1", td3.tau1));
        f.push_back(FIELD_REAL("agent.tau2", td3.tau2));
        f.push_back(FIELD_INT("agent.policy_delay", td3.policy_delay));
        f.push_back(FIELD_REAL("agent.noise_sigma", td3.noise_sigma));
        f.push_back(FIELD_REAL("agent.noise_clip", td3.noise_clip));
        f.push_back(FIELD_REAL("agent.expl_sigma", td3.expl_sigma));
        f.push_back(FIELD_REAL("agent.lr", td3.lr));
        f.push_back(FIELD_INT("agent.batch", td3.batch));
        f.push_back(FIELD_INT("agent.warmup", td3.warmup));
        f.push_back({"agent.capacity", [](const ExperimentConfig& c) { return std::to_string(c.td3.capacity); },
                     [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         c.td3.capacity = static_cast<std::size_t>(parse_u64(k, v));
                     }});
        f.push_back(FIELD_INTS("agent.hidden", td3.hidden));
        f.push_back(FIELD_REAL("agent.meta_lr", meta.meta_lr));
        f.push_back(FIELD_INTS("agent.meta_hidden", meta.hidden));
        f.push_back(FIELD_BOOL("agent.first_order", meta.first_order));

        f.push_back({"sweep.kind", [](const ExperimentConfig& c) { return std::string(sweep_name(c.sweep.kind)); },
                     [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         for (SweepKind s : {SweepKind::none, SweepKind::power, SweepKind::sinr_min,
                                             SweepKind::ris_elements}) {
                             if (v == sweep_name(s)) {
                                 c.sweep.kind = s;
                                 return;
                             }
                         }
                         bad_value(k, v, "none, power, sinr_min or ris_elements");
                     }});
        f.push_back(FIELD_REALS("sweep.grid", sweep.grid));
        f.push_back({"sweep.mode",
                     [](const ExperimentConfig& c) {
                         return std::string(c.sweep.mode == SweepMode::retrain ? "retrain" : "eval_only");
                     },
                     [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                         if (v == "retrain") {
                             c.sweep.mode = SweepMode::retrain;
                         } else if (v == "eval_only") {
                             c.sweep.mode = SweepMode::eval_only;
                         } else {
                             bad_value(k, v, "retrain or eval_only");
                         }
                     }});
        f.push_back({"sweep.checkpoint", [](const ExperimentConfig& c) { return c.sweep.checkpoint.string(); },
                     [](ExperimentConfig& c, const std::string&, const std::string& v) { c.sweep.checkpoint = v; }});
        return f;
    }();
    return table;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(ConfigError::Kind::invalid, message);
    }
}

}  // namespace

ConfigError::ConfigError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

std::string_view sweep_name(SweepKind kind) {
    switch (kind) {
        case SweepKind::none:
            return "none";
        case SweepKind::power:
            return "power";
        case SweepKind::sinr_min:
            return "sinr_min";
        case SweepKind::ris_elements:
            return "ris_elements";
    }
    return "unknown";
}

ExperimentConfig profile_defaults(const std::string& name) {
    ExperimentConfig c;
    if (name == "table1") {
        return c;
    }
    if (name != "desk") {
        throw ConfigError(ConfigError::Kind::parse, "run.profile: unknown profile '" + name + "' (expected table1 or desk)");
    }
    c.profile = "desk";
    c.scenario.p_y = 2;
    c.scenario.p_z = 2;
    c.scenario.elements = 16;
    c.scenario.users = 2;
    c.scenario.paths = 4;
    c.scenario.gamma_min_db = {-10.0};
    c.td3.hidden = {128, 96, 64};
    c.meta.hidden = {64, 32};
    c.agents = {AgentKind::meta_td3, AgentKind::td3, AgentKind::random};
    c.seeds = {1, 2, 3};
    c.episodes = 300;
    return c;
}

void ExperimentConfig::validate() const {
    require(!seeds.empty(), "run.seeds must not be empty");
    require(!agents.empty(), "run.agents must not be empty");
    require(episodes >= 1, "run.episodes must be at least 1");
    require(eval_draws >= 1, "run.eval_draws must be at least 1");
    require(jobs >= 1, "run.jobs must be at least 1");
    try {
        scenario.validate();
    } catch (const DomainError& e) {
        throw ConfigError(ConfigError::Kind::invalid, std::string("scenario: ") + e.what());
    }
    try {
        td3.validate();
        meta.validate();
    } catch (const DomainError& e) {
        throw ConfigError(ConfigError::Kind::invalid, e.what());
    }
    if (sweep.kind == SweepKind::none) {
        return;
    }
    require(!sweep.grid.empty(), "sweep.grid must not be empty when sweep.kind is not none");
    if (sweep.kind == SweepKind::ris_elements) {
        for (double v : sweep.grid) {
            require(v >= 1.0 && v == std::floor(v), "sweep.grid entries must be positive integers for ris_elements");
        }
        require(sweep.mode == SweepMode::retrain, "sweep.mode eval_only cannot change the element count");
    }
    if (sweep.mode == SweepMode::eval_only) {
        require(!sweep.checkpoint.empty(), "sweep.checkpoint is required when sweep.mode is eval_only");
    }
    for (double v : sweep.grid) {
        try {
            sweep_scenario(*this, v).validate();
        } catch (const DomainError& e) {
            throw ConfigError(ConfigError::Kind::invalid,
                              "sweep.grid value " + format_number(v) + ": " + e.what());
        }
    }
}

std::vector<double> default_grid(SweepKind kind) {
    switch (kind) {
        case SweepKind::power:
            return {10.0, 20.0, 30.0, 40.0};
        case SweepKind::sinr_min:
            return {0.0, 2.0, 4.0, 6.0};
        case SweepKind::ris_elements:
            return {16.0, 36.0, 64.0, 100.0};
        case SweepKind::none:
            break;
    }
    return {};
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, int> seen;
    std::string profile = "table1";
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        const std::string where = origin + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) {
            throw ConfigError(ConfigError::Kind::parse, where + "expected 'section.key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(ConfigError::Kind::parse, where + "missing key before '='");
        }
        const auto& table = fields();
        if (std::none_of(table.begin(), table.end(), [&](const Field& f) { return f.key == key; })) {
            throw ConfigError(ConfigError::Kind::unknown_key, where + "unknown key '" + key + "'");
        }
        if (seen.count(key)) {
            throw ConfigError(ConfigError::Kind::parse,
                              where + "duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
        }
        seen[key] = line_no;
        if (key == "run.profile") {
            profile = value;
        } else {
            entries.emplace_back(key, value);
        }
    }

    ExperimentConfig cfg = profile_defaults(profile);
    for (const auto& [key, value] : entries) {
        for (const Field& f : fields()) {
            if (f.key == key) {
                f.set(cfg, key, value);
            }
        }
    }
    if (cfg.sweep.kind != SweepKind::none && !seen.count("sweep.grid")) {
        cfg.sweep.grid = default_grid(cfg.sweep.kind);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(ConfigError::Kind::missing_file, "config file not found: " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const Field& f : fields()) {
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const Field& f : fields()) {
        if (!f.affects_results) {
            continue;
        }
        for (char ch : f.key + " = " + f.get(cfg) + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
    (void)ec;
    return std::string(16 - (ptr - buf), '0') + std::string(buf, ptr);
}

TrainerSetup trainer_setup(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed) {
    TrainerSetup s;
    s.env = cfg.scenario;
    s.kind = kind;
    s.td3 = cfg.td3;
    s.meta = cfg.meta;
    s.seed = seed;
    return s;
}

}  // namespace fimstar
