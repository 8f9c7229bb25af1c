// Checkpoint file layout (all integers little-endian, doubles IEEE-754):
//
//   magic "FIMSTAR-CKPT\0\0\0\0" (16 bytes), u32 version
//   setup      environment, agent kind, TD3 and meta parameters, seed
//   networks   actor, critics, their targets, meta-critic
//   optimizers Adam state for actor, critics, meta-critic
//   replay     full ring storage and cursor
//   streams    (seed, stream id, counter) for exploration, sampling, noise
//   log        episode rewards, per-update losses, counters
//
// Each section is written in the order above; there are no optional
// sections, so a reader checks the version and reads straight through.

#include <bit>
#include <cstring>
#include <fstream>

#include "fimstar/agent.hpp"

namespace fimstar {

namespace {

constexpr char kMagic[16] = {'F', 'I', 'M', 'S', 'T', 'A', 'R', '-', 'C', 'K', 'P', 'T', 0, 0, 0, 0};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) {
            throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
        }
    }
    void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void i64(std::int64_t v) { bytes(&v, sizeof v); }
    void f64(double v) { bytes(&v, sizeof v); }
    void boolean(bool v) { u64(v ? 1 : 0); }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        bytes(v.data(), v.size() * sizeof(double));
    }
    void ints(const std::vector<int>& v) {
        u64(v.size());
        for (int x : v) {
            i64(x);
        }
    }
    void finish() {
        out_.flush();
        if (!out_) {
            throw std::runtime_error("checkpoint write failed");
        }
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) {
            throw std::runtime_error("cannot open checkpoint: " + path.string());
        }
    }
    void bytes(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in_) {
            throw std::runtime_error("checkpoint truncated or unreadable");
        }
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        bytes(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, sizeof v);
        return v;
    }
    bool boolean() { return u64() != 0; }
    std::size_t length() {
        const std::uint64_t n = u64();
        if (n > (std::uint64_t{1} << 34)) {
            throw std::runtime_error("checkpoint length field out of range");
        }
        return static_cast<std::size_t>(n);
    }
    std::vector<double> f64s() {
        std::vector<double> v(length());
        bytes(v.data(), v.size() * sizeof(double));
        return v;
    }
    std::vector<int> ints() {
        std::vector<int> v(length());
        for (int& x : v) {
            x = static_cast<int>(i64());
        }
        return v;
    }

private:
    std::ifstream in_;
};

void write_loss_model(Writer& w, const PathLossModel& m) {
    w.f64(m.ref_gain_db);
    w.f64(m.ref_distance);
    w.f64(m.exponent);
}

PathLossModel read_loss_model(Reader& r) {
    PathLossModel m;
    m.ref_gain_db = r.f64();
    m.ref_distance = r.f64();
    m.exponent = r.f64();
    return m;
}

void write_setup(Writer& w, const TrainerSetup& s) {
    const EnvConfig& e = s.env;
    for (int v : {e.p_y, e.p_z, e.elements, e.users, e.paths, e.m_d, e.transmit_users, e.episode_len}) {
        w.i64(v);
    }
    for (double v : {e.lambda, e.spacing, e.x_max, e.noise_dbm_per_hz, e.bandwidth_hz, e.eps, e.p_max_dbm,
                     e.bs_ris_distance}) {
        w.f64(v);
    }
    w.f64s(e.gamma_min_db);
    write_loss_model(w, e.direct_loss);
    write_loss_model(w, e.ris_loss);
    w.f64s(e.user_distance);
    w.f64s(e.ris_user_distance);
    w.boolean(e.redraw_per_episode);

    w.u64(static_cast<std::uint64_t>(s.kind));
    const Td3Params& t = s.td3;
    for (double v : {t.gamma, t.tau1, t.tau2, t.noise_sigma, t.noise_clip, t.expl_sigma, t.lr}) {
        w.f64(v);
    }
    w.i64(t.policy_delay);
    w.i64(t.batch);
    w.i64(t.warmup);
    w.u64(t.capacity);
    w.ints(t.hidden);
    w.f64(s.meta.meta_lr);
    w.ints(s.meta.hidden);
    w.boolean(s.meta.first_order);
    w.u64(s.seed);
}

TrainerSetup read_setup(Reader& r) {
    TrainerSetup s;
    EnvConfig& e = s.env;
    for (int* v : {&e.p_y, &e.p_z, &e.elements, &e.users, &e.paths, &e.m_d, &e.transmit_users, &e.episode_len}) {
        *v = static_cast<int>(r.i64());
    }
    for (double* v : {&e.lambda, &e.spacing, &e.x_max, &e.noise_dbm_per_hz, &e.bandwidth_hz, &e.eps, &e.p_max_dbm,
                      &e.bs_ris_distance}) {
        *v = r.f64();
    }
    e.gamma_min_db = r.f64s();
    e.direct_loss = read_loss_model(r);
    e.ris_loss = read_loss_model(r);
    e.user_distance = r.f64s();
    e.ris_user_distance = r.f64s();
    e.redraw_per_episode = r.boolean();

    const std::uint64_t kind = r.u64();
    if (kind > static_cast<std::uint64_t>(AgentKind::random)) {
        throw std::runtime_error("checkpoint has an unknown agent kind");
    }
    s.kind = static_cast<AgentKind>(kind);
    Td3Params& t = s.td3;
    for (double* v : {&t.gamma, &t.tau1, &t.tau2, &t.noise_sigma, &t.noise_clip, &t.expl_sigma, &t.lr}) {
        *v = r.f64();
    }
    t.policy_delay = static_cast<int>(r.i64());
    t.batch = static_cast<int>(r.i64());
    t.warmup = static_cast<int>(r.i64());
    t.capacity = static_cast<std::size_t>(r.u64());
    t.hidden = r.ints();
    s.meta.meta_lr = r.f64();
    s.meta.hidden = r.ints();
    s.meta.first_order = r.boolean();
    s.seed = r.u64();
    return s;
}

void write_net(Writer& w, const Mlp& net) {
    w.ints(net.dims());
    w.u64(static_cast<std::uint64_t>(net.output_activation()));
    w.f64s(std::vector<double>(net.params().begin(), net.params().end()));
}

void read_net_into(Reader& r, Mlp& net) {
    const std::vector<int> dims = r.ints();
    const auto act = static_cast<Activation>(r.u64());
    std::vector<double> params = r.f64s();
    if (dims.size() < 2) {
        // Absent network (meta-critic of a non-meta agent).
        net = Mlp();
        return;
    }
    net = Mlp::zeros(dims, act);
    if (params.size() != net.param_count()) {
        throw std::runtime_error("checkpoint network parameter count mismatch");
    }
    net.param_vector() = std::move(params);
}

void write_adam(Writer& w, const Adam& a) {
    w.f64(a.lr);
    w.f64(a.beta1);
    w.f64(a.beta2);
    w.f64(a.epsilon);
    w.f64s(a.m);
    w.f64s(a.v);
    w.i64(a.t);
}

Adam read_adam(Reader& r) {
    Adam a;
    a.lr = r.f64();
    a.beta1 = r.f64();
    a.beta2 = r.f64();
    a.epsilon = r.f64();
    a.m = r.f64s();
    a.v = r.f64s();
    a.t = r.i64();
    return a;
}

void write_stream(Writer& w, const PrngStream& s) {
    w.u64(s.seed());
    w.u64(s.stream_id());
    w.u64(s.counter());
}

PrngStream read_stream(Reader& r) {
    const std::uint64_t seed = r.u64();
    const std::uint64_t id = r.u64();
    const std::uint64_t counter = r.u64();
    return PrngStream::restore(seed, id, counter);
}

}  // namespace

struct CheckpointIo {
    static void save(const Trainer& t, const std::filesystem::path& path) {
        Writer w(path);
        w.bytes(kMagic, sizeof kMagic);
        const std::uint32_t version = kVersion;
        w.bytes(&version, sizeof version);
        write_setup(w, t.setup_);

        for (const Mlp* net : {&t.actor_, &t.actor_target_, &t.critic1_, &t.critic1_target_, &t.critic2_,
                               &t.critic2_target_, &t.meta_.net}) {
            if (net->dims().empty()) {
                w.ints({});
                w.u64(0);
                w.f64s({});
            } else {
                write_net(w, *net);
            }
        }
        for (const Adam* opt : {&t.actor_opt_, &t.critic1_opt_, &t.critic2_opt_, &t.meta_.opt}) {
            write_adam(w, *opt);
        }

        const ReplayBuffer::Storage st = t.buffer_.storage();
        w.f64s(st.states);
        w.f64s(st.actions);
        w.f64s(st.rewards);
        w.f64s(st.next_states);
        w.f64s(st.dones);
        w.u64(st.cursor);
        w.u64(st.size);
        w.u64(st.validation_draws);

        for (const PrngStream* s : {&t.explore_rng_, &t.sample_rng_, &t.noise_rng_}) {
            write_stream(w, *s);
        }

        const TrainingLog& log = t.log_;
        w.f64s(log.episode_rewards);
        w.u64(log.losses.size());
        for (const StepLosses& l : log.losses) {
            w.f64(l.critic1);
            w.f64(l.critic2);
            w.f64(l.actor);
            w.f64(l.meta);
        }
        w.i64(log.env_steps);
        w.i64(log.update_steps);
        w.i64(log.actor_updates);
        w.i64(log.meta_updates);
        w.finish();
    }

    static Trainer load(const std::filesystem::path& path) {
        Reader r(path);
        char magic[sizeof kMagic];
        r.bytes(magic, sizeof magic);
        if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
            throw std::runtime_error("not a checkpoint file: " + path.string());
        }
        std::uint32_t version = 0;
        r.bytes(&version, sizeof version);
        if (version != kVersion) {
            throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
        }
        Trainer t(read_setup(r));
        for (Mlp* net : {&t.actor_, &t.actor_target_, &t.critic1_, &t.critic1_target_, &t.critic2_,
                         &t.critic2_target_, &t.meta_.net}) {
            read_net_into(r, *net);
        }
        t.actor_opt_ = read_adam(r);
        t.critic1_opt_ = read_adam(r);
        t.critic2_opt_ = read_adam(r);
        t.meta_.opt = read_adam(r);

        ReplayBuffer::Storage st;
        st.states = r.f64s();
        st.actions = r.f64s();
        st.rewards = r.f64s();
        st.next_states = r.f64s();
        st.dones = r.f64s();
        st.cursor = static_cast<std::size_t>(r.u64());
        st.size = static_cast<std::size_t>(r.u64());
        st.validation_draws = static_cast<std::size_t>(r.u64());
        t.buffer_.restore(std::move(st));

        t.explore_rng_ = read_stream(r);
        t.sample_rng_ = read_stream(r);
        t.noise_rng_ = read_stream(r);

        TrainingLog log;
        log.episode_rewards = r.f64s();
        log.losses.resize(r.length());
        for (StepLosses& l : log.losses) {
            l.critic1 = r.f64();
            l.critic2 = r.f64();
            l.actor = r.f64();
            l.meta = r.f64();
        }
        log.env_steps = r.i64();
        log.update_steps = r.i64();
        log.actor_updates = r.i64();
        log.meta_updates = r.i64();
        t.log_ = std::move(log);
        return t;
    }
};

void Trainer::save(const std::filesystem::path& path) const {
    CheckpointIo::save(*this, path);
}

Trainer Trainer::load(const std::filesystem::path& path) {
    return CheckpointIo::load(path);
}

}  // namespace fimstar
