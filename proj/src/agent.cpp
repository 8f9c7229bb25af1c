#include "fimstar/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fimstar {

namespace {

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> dims;
    dims.push_back(in);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(out);
    return dims;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view agent_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::td3:
            return "td3";
        case AgentKind::meta_td3:
            return "meta_td3";
        case AgentKind::random:
            return "random";
    }
    return "unknown";
}

AgentKind parse_agent(std::string_view name) {
    if (name == "td3") {
        return AgentKind::td3;
    }
    if (name == "meta_td3") {
        return AgentKind::meta_td3;
    }
    if (name == "random") {
        return AgentKind::random;
    }
    throw DomainError("unknown agent kind '" + std::string(name) + "' (expected td3, meta_td3 or random)");
}

Trainer::Trainer(TrainerSetup setup)
    : setup_(std::move(setup)), env_(setup_.env, PrngStream(setup_.seed, streams::channels)) {
    setup_.td3.validate();
    setup_.meta.validate();
    const int s = env_.state_dim();
    const int a = env_.action_dim();
    PrngStream init(setup_.seed, streams::init);
    PrngStream actor_init = init.substream(0);
    PrngStream critic1_init = init.substream(1);
    PrngStream critic2_init = init.substream(2);
    PrngStream meta_init = init.substream(3);

    actor_ = Mlp(with_io(s, setup_.td3.hidden, a), Activation::tanh, actor_init);
    critic1_ = Mlp(with_io(s + a, setup_.td3.hidden, 1), Activation::identity, critic1_init);
    critic2_ = Mlp(with_io(s + a, setup_.td3.hidden, 1), Activation::identity, critic2_init);
    actor_target_ = actor_;
    critic1_target_ = critic1_;
    critic2_target_ = critic2_;
    actor_opt_ = Adam(setup_.td3.lr, actor_.param_count());
    critic1_opt_ = Adam(setup_.td3.lr, critic1_.param_count());
    critic2_opt_ = Adam(setup_.td3.lr, critic2_.param_count());
    if (setup_.kind == AgentKind::meta_td3) {
        meta_.net = Mlp(with_io(s + a, setup_.meta.hidden, 1), Activation::identity, meta_init);
        meta_.opt = Adam(setup_.meta.meta_lr, meta_.net.param_count());
    }
    buffer_ = ReplayBuffer(setup_.td3.capacity, s, a);
    explore_rng_ = PrngStream(setup_.seed, streams::explore);
    sample_rng_ = PrngStream(setup_.seed, streams::sample);
    noise_rng_ = PrngStream(setup_.seed, streams::target_noise);
}

ActionVec Trainer::policy(const StateVec& state) const {
    return mlp_forward(actor_, state);
}

ActionVec Trainer::behaviour_action(const StateVec& state) {
    const bool warming_up = log_.env_steps < setup_.td3.warmup;
    ActionVec a;
    if (setup_.kind == AgentKind::random || warming_up) {
        a.resize(static_cast<std::size_t>(env_.action_dim()));
        for (double& v : a) {
            v = explore_rng_.uniform(-1.0, 1.0);
        }
        return a;
    }
    a = policy(state);
    for (double& v : a) {
        v = std::clamp(v + setup_.td3.expl_sigma * explore_rng_.gaussian(), -1.0, 1.0);
    }
    return a;
}

double Trainer::run_episode() {
    StateVec state = env_.reset(static_cast<std::uint64_t>(episodes_done()));
    double total = 0.0;
    bool done = false;
    while (!done) {
        const ActionVec action = behaviour_action(state);
        StepResult r = env_.step(action);
        buffer_.add(state, action, r.reward, r.state, r.done);
        ++log_.env_steps;
        total += r.reward;
        done = r.done;
        state = std::move(r.state);
        if (setup_.kind != AgentKind::random && log_.env_steps >= setup_.td3.warmup) {
            update();
        }
    }
    log_.episode_rewards.push_back(total);
    return total;
}

void Trainer::update() {
    const auto batch_size = static_cast<std::size_t>(setup_.td3.batch);
    const std::size_t needed = setup_.kind == AgentKind::meta_td3 ? 2 * batch_size : batch_size;
    if (buffer_.size() < needed) {
        return;
    }
    ++log_.update_steps;
    StepLosses losses{kNaN, kNaN, kNaN, kNaN};

    const TransitionBatch batch = buffer_.sample(batch_size, sample_rng_);
    const Batch next_actions = target_action(actor_target_, batch.next_states, setup_.td3, noise_rng_);
    const std::vector<double> y =
        critic_targets(batch, next_actions, critic1_target_, critic2_target_, setup_.td3.gamma);
    losses.critic1 = critic_update(critic1_, critic1_opt_, batch.states, batch.actions, y);
    losses.critic2 = critic_update(critic2_, critic2_opt_, batch.states, batch.actions, y);

    if (log_.update_steps % setup_.td3.policy_delay == 0) {
        ++log_.actor_updates;
        if (setup_.kind == AgentKind::meta_td3) {
            auto [train_batch, validation_batch] = buffer_.sample_disjoint(batch_size, batch_size, sample_rng_);
            const MetaActorStep step =
                meta_actor_step(actor_, critic1_, meta_.net, train_batch.states, setup_.td3.lr);
            const MetaGradient mg = meta_gradient(actor_, critic1_, meta_.net, step, train_batch.states,
                                                  validation_batch.states, setup_.td3.lr, setup_.meta.first_order);
            // Combined actor step: critic-driven gradient plus the
            // auxiliary gradient, both at the current parameters.
            std::vector<double> grad = step.critic_grad;
            meta_aux_loss(actor_, actor_.params(), meta_.net, meta_.net.params(), train_batch.states, grad);
            losses.actor = actor_loss(actor_, actor_.params(), critic1_, train_batch.states, {});
            actor_opt_.step(actor_.params(), grad);
            if (!actor_.all_finite()) {
                throw std::runtime_error("non-finite parameters in actor after update");
            }
            meta_update(meta_, mg);
            losses.meta = mg.value;
            ++log_.meta_updates;
        } else {
            losses.actor = actor_update(actor_, actor_opt_, critic1_, batch.states);
        }
        soft_update(critic1_target_, critic1_, setup_.td3.tau1);
        soft_update(critic2_target_, critic2_, setup_.td3.tau1);
        soft_update(actor_target_, actor_, setup_.td3.tau2);
    }
    log_.losses.push_back(losses);
}

void Trainer::train(int episodes) {
    for (int e = 0; e < episodes; ++e) {
        run_episode();
    }
}

EvalSummary Trainer::evaluate(int draws, std::uint64_t eval_seed) const {
    return evaluate(draws, eval_seed, setup_.env);
}

EvalSummary Trainer::evaluate(int draws, std::uint64_t eval_seed, const EnvConfig& scenario) const {
    if (draws < 1) {
        throw DomainError("evaluate: need at least one draw");
    }
    Env env(scenario, PrngStream(eval_seed, streams::evaluation));
    if (env.state_dim() != env_.state_dim() || env.action_dim() != env_.action_dim()) {
        throw DomainError("evaluate: scenario changes the state or action size of the trained policy");
    }
    PrngStream action_rng = PrngStream(eval_seed, streams::evaluation).substream(0xA11CEULL);
    EvalSummary out;
    for (int i = 0; i < draws; ++i) {
        const StateVec s = env.reset(static_cast<std::uint64_t>(i));
        ActionVec a;
        if (setup_.kind == AgentKind::random) {
            a.resize(static_cast<std::size_t>(env.action_dim()));
            for (double& v : a) {
                v = action_rng.uniform(-1.0, 1.0);
            }
        } else {
            a = policy(s);
        }
        out.sum_rates.push_back(env.step(a).report.clamped_sum_rate());
    }
    double sum = 0.0;
    for (double v : out.sum_rates) {
        sum += v;
    }
    out.mean = sum / draws;
    if (draws > 1) {
        double ss = 0.0;
        for (double v : out.sum_rates) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.std_err = std::sqrt(ss / (draws - 1) / draws);
    }
    return out;
}

TrainingLog train(const TrainerSetup& setup, int episodes) {
    Trainer t(setup);
    t.train(episodes);
    return t.log();
}

}  // namespace fimstar
