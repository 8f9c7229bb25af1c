#include "fimstar/td3.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fimstar {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw DomainError(message);
    }
}

Batch critic_input(const Batch& states, const Batch& actions) {
    return hconcat(states, actions);
}

// Pulls the action block of an input gradient of a (state, action) network.
Batch action_block(const Batch& d_input, int state_dim) {
    return columns(d_input, state_dim, d_input.cols - state_dim);
}

// Loss L(phi) = (1/B) sum head(s, pi_phi(s)) scaled by `sign`, for a head
// network taking (state, action) inputs. Adds dL/dphi into actor_grad.
double actor_through_head(const Mlp& actor, std::span<const double> actor_params, const Mlp& head,
                          std::span<const double> head_params, const Batch& states, double sign,
                          std::span<double> actor_grad) {
    MlpTape actor_tape;
    const Batch actions = mlp_forward(actor, actor_params, states, &actor_tape);
    MlpTape head_tape;
    const Batch q = mlp_forward(head, head_params, critic_input(states, actions), &head_tape);
    const double scale = sign / states.rows;
    double loss = 0.0;
    for (double v : q.data) {
        loss += v;
    }
    loss *= scale;
    if (!actor_grad.empty()) {
        const Batch d_out(states.rows, 1, scale);
        Batch d_in;
        mlp_backward(head, head_params, head_tape, d_out, {}, &d_in);
        mlp_backward(actor, actor_params, actor_tape, action_block(d_in, states.cols), actor_grad);
    }
    return loss;
}

void check_finite(const Mlp& net, const char* which) {
    if (!net.all_finite()) {
        throw std::runtime_error(std::string("non-finite parameters in ") + which + " after update");
    }
}

}  // namespace

void Td3Params::validate() const {
    require(gamma >= 0.0 && gamma < 1.0, "agent.gamma must lie in [0, 1)");
    require(tau1 > 0.0 && tau1 <= 1.0, "agent.tau1 must lie in (0, 1]");
    require(tau2 > 0.0 && tau2 <= 1.0, "agent.tau2 must lie in (0, 1]");
    require(policy_delay >= 1, "agent.policy_delay must be at least 1");
    require(noise_sigma >= 0.0, "agent.noise_sigma must be non-negative");
    require(noise_clip > 0.0, "agent.noise_clip must be positive");
    require(expl_sigma >= 0.0, "agent.expl_sigma must be non-negative");
    require(lr >= 0.0, "agent.lr must be non-negative");
    require(batch >= 1, "agent.batch must be at least 1");
    require(warmup >= 0, "agent.warmup must be non-negative");
    require(capacity >= 1, "agent.capacity must be at least 1");
    require(!hidden.empty(), "agent.hidden needs at least one layer");
    for (int h : hidden) {
        require(h >= 1, "agent.hidden sizes must be positive");
    }
}

void MetaParams::validate() const {
    require(meta_lr >= 0.0, "agent.meta_lr must be non-negative");
    require(!hidden.empty(), "agent.meta_hidden needs at least one layer");
    for (int h : hidden) {
        require(h >= 1, "agent.meta_hidden sizes must be positive");
    }
}

Batch target_action(const Mlp& actor_target, const Batch& next_states, const Td3Params& params, PrngStream& rng) {
    Batch a = mlp_forward(actor_target, next_states);
    for (double& v : a.data) {
        const double noise = std::clamp(params.noise_sigma * rng.gaussian(), -params.noise_clip, params.noise_clip);
        v = std::clamp(v + noise, -1.0, 1.0);
    }
    return a;
}

double critic_target(double reward, bool done, double q1, double q2, double gamma) {
    return done ? reward : reward + gamma * std::min(q1, q2);
}

std::vector<double> critic_targets(const TransitionBatch& batch, const Batch& target_actions, const Mlp& critic1_target,
                                   const Mlp& critic2_target, double gamma) {
    const Batch input = critic_input(batch.next_states, target_actions);
    const Batch q1 = mlp_forward(critic1_target, input);
    const Batch q2 = mlp_forward(critic2_target, input);
    std::vector<double> y(static_cast<std::size_t>(batch.size()));
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = critic_target(batch.rewards[i], batch.dones[i] != 0.0, q1.data[i], q2.data[i], gamma);
    }
    return y;
}

double critic_loss(const Mlp& critic, std::span<const double> params, const Batch& states, const Batch& actions,
                   std::span<const double> targets, std::span<double> grad) {
    require(static_cast<int>(targets.size()) == states.rows, "critic_loss: target count mismatch");
    MlpTape tape;
    const Batch q = mlp_forward(critic, params, critic_input(states, actions), &tape);
    const double inv_b = 1.0 / states.rows;
    double loss = 0.0;
    Batch d_out(states.rows, 1);
    for (int i = 0; i < states.rows; ++i) {
        const double err = q.data[static_cast<std::size_t>(i)] - targets[static_cast<std::size_t>(i)];
        loss += err * err;
        d_out.data[static_cast<std::size_t>(i)] = 2.0 * err * inv_b;
    }
    if (!grad.empty()) {
        mlp_backward(critic, params, tape, d_out, grad);
    }
    return loss * inv_b;
}

double critic_update(Mlp& critic, Adam& opt, const Batch& states, const Batch& actions,
                     std::span<const double> targets) {
    std::vector<double> grad(critic.param_count(), 0.0);
    const double loss = critic_loss(critic, critic.params(), states, actions, targets, grad);
    opt.step(critic.params(), grad);
    check_finite(critic, "critic");
    return loss;
}

double actor_loss(const Mlp& actor, std::span<const double> actor_params, const Mlp& critic1, const Batch& states,
                  std::span<double> grad) {
    return actor_through_head(actor, actor_params, critic1, critic1.params(), states, -1.0, grad);
}

double actor_update(Mlp& actor, Adam& opt, const Mlp& critic1, const Batch& states) {
    std::vector<double> grad(actor.param_count(), 0.0);
    const double loss = actor_loss(actor, actor.params(), critic1, states, grad);
    opt.step(actor.params(), grad);
    check_finite(actor, "actor");
    return loss;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
    require(target.same_shape(online), "soft_update: architecture mismatch");
    require(tau >= 0.0 && tau <= 1.0, "soft_update: tau must lie in [0, 1]");
    auto t = target.params();
    const auto o = online.params();
    if (tau == 1.0) {
        std::copy(o.begin(), o.end(), t.begin());
        return;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = tau * o[i] + (1.0 - tau) * t[i];
    }
}

double meta_aux_loss(const Mlp& actor, std::span<const double> actor_params, const Mlp& meta,
                     std::span<const double> meta_params, const Batch& states, std::span<double> actor_grad) {
    return actor_through_head(actor, actor_params, meta, meta_params, states, 1.0, actor_grad);
}

MetaActorStep meta_actor_step(const Mlp& actor, const Mlp& critic1, const Mlp& meta, const Batch& train_states,
                              double lr) {
    MetaActorStep step;
    step.critic_grad.assign(actor.param_count(), 0.0);
    actor_loss(actor, actor.params(), critic1, train_states, step.critic_grad);

    step.phi_old.assign(actor.params().begin(), actor.params().end());
    for (std::size_t i = 0; i < step.phi_old.size(); ++i) {
        step.phi_old[i] -= lr * step.critic_grad[i];
    }
    std::vector<double> aux_grad(actor.param_count(), 0.0);
    meta_aux_loss(actor, step.phi_old, meta, meta.params(), train_states, aux_grad);
    step.phi_new = step.phi_old;
    for (std::size_t i = 0; i < step.phi_new.size(); ++i) {
        step.phi_new[i] -= lr * aux_grad[i];
    }
    return step;
}

double meta_loss(double new_loss, double old_loss) {
    return std::tanh(new_loss - old_loss);
}

MetaGradient meta_gradient(const Mlp& actor, const Mlp& critic1, const Mlp& meta, const MetaActorStep& step,
                           const Batch& train_states, const Batch& validation_states, double lr, bool first_order) {
    MetaGradient out;
    // v = dL_val/dphi at phi_new (or phi_old for the first-order variant).
    std::vector<double> v(actor.param_count(), 0.0);
    if (first_order) {
        out.new_loss = actor_loss(actor, step.phi_new, critic1, validation_states, {});
        out.old_loss = actor_loss(actor, step.phi_old, critic1, validation_states, v);
    } else {
        out.new_loss = actor_loss(actor, step.phi_new, critic1, validation_states, v);
        out.old_loss = actor_loss(actor, step.phi_old, critic1, validation_states, {});
    }
    out.value = meta_loss(out.new_loss, out.old_loss);

    // d phi_new / d kappa = -lr * d/dkappa grad_phi L_aux(phi_old; kappa), so
    // dL_val/dkappa = -lr * d/dkappa <v, grad_phi L_aux>. The inner product
    // is the forward tangent of the mean meta output along the action
    // tangent J_pi(phi_old) v.
    MlpTape actor_tape;
    const Batch actions = mlp_forward(actor, step.phi_old, train_states, &actor_tape);
    const Batch action_tangent = mlp_jvp_params(actor, step.phi_old, actor_tape, v);
    MlpTape meta_tape;
    mlp_forward(meta, meta.params(), critic_input(train_states, actions), &meta_tape);
    const Batch input_tangent = critic_input(Batch(train_states.rows, train_states.cols), action_tangent);
    const Batch seed(train_states.rows, 1, 1.0 / train_states.rows);
    std::vector<double> inner(meta.param_count(), 0.0);
    mlp_input_tangent_grad(meta, meta.params(), meta_tape, input_tangent, seed, inner);

    const double scale = (1.0 - out.value * out.value) * (-lr);
    out.grad.resize(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
        out.grad[i] = scale * inner[i];
    }
    return out;
}

void meta_update(MetaCritic& meta, const MetaGradient& g) {
    meta.opt.step(meta.net.params(), g.grad);
    check_finite(meta.net, "meta-critic");
}

}  // namespace fimstar
