#pragma once

#include <span>
#include <vector>

#include "fimstar/adam.hpp"
#include "fimstar/mlp.hpp"
#include "fimstar/replay.hpp"

namespace fimstar {

struct Td3Params {
    double gamma = 0.99;
    double tau1 = 0.005;  // critic targets
    double tau2 = 0.005;  // actor target
    int policy_delay = 2;
    double noise_sigma = 0.2;  // target smoothing noise
    double noise_clip = 0.5;
    double expl_sigma = 0.1;   // behaviour noise
    double lr = 1e-4;
    int batch = 64;
    int warmup = 1000;  // environment steps with uniform random actions
    std::size_t capacity = 100000;
    std::vector<int> hidden{500, 400, 300};

    /// Throws DomainError naming the offending field.
    void validate() const;
};

/// pi'(s') + clip(N(0, sigma), -c, c), clipped to the action box [-1, 1].
Batch target_action(const Mlp& actor_target, const Batch& next_states, const Td3Params& params, PrngStream& rng);

/// r + gamma * min(q1, q2), or r alone for terminal transitions.
double critic_target(double reward, bool done, double q1, double q2, double gamma);

/// Bootstrap targets for a batch using both target critics.
std::vector<double> critic_targets(const TransitionBatch& batch, const Batch& target_actions, const Mlp& critic1_target,
                                   const Mlp& critic2_target, double gamma);

/// (1/B) sum (Q(s, a) - y)^2 at `params`; gradient added into `grad` when non-empty.
double critic_loss(const Mlp& critic, std::span<const double> params, const Batch& states, const Batch& actions,
                   std::span<const double> targets, std::span<double> grad);

/// One Adam step on the critic; returns the loss before the step.
double critic_update(Mlp& critic, Adam& opt, const Batch& states, const Batch& actions,
                     std::span<const double> targets);

/// -(1/B) sum Q1(s, pi(s)) at actor parameters `actor_params`; the actor
/// gradient is added into `grad` when non-empty.
double actor_loss(const Mlp& actor, std::span<const double> actor_params, const Mlp& critic1, const Batch& states,
                  std::span<double> grad);

/// One Adam step on the actor along the actor loss; returns the loss before the step.
double actor_update(Mlp& actor, Adam& opt, const Mlp& critic1, const Batch& states);

/// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

// Meta-critic ------------------------------------------------------------

struct MetaParams {
    double meta_lr = 1e-4;
    std::vector<int> hidden{128, 64};
    /// Evaluate the validation gradient at the stage-one parameters instead
    /// of the stage-two parameters (skips one forward/backward pass).
    bool first_order = false;

    void validate() const;
};

/// Learned auxiliary loss over (state, actor action) pairs.
struct MetaCritic {
    Mlp net;  // state_dim + action_dim -> 1, identity output
    Adam opt;
};

/// (1/B) sum M(s, pi(s)) at the given actor and meta parameters; the
/// actor gradient is added into `actor_grad` when non-empty.
double meta_aux_loss(const Mlp& actor, std::span<const double> actor_params, const Mlp& meta,
                     std::span<const double> meta_params, const Batch& states, std::span<double> actor_grad);

/// The two-stage actor parameters used by the bi-level objective.
struct MetaActorStep {
    std::vector<double> critic_grad;  // actor-loss gradient at phi
    std::vector<double> phi_old;      // phi - lr * critic_grad
    std::vector<double> phi_new;      // phi_old - lr * grad of the auxiliary loss at phi_old
};

MetaActorStep meta_actor_step(const Mlp& actor, const Mlp& critic1, const Mlp& meta, const Batch& train_states,
                              double lr);

/// tanh(new_loss - old_loss)
double meta_loss(double new_loss, double old_loss);

struct MetaGradient {
    double value = 0.0;     // meta loss
    double new_loss = 0.0;  // validation actor loss at phi_new
    double old_loss = 0.0;  // validation actor loss at phi_old
    std::vector<double> grad;  // d meta loss / d meta parameters
};

/// Gradient of tanh(L_val(phi_new) - L_val(phi_old)) with respect to the
/// meta-critic parameters, keeping the dependence of phi_new on them.
MetaGradient meta_gradient(const Mlp& actor, const Mlp& critic1, const Mlp& meta, const MetaActorStep& step,
                           const Batch& train_states, const Batch& validation_states, double lr,
                           bool first_order = false);

/// One Adam step on the meta-critic along the meta gradient.
void meta_update(MetaCritic& meta, const MetaGradient& g);

}  // namespace fimstar
