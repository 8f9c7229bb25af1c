#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fimstar/mlp.hpp"
#include "fimstar/numerics.hpp"

namespace fimstar {

/// A batch of transitions (s, a, r, s', done), one row per transition.
struct TransitionBatch {
    Batch states;
    Batch actions;
    std::vector<double> rewards;
    Batch next_states;
    std::vector<double> dones;  // 1.0 for terminal transitions

    int size() const { return states.rows; }
};

/// Fixed-capacity ring of transitions stored in flat arrays.
class ReplayBuffer {
public:
    ReplayBuffer() = default;
    ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

    void add(std::span<const double> state, std::span<const double> action, double reward,
             std::span<const double> next_state, bool done);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }

    /// Uniform draw with replacement from the stored transitions.
    TransitionBatch sample(std::size_t count, PrngStream& rng) const;

    /// Two batches drawn without replacement, so no transition appears in
    /// both. Requires size() >= train + validation.
    std::pair<TransitionBatch, TransitionBatch> sample_disjoint(std::size_t train, std::size_t validation,
                                                                PrngStream& rng);

    /// Number of validation batches handed out so far.
    std::size_t validation_draws() const { return validation_draws_; }

    TransitionBatch gather(std::span<const std::size_t> indices) const;

    // Raw storage access for checkpointing.
    struct Storage {
        std::vector<double> states, actions, rewards, next_states, dones;
        std::size_t cursor = 0;
        std::size_t size = 0;
        std::size_t validation_draws = 0;
    };
    Storage storage() const;
    void restore(Storage s);

private:
    std::size_t capacity_ = 0;
    int state_dim_ = 0;
    int action_dim_ = 0;
    std::vector<double> states_, actions_, rewards_, next_states_, dones_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
    std::size_t validation_draws_ = 0;
};

}  // namespace fimstar
