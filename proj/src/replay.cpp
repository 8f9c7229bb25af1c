#include "fimstar/replay.hpp"

#include <algorithm>
#include <string>

namespace fimstar {

namespace {

std::size_t draw_index(PrngStream& rng, std::size_t n) {
    const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    if (capacity == 0 || state_dim < 1 || action_dim < 1) {
        throw DomainError("ReplayBuffer: capacity and dimensions must be positive");
    }
    const auto s = static_cast<std::size_t>(state_dim);
    const auto a = static_cast<std::size_t>(action_dim);
    states_.resize(capacity * s);
    next_states_.resize(capacity * s);
    actions_.resize(capacity * a);
    rewards_.resize(capacity);
    dones_.resize(capacity);
}

void ReplayBuffer::add(std::span<const double> state, std::span<const double> action, double reward,
                       std::span<const double> next_state, bool done) {
    const auto s = static_cast<std::size_t>(state_dim_);
    const auto a = static_cast<std::size_t>(action_dim_);
    if (state.size() != s || next_state.size() != s || action.size() != a) {
        throw DomainError("ReplayBuffer::add: transition dimensions do not match the buffer");
    }
    std::copy(state.begin(), state.end(), states_.begin() + static_cast<std::ptrdiff_t>(cursor_ * s));
    std::copy(next_state.begin(), next_state.end(), next_states_.begin() + static_cast<std::ptrdiff_t>(cursor_ * s));
    std::copy(action.begin(), action.end(), actions_.begin() + static_cast<std::ptrdiff_t>(cursor_ * a));
    rewards_[cursor_] = reward;
    dones_[cursor_] = done ? 1.0 : 0.0;
    cursor_ = (cursor_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

TransitionBatch ReplayBuffer::gather(std::span<const std::size_t> indices) const {
    const int rows = static_cast<int>(indices.size());
    const auto s = static_cast<std::size_t>(state_dim_);
    const auto a = static_cast<std::size_t>(action_dim_);
    TransitionBatch b{Batch(rows, state_dim_), Batch(rows, action_dim_), {}, Batch(rows, state_dim_), {}};
    b.rewards.reserve(indices.size());
    b.dones.reserve(indices.size());
    for (int r = 0; r < rows; ++r) {
        const std::size_t i = indices[static_cast<std::size_t>(r)];
        if (i >= size_) {
            throw DomainError("ReplayBuffer::gather: index " + std::to_string(i) + " not stored");
        }
        std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>(i * s), s, b.states.row(r).begin());
        std::copy_n(next_states_.begin() + static_cast<std::ptrdiff_t>(i * s), s, b.next_states.row(r).begin());
        std::copy_n(actions_.begin() + static_cast<std::ptrdiff_t>(i * a), a, b.actions.row(r).begin());
        b.rewards.push_back(rewards_[i]);
        b.dones.push_back(dones_[i]);
    }
    return b;
}

TransitionBatch ReplayBuffer::sample(std::size_t count, PrngStream& rng) const {
    if (size_ == 0) {
        throw DomainError("ReplayBuffer::sample: buffer is empty");
    }
    std::vector<std::size_t> idx(count);
    for (auto& i : idx) {
        i = draw_index(rng, size_);
    }
    return gather(idx);
}

std::pair<TransitionBatch, TransitionBatch> ReplayBuffer::sample_disjoint(std::size_t train, std::size_t validation,
                                                                          PrngStream& rng) {
    const std::size_t total = train + validation;
    if (size_ < total) {
        throw DomainError("ReplayBuffer::sample_disjoint: need " + std::to_string(total) +
                          " stored transitions, have " + std::to_string(size_));
    }
    // Rejection sampling; the batches are tiny next to the buffer.
    std::vector<std::size_t> picked;
    picked.reserve(total);
    std::vector<std::size_t> sorted;
    sorted.reserve(total);
    while (picked.size() < total) {
        const std::size_t i = draw_index(rng, size_);
        const auto pos = std::lower_bound(sorted.begin(), sorted.end(), i);
        if (pos != sorted.end() && *pos == i) {
            continue;
        }
        sorted.insert(pos, i);
        picked.push_back(i);
    }
    ++validation_draws_;
    const std::span<const std::size_t> all(picked);
    return {gather(all.first(train)), gather(all.subspan(train))};
}

ReplayBuffer::Storage ReplayBuffer::storage() const {
    return {states_, actions_, rewards_, next_states_, dones_, cursor_, size_, validation_draws_};
}

void ReplayBuffer::restore(Storage s) {
    const auto sd = static_cast<std::size_t>(state_dim_);
    const auto ad = static_cast<std::size_t>(action_dim_);
    if (s.states.size() != capacity_ * sd || s.next_states.size() != capacity_ * sd ||
        s.actions.size() != capacity_ * ad || s.rewards.size() != capacity_ || s.dones.size() != capacity_ ||
        s.cursor >= capacity_ || s.size > capacity_) {
        throw DomainError("ReplayBuffer::restore: storage does not match buffer shape");
    }
    states_ = std::move(s.states);
    actions_ = std::move(s.actions);
    rewards_ = std::move(s.rewards);
    next_states_ = std::move(s.next_states);
    dones_ = std::move(s.dones);
    cursor_ = s.cursor;
    size_ = s.size;
    validation_draws_ = s.validation_draws;
}

}  // namespace fimstar
