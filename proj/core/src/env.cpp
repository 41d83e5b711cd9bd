#include "sma/env.hpp"

#include <stdexcept>

namespace sma {

std::string action_name(const AgentAction& action) {
    switch (action.kind) {
        case ActionKind::AcceptHalt: return "accept";
        case ActionKind::RejectHalt: return "reject";
        case ActionKind::Move:
            return "move(h" + std::to_string(action.head) + "," +
                   std::string(direction_name(action.direction)) + ")";
    }
    return "?";
}

long step_limit(int max_len, int head_count) {
    return (2L * max_len + 1) * head_count + 1;
}

int action_space_size(int head_count, Way way) {
    return 2 + direction_count(way) * head_count;
}

int action_to_index(const AgentAction& action, int head_count, Way way) {
    switch (action.kind) {
        case ActionKind::AcceptHalt: return 0;
        case ActionKind::RejectHalt: return 1;
        case ActionKind::Move: {
            if (action.head < 0 || action.head >= head_count)
                throw std::invalid_argument("move head out of range");
            int d = direction_count(way);
            return 2 + action.head * d + direction_index(way, action.direction);
        }
    }
    throw std::invalid_argument("unknown action kind");
}

AgentAction action_from_index(int index, int head_count, Way way) {
    if (index == 0) return AgentAction::accept();
    if (index == 1) return AgentAction::reject();
    int d = direction_count(way);
    int packed = index - 2;
    if (packed < 0 || packed >= d * head_count)
        throw std::invalid_argument("action index " + std::to_string(index) + " out of range");
    return AgentAction::move(packed / d, direction_from_index(way, packed % d));
}

Environment::Environment(EpisodeConfig config) : config_(std::move(config)) {
    if (config_.limit != step_limit(config_.max_len, config_.profile.head_count))
        throw std::invalid_argument("episode limit does not match (2M+1)k+1");
}

Observation Environment::reset(Rng& rng) {
    LabeledWord sample = sample_episode_input(config_.profile, config_.max_len, rng);
    return reset_with(sample.word, sample.label);
}

Observation Environment::reset_with(const Word& word, bool label) {
    return reset_with_tape(new_tape(word, config_.profile.alphabet), label);
}

Observation Environment::reset_with_tape(const Tape& tape, bool label) {
    tape_ = tape;
    label_ = label;
    heads_.assign(static_cast<size_t>(config_.profile.head_count), 1);
    actions_taken_ = 0;
    end_seen_ = false;
    done_ = false;
    verdict_.reset();
    return observe(0, Direction::Stay);
}

Observation Environment::observe(int head, Direction direction) {
    Observation obs{tape_.at(heads_[static_cast<size_t>(head)]), head, direction};
    if (obs.symbol == config_.profile.alphabet.marker_end()) end_seen_ = true;
    return obs;
}

double Environment::terminal_reward(bool accept_verdict) {
    if (accept_verdict == label_) {
        // Rejecting with the very last action earns only the late reward.
        if (!accept_verdict && actions_taken_ == config_.limit) return RewardSpec::late_reject;
        return RewardSpec::correct;
    }
    return end_seen_ ? RewardSpec::wrong : RewardSpec::wrong_before_end;
}

Environment::StepOutcome Environment::step(const AgentAction& action) {
    if (done_) throw std::logic_error("step on a terminated episode");
    StepOutcome out;
    ++actions_taken_;
    switch (action.kind) {
        case ActionKind::AcceptHalt:
        case ActionKind::RejectHalt: {
            bool accept_verdict = action.kind == ActionKind::AcceptHalt;
            verdict_ = accept_verdict;
            done_ = true;
            out.reward = terminal_reward(accept_verdict);
            out.done = true;
            return out;
        }
        case ActionKind::Move: {
            if (action.head < 0 || action.head >= config_.profile.head_count)
                throw std::invalid_argument("move head out of range");
            if (config_.profile.way == Way::OneWay && action.direction == Direction::Left)
                throw std::invalid_argument("left movement in a one-way environment");
            int& pos = heads_[static_cast<size_t>(action.head)];
            if (action.direction == Direction::Left) {
                if (pos > 0) --pos;
            } else if (action.direction == Direction::Right) {
                if (pos < tape_.last_index()) ++pos;
            }
            out.observation = observe(action.head, action.direction);
            if (actions_taken_ == config_.limit) {
                // Out of actions: treated as an implicit rejection.
                verdict_ = false;
                done_ = true;
                out.reward = terminal_reward(false);
                out.done = true;
            } else {
                out.reward = RewardSpec::step;
                out.done = false;
            }
            return out;
        }
    }
    throw std::invalid_argument("unknown action kind");
}

}  // namespace sma
