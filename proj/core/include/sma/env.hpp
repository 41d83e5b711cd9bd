#pragma once

#include <optional>
#include <string>

#include "sma/automaton.hpp"
#include "sma/languages.hpp"
#include "sma/rng.hpp"

namespace sma {

// What the agent perceives after each head movement: the symbol now under
// the head, which head read it, and the move just taken (Stay on reset).
struct Observation {
    Symbol symbol = 0;
    int head = 0;
    Direction direction = Direction::Stay;

    bool operator==(const Observation&) const = default;
};

enum class ActionKind : uint8_t { AcceptHalt, RejectHalt, Move };

struct AgentAction {
    ActionKind kind = ActionKind::AcceptHalt;
    int head = 0;
    Direction direction = Direction::Stay;

    static AgentAction accept() { return {ActionKind::AcceptHalt, 0, Direction::Stay}; }
    static AgentAction reject() { return {ActionKind::RejectHalt, 0, Direction::Stay}; }
    static AgentAction move(int head, Direction direction) {
        return {ActionKind::Move, head, direction};
    }

    bool operator==(const AgentAction&) const = default;
};

std::string action_name(const AgentAction& action);

// The only rewards the environment ever hands out.
struct RewardSpec {
    static constexpr double correct = 1.0;
    static constexpr double wrong = -1.0;
    static constexpr double wrong_before_end = -10.0;
    static constexpr double late_reject = 0.1;
    static constexpr double step = 0.0;
};

// Maximum actions per episode: every head can sweep to the end-marker and
// back before a decision, plus the decision itself.
long step_limit(int max_len, int head_count);

// A = 2 + d*k terminal and movement actions.
int action_space_size(int head_count, Way way);

// Dense action indexing shared by the Q-network output layer, the gene
// encoding and the random policy: 0 accept, 1 reject, 2 + head*d + dir.
int action_to_index(const AgentAction& action, int head_count, Way way);
AgentAction action_from_index(int index, int head_count, Way way);

struct EpisodeConfig {
    LanguageProfile profile;
    int max_len = kDefaultMaxLen;
    long limit = 0;  // N

    static EpisodeConfig for_profile(LanguageProfile profile, int max_len = kDefaultMaxLen) {
        long limit = step_limit(max_len, profile.head_count);
        return {std::move(profile), max_len, limit};
    }
};

// Episodic environment over one marked tape. Movement actions read cells and
// cost nothing; the single nonzero reward arrives on the terminal transition
// (explicit accept/reject or the N-action timeout, which counts as a reject).
class Environment {
  public:
    explicit Environment(EpisodeConfig config);

    // Draws a fresh (word, label) pair through sample_episode_input.
    Observation reset(Rng& rng);
    // Runs the episode on a fixed input (training sets, demo mode).
    Observation reset_with(const Word& word, bool label);
    // Same, from an already marked tape (hot path for fitness evaluation).
    Observation reset_with_tape(const Tape& tape, bool label);

    struct StepOutcome {
        std::optional<Observation> observation;  // empty on terminal decisions
        double reward = 0.0;
        bool done = false;
    };

    // Throws std::logic_error when the episode is already done and
    // std::invalid_argument on actions outside the action space.
    StepOutcome step(const AgentAction& action);

    const EpisodeConfig& config() const { return config_; }
    const Tape& tape() const { return tape_; }
    bool label() const { return label_; }
    bool done() const { return done_; }
    bool end_seen() const { return end_seen_; }
    long actions_taken() const { return actions_taken_; }
    const std::vector<int>& heads() const { return heads_; }

    // Accept = true, reject = false; a timeout counts as a reject. Empty
    // while the episode is still running.
    std::optional<bool> verdict() const { return verdict_; }
    bool answered_correctly() const { return verdict_.has_value() && *verdict_ == label_; }

  private:
    Observation observe(int head, Direction direction);
    double terminal_reward(bool accept_verdict);

    EpisodeConfig config_;
    Tape tape_;
    bool label_ = false;
    std::vector<int> heads_;
    long actions_taken_ = 0;
    bool end_seen_ = false;
    bool done_ = true;
    std::optional<bool> verdict_;
};

}  // namespace sma
