#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sma/env.hpp"

namespace sma {

struct EpisodeResult {
    double total_reward = 0.0;       // undiscounted sum
    double discounted_return = 0.0;  // sum of gamma^t * r_t, t 0-based
    long length = 0;                 // actions taken
    bool correct = false;
    bool timeout = false;
    MoveTrace moves;  // Move actions only, terminal decisions excluded
};

// Drives one episode on a freshly reset environment. A policy provides
//   void start(const Observation& reset_obs);
//   AgentAction act();
//   void observe(const Observation& obs);
// observe is called for every observation produced after an action.
template <class Policy>
EpisodeResult play_episode(Environment& env, const Observation& reset_obs, Policy&& policy,
                           double gamma = 1.0) {
    policy.start(reset_obs);
    EpisodeResult result;
    result.moves.by_head.assign(static_cast<size_t>(env.config().profile.head_count), 0);
    double discount = 1.0;
    while (!env.done()) {
        AgentAction action = policy.act();
        if (action.kind == ActionKind::Move) {
            result.moves.by_direction[static_cast<size_t>(action.direction)]++;
            result.moves.by_head[static_cast<size_t>(action.head)]++;
        }
        Environment::StepOutcome out = env.step(action);
        result.total_reward += out.reward;
        result.discounted_return += discount * out.reward;
        discount *= gamma;
        if (out.observation) policy.observe(*out.observation);
        if (out.done) result.timeout = action.kind == ActionKind::Move;
    }
    result.length = env.actions_taken();
    result.correct = env.answered_correctly();
    return result;
}

// Picks uniformly over all A actions, ignoring observations.
class RandomPolicy {
  public:
    RandomPolicy(int head_count, Way way, Rng rng)
        : head_count_(head_count), way_(way), actions_(action_space_size(head_count, way)), rng_(std::move(rng)) {}

    void start(const Observation&) {}
    AgentAction act() {
        int index = static_cast<int>(rng_.uniform_int(static_cast<uint64_t>(actions_)));
        return action_from_index(index, head_count_, way_);
    }
    void observe(const Observation&) {}

  private:
    int head_count_;
    Way way_;
    int actions_;
    Rng rng_;
};

struct EvalReport {
    double avg_reward = 0.0;
    double prediction_rate = 0.0;
    double avg_episode_length = 0.0;
    long episodes = 0;
};

struct HeadStats {
    std::vector<double> head_fraction;        // k entries, sums to 1 when moves occurred
    std::array<double, 3> direction_fraction{};  // indexed by Direction
    long total_moves = 0;
};

struct EvalOptions {
    int max_len = kDefaultMaxLen;
};

// Runs `episodes` fresh episodes with per-episode derived input streams and
// aggregates undiscounted rewards, correctness, lengths and move statistics.
template <class Policy>
std::pair<EvalReport, HeadStats> evaluate(Policy&& policy, const LanguageProfile& profile,
                                          long episodes, const Rng& master,
                                          EvalOptions options = {}) {
    Environment env(EpisodeConfig::for_profile(profile, options.max_len));
    EvalReport report;
    report.episodes = episodes;
    HeadStats stats;
    stats.head_fraction.assign(static_cast<size_t>(profile.head_count), 0.0);
    std::array<long, 3> dir_counts{};
    std::vector<long> head_counts(static_cast<size_t>(profile.head_count), 0);
    long correct = 0;
    for (long e = 0; e < episodes; ++e) {
        Rng episode_rng = master.derive("episode", static_cast<uint64_t>(e));
        Observation first = env.reset(episode_rng);
        EpisodeResult result = play_episode(env, first, policy);
        report.avg_reward += result.total_reward;
        report.avg_episode_length += static_cast<double>(result.length);
        if (result.correct) ++correct;
        for (int d = 0; d < 3; ++d) dir_counts[static_cast<size_t>(d)] += result.moves.by_direction[static_cast<size_t>(d)];
        for (int h = 0; h < profile.head_count; ++h)
            head_counts[static_cast<size_t>(h)] += result.moves.by_head[static_cast<size_t>(h)];
    }
    if (episodes > 0) {
        report.avg_reward /= static_cast<double>(episodes);
        report.avg_episode_length /= static_cast<double>(episodes);
        report.prediction_rate = static_cast<double>(correct) / static_cast<double>(episodes);
    }
    stats.total_moves = dir_counts[0] + dir_counts[1] + dir_counts[2];
    if (stats.total_moves > 0) {
        for (int d = 0; d < 3; ++d)
            stats.direction_fraction[static_cast<size_t>(d)] =
                static_cast<double>(dir_counts[static_cast<size_t>(d)]) / static_cast<double>(stats.total_moves);
        for (int h = 0; h < profile.head_count; ++h)
            stats.head_fraction[static_cast<size_t>(h)] =
                static_cast<double>(head_counts[static_cast<size_t>(h)]) / static_cast<double>(stats.total_moves);
    }
    return {report, stats};
}

// CSV columns: model, avg_reward, prediction_rate, avg_episode_length, then
// h1..h3 and left/stay/right fractions. Heads beyond the profile's k and the
// left column of one-way machines stay blank. Byte-stable for equal inputs.
void export_report_csv(const std::string& path, const std::string& model,
                       const EvalReport& report, const HeadStats& stats, Way way);
void export_report_json(const std::string& path, const std::string& model,
                        const EvalReport& report, const HeadStats& stats, Way way);

// Two-column "x y" text, one point per line.
void export_curve(const std::string& path, const std::vector<std::pair<double, double>>& points);

// Shortest round-trip decimal representation (stable across runs).
std::string format_double(double value);

}  // namespace sma
