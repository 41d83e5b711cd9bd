#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sma/env.hpp"
#include "sma/eval.hpp"

namespace sma {

// One-hot observation encoding: symbol block (m), head block (k), direction
// block (d, per-way packing). Exactly three ones.
int encoding_size(const LanguageProfile& profile);
void encode_observation(const Observation& obs, const LanguageProfile& profile,
                        Eigen::Ref<Eigen::VectorXd> out);
Eigen::VectorXd encode_observation(const Observation& obs, const LanguageProfile& profile);

struct GruParams {
    Eigen::MatrixXd Wz, Uz, Wr, Ur, Wc, Uc;  // H x I and H x H
    Eigen::VectorXd bz, br, bc;              // H

    int input_size() const { return static_cast<int>(Wz.cols()); }
    int hidden_size() const { return static_cast<int>(Wz.rows()); }

    static GruParams zeros(int input, int hidden);
    static GruParams glorot(int input, int hidden, Rng& rng);
};

struct QHeadParams {
    Eigen::MatrixXd W1;  // width x H, arctan activation
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;  // A x width, linear
    Eigen::VectorXd b2;

    int hidden_size() const { return static_cast<int>(W1.cols()); }
    int width() const { return static_cast<int>(W1.rows()); }
    int actions() const { return static_cast<int>(W2.rows()); }

    static QHeadParams zeros(int hidden, int width, int actions);
    static QHeadParams glorot(int hidden, int width, int actions, Rng& rng);
};

struct QNetParams {
    GruParams gru;
    QHeadParams head;

    static QNetParams zeros(int input, int hidden, int width, int actions);
    static QNetParams glorot(int input, int hidden, int width, int actions, Rng& rng);
};

// Stable tensor enumeration used by the optimizer, serialization and the
// gradient tests.
struct TensorView {
    const char* name;
    double* data;
    long rows, cols;
    long size() const { return rows * cols; }
};
std::vector<TensorView> tensor_views(QNetParams& params);

// h' = (1-z) (.) h + z (.) tanh(Wc x + Uc (r (.) h) + bc), gates z/r from
// logistic units; the standard interpolation-gate formulation.
Eigen::VectorXd gru_forward(const GruParams& params, const Eigen::VectorXd& h,
                            const Eigen::VectorXd& x);

// q = W2 * arctan(W1 h + b1) + b2
Eigen::VectorXd q_values(const QHeadParams& params, const Eigen::VectorXd& h);

// Epsilon-greedy over the action indices; argmax ties break to the lowest
// index.
int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng);

struct QConfig {
    double gamma = 0.999;
    double epsilon = 0.05;
    double learning_rate = 1e-3;
    int batch_episodes = 32;
    long target_sync_period = 1000;  // train steps between target copies
    long buffer_capacity = 25000;    // transitions
    long max_env_steps = 2000000;
    int hidden = 32;    // GRU output size
    int q_hidden = 32;  // Q-head hidden layer width
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    // Periodic greedy evaluation; training stops once the measured
    // prediction rate reaches stop_prediction (> 1 disables stopping).
    long eval_period_steps = 50000;
    long eval_episodes = 2000;
    double stop_prediction = 2.0;
    long history_every_episodes = 100;
    int history_window = 1000;  // moving-average window, in episodes
    uint64_t seed = 1;
};

// Observation seen before the action, the action index taken, the reward
// received and whether the episode ended on that action.
struct Transition {
    uint8_t symbol = 0;
    uint8_t head = 0;
    uint8_t direction = 0;  // per-way direction index
    uint8_t action = 0;
    double reward = 0.0;
    bool done = false;
};

struct EpisodeExperience {
    std::vector<Transition> steps;

    long size() const { return static_cast<long>(steps.size()); }
};

// Whole episodes, FIFO-evicted so the total stored transition count never
// exceeds the capacity.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(long capacity);

    void push(EpisodeExperience episode);
    bool filled() const { return filled_; }  // capacity was reached at least once
    long transition_count() const { return transitions_; }
    long capacity() const { return capacity_; }
    size_t episode_count() const { return episodes_.size(); }
    const EpisodeExperience& episode(size_t index) const { return episodes_[index]; }

  private:
    std::deque<EpisodeExperience> episodes_;
    long capacity_;
    long transitions_ = 0;
    bool filled_ = false;
};

using EpisodeBatch = std::vector<const EpisodeExperience*>;

// Reusable forward/backward storage for batched episode unrolls.
struct BatchWorkspace {
    std::vector<Eigen::MatrixXd> x;             // T entries, I x B
    std::vector<Eigen::MatrixXd> z, r, c, h;    // h has T+1 entries (h[0] = 0), H x B
    std::vector<Eigen::MatrixXd> u1, s1, q;     // Q-head pre-activations/values, per t
    Eigen::MatrixXd dh, ds1, du1, daz, dar, dac, dhprev, rh;
};

// Unrolls the online GRU over each episode's observations from h = 0 and
// evaluates the online Q-head; columns past an episode's length are padding.
void forward_unroll(const QNetParams& online, const EpisodeBatch& batch,
                    const LanguageProfile& profile, BatchWorkspace& ws);

// TD targets y_t = r_t + gamma * (1-done_t) * max_a Q(h_{t+1}, a), with the
// bootstrap Q taken from the target parameters applied to the hidden states
// of the online unroll. Returned matrix is maxT x B; padded cells are 0.
// Targets are constants w.r.t. the online parameters (no gradient flows).
Eigen::MatrixXd compute_targets(const EpisodeBatch& batch, const QNetParams& online,
                                const QNetParams& target, const LanguageProfile& profile,
                                double gamma, BatchWorkspace& ws);

// Mean squared TD error of the online network against frozen targets.
double batch_loss(const EpisodeBatch& batch, const QNetParams& online,
                  const Eigen::MatrixXd& targets, const LanguageProfile& profile,
                  BatchWorkspace& ws);

// Same loss plus parameter gradients via backpropagation through time.
double batch_loss_and_grads(const EpisodeBatch& batch, const QNetParams& online,
                            const Eigen::MatrixXd& targets, const LanguageProfile& profile,
                            QNetParams& grads, BatchWorkspace& ws);

struct AdamState {
    QNetParams m, v;
    long t = 0;

    static AdamState zeros_like(const QNetParams& params);
};

void adam_update(QNetParams& params, QNetParams& grads, AdamState& state, double learning_rate,
                 double beta1, double beta2, double eps);

struct TrainStepResult {
    bool ready = false;  // false when the buffer holds fewer episodes than the batch
    double loss = 0.0;
};

// One optimization step: sample batch_episodes episodes uniformly, unroll,
// build targets, backpropagate and apply an Adam update.
TrainStepResult train_step(const ReplayBuffer& buffer, QNetParams& online,
                           const QNetParams& target, const QConfig& config,
                           const LanguageProfile& profile, AdamState& adam, Rng& rng,
                           BatchWorkspace* workspace = nullptr);

// target <- bitwise copy of online.
void sync_target(const QNetParams& online, QNetParams& target);

// Greedy policy over a frozen parameter set (epsilon > 0 gives the
// exploration behaviour used during training).
class QPolicy {
  public:
    QPolicy(const QNetParams& params, const LanguageProfile& profile, double epsilon = 0.0,
            Rng rng = Rng(0));

    void start(const Observation& obs);
    AgentAction act();
    void observe(const Observation& obs);

  private:
    const QNetParams* params_;
    LanguageProfile profile_;
    double epsilon_;
    Rng rng_;
    Eigen::VectorXd h_;
    Eigen::VectorXd x_;
};

struct QTrainPoint {
    long timesteps = 0;
    double avg_prediction_rate = 0.0;
    double avg_episode_length = 0.0;
};

struct QTrainResult {
    QNetParams params;
    std::vector<QTrainPoint> history;
    long timesteps = 0;
    long episodes = 0;
    long train_steps = 0;
    bool stopped_early = false;
    // Last periodic greedy evaluation, when one ran.
    double eval_prediction_rate = 0.0;
    double eval_avg_length = 0.0;
    double eval_avg_reward = 0.0;
    bool evaluated = false;
};

// Called after each episode; return false to stop training.
using QCallback = std::function<bool(long timesteps, long episodes)>;

// Plays epsilon-greedy episodes, stores them whole, and once the buffer has
// filled performs one train_step after every completed episode. History rows
// are moving averages over the last history_window episodes.
QTrainResult train_q(const LanguageProfile& profile, const QConfig& config,
                     QCallback callback = {});

void save_q_checkpoint(const std::string& path, const QNetParams& params, LanguageId language);
struct QCheckpoint {
    QNetParams params;
    LanguageId language = LanguageId::L1;
};
QCheckpoint load_q_checkpoint(const std::string& path);

// CSV: timesteps,avg_prediction_rate,avg_episode_length
void save_q_history_csv(const std::string& path, const std::vector<QTrainPoint>& history);

}  // namespace sma
