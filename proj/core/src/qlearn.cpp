#include "sma/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sma {

int encoding_size(const LanguageProfile& profile) {
    return profile.alphabet.symbol_count() + profile.head_count + direction_count(profile.way);
}

void encode_observation(const Observation& obs, const LanguageProfile& profile,
                        Eigen::Ref<Eigen::VectorXd> out) {
    int m = profile.alphabet.symbol_count();
    int k = profile.head_count;
    out.setZero();
    out[obs.symbol] = 1.0;
    out[m + obs.head] = 1.0;
    out[m + k + direction_index(profile.way, obs.direction)] = 1.0;
}

Eigen::VectorXd encode_observation(const Observation& obs, const LanguageProfile& profile) {
    Eigen::VectorXd out(encoding_size(profile));
    encode_observation(obs, profile, out);
    return out;
}

static void glorot_fill(Eigen::MatrixXd& matrix, Rng& rng) {
    double limit = std::sqrt(6.0 / static_cast<double>(matrix.rows() + matrix.cols()));
    double* data = matrix.data();
    for (long i = 0; i < matrix.size(); ++i) data[i] = rng.uniform_real(-limit, limit);
}

GruParams GruParams::zeros(int input, int hidden) {
    GruParams p;
    p.Wz = Eigen::MatrixXd::Zero(hidden, input);
    p.Uz = Eigen::MatrixXd::Zero(hidden, hidden);
    p.Wr = Eigen::MatrixXd::Zero(hidden, input);
    p.Ur = Eigen::MatrixXd::Zero(hidden, hidden);
    p.Wc = Eigen::MatrixXd::Zero(hidden, input);
    p.Uc = Eigen::MatrixXd::Zero(hidden, hidden);
    p.bz = Eigen::VectorXd::Zero(hidden);
    p.br = Eigen::VectorXd::Zero(hidden);
    p.bc = Eigen::VectorXd::Zero(hidden);
    return p;
}

GruParams GruParams::glorot(int input, int hidden, Rng& rng) {
    GruParams p = zeros(input, hidden);
    glorot_fill(p.Wz, rng);
    glorot_fill(p.Uz, rng);
    glorot_fill(p.Wr, rng);
    glorot_fill(p.Ur, rng);
    glorot_fill(p.Wc, rng);
    glorot_fill(p.Uc, rng);
    return p;
}

QHeadParams QHeadParams::zeros(int hidden, int width, int actions) {
    QHeadParams p;
    p.W1 = Eigen::MatrixXd::Zero(width, hidden);
    p.b1 = Eigen::VectorXd::Zero(width);
    p.W2 = Eigen::MatrixXd::Zero(actions, width);
    p.b2 = Eigen::VectorXd::Zero(actions);
    return p;
}

QHeadParams QHeadParams::glorot(int hidden, int width, int actions, Rng& rng) {
    QHeadParams p = zeros(hidden, width, actions);
    glorot_fill(p.W1, rng);
    glorot_fill(p.W2, rng);
    return p;
}

QNetParams QNetParams::zeros(int input, int hidden, int width, int actions) {
    return {GruParams::zeros(input, hidden), QHeadParams::zeros(hidden, width, actions)};
}

QNetParams QNetParams::glorot(int input, int hidden, int width, int actions, Rng& rng) {
    return {GruParams::glorot(input, hidden, rng), QHeadParams::glorot(hidden, width, actions, rng)};
}

std::vector<TensorView> tensor_views(QNetParams& params) {
    std::vector<TensorView> views;
    auto add_matrix = [&](const char* name, Eigen::MatrixXd& m) {
        views.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_vector = [&](const char* name, Eigen::VectorXd& v) {
        views.push_back({name, v.data(), v.size(), 1});
    };
    add_matrix("gru.Wz", params.gru.Wz);
    add_matrix("gru.Uz", params.gru.Uz);
    add_vector("gru.bz", params.gru.bz);
    add_matrix("gru.Wr", params.gru.Wr);
    add_matrix("gru.Ur", params.gru.Ur);
    add_vector("gru.br", params.gru.br);
    add_matrix("gru.Wc", params.gru.Wc);
    add_matrix("gru.Uc", params.gru.Uc);
    add_vector("gru.bc", params.gru.bc);
    add_matrix("head.W1", params.head.W1);
    add_vector("head.b1", params.head.b1);
    add_matrix("head.W2", params.head.W2);
    add_vector("head.b2", params.head.b2);
    return views;
}

Eigen::VectorXd gru_forward(const GruParams& params, const Eigen::VectorXd& h,
                            const Eigen::VectorXd& x) {
    Eigen::ArrayXd z = (-(params.Wz * x + params.Uz * h + params.bz).array()).exp();
    z = 1.0 / (1.0 + z);
    Eigen::ArrayXd r = (-(params.Wr * x + params.Ur * h + params.br).array()).exp();
    r = 1.0 / (1.0 + r);
    Eigen::VectorXd rh = (r * h.array()).matrix();
    Eigen::ArrayXd c = (params.Wc * x + params.Uc * rh + params.bc).array().tanh();
    return ((1.0 - z) * h.array() + z * c).matrix();
}

Eigen::VectorXd q_values(const QHeadParams& params, const Eigen::VectorXd& h) {
    Eigen::VectorXd hidden = (params.W1 * h + params.b1).array().atan().matrix();
    return params.W2 * hidden + params.b2;
}

int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng) {
    int actions = static_cast<int>(q.size());
    if (epsilon > 0.0 && rng.bernoulli(epsilon))
        return static_cast<int>(rng.uniform_int(static_cast<uint64_t>(actions)));
    int best = 0;
    for (int a = 1; a < actions; ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

ReplayBuffer::ReplayBuffer(long capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("buffer capacity must be positive");
}

void ReplayBuffer::push(EpisodeExperience episode) {
    if (episode.size() > capacity_)
        throw std::invalid_argument("episode longer than the whole buffer");
    while (!episodes_.empty() && transitions_ + episode.size() > capacity_) {
        transitions_ -= episodes_.front().size();
        episodes_.pop_front();
        filled_ = true;
    }
    transitions_ += episode.size();
    episodes_.push_back(std::move(episode));
    if (transitions_ >= capacity_) filled_ = true;
}

static void ensure_slots(std::vector<Eigen::MatrixXd>& storage, size_t count, long rows, long cols) {
    if (storage.size() < count) storage.resize(count);
    for (size_t i = 0; i < count; ++i)
        if (storage[i].rows() != rows || storage[i].cols() != cols) storage[i].resize(rows, cols);
}

static long max_length(const EpisodeBatch& batch) {
    long max_len = 0;
    for (const EpisodeExperience* episode : batch) max_len = std::max(max_len, episode->size());
    return max_len;
}

void forward_unroll(const QNetParams& online, const EpisodeBatch& batch,
                    const LanguageProfile& profile, BatchWorkspace& ws) {
    const long B = static_cast<long>(batch.size());
    const long T = max_length(batch);
    const int I = encoding_size(profile);
    const int H = online.gru.hidden_size();
    const int W = online.head.width();
    const int A = online.head.actions();
    const int m = profile.alphabet.symbol_count();
    const int k = profile.head_count;

    ensure_slots(ws.x, static_cast<size_t>(T), I, B);
    ensure_slots(ws.z, static_cast<size_t>(T), H, B);
    ensure_slots(ws.r, static_cast<size_t>(T), H, B);
    ensure_slots(ws.c, static_cast<size_t>(T), H, B);
    ensure_slots(ws.h, static_cast<size_t>(T) + 1, H, B);
    ensure_slots(ws.u1, static_cast<size_t>(T), W, B);
    ensure_slots(ws.s1, static_cast<size_t>(T), W, B);
    ensure_slots(ws.q, static_cast<size_t>(T), A, B);
    if (ws.rh.rows() != H || ws.rh.cols() != B) ws.rh.resize(H, B);

    for (long t = 0; t < T; ++t) {
        Eigen::MatrixXd& x = ws.x[static_cast<size_t>(t)];
        x.setZero();
        for (long b = 0; b < B; ++b) {
            const EpisodeExperience& episode = *batch[static_cast<size_t>(b)];
            if (t >= episode.size()) continue;
            const Transition& tr = episode.steps[static_cast<size_t>(t)];
            x(tr.symbol, b) = 1.0;
            x(m + tr.head, b) = 1.0;
            x(m + k + tr.direction, b) = 1.0;
        }
    }

    ws.h[0].setZero();
    for (long t = 0; t < T; ++t) {
        const Eigen::MatrixXd& x = ws.x[static_cast<size_t>(t)];
        const Eigen::MatrixXd& hprev = ws.h[static_cast<size_t>(t)];
        Eigen::MatrixXd& z = ws.z[static_cast<size_t>(t)];
        Eigen::MatrixXd& r = ws.r[static_cast<size_t>(t)];
        Eigen::MatrixXd& c = ws.c[static_cast<size_t>(t)];
        Eigen::MatrixXd& h = ws.h[static_cast<size_t>(t) + 1];
        z.noalias() = online.gru.Wz * x;
        z.noalias() += online.gru.Uz * hprev;
        z.colwise() += online.gru.bz;
        z = (1.0 + (-z.array()).exp()).inverse().matrix();
        r.noalias() = online.gru.Wr * x;
        r.noalias() += online.gru.Ur * hprev;
        r.colwise() += online.gru.br;
        r = (1.0 + (-r.array()).exp()).inverse().matrix();
        ws.rh = (r.array() * hprev.array()).matrix();
        c.noalias() = online.gru.Wc * x;
        c.noalias() += online.gru.Uc * ws.rh;
        c.colwise() += online.gru.bc;
        c = c.array().tanh().matrix();
        h = ((1.0 - z.array()) * hprev.array() + z.array() * c.array()).matrix();

        Eigen::MatrixXd& u1 = ws.u1[static_cast<size_t>(t)];
        Eigen::MatrixXd& s1 = ws.s1[static_cast<size_t>(t)];
        Eigen::MatrixXd& q = ws.q[static_cast<size_t>(t)];
        u1.noalias() = online.head.W1 * h;
        u1.colwise() += online.head.b1;
        s1 = u1.array().atan().matrix();
        q.noalias() = online.head.W2 * s1;
        q.colwise() += online.head.b2;
    }
}

Eigen::MatrixXd targets_from_unroll(const EpisodeBatch& batch, const QNetParams& target,
                                    double gamma, BatchWorkspace& ws) {
    const long B = static_cast<long>(batch.size());
    const long T = max_length(batch);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(T, B);
    if (T == 0) return targets;
    // Bootstrap values: target Q-head over the online hidden states.
    Eigen::MatrixXd bootstrap(T + 1, B);  // bootstrap(i, b) = max_a Qt(h_i)_b
    bootstrap.setZero();
    Eigen::MatrixXd s(target.head.width(), B), q(target.head.actions(), B);
    for (long i = 2; i <= T; ++i) {
        s.noalias() = target.head.W1 * ws.h[static_cast<size_t>(i)];
        s.colwise() += target.head.b1;
        s = s.array().atan().matrix();
        q.noalias() = target.head.W2 * s;
        q.colwise() += target.head.b2;
        bootstrap.row(i) = q.colwise().maxCoeff();
    }
    for (long b = 0; b < B; ++b) {
        const EpisodeExperience& episode = *batch[static_cast<size_t>(b)];
        for (long t = 0; t < episode.size(); ++t) {
            const Transition& tr = episode.steps[static_cast<size_t>(t)];
            double y = tr.reward;
            if (!tr.done) y += gamma * bootstrap(t + 2, b);
            targets(t, b) = y;
        }
    }
    return targets;
}

Eigen::MatrixXd compute_targets(const EpisodeBatch& batch, const QNetParams& online,
                                const QNetParams& target, const LanguageProfile& profile,
                                double gamma, BatchWorkspace& ws) {
    forward_unroll(online, batch, profile, ws);
    return targets_from_unroll(batch, target, gamma, ws);
}

static long transition_count(const EpisodeBatch& batch) {
    long count = 0;
    for (const EpisodeExperience* episode : batch) count += episode->size();
    return count;
}

static double loss_and_optional_grads(const EpisodeBatch& batch, const QNetParams& online,
                                      const Eigen::MatrixXd& targets,
                                      const LanguageProfile& profile, QNetParams* grads,
                                      BatchWorkspace& ws) {
    const long B = static_cast<long>(batch.size());
    const long T = max_length(batch);
    const long count = transition_count(batch);
    if (count == 0) return 0.0;
    const int H = online.gru.hidden_size();
    const int W = online.head.width();
    const int A = online.head.actions();

    auto ensure = [](Eigen::MatrixXd& m, long rows, long cols) {
        if (m.rows() != rows || m.cols() != cols) m.resize(rows, cols);
    };
    double loss = 0.0;
    if (grads) {
        *grads = QNetParams::zeros(online.gru.input_size(), H, W, A);
        ensure(ws.dh, H, B);
        ensure(ws.dhprev, H, B);
        ensure(ws.daz, H, B);
        ensure(ws.dar, H, B);
        ensure(ws.dac, H, B);
        ensure(ws.ds1, W, B);
        ensure(ws.du1, W, B);
        ws.dh.setZero();
    }

    // TD residuals; gradient of the mean squared error w.r.t. q is 2*delta/N.
    std::vector<Eigen::MatrixXd> dq_steps;
    if (grads) dq_steps.assign(static_cast<size_t>(T), Eigen::MatrixXd::Zero(A, B));
    for (long b = 0; b < B; ++b) {
        const EpisodeExperience& episode = *batch[static_cast<size_t>(b)];
        for (long t = 0; t < episode.size(); ++t) {
            const Transition& tr = episode.steps[static_cast<size_t>(t)];
            double delta = ws.q[static_cast<size_t>(t)](tr.action, b) - targets(t, b);
            loss += delta * delta;
            if (grads)
                dq_steps[static_cast<size_t>(t)](tr.action, b) =
                    2.0 * delta / static_cast<double>(count);
        }
    }
    loss /= static_cast<double>(count);
    if (!grads) return loss;

    // Reverse sweep; ws.dh carries dL/dh_{t} into earlier steps.
    for (long t = T; t >= 1; --t) {
        const Eigen::MatrixXd& dq = dq_steps[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& u1 = ws.u1[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& s1 = ws.s1[static_cast<size_t>(t - 1)];
        // Q-head backward into h_t.
        grads->head.W2.noalias() += dq * s1.transpose();
        grads->head.b2 += dq.rowwise().sum();
        ws.ds1.noalias() = online.head.W2.transpose() * dq;
        ws.du1 = (ws.ds1.array() / (1.0 + u1.array().square())).matrix();  // arctan'
        grads->head.W1.noalias() += ws.du1 * ws.h[static_cast<size_t>(t)].transpose();
        grads->head.b1 += ws.du1.rowwise().sum();
        ws.dh.noalias() += online.head.W1.transpose() * ws.du1;

        const Eigen::MatrixXd& x = ws.x[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& hprev = ws.h[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& z = ws.z[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& r = ws.r[static_cast<size_t>(t - 1)];
        const Eigen::MatrixXd& c = ws.c[static_cast<size_t>(t - 1)];

        ws.daz = (ws.dh.array() * (c.array() - hprev.array()) * z.array() * (1.0 - z.array())).matrix();
        ws.dac = (ws.dh.array() * z.array() * (1.0 - c.array().square())).matrix();
        ws.dhprev = (ws.dh.array() * (1.0 - z.array())).matrix();

        grads->gru.Wc.noalias() += ws.dac * x.transpose();
        ws.rh = (r.array() * hprev.array()).matrix();
        grads->gru.Uc.noalias() += ws.dac * ws.rh.transpose();
        grads->gru.bc += ws.dac.rowwise().sum();
        ws.rh.noalias() = online.gru.Uc.transpose() * ws.dac;  // d(r .* hprev)
        ws.dar = (ws.rh.array() * hprev.array() * r.array() * (1.0 - r.array())).matrix();
        ws.dhprev.array() += ws.rh.array() * r.array();

        grads->gru.Wr.noalias() += ws.dar * x.transpose();
        grads->gru.Ur.noalias() += ws.dar * hprev.transpose();
        grads->gru.br += ws.dar.rowwise().sum();
        ws.dhprev.noalias() += online.gru.Ur.transpose() * ws.dar;

        grads->gru.Wz.noalias() += ws.daz * x.transpose();
        grads->gru.Uz.noalias() += ws.daz * hprev.transpose();
        grads->gru.bz += ws.daz.rowwise().sum();
        ws.dhprev.noalias() += online.gru.Uz.transpose() * ws.daz;

        ws.dh = ws.dhprev;
    }
    return loss;
}

double batch_loss(const EpisodeBatch& batch, const QNetParams& online,
                  const Eigen::MatrixXd& targets, const LanguageProfile& profile,
                  BatchWorkspace& ws) {
    forward_unroll(online, batch, profile, ws);
    return loss_and_optional_grads(batch, online, targets, profile, nullptr, ws);
}

double batch_loss_and_grads(const EpisodeBatch& batch, const QNetParams& online,
                            const Eigen::MatrixXd& targets, const LanguageProfile& profile,
                            QNetParams& grads, BatchWorkspace& ws) {
    forward_unroll(online, batch, profile, ws);
    return loss_and_optional_grads(batch, online, targets, profile, &grads, ws);
}

AdamState AdamState::zeros_like(const QNetParams& params) {
    AdamState state;
    int input = params.gru.input_size();
    int hidden = params.gru.hidden_size();
    int width = params.head.width();
    int actions = params.head.actions();
    state.m = QNetParams::zeros(input, hidden, width, actions);
    state.v = QNetParams::zeros(input, hidden, width, actions);
    return state;
}

void adam_update(QNetParams& params, QNetParams& grads, AdamState& state, double learning_rate,
                 double beta1, double beta2, double eps) {
    ++state.t;
    double correction1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    double correction2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    auto p = tensor_views(params);
    auto g = tensor_views(grads);
    auto m = tensor_views(state.m);
    auto v = tensor_views(state.v);
    for (size_t i = 0; i < p.size(); ++i) {
        long size = p[i].size();
        for (long j = 0; j < size; ++j) {
            double grad = g[i].data[j];
            double& mj = m[i].data[j];
            double& vj = v[i].data[j];
            mj = beta1 * mj + (1.0 - beta1) * grad;
            vj = beta2 * vj + (1.0 - beta2) * grad * grad;
            double mhat = mj / correction1;
            double vhat = vj / correction2;
            p[i].data[j] -= learning_rate * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

TrainStepResult train_step(const ReplayBuffer& buffer, QNetParams& online,
                           const QNetParams& target, const QConfig& config,
                           const LanguageProfile& profile, AdamState& adam, Rng& rng,
                           BatchWorkspace* workspace) {
    if (buffer.episode_count() < static_cast<size_t>(config.batch_episodes)) return {false, 0.0};
    BatchWorkspace local;
    BatchWorkspace& ws = workspace ? *workspace : local;
    EpisodeBatch batch;
    batch.reserve(static_cast<size_t>(config.batch_episodes));
    for (int i = 0; i < config.batch_episodes; ++i)
        batch.push_back(&buffer.episode(
            static_cast<size_t>(rng.uniform_int(static_cast<uint64_t>(buffer.episode_count())))));
    forward_unroll(online, batch, profile, ws);
    Eigen::MatrixXd targets = targets_from_unroll(batch, target, config.gamma, ws);
    QNetParams grads;
    double loss = loss_and_optional_grads(batch, online, targets, profile, &grads, ws);
    adam_update(online, grads, adam, config.learning_rate, config.adam_beta1, config.adam_beta2,
                config.adam_eps);
    return {true, loss};
}

void sync_target(const QNetParams& online, QNetParams& target) { target = online; }

QPolicy::QPolicy(const QNetParams& params, const LanguageProfile& profile, double epsilon, Rng rng)
    : params_(&params),
      profile_(profile),
      epsilon_(epsilon),
      rng_(std::move(rng)),
      h_(Eigen::VectorXd::Zero(params.gru.hidden_size())),
      x_(Eigen::VectorXd::Zero(encoding_size(profile))) {}

void QPolicy::start(const Observation& obs) {
    h_.setZero();
    observe(obs);
}

void QPolicy::observe(const Observation& obs) {
    encode_observation(obs, profile_, x_);
    h_ = gru_forward(params_->gru, h_, x_);
}

AgentAction QPolicy::act() {
    Eigen::VectorXd q = q_values(params_->head, h_);
    int index = select_action(q, epsilon_, rng_);
    return action_from_index(index, profile_.head_count, profile_.way);
}

QTrainResult train_q(const LanguageProfile& profile, const QConfig& config, QCallback callback) {
    Rng master(config.seed);
    Rng init_rng = master.derive("q-init");
    Rng env_rng = master.derive("q-env");
    Rng act_rng = master.derive("q-act");
    Rng batch_rng = master.derive("q-batch");

    const int input = encoding_size(profile);
    const int actions = action_space_size(profile.head_count, profile.way);
    QNetParams online = QNetParams::glorot(input, config.hidden, config.q_hidden, actions, init_rng);
    QNetParams target = online;
    AdamState adam = AdamState::zeros_like(online);
    ReplayBuffer buffer(config.buffer_capacity);
    Environment env(EpisodeConfig::for_profile(profile));
    BatchWorkspace workspace;

    QTrainResult result;
    std::deque<bool> correct_window;
    std::deque<long> length_window;
    long correct_sum = 0;
    long length_sum = 0;
    long next_eval = config.eval_period_steps;
    uint64_t eval_count = 0;
    Eigen::VectorXd h(config.hidden), x(input);

    while (result.timesteps < config.max_env_steps) {
        Observation obs = env.reset(env_rng);
        h.setZero();
        EpisodeExperience episode;
        while (!env.done()) {
            encode_observation(obs, profile, x);
            h = gru_forward(online.gru, h, x);
            Eigen::VectorXd q = q_values(online.head, h);
            int action_index = select_action(q, config.epsilon, act_rng);
            AgentAction action = action_from_index(action_index, profile.head_count, profile.way);
            Environment::StepOutcome out = env.step(action);
            Transition tr;
            tr.symbol = static_cast<uint8_t>(obs.symbol);
            tr.head = static_cast<uint8_t>(obs.head);
            tr.direction = static_cast<uint8_t>(direction_index(profile.way, obs.direction));
            tr.action = static_cast<uint8_t>(action_index);
            tr.reward = out.reward;
            tr.done = out.done;
            episode.steps.push_back(tr);
            ++result.timesteps;
            if (out.observation) obs = *out.observation;
        }
        ++result.episodes;

        correct_window.push_back(env.answered_correctly());
        correct_sum += env.answered_correctly() ? 1 : 0;
        length_window.push_back(env.actions_taken());
        length_sum += env.actions_taken();
        while (static_cast<int>(correct_window.size()) > config.history_window) {
            correct_sum -= correct_window.front() ? 1 : 0;
            correct_window.pop_front();
            length_sum -= length_window.front();
            length_window.pop_front();
        }

        buffer.push(std::move(episode));
        if (buffer.filled()) {
            TrainStepResult step_result =
                train_step(buffer, online, target, config, profile, adam, batch_rng, &workspace);
            if (step_result.ready) {
                ++result.train_steps;
                if (result.train_steps % config.target_sync_period == 0) sync_target(online, target);
            }
        }

        if (result.episodes % config.history_every_episodes == 0) {
            double window = static_cast<double>(correct_window.size());
            result.history.push_back({result.timesteps, static_cast<double>(correct_sum) / window,
                                      static_cast<double>(length_sum) / window});
        }

        if (callback && !callback(result.timesteps, result.episodes)) {
            result.stopped_early = true;
            break;
        }

        if (config.stop_prediction <= 1.0 && buffer.filled() && result.timesteps >= next_eval) {
            QPolicy greedy(online, profile);
            auto [report, stats] =
                evaluate(greedy, profile, config.eval_episodes, master.derive("q-eval", eval_count++));
            result.eval_prediction_rate = report.prediction_rate;
            result.eval_avg_length = report.avg_episode_length;
            result.eval_avg_reward = report.avg_reward;
            result.evaluated = true;
            if (report.prediction_rate >= config.stop_prediction) {
                result.stopped_early = true;
                break;
            }
            next_eval += config.eval_period_steps;
        }
    }
    result.params = std::move(online);
    return result;
}

void save_q_checkpoint(const std::string& path, const QNetParams& params, LanguageId language) {
    nlohmann::json doc;
    doc["format"] = "sma-qnet";
    doc["version"] = 1;
    doc["language"] = language_name(language);
    doc["input"] = params.gru.input_size();
    doc["hidden"] = params.gru.hidden_size();
    doc["q_hidden"] = params.head.width();
    doc["actions"] = params.head.actions();
    nlohmann::json tensors = nlohmann::json::array();
    auto views = tensor_views(const_cast<QNetParams&>(params));
    for (const TensorView& view : views) {
        nlohmann::json entry;
        entry["name"] = view.name;
        entry["rows"] = view.rows;
        entry["cols"] = view.cols;
        entry["data"] = std::vector<double>(view.data, view.data + view.size());
        tensors.push_back(std::move(entry));
    }
    doc["tensors"] = std::move(tensors);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

QCheckpoint load_q_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != "sma-qnet")
        throw std::runtime_error("'" + path + "' is not a Q-network checkpoint");
    QCheckpoint checkpoint;
    checkpoint.language = language_from_name(doc.at("language").get<std::string>());
    checkpoint.params =
        QNetParams::zeros(doc.at("input").get<int>(), doc.at("hidden").get<int>(),
                          doc.at("q_hidden").get<int>(), doc.at("actions").get<int>());
    auto views = tensor_views(checkpoint.params);
    for (const auto& entry : doc.at("tensors")) {
        std::string name = entry.at("name").get<std::string>();
        bool found = false;
        for (const TensorView& view : views) {
            if (name != view.name) continue;
            if (entry.at("rows").get<long>() != view.rows ||
                entry.at("cols").get<long>() != view.cols)
                throw std::runtime_error("tensor shape mismatch for " + name);
            auto data = entry.at("data").get<std::vector<double>>();
            if (static_cast<long>(data.size()) != view.size())
                throw std::runtime_error("tensor size mismatch for " + name);
            std::copy(data.begin(), data.end(), view.data);
            found = true;
            break;
        }
        if (!found) throw std::runtime_error("unknown tensor " + name + " in checkpoint");
    }
    return checkpoint;
}

void save_q_history_csv(const std::string& path, const std::vector<QTrainPoint>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "timesteps,avg_prediction_rate,avg_episode_length\n";
    for (const QTrainPoint& row : history)
        out << row.timesteps << ',' << format_double(row.avg_prediction_rate) << ','
            << format_double(row.avg_episode_length) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace sma
