#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sma/env.hpp"
#include "sma/eval.hpp"

namespace sma {

using Chromosome = std::vector<int>;

// Gene string layout for an n-state machine over m symbols: n*m transition
// genes (state-major, symbol-minor), then n head genes, then n accept genes,
// C = (m+2)*n genes total. A transition gene of 0 means "no transition";
// v >= 1 targets state v-1. A head gene g packs (head g/d, direction g%d).
struct ChromosomeLayout {
    int state_count = 0;   // n
    int symbol_count = 0;  // m
    int head_count = 1;    // k
    Way way = Way::OneWay;

    int length() const { return (symbol_count + 2) * state_count; }
    int transition_genes() const { return state_count * symbol_count; }
    int head_genes_begin() const { return transition_genes(); }
    int accept_genes_begin() const { return transition_genes() + state_count; }

    // Inclusive upper bound of the gene at `index`; all genes start at 0.
    int upper_bound(int index) const;

    static ChromosomeLayout for_profile(const LanguageProfile& profile, int state_count);

    bool operator==(const ChromosomeLayout&) const = default;
};

Chromosome random_chromosome(const ChromosomeLayout& layout, Rng& rng);

// Throws std::invalid_argument on out-of-range genes.
SmaSpec decode(const Chromosome& chromosome, const ChromosomeLayout& layout);
Chromosome encode(const SmaSpec& spec);

// Plays a decoded machine against the environment: in machine state q it
// emits the assigned head movement, follows the transition on the observed
// symbol, and when no transition exists answers with the state's accept
// flag. The reset observation is ignored (the machine reads only after
// moving).
class SmaPolicy {
  public:
    explicit SmaPolicy(const SmaSpec& spec) : spec_(&spec) {}

    void start(const Observation&) {
        state_ = 0;
        halted_ = false;
    }
    AgentAction act() const {
        if (halted_)
            return spec_->accept[static_cast<size_t>(state_)] ? AgentAction::accept()
                                                              : AgentAction::reject();
        const HeadMove& move = spec_->head_assign[static_cast<size_t>(state_)];
        return AgentAction::move(move.head, move.direction);
    }
    AgentAction act() { return static_cast<const SmaPolicy*>(this)->act(); }
    void observe(const Observation& obs) {
        if (halted_) return;
        int target = spec_->delta_at(state_, obs.symbol);
        if (target == kNoTransition)
            halted_ = true;
        else
            state_ = target;
    }

  private:
    const SmaSpec* spec_;
    int state_ = 0;
    bool halted_ = false;
};

struct GaConfig {
    int population_size = 100;  // must be even, half is replaced per generation
    int state_count = 32;       // n
    double gamma = 0.999;
    int training_set_size = 1000;
    int max_mutations = 3;  // see default_max_mutations
    long max_generations = 200;
    int max_len = kDefaultMaxLen;
    uint64_t seed = 1;
    int threads = 1;
};

// 3 for the regular languages L1/L2, floor(C/20) for the others.
int default_max_mutations(LanguageId id, const ChromosomeLayout& layout);

struct TrainingSet {
    std::vector<LabeledWord> items;
    uint64_t seed = 0;  // seed of the stream the items were drawn from
};

TrainingSet make_training_set(const LanguageProfile& profile, int size, int max_len, Rng stream);

struct Individual {
    Chromosome chromosome;
    double fitness = 0.0;
    double prediction_rate = 0.0;
};

// Prebuilt tapes for a training set; fitness evaluation is a pure function
// of (chromosome, context), so individuals can be scored concurrently.
struct FitnessContext {
    EpisodeConfig episode;
    double gamma = 0.999;
    std::vector<Tape> tapes;
    std::vector<uint8_t> labels;

    static FitnessContext build(const LanguageProfile& profile, const TrainingSet& set,
                                int max_len, double gamma);
};

struct FitnessResult {
    double fitness = 0.0;
    double prediction_rate = 0.0;
};

// Sum over the training episodes of the discounted episode return.
FitnessResult fitness(const Chromosome& chromosome, const ChromosomeLayout& layout,
                      const FitnessContext& context);

void evaluate_population(std::vector<Individual>& population, const ChromosomeLayout& layout,
                         const FitnessContext& context, int threads);

// Sorts by fitness (descending, stable), keeps the best half unchanged and
// refills the rest with mutated single-point crossovers of parent pairs
// drawn from the surviving half. Returns the evaluated, sorted population.
std::vector<Individual> evolve_generation(std::vector<Individual> population,
                                          const ChromosomeLayout& layout,
                                          const FitnessContext& context, const GaConfig& config,
                                          Rng& rng);

struct GaGenerationStats {
    long generation = 0;
    double best_fitness = 0.0;
    double best_prediction_rate = 0.0;
};

struct GaResult {
    SmaSpec best;
    Individual best_individual;
    std::vector<GaGenerationStats> history;
    long generations = 0;
    bool converged = false;  // best individual hit 1.0 on a fresh validation set
};

// Called after every generation with the sorted population's best individual;
// return false to stop early.
using GaCallback = std::function<bool(long generation, const Individual& best)>;

// Evolves until the best individual predicts a fresh validation set
// perfectly, the callback stops it, or max_generations is reached. Whenever
// the best individual reaches prediction rate 1.0 on the current training
// set, a fresh set is drawn and the population is re-evaluated.
GaResult train_ga(const LanguageProfile& profile, const GaConfig& config, GaCallback callback = {});

struct GaCheckpoint {
    long generation = 0;
    std::vector<Chromosome> population;
    uint64_t training_set_seed = 0;
    uint64_t master_seed = 0;
    ChromosomeLayout layout;
    LanguageId language = LanguageId::L1;
};

void save_ga_checkpoint(const std::string& path, const GaCheckpoint& checkpoint);
GaCheckpoint load_ga_checkpoint(const std::string& path);

// CSV: generation,best_fitness,best_prediction_rate
void save_ga_history_csv(const std::string& path, const std::vector<GaGenerationStats>& history);

}  // namespace sma
