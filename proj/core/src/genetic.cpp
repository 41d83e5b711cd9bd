#include "sma/genetic.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sma/parallel.hpp"

namespace sma {

int ChromosomeLayout::upper_bound(int index) const {
    if (index < transition_genes()) return state_count;  // 0 = none, v targets v-1
    if (index < accept_genes_begin()) return direction_count(way) * head_count - 1;
    return 1;
}

ChromosomeLayout ChromosomeLayout::for_profile(const LanguageProfile& profile, int state_count) {
    return {state_count, profile.alphabet.symbol_count(), profile.head_count, profile.way};
}

Chromosome random_chromosome(const ChromosomeLayout& layout, Rng& rng) {
    Chromosome genes(static_cast<size_t>(layout.length()));
    for (int i = 0; i < layout.length(); ++i)
        genes[static_cast<size_t>(i)] =
            static_cast<int>(rng.uniform_range(0, layout.upper_bound(i)));
    return genes;
}

SmaSpec decode(const Chromosome& chromosome, const ChromosomeLayout& layout) {
    if (static_cast<int>(chromosome.size()) != layout.length())
        throw std::invalid_argument("chromosome length mismatch");
    for (int i = 0; i < layout.length(); ++i) {
        int gene = chromosome[static_cast<size_t>(i)];
        if (gene < 0 || gene > layout.upper_bound(i))
            throw std::invalid_argument("gene " + std::to_string(i) + " out of range");
    }
    SmaSpec spec;
    spec.state_count = layout.state_count;
    spec.symbol_count = layout.symbol_count;
    spec.head_count = layout.head_count;
    spec.way = layout.way;
    spec.delta.resize(static_cast<size_t>(layout.transition_genes()));
    for (int i = 0; i < layout.transition_genes(); ++i) {
        int gene = chromosome[static_cast<size_t>(i)];
        spec.delta[static_cast<size_t>(i)] = gene == 0 ? kNoTransition : gene - 1;
    }
    int d = direction_count(layout.way);
    for (int s = 0; s < layout.state_count; ++s) {
        int gene = chromosome[static_cast<size_t>(layout.head_genes_begin() + s)];
        spec.head_assign.push_back(HeadMove{direction_from_index(layout.way, gene % d), gene / d});
    }
    for (int s = 0; s < layout.state_count; ++s)
        spec.accept.push_back(
            static_cast<uint8_t>(chromosome[static_cast<size_t>(layout.accept_genes_begin() + s)]));
    return spec;
}

Chromosome encode(const SmaSpec& spec) {
    spec.validate();
    ChromosomeLayout layout{spec.state_count, spec.symbol_count, spec.head_count, spec.way};
    Chromosome genes;
    genes.reserve(static_cast<size_t>(layout.length()));
    for (int target : spec.delta) genes.push_back(target == kNoTransition ? 0 : target + 1);
    int d = direction_count(spec.way);
    for (const HeadMove& move : spec.head_assign)
        genes.push_back(move.head * d + direction_index(spec.way, move.direction));
    for (uint8_t flag : spec.accept) genes.push_back(flag ? 1 : 0);
    return genes;
}

int default_max_mutations(LanguageId id, const ChromosomeLayout& layout) {
    if (id == LanguageId::L1 || id == LanguageId::L2) return 3;
    return layout.length() / 20;
}

TrainingSet make_training_set(const LanguageProfile& profile, int size, int max_len, Rng stream) {
    TrainingSet set;
    set.seed = stream.seed();
    set.items.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) set.items.push_back(sample_episode_input(profile, max_len, stream));
    return set;
}

FitnessContext FitnessContext::build(const LanguageProfile& profile, const TrainingSet& set,
                                     int max_len, double gamma) {
    FitnessContext context;
    context.episode = EpisodeConfig::for_profile(profile, max_len);
    context.gamma = gamma;
    context.tapes.reserve(set.items.size());
    context.labels.reserve(set.items.size());
    for (const LabeledWord& item : set.items) {
        context.tapes.push_back(new_tape(item.word, profile.alphabet));
        context.labels.push_back(item.label ? 1 : 0);
    }
    return context;
}

FitnessResult fitness(const Chromosome& chromosome, const ChromosomeLayout& layout,
                      const FitnessContext& context) {
    SmaSpec spec = decode(chromosome, layout);
    SmaPolicy policy(spec);
    Environment env(context.episode);
    FitnessResult result;
    long correct = 0;
    for (size_t i = 0; i < context.tapes.size(); ++i) {
        Observation first = env.reset_with_tape(context.tapes[i], context.labels[i] != 0);
        EpisodeResult episode = play_episode(env, first, policy, context.gamma);
        result.fitness += episode.discounted_return;
        if (episode.correct) ++correct;
    }
    if (!context.tapes.empty())
        result.prediction_rate = static_cast<double>(correct) / static_cast<double>(context.tapes.size());
    return result;
}

void evaluate_population(std::vector<Individual>& population, const ChromosomeLayout& layout,
                         const FitnessContext& context, int threads) {
    parallel_for(static_cast<long>(population.size()), threads, [&](long i) {
        Individual& individual = population[static_cast<size_t>(i)];
        FitnessResult result = fitness(individual.chromosome, layout, context);
        individual.fitness = result.fitness;
        individual.prediction_rate = result.prediction_rate;
    });
}

static void sort_by_fitness(std::vector<Individual>& population) {
    std::stable_sort(population.begin(), population.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
}

std::vector<Individual> evolve_generation(std::vector<Individual> population,
                                          const ChromosomeLayout& layout,
                                          const FitnessContext& context, const GaConfig& config,
                                          Rng& rng) {
    if (population.size() % 2 != 0) throw std::invalid_argument("population size must be even");
    sort_by_fitness(population);
    int total = static_cast<int>(population.size());
    int half = total / 2;
    int genes = layout.length();
    // All variation randomness is drawn sequentially before the parallel
    // evaluation, so the thread count never changes the outcome.
    for (int slot = half; slot < total; ++slot) {
        int first = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(half)));
        int second = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(half - 1)));
        if (second >= first) ++second;
        int cut = static_cast<int>(rng.uniform_range(1, genes - 1));
        Chromosome child(static_cast<size_t>(genes));
        const Chromosome& a = population[static_cast<size_t>(first)].chromosome;
        const Chromosome& b = population[static_cast<size_t>(second)].chromosome;
        std::copy(a.begin(), a.begin() + cut, child.begin());
        std::copy(b.begin() + cut, b.end(), child.begin() + cut);
        int mutations = static_cast<int>(rng.uniform_range(0, config.max_mutations));
        for (int m = 0; m < mutations; ++m) {
            int index = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(genes)));
            child[static_cast<size_t>(index)] =
                static_cast<int>(rng.uniform_range(0, layout.upper_bound(index)));
        }
        population[static_cast<size_t>(slot)] = Individual{std::move(child), 0.0, 0.0};
    }
    std::vector<Individual*> fresh;
    for (int slot = half; slot < total; ++slot) fresh.push_back(&population[static_cast<size_t>(slot)]);
    parallel_for(static_cast<long>(fresh.size()), config.threads, [&](long i) {
        Individual& individual = *fresh[static_cast<size_t>(i)];
        FitnessResult result = fitness(individual.chromosome, layout, context);
        individual.fitness = result.fitness;
        individual.prediction_rate = result.prediction_rate;
    });
    sort_by_fitness(population);
    return population;
}

GaResult train_ga(const LanguageProfile& profile, const GaConfig& config, GaCallback callback) {
    ChromosomeLayout layout = ChromosomeLayout::for_profile(profile, config.state_count);
    Rng master(config.seed);
    Rng init_rng = master.derive("ga-init");
    Rng evolve_rng = master.derive("ga-evolve");
    uint64_t set_index = 0;
    uint64_t validation_index = 0;

    TrainingSet set = make_training_set(profile, config.training_set_size, config.max_len,
                                        master.derive("ga-training-set", set_index));
    FitnessContext context = FitnessContext::build(profile, set, config.max_len, config.gamma);

    std::vector<Individual> population(static_cast<size_t>(config.population_size));
    for (Individual& individual : population)
        individual.chromosome = random_chromosome(layout, init_rng);
    evaluate_population(population, layout, context, config.threads);
    sort_by_fitness(population);

    GaResult result;
    result.history.push_back({0, population[0].fitness, population[0].prediction_rate});

    auto handle_perfect_training_score = [&](long generation) -> bool {
        // Held-out check first; refresh the training set when it fails.
        TrainingSet validation =
            make_training_set(profile, config.training_set_size, config.max_len,
                              master.derive("ga-validation", validation_index++));
        FitnessContext validation_context =
            FitnessContext::build(profile, validation, config.max_len, config.gamma);
        FitnessResult held_out = fitness(population[0].chromosome, layout, validation_context);
        if (held_out.prediction_rate >= 1.0) {
            result.converged = true;
            result.generations = generation;
            return true;
        }
        set = make_training_set(profile, config.training_set_size, config.max_len,
                                master.derive("ga-training-set", ++set_index));
        context = FitnessContext::build(profile, set, config.max_len, config.gamma);
        evaluate_population(population, layout, context, config.threads);
        sort_by_fitness(population);
        return false;
    };

    bool stopped = false;
    if (callback && !callback(0, population[0])) stopped = true;
    if (!stopped && population[0].prediction_rate >= 1.0 && handle_perfect_training_score(0))
        stopped = true;

    long generation = 0;
    while (!stopped && generation < config.max_generations) {
        ++generation;
        population = evolve_generation(std::move(population), layout, context, config, evolve_rng);
        result.history.push_back({generation, population[0].fitness, population[0].prediction_rate});
        result.generations = generation;
        if (callback && !callback(generation, population[0])) break;
        if (population[0].prediction_rate >= 1.0 && handle_perfect_training_score(generation)) break;
    }
    result.best_individual = population[0];
    result.best = decode(population[0].chromosome, layout);
    return result;
}

void save_ga_checkpoint(const std::string& path, const GaCheckpoint& checkpoint) {
    nlohmann::json doc;
    doc["format"] = "sma-ga-checkpoint";
    doc["version"] = 1;
    doc["language"] = language_name(checkpoint.language);
    doc["generation"] = checkpoint.generation;
    doc["master_seed"] = checkpoint.master_seed;
    doc["training_set_seed"] = checkpoint.training_set_seed;
    doc["layout"] = {{"n", checkpoint.layout.state_count},
                     {"m", checkpoint.layout.symbol_count},
                     {"k", checkpoint.layout.head_count},
                     {"way", way_name(checkpoint.layout.way)}};
    doc["population"] = checkpoint.population;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << doc.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

GaCheckpoint load_ga_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != "sma-ga-checkpoint")
        throw std::runtime_error("'" + path + "' is not a GA checkpoint");
    GaCheckpoint checkpoint;
    checkpoint.language = language_from_name(doc.at("language").get<std::string>());
    checkpoint.generation = doc.at("generation").get<long>();
    checkpoint.master_seed = doc.at("master_seed").get<uint64_t>();
    checkpoint.training_set_seed = doc.at("training_set_seed").get<uint64_t>();
    const auto& layout = doc.at("layout");
    checkpoint.layout.state_count = layout.at("n").get<int>();
    checkpoint.layout.symbol_count = layout.at("m").get<int>();
    checkpoint.layout.head_count = layout.at("k").get<int>();
    checkpoint.layout.way = way_from_name(layout.at("way").get<std::string>());
    checkpoint.population = doc.at("population").get<std::vector<Chromosome>>();
    return checkpoint;
}

void save_ga_history_csv(const std::string& path, const std::vector<GaGenerationStats>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "generation,best_fitness,best_prediction_rate\n";
    for (const GaGenerationStats& row : history)
        out << row.generation << ',' << format_double(row.best_fitness) << ','
            << format_double(row.best_prediction_rate) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace sma
