#include "sma/automaton.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sma {

Direction direction_from_index(Way way, int index) {
    if (way == Way::OneWay) {
        switch (index) {
            case 0: return Direction::Stay;
            case 1: return Direction::Right;
        }
    } else {
        switch (index) {
            case 0: return Direction::Left;
            case 1: return Direction::Stay;
            case 2: return Direction::Right;
        }
    }
    throw std::invalid_argument("direction index " + std::to_string(index) +
                                " out of range for " + std::string(way_name(way)));
}

int direction_index(Way way, Direction dir) {
    if (way == Way::OneWay) {
        if (dir == Direction::Stay) return 0;
        if (dir == Direction::Right) return 1;
        throw std::invalid_argument("left movement is not available in a one-way machine");
    }
    return static_cast<int>(dir);
}

std::string_view direction_name(Direction dir) {
    switch (dir) {
        case Direction::Left: return "left";
        case Direction::Stay: return "stay";
        case Direction::Right: return "right";
    }
    return "?";
}

std::string_view way_name(Way way) { return way == Way::OneWay ? "one-way" : "two-way"; }

Way way_from_name(std::string_view name) {
    if (name == "one-way") return Way::OneWay;
    if (name == "two-way") return Way::TwoWay;
    throw std::invalid_argument("unknown way '" + std::string(name) + "'");
}

static Direction direction_from_name(std::string_view name) {
    if (name == "left") return Direction::Left;
    if (name == "stay") return Direction::Stay;
    if (name == "right") return Direction::Right;
    throw std::invalid_argument("unknown direction '" + std::string(name) + "'");
}

char Alphabet::glyph_of(Symbol s) const {
    if (s >= 0 && s < input_count()) return glyphs[static_cast<size_t>(s)];
    if (s == marker_start()) return '$';
    if (s == marker_end()) return '#';
    throw std::invalid_argument("symbol id " + std::to_string(s) + " out of range");
}

std::optional<Symbol> Alphabet::symbol_of(char c) const {
    for (int i = 0; i < input_count(); ++i)
        if (glyphs[static_cast<size_t>(i)] == c) return i;
    return std::nullopt;
}

Alphabet Alphabet::binary() { return Alphabet{{'0', '1'}}; }
Alphabet Alphabet::ab() { return Alphabet{{'a', 'b'}}; }
Alphabet Alphabet::abc() { return Alphabet{{'a', 'b', 'c'}}; }

Word parse_word(const Alphabet& alphabet, std::string_view text) {
    Word word;
    word.reserve(text.size());
    for (char c : text) {
        auto s = alphabet.symbol_of(c);
        if (!s) throw std::invalid_argument(std::string("character '") + c + "' is not in the alphabet");
        word.push_back(*s);
    }
    return word;
}

std::string format_word(const Alphabet& alphabet, const Word& word) {
    std::string text;
    text.reserve(word.size());
    for (Symbol s : word) {
        if (s < 0 || s >= alphabet.input_count())
            throw std::invalid_argument("symbol id " + std::to_string(s) + " is not an input symbol");
        text.push_back(alphabet.glyphs[static_cast<size_t>(s)]);
    }
    return text;
}

Tape new_tape(const Word& word, const Alphabet& alphabet) {
    for (Symbol s : word)
        if (s < 0 || s >= alphabet.input_count())
            throw std::invalid_argument("word contains symbol id " + std::to_string(s) +
                                        " outside the alphabet");
    Tape tape;
    tape.cells.reserve(word.size() + 2);
    tape.cells.push_back(alphabet.marker_start());
    tape.cells.insert(tape.cells.end(), word.begin(), word.end());
    tape.cells.push_back(alphabet.marker_end());
    return tape;
}

void SmaSpec::validate() const {
    if (state_count < 1) throw std::invalid_argument("state count must be positive");
    if (symbol_count < 3) throw std::invalid_argument("symbol count must be at least 3");
    if (head_count < 1) throw std::invalid_argument("head count must be positive");
    if (accept.size() != static_cast<size_t>(state_count))
        throw std::invalid_argument("accept table size mismatch");
    if (delta.size() != static_cast<size_t>(state_count) * symbol_count)
        throw std::invalid_argument("delta table size mismatch");
    if (head_assign.size() != static_cast<size_t>(state_count))
        throw std::invalid_argument("head assignment size mismatch");
    for (int target : delta)
        if (target != kNoTransition && (target < 0 || target >= state_count))
            throw std::invalid_argument("delta target " + std::to_string(target) + " out of range");
    for (const HeadMove& move : head_assign) {
        if (move.head < 0 || move.head >= head_count)
            throw std::invalid_argument("head index " + std::to_string(move.head) + " out of range");
        if (way == Way::OneWay && move.direction == Direction::Left)
            throw std::invalid_argument("one-way machine assigns a left movement");
    }
}

MachineConfig initial_config(const SmaSpec& spec) {
    MachineConfig config;
    config.state = 0;
    config.heads.assign(static_cast<size_t>(spec.head_count), 1);
    config.steps = 0;
    return config;
}

StepResult step(const SmaSpec& spec, MachineConfig& config, const Tape& tape) {
    const HeadMove& move = spec.head_assign[static_cast<size_t>(config.state)];
    int& pos = config.heads[static_cast<size_t>(move.head)];
    // Movement occurs before reading; moving beyond a marker has no effect.
    if (move.direction == Direction::Left) {
        if (pos > 0) --pos;
    } else if (move.direction == Direction::Right) {
        if (pos < tape.last_index()) ++pos;
    }
    Symbol symbol = tape.at(pos);
    int target = spec.delta_at(config.state, symbol);
    if (target == kNoTransition) return StepResult::Halt;
    config.state = target;
    ++config.steps;
    return StepResult::Continue;
}

std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
        case Verdict::Accepted: return "accepted";
        case Verdict::Rejected: return "rejected";
        case Verdict::Timeout: return "timeout";
    }
    return "?";
}

RunOutcome run(const SmaSpec& spec, const Tape& tape, long limit) {
    MachineConfig config = initial_config(spec);
    RunOutcome outcome;
    outcome.trace.by_head.assign(static_cast<size_t>(spec.head_count), 0);
    while (config.steps < limit) {
        const HeadMove& move = spec.head_assign[static_cast<size_t>(config.state)];
        if (step(spec, config, tape) == StepResult::Halt) {
            outcome.verdict = spec.accept[static_cast<size_t>(config.state)]
                                  ? Verdict::Accepted
                                  : Verdict::Rejected;
            outcome.steps_used = config.steps;
            outcome.final_state = config.state;
            return outcome;
        }
        outcome.trace.by_direction[static_cast<size_t>(move.direction)]++;
        outcome.trace.by_head[static_cast<size_t>(move.head)]++;
    }
    outcome.verdict = Verdict::Timeout;
    outcome.steps_used = config.steps;
    outcome.final_state = config.state;
    return outcome;
}

std::string spec_to_json(const SmaSpec& spec) {
    nlohmann::json doc;
    doc["n"] = spec.state_count;
    doc["k"] = spec.head_count;
    doc["way"] = way_name(spec.way);
    doc["accept"] = nlohmann::json::array();
    for (uint8_t flag : spec.accept) doc["accept"].push_back(static_cast<int>(flag));
    nlohmann::json delta = nlohmann::json::array();
    for (int s = 0; s < spec.state_count; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < spec.symbol_count; ++c) {
            int target = spec.delta_at(s, c);
            if (target == kNoTransition)
                row.push_back(nullptr);
            else
                row.push_back(target);
        }
        delta.push_back(std::move(row));
    }
    doc["delta"] = std::move(delta);
    nlohmann::json assign = nlohmann::json::array();
    for (const HeadMove& move : spec.head_assign)
        assign.push_back({direction_name(move.direction), move.head});
    doc["head_assign"] = std::move(assign);
    return doc.dump(2) + "\n";
}

SmaSpec spec_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    SmaSpec spec;
    spec.state_count = doc.at("n").get<int>();
    spec.head_count = doc.at("k").get<int>();
    spec.way = way_from_name(doc.at("way").get<std::string>());
    for (const auto& flag : doc.at("accept"))
        spec.accept.push_back(static_cast<uint8_t>(flag.get<int>() != 0));
    const auto& delta = doc.at("delta");
    if (delta.empty()) throw std::invalid_argument("delta table is empty");
    spec.symbol_count = static_cast<int>(delta.at(0).size());
    for (const auto& row : delta) {
        if (static_cast<int>(row.size()) != spec.symbol_count)
            throw std::invalid_argument("ragged delta table");
        for (const auto& cell : row)
            spec.delta.push_back(cell.is_null() ? kNoTransition : cell.get<int>());
    }
    for (const auto& pair : doc.at("head_assign"))
        spec.head_assign.push_back(
            HeadMove{direction_from_name(pair.at(0).get<std::string>()), pair.at(1).get<int>()});
    spec.validate();
    return spec;
}

void save_spec(const SmaSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << spec_to_json(spec);
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

SmaSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return spec_from_json(buffer.str());
}

}  // namespace sma
