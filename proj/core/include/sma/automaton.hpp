#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sma {

enum class Direction : uint8_t { Left = 0, Stay = 1, Right = 2 };
enum class Way : uint8_t { OneWay, TwoWay };

// d: number of directions available to the heads (2 one-way, 3 two-way).
inline int direction_count(Way way) { return way == Way::OneWay ? 2 : 3; }

// Dense per-way direction packing: one-way (Stay, Right), two-way
// (Left, Stay, Right). Shared by gene encoding, action indexing and
// observation encoding.
Direction direction_from_index(Way way, int index);
int direction_index(Way way, Direction dir);

std::string_view direction_name(Direction dir);
std::string_view way_name(Way way);
Way way_from_name(std::string_view name);

using Symbol = int;
using Word = std::vector<Symbol>;

// Input symbols occupy ids 0..input_count-1; the start/end markers take the
// next two ids, so every tape cell is a single dense symbol id.
struct Alphabet {
    std::vector<char> glyphs;  // one printable character per input symbol

    int input_count() const { return static_cast<int>(glyphs.size()); }
    Symbol marker_start() const { return input_count(); }
    Symbol marker_end() const { return input_count() + 1; }
    int symbol_count() const { return input_count() + 2; }  // m

    char glyph_of(Symbol s) const;
    std::optional<Symbol> symbol_of(char c) const;

    static Alphabet binary();  // {0, 1}
    static Alphabet ab();      // {a, b}
    static Alphabet abc();     // {a, b, c}
};

// Throws std::invalid_argument on characters outside the alphabet.
Word parse_word(const Alphabet& alphabet, std::string_view text);
std::string format_word(const Alphabet& alphabet, const Word& word);

// A word bracketed by markers: cells[0] is the start-marker, cells[n+1] the
// end-marker. For the empty word the end-marker sits at index 1.
struct Tape {
    std::vector<Symbol> cells;

    int input_length() const { return static_cast<int>(cells.size()) - 2; }
    int last_index() const { return static_cast<int>(cells.size()) - 1; }
    Symbol at(int index) const { return cells[static_cast<size_t>(index)]; }
};

// Throws std::invalid_argument if the word uses non-input symbols.
Tape new_tape(const Word& word, const Alphabet& alphabet);

struct HeadMove {
    Direction direction = Direction::Stay;
    int head = 0;

    bool operator==(const HeadMove&) const = default;
};

constexpr int kNoTransition = -1;

// Deterministic simple multi-head automaton. Each state designates one head
// and one direction; the head moves first, then reads, then the transition
// on the read symbol fires (or the machine halts if none is defined).
struct SmaSpec {
    int state_count = 0;   // n, initial state is always 0
    int symbol_count = 0;  // m = |alphabet| + 2
    int head_count = 1;    // k
    Way way = Way::OneWay;
    std::vector<uint8_t> accept;       // n flags
    std::vector<int> delta;            // n*m entries, kNoTransition = none
    std::vector<HeadMove> head_assign; // n entries

    int delta_at(int state, Symbol symbol) const {
        return delta[static_cast<size_t>(state) * symbol_count + symbol];
    }
    int& delta_at(int state, Symbol symbol) {
        return delta[static_cast<size_t>(state) * symbol_count + symbol];
    }

    // Throws std::invalid_argument on shape or range violations, including
    // Left assignments in a one-way machine.
    void validate() const;
};

struct MachineConfig {
    int state = 0;
    std::vector<int> heads;  // tape indices, clamped to [0, n+1]
    long steps = 0;          // transitions taken
};

// All heads at square 1, state 0.
MachineConfig initial_config(const SmaSpec& spec);

enum class StepResult : uint8_t { Continue, Halt };

// One machine step: move the assigned head (clamped to the tape), read the
// cell under it, then fire the transition if defined. On Halt the state is
// unchanged; only the head has moved.
StepResult step(const SmaSpec& spec, MachineConfig& config, const Tape& tape);

enum class Verdict : uint8_t { Accepted, Rejected, Timeout };
std::string_view verdict_name(Verdict verdict);

struct MoveTrace {
    std::array<long, 3> by_direction{};  // indexed by Direction
    std::vector<long> by_head;           // k entries

    long total() const { return by_direction[0] + by_direction[1] + by_direction[2]; }
};

struct RunOutcome {
    Verdict verdict = Verdict::Timeout;
    MoveTrace trace;       // one entry per transition taken
    long steps_used = 0;
    int final_state = 0;
};

// Runs from the initial configuration until the machine halts or `limit`
// transitions have been taken.
RunOutcome run(const SmaSpec& spec, const Tape& tape, long limit);

// JSON document with fields n, k, way, accept, delta (n*m lists, null for
// "none") and head_assign ([direction, head] pairs).
std::string spec_to_json(const SmaSpec& spec);
SmaSpec spec_from_json(const std::string& text);

void save_spec(const SmaSpec& spec, const std::string& path);
SmaSpec load_spec(const std::string& path);

}  // namespace sma
