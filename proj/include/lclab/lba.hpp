#pragma once

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lclab {

enum class Move { Stay, Left, Right };

struct Transition {
    int state = 0;
    int symbol = 0;
    Move move = Move::Stay;
};

// Deterministic linear bounded automaton started on an empty tape.
struct Lba {
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> symbols;
    int initial = 0;
    int final_state = 0;
    int blank = 0, left = 0, right = 0;
    std::vector<std::optional<Transition>> delta; // indexed state * |symbols| + symbol

    int num_states() const { return static_cast<int>(states.size()); }
    int num_symbols() const { return static_cast<int>(symbols.size()); }

    const Transition* find(int q, int s) const {
        const auto& t = delta[static_cast<size_t>(q) * symbols.size() + s];
        return t ? &*t : nullptr;
    }

    int state_index(const std::string& s) const {
        auto it = std::find(states.begin(), states.end(), s);
        if (it == states.end()) throw Error("unknown-state", s);
        return static_cast<int>(it - states.begin());
    }
    int symbol_index(const std::string& s) const {
        auto it = std::find(symbols.begin(), symbols.end(), s);
        if (it == symbols.end()) throw Error("unknown-symbol", s);
        return static_cast<int>(it - symbols.begin());
    }
};

struct MachineConfig {
    long step = 0;
    int state = 0;
    int head = 0;
    std::vector<int> tape;

    bool operator==(const MachineConfig&) const = default;
};

// Throws malformed-machine on the first violated structural rule.
inline void validate(const Lba& m) {
    const int ns = m.num_states(), nt = m.num_symbols();
    auto bad = [&](const std::string& why) { throw Error("malformed-machine", why); };
    if (ns == 0 || nt == 0) bad("empty state or symbol set");
    if (m.initial < 0 || m.initial >= ns || m.final_state < 0 || m.final_state >= ns)
        bad("initial or final state out of range");
    if (m.blank == m.left || m.blank == m.right || m.left == m.right)
        bad("b, L and R must be distinct");
    if (m.delta.size() != static_cast<size_t>(ns) * nt) bad("transition table size");
    for (int q = 0; q < ns; ++q)
        for (int s = 0; s < nt; ++s) {
            const Transition* t = m.find(q, s);
            if (!t) continue;
            if (q == m.final_state) bad("transition out of the final state");
            if (t->state < 0 || t->state >= ns || t->symbol < 0 || t->symbol >= nt)
                bad("transition target out of range");
            if ((s == m.left || s == m.right) && t->symbol != s)
                bad("marker overwritten in state " + m.states[q]);
            if (s != m.left && s != m.right && (t->symbol == m.left || t->symbol == m.right))
                bad("marker written on an inner cell in state " + m.states[q]);
            if (s == m.left && t->move == Move::Left) bad("head moves left of L");
            if (s == m.right && t->move == Move::Right) bad("head moves right of R");
        }
}

inline MachineConfig init_config(const Lba& m, int B) {
    if (B < 2) throw Error("invalid-tape-size", std::to_string(B));
    MachineConfig c;
    c.state = m.initial;
    c.tape.assign(B, m.blank);
    c.tape.front() = m.left;
    c.tape.back() = m.right;
    return c;
}

inline bool is_halted(const Lba& m, const MachineConfig& c) {
    return c.state == m.final_state || !m.find(c.state, c.tape[c.head]);
}

// One application of delta; nullopt means the machine has halted.
inline std::optional<MachineConfig> step(const Lba& m, const MachineConfig& c) {
    if (is_halted(m, c)) return std::nullopt;
    const Transition& t = *m.find(c.state, c.tape[c.head]);
    MachineConfig n = c;
    n.step = c.step + 1;
    n.state = t.state;
    n.tape[c.head] = t.symbol;
    if (t.move == Move::Left) --n.head;
    if (t.move == Move::Right) ++n.head;
    if (n.head < 0 || n.head >= static_cast<int>(n.tape.size()) || n.tape.front() != m.left ||
        n.tape.back() != m.right)
        throw Error("malformed-machine", "marker invariant broken at step " + std::to_string(n.step));
    return n;
}

inline constexpr long kDefaultMaxSteps = 100'000'000;

struct RunResult {
    std::vector<MachineConfig> trace;
    long T = 0;
    bool halted = false;
};

inline RunResult run(const Lba& m, int B, long max_steps = kDefaultMaxSteps) {
    RunResult r;
    r.trace.push_back(init_config(m, B));
    while (r.T < max_steps) {
        auto n = step(m, r.trace.back());
        if (!n) {
            r.halted = true;
            return r;
        }
        r.trace.push_back(std::move(*n));
        ++r.T;
    }
    r.halted = is_halted(m, r.trace.back());
    return r;
}

// Same as run() but keeps only the step count.
inline std::pair<long, bool> run_time(const Lba& m, int B, long max_steps = kDefaultMaxSteps) {
    MachineConfig c = init_config(m, B);
    const int nt = m.num_symbols();
    long T = 0;
    while (T < max_steps) {
        if (c.state == m.final_state) return {T, true};
        const auto& t = m.delta[static_cast<size_t>(c.state) * nt + c.tape[c.head]];
        if (!t) return {T, true};
        c.tape[c.head] = t->symbol;
        c.state = t->state;
        if (t->move == Move::Left) --c.head;
        if (t->move == Move::Right) ++c.head;
        ++T;
    }
    return {T, is_halted(m, c)};
}

// Memoized T_M(B). Confined to one thread.
class TimeOracle {
public:
    explicit TimeOracle(const Lba& m, long max_steps = kDefaultMaxSteps) : m_(&m), max_steps_(max_steps) {}

    long operator()(int B) {
        auto it = memo_.find(B);
        if (it != memo_.end()) return it->second;
        auto [T, halted] = run_time(*m_, B, max_steps_);
        if (!halted) throw Error("step-limit", "machine did not halt for B=" + std::to_string(B));
        memo_.emplace(B, T);
        return T;
    }

    const Lba& machine() const { return *m_; }

private:
    const Lba* m_;
    long max_steps_;
    std::map<int, long> memo_;
};

// Smallest B >= 2 with n <= B^(i-1) * T_M(B).
inline int compute_tape_size(long n, int i, TimeOracle& T, int cap = 4096) {
    if (i < 2) throw Error("invalid-dimension", std::to_string(i));
    for (int B = 2; B <= cap; ++B) {
        long double cap_nodes = static_cast<long double>(T(B));
        for (int j = 1; j < i; ++j) cap_nodes *= B;
        if (static_cast<long double>(n) <= cap_nodes) return B;
    }
    throw Error("tape-size-overflow", "n=" + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Builders

class LbaBuilder {
public:
    explicit LbaBuilder(std::string name) { m_.name = std::move(name); }

    int state(const std::string& s) {
        auto it = std::find(m_.states.begin(), m_.states.end(), s);
        if (it != m_.states.end()) return static_cast<int>(it - m_.states.begin());
        m_.states.push_back(s);
        return m_.num_states() - 1;
    }
    int symbol(const std::string& s) {
        auto it = std::find(m_.symbols.begin(), m_.symbols.end(), s);
        if (it != m_.symbols.end()) return static_cast<int>(it - m_.symbols.begin());
        m_.symbols.push_back(s);
        return m_.num_symbols() - 1;
    }
    void rule(int q, int s, int q2, int s2, Move mv) { rules_.push_back({q, s, {q2, s2, mv}}); }

    Lba build(const std::string& q0, const std::string& f) {
        m_.initial = state(q0);
        m_.final_state = state(f);
        m_.blank = symbol("b");
        m_.left = symbol("L");
        m_.right = symbol("R");
        m_.delta.assign(static_cast<size_t>(m_.num_states()) * m_.num_symbols(), std::nullopt);
        for (const auto& r : rules_) {
            auto& slot = m_.delta[static_cast<size_t>(r.q) * m_.num_symbols() + r.s];
            if (slot) throw Error("malformed-machine", "duplicate transition");
            slot = r.t;
        }
        validate(m_);
        return m_;
    }

private:
    struct Rule {
        int q, s;
        Transition t;
    };
    Lba m_;
    std::vector<Rule> rules_;
};

// k unary counters on one tape. Counter j is the position of mark j among
// the inner cells; a cell symbol is the set of marks it holds. Counter 1 is
// advanced by two steps per increment; an overflow of counter j walks home,
// resets j to the first cell and advances j+1. Overflow of counter k walks
// back to L and enters f.
inline Lba unary_counter(int k) {
    if (k < 1 || k > 6) throw Error("invalid-counter", std::to_string(k));
    LbaBuilder b("unary" + std::to_string(k));
    const int full = (1 << k) - 1;
    std::vector<int> sym(full + 1);
    sym[0] = b.symbol("b");
    for (int mask = 1; mask <= full; ++mask) sym[mask] = b.symbol("m" + std::to_string(mask));
    const int L = b.symbol("L"), R = b.symbol("R");

    const int q0 = b.state("q0"), init = b.state("init"), done = b.state("done"), f = b.state("f");
    std::vector<int> put(k + 1), home(k + 1), reset(k + 1), find(k + 1);
    for (int j = 1; j <= k; ++j) {
        put[j] = b.state("put" + std::to_string(j));
        home[j] = b.state("home" + std::to_string(j));
        reset[j] = b.state("reset" + std::to_string(j));
        find[j] = b.state("find" + std::to_string(j));
    }
    const int back = b.state("back");

    b.rule(q0, L, init, L, Move::Right);
    b.rule(init, R, done, R, Move::Left);
    for (int mask = 0; mask <= full; ++mask) {
        const int s = sym[mask];
        b.rule(init, s, find[1], sym[full], Move::Stay);
        b.rule(done, s, done, s, Move::Left);
        b.rule(back, s, back, s, Move::Left);
        for (int j = 1; j <= k; ++j) {
            const int bit = 1 << (j - 1);
            if (mask & bit)
                b.rule(find[j], s, put[j], sym[mask & ~bit], Move::Right);
            else
                b.rule(find[j], s, find[j], s, Move::Right);
            if (j == 1)
                b.rule(put[j], s, find[1], sym[mask | bit], Move::Stay);
            else
                b.rule(put[j], s, back, sym[mask | bit], Move::Left);
            b.rule(home[j], s, home[j], s, Move::Left);
            if (j < k)
                b.rule(reset[j], s, find[j + 1], sym[mask | bit], Move::Stay);
            else
                b.rule(reset[j], s, done, sym[mask | bit], Move::Left);
        }
    }
    for (int j = 1; j <= k; ++j) {
        b.rule(put[j], R, home[j], R, Move::Left);
        b.rule(home[j], L, reset[j], L, Move::Right);
    }
    b.rule(back, L, find[1], L, Move::Right);
    b.rule(done, L, f, L, Move::Stay);
    return b.build("q0", "f");
}

// Binary counter over the inner cells, least significant bit next to L.
// A carry that reaches R means every inner cell held 1; the machine then
// walks back to L and enters f.
inline Lba binary_counter() {
    LbaBuilder b("binary");
    const int zero = b.symbol("b"), one = b.symbol("1"), L = b.symbol("L"), R = b.symbol("R");
    const int q0 = b.state("q0"), inc = b.state("inc"), ret = b.state("ret"), done = b.state("done"),
              f = b.state("f");
    b.rule(q0, L, inc, L, Move::Right);
    b.rule(inc, one, inc, zero, Move::Right);
    b.rule(inc, zero, ret, one, Move::Left);
    b.rule(inc, R, done, R, Move::Left);
    for (int s : {zero, one}) {
        b.rule(ret, s, ret, s, Move::Left);
        b.rule(done, s, done, s, Move::Left);
    }
    b.rule(ret, L, inc, L, Move::Right);
    b.rule(done, L, f, L, Move::Stay);
    return b.build("q0", "f");
}

// "unary1", "unary2", ..., "binary"
inline Lba builtin(const std::string& kind) {
    if (kind == "binary") return binary_counter();
    if (kind.rfind("unary", 0) == 0 && kind.size() > 5) return unary_counter(std::stoi(kind.substr(5)));
    throw Error("unknown-machine", kind);
}

// Copy of m in which every undefined (q != f, symbol) pair steps into f
// without moving. Halting then always happens through f.
inline Lba halt_through_final(const Lba& m) {
    Lba out = m;
    for (int q = 0; q < m.num_states(); ++q) {
        if (q == m.final_state) continue;
        for (int s = 0; s < m.num_symbols(); ++s) {
            auto& slot = out.delta[static_cast<size_t>(q) * m.num_symbols() + s];
            if (!slot) slot = Transition{m.final_state, s, Move::Stay};
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format

inline Lba parse_machine(std::istream& in, const std::string& name = "machine") {
    Lba m;
    m.name = name;
    std::string line;
    std::string q0, f;
    struct Raw {
        std::string s0, t0, s1, t1, mv;
        int line;
    };
    std::vector<Raw> raws;
    int lineno = 0;
    auto fail = [&](const std::string& why) { throw Error("malformed-machine", "line " + std::to_string(lineno) + ": " + why); };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "states:") {
            for (std::string s; ls >> s;) m.states.push_back(s);
        } else if (key == "symbols:") {
            for (std::string s; ls >> s;) m.symbols.push_back(s);
        } else if (key == "initial:") {
            ls >> q0;
        } else if (key == "final:") {
            ls >> f;
        } else if (key == "t:") {
            Raw r;
            std::string arrow;
            if (!(ls >> r.s0 >> r.t0 >> arrow >> r.s1 >> r.t1 >> r.mv) || arrow != "->") fail("bad tuple");
            r.line = lineno;
            raws.push_back(r);
        } else {
            fail("unknown key " + key);
        }
    }
    auto idx = [&](const std::vector<std::string>& v, const std::string& s, const char* what) {
        auto it = std::find(v.begin(), v.end(), s);
        if (it == v.end()) throw Error("malformed-machine", std::string("undefined ") + what + " " + s);
        return static_cast<int>(it - v.begin());
    };
    m.initial = idx(m.states, q0, "state");
    m.final_state = idx(m.states, f, "state");
    m.blank = idx(m.symbols, "b", "symbol");
    m.left = idx(m.symbols, "L", "symbol");
    m.right = idx(m.symbols, "R", "symbol");
    m.delta.assign(m.states.size() * m.symbols.size(), std::nullopt);
    for (const auto& r : raws) {
        lineno = r.line;
        Transition t{idx(m.states, r.s1, "state"), idx(m.symbols, r.t1, "symbol"), Move::Stay};
        if (r.mv == "left") t.move = Move::Left;
        else if (r.mv == "right") t.move = Move::Right;
        else if (r.mv != "stay") fail("bad move " + r.mv);
        auto& slot = m.delta[idx(m.states, r.s0, "state") * m.symbols.size() + idx(m.symbols, r.t0, "symbol")];
        if (slot) fail("duplicate transition");
        slot = t;
    }
    validate(m);
    return m;
}

inline Lba load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    return parse_machine(in, path);
}

inline void write_machine(std::ostream& out, const Lba& m) {
    out << "states:";
    for (auto& s : m.states) out << ' ' << s;
    out << "\nsymbols:";
    for (auto& s : m.symbols) out << ' ' << s;
    out << "\ninitial: " << m.states[m.initial] << "\nfinal: " << m.states[m.final_state] << '\n';
    static const char* mv[] = {"stay", "left", "right"};
    for (int q = 0; q < m.num_states(); ++q)
        for (int s = 0; s < m.num_symbols(); ++s)
            if (auto* t = m.find(q, s))
                out << "t: " << m.states[q] << ' ' << m.symbols[s] << " -> " << m.states[t->state] << ' '
                    << m.symbols[t->symbol] << ' ' << mv[static_cast<int>(t->move)] << '\n';
}

} // namespace lclab
