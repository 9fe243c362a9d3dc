#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "lba.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace lclab {

enum class Kind : uint8_t { Tape, State, Head, Dim, ExemptM, Unbalanced, ExemptU, Error, Ptr };

// Tape(a), State(a), Dim(a), Ptr: a = direction (0 Prev, 1 Next), b = dim, c = type.
struct OutLabel {
    Kind kind = Kind::ExemptM;
    int a = 0, b = 0, c = 0;

    bool operator==(const OutLabel&) const = default;
    auto operator<=>(const OutLabel&) const = default;

    static OutLabel tape(int s) { return {Kind::Tape, s}; }
    static OutLabel state(int q) { return {Kind::State, q}; }
    static OutLabel head() { return {Kind::Head}; }
    static OutLabel dim(int k) { return {Kind::Dim, k}; }
    static OutLabel exempt_m() { return {Kind::ExemptM}; }
    static OutLabel unbalanced() { return {Kind::Unbalanced}; }
    static OutLabel exempt_u() { return {Kind::ExemptU}; }
    static OutLabel error() { return {Kind::Error}; }
    static OutLabel ptr(EdgeLabel s, int type) { return {Kind::Ptr, static_cast<int>(s.dir), s.dim, type}; }

    EdgeLabel edge() const { return {static_cast<Dir>(a), b}; }
};

inline bool is_encoding(const OutLabel& l) { return l.kind <= Kind::ExemptM; }
inline bool is_unbalanced_family(const OutLabel& l) { return l.kind == Kind::Unbalanced || l.kind == Kind::ExemptU; }
inline bool is_error_family(const OutLabel& l) { return l.kind == Kind::Error || l.kind == Kind::Ptr; }

// Sorted; the multiset of labels a node outputs.
using NodeOutput = std::vector<OutLabel>;
using OutputLabeling = std::vector<NodeOutput>;

inline NodeOutput make_output(std::vector<OutLabel> ls) {
    std::sort(ls.begin(), ls.end());
    return ls;
}

inline bool has_kind(const NodeOutput& o, Kind k) {
    for (auto& l : o)
        if (l.kind == k) return true;
    return false;
}
inline int count_kind(const NodeOutput& o, Kind k) {
    int c = 0;
    for (auto& l : o) c += l.kind == k;
    return c;
}
inline const OutLabel* first_of(const NodeOutput& o, Kind k) {
    for (auto& l : o)
        if (l.kind == k) return &l;
    return nullptr;
}
inline bool any_error_label(const NodeOutput& o) {
    return std::any_of(o.begin(), o.end(), is_error_family);
}

// ---------------------------------------------------------------------------
// Text form. Tape and State arguments are symbol and state names of M.

inline std::string to_string(const OutLabel& l, const Lba& m) {
    switch (l.kind) {
    case Kind::Tape: return "Tape(" + m.symbols.at(l.a) + ")";
    case Kind::State: return "State(" + m.states.at(l.a) + ")";
    case Kind::Head: return "Head";
    case Kind::Dim: return "Dim(" + std::to_string(l.a) + ")";
    case Kind::ExemptM: return "ExemptM";
    case Kind::Unbalanced: return "Unbalanced";
    case Kind::ExemptU: return "ExemptU";
    case Kind::Error: return "Error";
    case Kind::Ptr:
        return std::string("Ptr(") + (l.a ? "Next" : "Prev") + "," + std::to_string(l.b) + "," + std::to_string(l.c) + ")";
    }
    return "?";
}

inline std::string to_string(const NodeOutput& o, const Lba& m) {
    std::string s;
    for (size_t k = 0; k < o.size(); ++k) s += (k ? "," : "") + to_string(o[k], m);
    return s;
}

inline OutLabel parse_out_label(const std::string& s, const Lba& m) {
    auto arg = [&](const std::string& head) -> std::optional<std::string> {
        if (s.rfind(head + "(", 0) != 0 || s.back() != ')') return std::nullopt;
        return s.substr(head.size() + 1, s.size() - head.size() - 2);
    };
    auto bad = [&] { return Error("malformed-labeling", "label " + s); };
    try {
        if (s == "Head") return OutLabel::head();
        if (s == "ExemptM") return OutLabel::exempt_m();
        if (s == "Unbalanced") return OutLabel::unbalanced();
        if (s == "ExemptU") return OutLabel::exempt_u();
        if (s == "Error") return OutLabel::error();
        if (auto x = arg("Tape")) return OutLabel::tape(m.symbol_index(*x));
        if (auto x = arg("State")) return OutLabel::state(m.state_index(*x));
        if (auto x = arg("Dim")) return OutLabel::dim(std::stoi(*x));
        if (auto x = arg("Ptr")) {
            std::istringstream ss(*x);
            std::string d, dim, type;
            std::getline(ss, d, ',');
            std::getline(ss, dim, ',');
            std::getline(ss, type, ',');
            if (d != "Prev" && d != "Next") throw bad();
            return OutLabel::ptr({d == "Next" ? Dir::Next : Dir::Prev, std::stoi(dim)}, std::stoi(type));
        }
    } catch (const Error& e) {
        if (e.code() == "malformed-labeling") throw;
        throw bad();
    } catch (const std::exception&) {
        throw bad();
    }
    throw bad();
}

// Splits on commas that are not inside parentheses.
inline NodeOutput parse_node_output(const std::string& s, const Lba& m) {
    std::vector<OutLabel> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(parse_out_label(cur, m));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(parse_out_label(cur, m));
    return make_output(out);
}

inline void write_labeling(std::ostream& out, const LabeledGraph& g, const OutputLabeling& o, const Lba& m) {
    for (int v = 0; v < g.size(); ++v) out << "label " << g.ids[v] << ' ' << to_string(o[v], m) << '\n';
}

inline OutputLabeling parse_labeling(std::istream& in, const LabeledGraph& g, const Lba& m) {
    std::map<uint64_t, int> index;
    for (int v = 0; v < g.size(); ++v) index[g.ids[v]] = v;
    OutputLabeling o(g.size());
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key, labels;
        uint64_t id;
        if (!(ls >> key)) continue;
        if (key != "label" || !(ls >> id)) throw Error("malformed-labeling", line);
        ls >> labels;
        auto it = index.find(id);
        if (it == index.end()) throw Error("malformed-labeling", "unknown node " + std::to_string(id));
        o[it->second] = parse_node_output(labels, m);
    }
    return o;
}

inline OutputLabeling load_labeling(const std::string& path, const LabeledGraph& g, const Lba& m) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    return parse_labeling(in, g, m);
}

} // namespace lclab
