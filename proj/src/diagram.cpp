#include "szk/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace szk {

int PlanarDiagram::n_plus() const {
    int n = 0;
    for (const auto& c : crossings) n += c.sign() > 0;
    return n;
}

int PlanarDiagram::n_minus() const {
    int n = 0;
    for (const auto& c : crossings) n += c.sign() < 0;
    return n;
}

std::vector<int> PlanarDiagram::arcs() const {
    std::set<int> s(free_loops.begin(), free_loops.end());
    for (const auto& c : crossings)
        for (int a : c.arc) s.insert(a);
    return {s.begin(), s.end()};
}

int PlanarDiagram::max_arc() const {
    int m = -1;
    for (int a : arcs()) m = std::max(m, a);
    return m;
}

int PlanarDiagram::basepoint() const {
    if (basepoint_arc) return *basepoint_arc;
    auto as = arcs();
    if (as.empty()) throw std::runtime_error("basepoint: empty diagram");
    return as.front();
}

void PlanarDiagram::validate() const {
    std::map<int, int> mult;
    for (const auto& c : crossings)
        for (int a : c.arc) ++mult[a];
    for (auto [a, m] : mult)
        if (m != 2)
            throw std::runtime_error("arc multiplicity: arc " + std::to_string(a) +
                                     " appears " + std::to_string(m) + " times");
    for (int a : free_loops)
        if (mult.count(a))
            throw std::runtime_error("arc multiplicity: free loop arc " +
                                     std::to_string(a) + " also meets a crossing");
    // Orientation consistency: every crossing arc occurs exactly once as an
    // outgoing strand and once as an incoming strand.
    std::map<int, int> heads, tails;
    for (const auto& c : crossings) {
        ++heads[c.arc[0]];                         // under in
        ++tails[c.arc[2]];                         // under out
        ++heads[c.arc[c.over_from_d ? 3 : 1]];     // over in
        ++tails[c.arc[c.over_from_d ? 1 : 3]];     // over out
    }
    for (auto [a, m] : mult) {
        if (heads[a] != 1 || tails[a] != 1)
            throw std::runtime_error("inconsistent orientation data on arc " +
                                     std::to_string(a));
    }
    if (basepoint_arc && !mult.count(*basepoint_arc) &&
        std::find(free_loops.begin(), free_loops.end(), *basepoint_arc) == free_loops.end())
        throw std::runtime_error("basepoint arc " + std::to_string(*basepoint_arc) +
                                 " not present in diagram");
}

uint64_t PlanarDiagram::hash() const {
    // FNV-1a over the rendered canonical form
    uint64_t h = 1469598103934665603ull;
    for (char ch : render_pd(*this)) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip_ws();
        return i >= s.size();
    }
    std::string ident() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_'))
            ++i;
        if (i == start) throw ParseError("expected identifier", i);
        return s.substr(start, i - start);
    }
    void expect(char c) {
        skip_ws();
        if (i >= s.size() || s[i] != c)
            throw ParseError(std::string("expected '") + c + "'", i);
        ++i;
    }
    bool peek(char c) {
        skip_ws();
        return i < s.size() && s[i] == c;
    }
    int number() {
        skip_ws();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start) throw ParseError("expected number", i);
        return std::stoi(s.substr(start, i - start));
    }
};

}  // namespace

PlanarDiagram parse_pd(const std::string& text) {
    Parser p(text);
    PlanarDiagram d;
    struct RawCrossing {
        int arc[4];
        std::size_t pos;
    };
    std::vector<RawCrossing> raw;
    std::vector<std::pair<int, int>> over_pairs;  // u > v : over-strand flows u -> v
    bool have_orient_block = false;

    while (!p.eof()) {
        std::size_t tok_pos = p.i;
        std::string name = p.ident();
        if (name == "X") {
            p.expect('(');
            RawCrossing rc{};
            rc.pos = tok_pos;
            for (int k = 0; k < 4; ++k) {
                rc.arc[k] = p.number();
                if (k < 3) p.expect(',');
            }
            p.expect(')');
            raw.push_back(rc);
        } else if (name == "o") {
            have_orient_block = true;
            p.expect('(');
            while (!p.peek(')')) {
                int u = p.number();
                p.expect('>');
                int v = p.number();
                over_pairs.emplace_back(u, v);
            }
            p.expect(')');
        } else if (name == "bp") {
            p.expect('(');
            d.basepoint_arc = p.number();
            p.expect(')');
        } else if (name == "loop") {
            p.expect('(');
            d.free_loops.push_back(p.number());
            p.expect(')');
        } else {
            throw ParseError("unknown term '" + name + "'", tok_pos);
        }
    }

    // Count arc multiplicities early for error positions.
    std::map<int, int> mult;
    for (const auto& rc : raw)
        for (int a : rc.arc) ++mult[a];
    for (const auto& rc : raw)
        for (int a : rc.arc)
            if (mult[a] != 2)
                throw ParseError("arc multiplicity: arc " + std::to_string(a) +
                                     " appears " + std::to_string(mult[a]) + " times",
                                 rc.pos);

    int max_arc = 0;
    for (auto [a, m] : mult) max_arc = std::max(max_arc, a);

    for (const auto& rc : raw) {
        Crossing c{};
        for (int k = 0; k < 4; ++k) c.arc[k] = rc.arc[k];
        int b = c.arc[1], dd = c.arc[3];
        bool resolved = false;
        for (auto [u, v] : over_pairs) {
            if ((u == b && v == dd) || (u == dd && v == b)) {
                c.over_from_d = (u == dd);
                resolved = true;
                break;
            }
        }
        if (!resolved) {
            if (have_orient_block)
                throw ParseError("orientation block does not cover crossing with over arcs " +
                                     std::to_string(b) + "," + std::to_string(dd),
                                 rc.pos);
            // Consecutive-numbering fallback (knot convention: arc i feeds arc
            // i+1, wrapping at the top id). Links need an explicit o(...) block.
            auto next = [&](int a) { return a == max_arc ? 1 : a + 1; };
            bool bd = next(b) == dd;  // over flows b -> d
            bool db = next(dd) == b;  // over flows d -> b
            if (bd == db)
                throw ParseError("cannot infer over-strand direction for crossing with "
                                 "over arcs " + std::to_string(b) + "," + std::to_string(dd) +
                                     "; supply an o(...) block",
                                 rc.pos);
            c.over_from_d = db;
        }
        d.crossings.push_back(c);
    }

    d.validate();
    if (d.crossings.empty() && d.free_loops.empty())
        throw ParseError("empty diagram: a crossingless unknot needs a loop(a) marker", 0);
    return d;
}

std::string render_pd(const PlanarDiagram& d) {
    std::string out;
    for (const auto& c : d.crossings) {
        out += "X(" + std::to_string(c.arc[0]) + "," + std::to_string(c.arc[1]) + "," +
               std::to_string(c.arc[2]) + "," + std::to_string(c.arc[3]) + ") ";
    }
    if (!d.crossings.empty()) {
        out += "o(";
        bool first = true;
        for (const auto& c : d.crossings) {
            if (!first) out += " ";
            first = false;
            int in = c.arc[c.over_from_d ? 3 : 1];
            int outa = c.arc[c.over_from_d ? 1 : 3];
            out += std::to_string(in) + ">" + std::to_string(outa);
        }
        out += ") ";
    }
    for (int a : d.free_loops) out += "loop(" + std::to_string(a) + ") ";
    if (d.basepoint_arc) out += "bp(" + std::to_string(*d.basepoint_arc) + ") ";
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

PlanarDiagram unknot() {
    PlanarDiagram d;
    d.free_loops.push_back(0);
    return d;
}

PlanarDiagram torus_knot(int p, int q) {
    if (p < 2 || q < 2) throw std::runtime_error("torus_knot: need p, q >= 2");
    // Braid on p strands read top to bottom; positions 0..p-1. Pre-assign the
    // closure arcs so the bottom of the braid rejoins the top.
    int next_arc = 0;
    std::vector<int> top(p);
    for (int s = 0; s < p; ++s) top[s] = next_arc++;
    std::vector<int> cur = top;

    PlanarDiagram d;
    for (int rep = 0; rep < q; ++rep) {
        for (int i = 0; i + 1 < p; ++i) {
            // sigma_i: strand at position i+1 passes over, moving to position i.
            int u_in = cur[i];       // incoming under (slot a)
            int o_in = cur[i + 1];   // incoming over  (slot d)
            int o_out = next_arc++;  // over exits at position i
            int u_out = next_arc++;  // under exits at position i+1
            Crossing c{};
            c.arc[0] = u_in;
            c.arc[1] = o_out;
            c.arc[2] = u_out;
            c.arc[3] = o_in;
            c.over_from_d = true;
            d.crossings.push_back(c);
            cur[i] = o_out;
            cur[i + 1] = u_out;
        }
    }
    // Close the braid: bottom arcs must be identified with top arcs.
    // Strands at positions that never changed id are already closed; others
    // need a relabeling pass.
    std::map<int, int> relabel;
    for (int s = 0; s < p; ++s)
        if (cur[s] != top[s]) relabel[cur[s]] = top[s];
    // Resolve chains (a -> b -> c) in the relabeling.
    auto resolve = [&](int a) {
        while (relabel.count(a)) a = relabel[a];
        return a;
    };
    for (auto& c : d.crossings)
        for (int k = 0; k < 4; ++k) c.arc[k] = resolve(c.arc[k]);
    // Renumber arcs densely for tidy output.
    std::map<int, int> dense;
    for (const auto& c : d.crossings)
        for (int a : c.arc)
            if (!dense.count(a)) dense.emplace(a, 0);
    {
        int id = 0;
        for (auto& [a, v] : dense) v = id++;
    }
    for (auto& c : d.crossings)
        for (int k = 0; k < 4; ++k) c.arc[k] = dense[c.arc[k]];
    d.validate();
    return d;
}

KinkedDiagram insert_kink(const PlanarDiagram& d, int at_arc) {
    auto as = d.arcs();
    if (std::find(as.begin(), as.end(), at_arc) == as.end())
        throw std::runtime_error("insert_kink: missing arc " + std::to_string(at_arc));
    PlanarDiagram out = d;
    int e1 = out.max_arc() + 1;  // kink loop arc
    int e2 = e1 + 1;             // continuation of at_arc past the kink

    bool was_loop = std::find(out.free_loops.begin(), out.free_loops.end(), at_arc) !=
                    out.free_loops.end();
    Crossing kink{};
    kink.over_from_d = true;  // positive kink
    if (was_loop) {
        out.free_loops.erase(
            std::find(out.free_loops.begin(), out.free_loops.end(), at_arc));
        // the strand re-enters itself directly: X(a, a, e1, e1)
        kink.arc[0] = at_arc;
        kink.arc[1] = at_arc;
        kink.arc[2] = e1;
        kink.arc[3] = e1;
    } else {
        // Redirect the downstream endpoint of at_arc to e2. The incoming
        // (head) occurrence of at_arc is the slot where it enters a crossing.
        bool patched = false;
        for (auto& c : out.crossings) {
            // heads: under in = slot 0; over in = slot 3 or 1
            int over_in = c.over_from_d ? 3 : 1;
            if (c.arc[0] == at_arc) {
                c.arc[0] = e2;
                patched = true;
                break;
            }
            if (c.arc[over_in] == at_arc) {
                c.arc[over_in] = e2;
                patched = true;
                break;
            }
        }
        if (!patched)
            throw std::runtime_error("insert_kink: could not locate head of arc " +
                                     std::to_string(at_arc));
        kink.arc[0] = at_arc;  // under in
        kink.arc[1] = e2;      // over out
        kink.arc[2] = e1;      // under out
        kink.arc[3] = e1;      // over in
    }
    out.crossings.push_back(kink);
    out.validate();
    int kink_index = static_cast<int>(out.crossings.size()) - 1;
    return KinkedDiagram{std::move(out), kink_index, e1};
}

PlanarDiagram disjoint_union(const PlanarDiagram& a, const PlanarDiagram& b) {
    PlanarDiagram out = a;
    int shift = std::max(-1, a.max_arc()) + 1;
    for (auto c : b.crossings) {
        for (int k = 0; k < 4; ++k) c.arc[k] += shift;
        out.crossings.push_back(c);
    }
    for (int l : b.free_loops) out.free_loops.push_back(l + shift);
    out.validate();
    return out;
}

}  // namespace szk
