// Rule-solver (developer tool): derives the configuration maps from the
// square-zero identities, stage by stage.
//
// Stage 1: the identity d1 d2 + d2 d1 = 0 is linear over F2 in the k = 2
// rule coefficients (keyed by the canonical isomorphism class of the
// oriented configuration together with input and output label masks).
// Solving it over a battery of small diagrams, for every arc orientation,
// yields a small solution space.
//
// Stage 2: each stage-1 candidate is tested for (a) nontriviality, (b) the
// kink-cone gate (the component of the cone map out of the 1-labelled side
// must vanish in positive index for some kink orientation), and (c)
// solvability of d1 d3 + d3 d1 = d2 d2 for the k = 3 coefficients. The
// surviving tables are printed for pattern identification.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "szk/config.hpp"
#include "szk/cube.hpp"
#include "szk/diagram.hpp"

using namespace szk;

namespace {


struct ConfigData {
    bool connected = false;
    int k = 0;
    std::vector<ArcFeet> feet;
    std::vector<int> start, end;
    std::vector<int> pass_map;
    uint32_t base_of(const CubeGeometry& g, uint32_t u, uint32_t mask) const {
        uint32_t base = 0;
        for (int c = 0; c < g.circles(u); ++c)
            if (pass_map[c] >= 0 && ((mask >> c) & 1))
                base |= uint32_t(1) << pass_map[c];
        return base;
    }
    uint32_t in_x_of(uint32_t mask) const {
        uint32_t in_x = 0;
        for (std::size_t i = 0; i < start.size(); ++i)
            if ((mask >> start[i]) & 1) in_x |= uint32_t(1) << i;
        return in_x;
    }
    uint32_t full_mask(uint32_t base, uint32_t term) const {
        uint32_t m = base;
        for (std::size_t i = 0; i < end.size(); ++i)
            if ((term >> i) & 1) m |= uint32_t(1) << end[i];
        return m;
    }
};

ConfigData analyze(const CubeGeometry& g, const ConfigClassifier& cls, uint32_t u,
                   uint32_t arcs) {
    ConfigData cd;
    uint32_t v = u | arcs;
    cd.k = std::popcount(arcs);
    for (uint32_t rest = arcs; rest; rest &= rest - 1)
        cd.feet.push_back(cls.feet(u, v, std::countr_zero(rest)));
    std::set<int> ss, es;
    for (const auto& f : cd.feet) {
        ss.insert(f.tail_u);
        ss.insert(f.head_u);
        es.insert(f.left_v);
        es.insert(f.right_v);
    }
    cd.start.assign(ss.begin(), ss.end());
    cd.end.assign(es.begin(), es.end());
    std::map<int, int> parent;
    for (int c : cd.start) parent[c] = c;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& f : cd.feet) {
        int a = find(f.tail_u), b = find(f.head_u);
        if (a != b) parent[a] = b;
    }
    std::set<int> roots;
    for (int c : cd.start) roots.insert(find(c));
    cd.connected = roots.size() == 1;
    if (!cd.connected) return cd;

    int cu = g.circles(u), cv = g.circles(v);
    cd.pass_map.assign(cu, -1);
    uint32_t act = 0;
    for (int c : cd.start) act |= uint32_t(1) << c;
    for (int c = 0; c < cu; ++c) {
        if ((act >> c) & 1) continue;
        int ma = g.circle_min_arc(u, c);
        for (int tc = 0; tc < cv; ++tc)
            if (g.circle_min_arc(v, tc) == ma) {
                cd.pass_map[c] = tc;
                break;
            }
    }
    return cd;
}


// ---------- word-based canonical configuration keys ----------
//
// A configuration is encoded by the cyclic words of its arc feet around the
// starting circles (in the source resolution) and of the co-feet around the
// ending circles (in the target resolution). Each symbol records the arc,
// the endpoint kind (tail/head resp. left/right co-foot) and the departure
// side relative to the traversal. Canonical form minimizes over arc
// relabelings, rotations, and traversal reversals (which flip the recorded
// sides); reflections are NOT quotiented out, so chirality is preserved.

struct CanonConfig {
    std::string config_str;
    // minimizing labelings: start/end circle id -> canonical position
    std::vector<std::pair<std::map<int, int>, std::map<int, int>>> labelings;
    int s = 0, e = 0, k = 0;
};

struct WordSym {
    int arc;    // relabeled arc index
    int kind;   // 0 = tail / left, 1 = head / right
    int side;   // departure side: 0 = left of traversal, 1 = right
    bool operator<(const WordSym& o) const {
        return std::tie(arc, kind, side) < std::tie(o.arc, o.kind, o.side);
    }
    bool operator==(const WordSym& o) const {
        return arc == o.arc && kind == o.kind && side == o.side;
    }
};

std::string word_str(const std::vector<WordSym>& w) {
    std::string s;
    for (const auto& y : w)
        s += std::to_string(y.arc) + (y.kind ? "H" : "T") + (y.side ? "r" : "l") + ".";
    return s;
}

// minimal rotation/reversal of a cyclic word; reversal flips sides
std::string canonical_word(std::vector<WordSym> w) {
    std::string best;
    int n = static_cast<int>(w.size());
    for (int dir = 0; dir < 2; ++dir) {
        for (int r = 0; r < n; ++r) {
            std::vector<WordSym> rot;
            for (int i = 0; i < n; ++i) rot.push_back(w[(r + i) % n]);
            std::string cand = word_str(rot);
            if (best.empty() || cand < best) best = cand;
        }
        // reverse traversal: reverse order, flip sides
        std::reverse(w.begin(), w.end());
        for (auto& y : w) y.side ^= 1;
    }
    return best;
}

struct ConfigKeyer {
    const CubeGeometry& g;

    // raw (unrelabeled) words per circle: symbol arc = index into cd.feet
    void raw_words(const ConfigData& cd, uint32_t u, uint32_t v,
                   std::map<int, std::vector<WordSym>>& start_words,
                   std::map<int, std::vector<WordSym>>& end_words) const;

    CanonConfig canonicalize(const ConfigData& cd, uint32_t u, uint32_t v) const;

    std::string key(const CanonConfig& cc, const ConfigData& cd, uint32_t in_x,
                    uint32_t out_x) const {
        std::string best;
        for (const auto& [smap, emap] : cc.labelings) {
            uint32_t im = 0, om = 0;
            for (std::size_t i = 0; i < cd.start.size(); ++i)
                if ((in_x >> i) & 1) im |= uint32_t(1) << smap.at(cd.start[i]);
            for (std::size_t i = 0; i < cd.end.size(); ++i)
                if ((out_x >> i) & 1) om |= uint32_t(1) << emap.at(cd.end[i]);
            std::string cand =
                cc.config_str + "|in=" + std::to_string(im) + "|out=" + std::to_string(om);
            if (best.empty() || cand < best) best = std::move(cand);
        }
        return best;
    }
};

void ConfigKeyer::raw_words(const ConfigData& cd, uint32_t u, uint32_t v,
                            std::map<int, std::vector<WordSym>>& start_words,
                            std::map<int, std::vector<WordSym>>& end_words) const {
    std::map<int, std::pair<int, bool>> by_crossing;  // crossing -> (arc idx, reversed)
    for (std::size_t i = 0; i < cd.feet.size(); ++i) {
        const ArcFeet& f = cd.feet[i];
        // recover the reversal bit: with !reversed the tail is the strand
        // containing slot 0 in u
        int s01 = g.circle_at(u, f.crossing, 0);
        bool rev = !(f.tail_u == s01);
        // ambiguous when both feet are on one circle; disambiguate via ends
        if (f.tail_u == f.head_u) {
            int s30 = g.circle_at(v, f.crossing, 3);
            rev = !(f.left_v == s30);
        }
        by_crossing[f.crossing] = {static_cast<int>(i), rev};
    }
    for (int c : cd.start) {
        auto evs = g.circle_events(u, c);
        std::vector<WordSym> w;
        for (auto ev : evs) {
            auto it = by_crossing.find(ev.crossing);
            if (it == by_crossing.end()) continue;
            auto [arc, rev] = it->second;
            // at u the crossing is 0-smoothed: half0 = (0,1)-strand = tail iff !rev
            int kind = (ev.half == 0) == !rev ? 0 : 1;
            w.push_back(WordSym{arc, kind, ev.left ? 0 : 1});
        }
        start_words[c] = std::move(w);
    }
    for (int c : cd.end) {
        auto evs = g.circle_events(v, c);
        std::vector<WordSym> w;
        for (auto ev : evs) {
            auto it = by_crossing.find(ev.crossing);
            if (it == by_crossing.end()) continue;
            auto [arc, rev] = it->second;
            // at v the crossing is 1-smoothed: half0 = (1,2)-strand = right
            // co-foot iff !rev
            int kind = (ev.half == 0) == !rev ? 1 : 0;
            w.push_back(WordSym{arc, kind, ev.left ? 0 : 1});
        }
        end_words[c] = std::move(w);
    }
}

CanonConfig ConfigKeyer::canonicalize(const ConfigData& cd, uint32_t u,
                                      uint32_t v) const {
    std::map<int, std::vector<WordSym>> sw, ew;
    raw_words(cd, u, v, sw, ew);
    int k = cd.k;
    CanonConfig cc;
    cc.s = static_cast<int>(cd.start.size());
    cc.e = static_cast<int>(cd.end.size());
    cc.k = k;
    const auto& arc_perms = [&]() -> const std::vector<std::vector<int>>& {
        static std::map<int, std::vector<std::vector<int>>> cache;
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
        auto& out = cache[k];
        std::vector<int> p(k);
        for (int i = 0; i < k; ++i) p[i] = i;
        do {
            out.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }();

    std::string best;
    for (const auto& pi : arc_perms) {
        std::vector<std::pair<std::string, int>> scw, ecw;  // (word, circle id)
        for (auto& [c, w] : sw) {
            std::vector<WordSym> rw = w;
            for (auto& y : rw) y.arc = pi[y.arc];
            scw.emplace_back(canonical_word(std::move(rw)), c);
        }
        for (auto& [c, w] : ew) {
            std::vector<WordSym> rw = w;
            for (auto& y : rw) y.arc = pi[y.arc];
            ecw.emplace_back(canonical_word(std::move(rw)), c);
        }
        std::sort(scw.begin(), scw.end());
        std::sort(ecw.begin(), ecw.end());
        std::string cand = "S";
        for (auto& [wstr, c] : scw) cand += "[" + wstr + "]";
        cand += "E";
        for (auto& [wstr, c] : ecw) cand += "[" + wstr + "]";
        if (best.empty() || cand < best) {
            best = cand;
            cc.labelings.clear();
        }
        if (cand == best) {
            // all orders compatible with ties
            std::map<int, int> smap, emap;
            for (std::size_t i = 0; i < scw.size(); ++i) smap[scw[i].second] = (int)i;
            for (std::size_t i = 0; i < ecw.size(); ++i) emap[ecw[i].second] = (int)i;
            cc.labelings.emplace_back(std::move(smap), std::move(emap));
            // tie permutations within equal words
            for (std::size_t i = 0; i + 1 < scw.size(); ++i) {
                if (scw[i].first == scw[i + 1].first) {
                    auto alt = cc.labelings.back();
                    std::swap(alt.first.at(scw[i].second), alt.first.at(scw[i + 1].second));
                    cc.labelings.push_back(std::move(alt));
                }
            }
            for (std::size_t i = 0; i + 1 < ecw.size(); ++i) {
                if (ecw[i].first == ecw[i + 1].first) {
                    auto alt = cc.labelings.back();
                    std::swap(alt.second.at(ecw[i].second), alt.second.at(ecw[i + 1].second));
                    cc.labelings.push_back(std::move(alt));
                }
            }
        }
    }
    cc.config_str = best;
    return cc;
}

struct System {
    std::map<std::string, int> vars;
    std::vector<std::vector<int>> rows;
    std::vector<int> rhs;
    int var(const std::string& key) {
        auto it = vars.find(key);
        if (it != vars.end()) return it->second;
        int id = static_cast<int>(vars.size());
        vars.emplace(key, id);
        return id;
    }
    void add_equation(std::map<int, int>& terms, int constant) {
        std::vector<int> row;
        for (auto [v, c] : terms)
            if (c & 1) row.push_back(v);
        if (row.empty() && (constant & 1) == 0) return;
        rows.push_back(std::move(row));
        rhs.push_back(constant & 1);
    }
};

struct Solution {
    bool consistent = true;
    std::vector<int> particular;
    std::vector<std::vector<int>> kernel;
};

Solution solve(const System& sys) {
    int nv = static_cast<int>(sys.vars.size());
    std::vector<VecF2> ech;
    for (std::size_t r = 0; r < sys.rows.size(); ++r) {
        VecF2 v(nv + 1);
        for (int c : sys.rows[r]) v.flip(c);
        if (sys.rhs[r]) v.flip(nv);
        for (auto& e : ech)
            if (v.get(e.lowest())) v ^= e;
        if (!v.is_zero()) {
            if (v.lowest() == static_cast<std::size_t>(nv)) {
                Solution s;
                s.consistent = false;
                return s;
            }
            for (auto& e : ech)
                if (e.get(v.lowest())) e ^= v;
            ech.push_back(std::move(v));
        }
    }
    Solution s;
    s.particular.assign(nv, 0);
    std::vector<bool> pivot(nv, false);
    for (const auto& e : ech) {
        pivot[e.lowest()] = true;
        s.particular[e.lowest()] = e.get(nv);
    }
    for (int f = 0; f < nv; ++f) {
        if (pivot[f]) continue;
        std::vector<int> vec{f};
        for (const auto& e : ech)
            if (e.get(f)) vec.push_back(static_cast<int>(e.lowest()));
        std::sort(vec.begin(), vec.end());
        s.kernel.push_back(std::move(vec));
    }
    return s;
}

PlanarDiagram random_braid_diagram(std::mt19937& rng, int strands, int letters) {
    int p = strands;
    int next_arc = 0;
    std::vector<int> top(p), cur(p);
    for (int s = 0; s < p; ++s) cur[s] = top[s] = next_arc++;
    PlanarDiagram d;
    std::uniform_int_distribution<int> pos(0, p - 2);
    std::bernoulli_distribution coin(0.5);
    for (int l = 0; l < letters; ++l) {
        int i = pos(rng);
        bool positive = coin(rng);
        int left = cur[i], right = cur[i + 1];
        int out_l = next_arc++, out_r = next_arc++;
        Crossing c{};
        if (positive) {
            c.arc[0] = left; c.arc[1] = out_l; c.arc[2] = out_r; c.arc[3] = right;
            c.over_from_d = true;
        } else {
            c.arc[0] = right; c.arc[1] = left; c.arc[2] = out_l; c.arc[3] = out_r;
            c.over_from_d = false;
        }
        d.crossings.push_back(c);
        cur[i] = out_l;
        cur[i + 1] = out_r;
    }
    std::map<int, int> relabel;
    for (int s = 0; s < p; ++s)
        if (cur[s] != top[s]) relabel[cur[s]] = top[s];
    auto resolve = [&](int a) {
        while (relabel.count(a)) a = relabel[a];
        return a;
    };
    for (auto& c : d.crossings)
        for (int k = 0; k < 4; ++k) c.arc[k] = resolve(c.arc[k]);
    d.validate();
    return d;
}

void khovanov_edge(const CubeGeometry& g, uint32_t u, uint32_t mask, int i,
                   std::vector<std::pair<uint32_t, uint32_t>>& out) {
    uint32_t v = u | (uint32_t(1) << i);
    int cu = g.circles(u), cv = g.circles(v);
    int fu1 = g.circle_at(u, i, 0), fu2 = g.circle_at(u, i, 2);
    uint32_t base = 0;
    for (int c = 0; c < cu; ++c) {
        if (c == fu1 || c == fu2) continue;
        if ((mask >> c) & 1) {
            int ma = g.circle_min_arc(u, c);
            for (int tc = 0; tc < cv; ++tc)
                if (g.circle_min_arc(v, tc) == ma) {
                    base |= uint32_t(1) << tc;
                    break;
                }
        }
    }
    if (fu1 != fu2) {
        bool x1 = (mask >> fu1) & 1, x2 = (mask >> fu2) & 1;
        if (x1 && x2) return;
        int cm = g.circle_at(v, i, 1);
        uint32_t vm = base;
        if (x1 || x2) vm |= uint32_t(1) << cm;
        out.emplace_back(v, vm);
    } else {
        int cv1 = g.circle_at(v, i, 1), cv2 = g.circle_at(v, i, 3);
        bool x = (mask >> fu1) & 1;
        if (x) {
            out.emplace_back(v, base | (uint32_t(1) << cv1) | (uint32_t(1) << cv2));
        } else {
            out.emplace_back(v, base | (uint32_t(1) << cv1));
            out.emplace_back(v, base | (uint32_t(1) << cv2));
        }
    }
}

std::vector<uint32_t> allowed_out_masks(int s, int e, int k, uint32_t in_x) {
    int xin = std::popcount(in_x);
    int num = e - s + 2 * xin + (k - 2);
    std::vector<uint32_t> out;
    if (num < 0 || (num & 1)) return out;
    int xout = num / 2;
    if (xout > e) return out;
    for (uint32_t m = 0; m < (uint32_t(1) << e); ++m)
        if (std::popcount(m) == xout) out.push_back(m);
    return out;
}

using RuleTable = std::map<std::string, int>;

bool table_apply(const RuleTable& table, const CubeGeometry& g, const ConfigData& cd,
                 uint32_t u, uint32_t mask,
                 std::vector<std::pair<uint32_t, uint32_t>>& out,
                 std::set<std::string>* missing) {
    if (!cd.connected) return true;
    uint32_t v = u;
    for (const auto& f : cd.feet) v |= uint32_t(1) << f.crossing;
    ConfigKeyer keyer{g};
    CanonConfig cc = keyer.canonicalize(cd, u, v);
    uint32_t in_x = cd.in_x_of(mask);
    uint32_t base = cd.base_of(g, u, mask);
    bool ok = true;
    for (uint32_t om :
         allowed_out_masks((int)cd.start.size(), (int)cd.end.size(), cd.k, in_x)) {
        auto key = keyer.key(cc, cd, in_x, om);
        auto it = table.find(key);
        if (it == table.end()) {
            if (missing) missing->insert(key);
            ok = false;
            continue;
        }
        if (it->second & 1) out.emplace_back(v, cd.full_mask(base, om));
    }
    return ok;
}

struct TermSink {
    std::map<std::pair<uint32_t, uint32_t>, std::pair<std::map<int, int>, int>> eqs;
    void add_var(uint32_t v, uint32_t m, int var) { ++eqs[{v, m}].first[var]; }
    void add_const(uint32_t v, uint32_t m) { eqs[{v, m}].second ^= 1; }
};

void emit_unknown(System& sys, TermSink& sink, const CubeGeometry& g,
                  const ConfigClassifier& cls, uint32_t u, uint32_t S,
                  uint32_t mask, int post_edge) {
    ConfigData cd = analyze(g, cls, u, S);
    if (!cd.connected) return;
    uint32_t v = u | S;
    ConfigKeyer keyer{g};
    CanonConfig cc = keyer.canonicalize(cd, u, v);
    uint32_t in_x = cd.in_x_of(mask);
    uint32_t base = cd.base_of(g, u, mask);
    for (uint32_t om :
         allowed_out_masks((int)cd.start.size(), (int)cd.end.size(), cd.k, in_x)) {
        int var = sys.var(keyer.key(cc, cd, in_x, om));
        uint32_t vmask = cd.full_mask(base, om);
        if (post_edge < 0) {
            sink.add_var(v, vmask, var);
        } else {
            std::vector<std::pair<uint32_t, uint32_t>> nexts;
            khovanov_edge(g, v, vmask, post_edge, nexts);
            for (auto [nv, nm] : nexts) sink.add_var(nv, nm, var);
        }
    }
}

struct Battery {
    std::vector<PlanarDiagram> diagrams;
    std::vector<std::shared_ptr<CubeGeometry>> geoms;
    std::vector<std::vector<ConfigClassifier>> orientations;
};

Battery make_battery() {
    Battery b;
    auto add = [&](PlanarDiagram d) { b.diagrams.push_back(std::move(d)); };
    add(parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)"));
    add(torus_knot(2, 3));
    add(torus_knot(2, 4));
    {
        auto k1 = insert_kink(unknot(), 0);
        auto k2 = insert_kink(k1.diagram, k1.loop_arc);
        auto k3 = insert_kink(k1.diagram, 0);
        auto k4 = insert_kink(k2.diagram, k2.loop_arc);
        auto k5 = insert_kink(k3.diagram, k3.loop_arc);
        add(k2.diagram);
        add(k3.diagram);
        add(k4.diagram);
        add(k5.diagram);
    }
    std::mt19937 rng(11);
    for (int i = 0; i < 10; ++i) add(random_braid_diagram(rng, 3, 4));
    for (int i = 0; i < 6; ++i) add(random_braid_diagram(rng, 3, 5));
    add(torus_knot(3, 3));
    for (int i = 0; i < 4; ++i) add(random_braid_diagram(rng, 4, 6));
    for (const auto& d : b.diagrams) {
        b.geoms.push_back(std::make_shared<CubeGeometry>(d));
        auto& cset = b.orientations.emplace_back();
        int n = d.n_crossings();
        if (n <= 5) {
            for (uint32_t bits = 0; bits < (uint32_t(1) << n); ++bits) {
                ConfigClassifier cls(*b.geoms.back(), 0);
                for (int i = 0; i < n; ++i)
                    cls.override_orientation(i, (bits >> i) & 1);
                cset.push_back(std::move(cls));
            }
        } else {
            for (uint64_t seed : {0ull, 1ull, 2ull, 3ull, 4ull, 5ull, 6ull, 7ull})
                cset.emplace_back(*b.geoms.back(), seed);
        }
    }
    return b;
}

bool build_system(System& sys, const Battery& bat, int m, const RuleTable* d2,
                  std::set<std::string>* missing) {
    bool complete = true;
    for (std::size_t di = 0; di < bat.diagrams.size(); ++di) {
        const CubeGeometry& g = *bat.geoms[di];
        int n = g.n();
        if (n < m) continue;
        uint32_t full = (uint32_t(1) << n) - 1;
        for (const auto& cls : bat.orientations[di]) {
            for (uint32_t u = 0; u <= full; ++u) {
                uint32_t zeros = full & ~u;
                if (std::popcount(zeros) < m) continue;
                std::vector<int> zlist;
                for (uint32_t z = zeros; z; z &= z - 1)
                    zlist.push_back(std::countr_zero(z));
                std::function<void(int, int, uint32_t)> rec = [&](int pos, int from,
                                                                  uint32_t T) {
                    if (pos == m) {
                        int cu = g.circles(u);
                        for (uint32_t mask = 0; mask < (uint32_t(1) << cu); ++mask) {
                            TermSink sink;
                            for (uint32_t S = (T - 1) & T;; S = (S - 1) & T) {
                                if (S != 0 && S != T) {
                                    int k1 = std::popcount(S);
                                    int k2 = m - k1;
                                    uint32_t S2 = T & ~S;
                                    if (k1 == 1) {
                                        std::vector<std::pair<uint32_t, uint32_t>> mid;
                                        khovanov_edge(g, u, mask, std::countr_zero(S),
                                                      mid);
                                        for (auto [w, wm] : mid)
                                            emit_unknown(sys, sink, g, cls, w, S2, wm,
                                                         -1);
                                    } else if (k2 == 1) {
                                        emit_unknown(sys, sink, g, cls, u, S, mask,
                                                     std::countr_zero(S2));
                                    } else if (k1 == 2 && k2 == 2 && d2) {
                                        ConfigData cd1 = analyze(g, cls, u, S);
                                        std::vector<std::pair<uint32_t, uint32_t>> mid;
                                        if (!table_apply(*d2, g, cd1, u, mask, mid,
                                                         missing))
                                            complete = false;
                                        for (auto [w, wm] : mid) {
                                            ConfigData cd2 = analyze(g, cls, w, S2);
                                            std::vector<std::pair<uint32_t, uint32_t>>
                                                fin;
                                            if (!table_apply(*d2, g, cd2, w, wm, fin,
                                                             missing))
                                                complete = false;
                                            for (auto [fv, fm] : fin)
                                                sink.add_const(fv, fm);
                                        }
                                    }
                                }
                                if (S == 0) break;
                            }
                            for (auto& [gen, data] : sink.eqs) {
                                (void)gen;
                                sys.add_equation(data.first, data.second);
                            }
                        }
                        return;
                    }
                    for (int i = from; i < (int)zlist.size(); ++i)
                        rec(pos + 1, i + 1, T | (uint32_t(1) << zlist[i]));
                };
                rec(0, 0, 0);
            }
        }
    }
    return complete;
}

bool cone_gate(const RuleTable& table, int max_k, bool verbose) {
    std::vector<std::pair<PlanarDiagram, std::pair<int, int>>> tests;
    for (auto base : {torus_knot(2, 3), parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)")}) {
        auto kd = insert_kink(base, base.basepoint());
        tests.push_back({kd.diagram, {kd.kink_crossing, kd.loop_arc}});
    }
    for (auto& [d, kc] : tests) {
        auto [kink, loop_arc] = kc;
        CubeGeometry g(d);
        int n = g.n();
        uint32_t full = (uint32_t(1) << n) - 1;
        uint32_t kinkbit = uint32_t(1) << kink;
        bool some_orientation_ok = true;
        for (uint64_t seed : {0ull, 1ull, 2ull, 3ull}) {
            bool seed_ok = false;
            for (bool rev : {false, true}) {
                bool all_ok = true;
                ConfigClassifier cls(g, seed);
                cls.override_orientation(kink, rev);
                for (uint32_t u = 0; u <= full && all_ok; ++u) {
                    if (u & kinkbit) continue;
                    uint32_t zeros = full & ~u & ~kinkbit;
                    int extra = g.circle_of_arc(u, loop_arc);
                    for (uint32_t S0 = zeros;; S0 = (S0 - 1) & zeros) {
                        int k = std::popcount(S0) + 1;
                        if (k >= 2 && k <= max_k) {
                            uint32_t S = S0 | kinkbit;
                            ConfigData cd = analyze(g, cls, u, S);
                            if (cd.connected) {
                                uint32_t in_full =
                                    (uint32_t(1) << cd.start.size()) - 1;
                                int epos = -1;
                                for (std::size_t i = 0; i < cd.start.size(); ++i)
                                    if (cd.start[i] == extra) epos = (int)i;
                                if (epos >= 0) {
                                    ConfigKeyer keyer{g};
                                    CanonConfig cc = keyer.canonicalize(cd, u, u | S);
                                    for (uint32_t in_x = 0; in_x <= in_full; ++in_x) {
                                        if ((in_x >> epos) & 1) continue;
                                        for (uint32_t om : allowed_out_masks(
                                                 (int)cd.start.size(),
                                                 (int)cd.end.size(), cd.k, in_x)) {
                                            auto key = keyer.key(cc, cd, in_x, om);
                                            auto it = table.find(key);
                                            if (it != table.end() && (it->second & 1))
                                                all_ok = false;
                                        }
                                    }
                                }
                            }
                        }
                        if (S0 == 0) break;
                    }
                }
                if (all_ok) {
                    seed_ok = true;
                    break;
                }
            }
            if (!seed_ok) {
                some_orientation_ok = false;
                break;
            }
        }
        if (!some_orientation_ok) {
            if (verbose) printf("    cone gate fails on a kinked diagram\n");
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const char* emit_path = argc > 2 && std::string(argv[1]) == "--emit" ? argv[2] : nullptr;
    auto bat = make_battery();

    System sys;
    build_system(sys, bat, 3, nullptr, nullptr);
    printf("stage 1: %zu vars, %zu equations\n", sys.vars.size(), sys.rows.size());
    Solution sol = solve(sys);
    if (!sol.consistent) {
        printf("stage 1 inconsistent!\n");
        return 1;
    }
    printf("stage 1 kernel dim: %zu\n", sol.kernel.size());
    std::vector<std::string> by_id(sys.vars.size());
    for (auto& [k, v] : sys.vars) by_id[v] = k;

    int dim = static_cast<int>(sol.kernel.size());
    if (dim > 16) {
        printf("kernel too large to enumerate\n");
        return 1;
    }
    int survivors = 0, n_nonzero = 0, n_cone = 0, n_missing = 0, n_incons = 0;
    for (uint32_t combo = 1; combo < (uint32_t(1) << dim); ++combo) {
        std::vector<int> val = sol.particular;
        for (int b = 0; b < dim; ++b)
            if ((combo >> b) & 1)
                for (int v : sol.kernel[b]) val[v] ^= 1;
        RuleTable table;
        bool nonzero = false;
        for (std::size_t v = 0; v < by_id.size(); ++v) {
            table[by_id[v]] = val[v];
            if (val[v]) nonzero = true;
        }
        if (!nonzero) continue;
        ++n_nonzero;
        if (!cone_gate(table, 2, false)) continue;
        ++n_cone;

        System sys3;
        std::set<std::string> missing;
        bool complete = build_system(sys3, bat, 4, &table, &missing);
        if (!complete) {
            ++n_missing;
            printf("candidate %u: %zu missing k=2 keys, skipped\n", combo,
                   missing.size());
            for (auto& k : missing) printf("    missing %s\n", k.c_str());
            continue;
        }
        Solution sol3 = solve(sys3);
        if (!sol3.consistent) { ++n_incons; continue; }
        ++survivors;
        printf("== candidate %u passes; stage-2 vars %zu kernel dim %zu\n", combo,
               sys3.vars.size(), sol3.kernel.size());
        if (emit_path && survivors == 1) {
            FILE* f = fopen(emit_path, "w");
            for (std::size_t v = 0; v < by_id.size(); ++v)
                fprintf(f, "%d\t%s\n", val[v], by_id[v].c_str());
            fclose(f);
            printf("   emitted k=2 table to %s\n", emit_path);
        }
        printf("   d2 nonzeros:\n");
        for (std::size_t v = 0; v < by_id.size(); ++v)
            if (val[v]) printf("     %s\n", by_id[v].c_str());
        int nz3 = 0;
        for (auto& [key, id] : sys3.vars)
            if (sol3.particular[id]) ++nz3;
        printf("   stage-2 particular nonzeros: %d\n", nz3);
        fflush(stdout);
    }
    printf("gate stats: nonzero %d, cone %d, missing-keys %d, stage2-inconsistent %d, survivors %d\n",
           n_nonzero, n_cone, n_missing, n_incons, survivors);
    return 0;
}
