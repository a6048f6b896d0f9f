#include "szk/config.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace szk {

namespace {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::string SzaboRuleOptions::describe() const {
    auto end_s = [](EndSel s) {
        return s == EndSel::Always ? "always" : s == EndSel::Left ? "left" : "right";
    };
    auto start_s = [](StartSel s) {
        return s == StartSel::Always ? "always" : s == StartSel::Tail ? "tail" : "head";
    };
    auto ct = [](CTarget s) {
        return s == CTarget::All ? "all" : s == CTarget::Left ? "left" : "right";
    };
    auto dc = [](DCarrier s) {
        return s == DCarrier::All ? "all" : s == DCarrier::Tail ? "tail" : "head";
    };
    std::ostringstream os;
    os << "A=" << end_s(a_sel) << " B=" << start_s(b_sel) << " C=" << ct(c_sel)
       << " D=" << dc(d_sel) << " E=" << (enable_type_e ? "on" : "off");
    return os.str();
}

int ConfigClass::start_index(int circle) const {
    auto it = std::lower_bound(start.begin(), start.end(), circle);
    return it != start.end() && *it == circle ? int(it - start.begin()) : -1;
}

int ConfigClass::end_index(int circle) const {
    auto it = std::lower_bound(end.begin(), end.end(), circle);
    return it != end.end() && *it == circle ? int(it - end.begin()) : -1;
}

ConfigClassifier::ConfigClassifier(const CubeGeometry& geom, uint64_t seed,
                                   SzaboRuleOptions options)
    : g_(geom), opts_(options) {
    reversed_.resize(g_.n());
    for (int i = 0; i < g_.n(); ++i)
        reversed_[i] = splitmix64(seed * 0x100000001b3ull + uint64_t(i)) & 1;
}

void ConfigClassifier::override_orientation(int crossing, bool reversed) {
    reversed_[crossing] = reversed;
}

ArcFeet ConfigClassifier::feet(uint32_t u, uint32_t v, int crossing) const {
    // With the arc oriented from the (a,b)-strand to the (c,d)-strand, the
    // ending circle on its left is the (d,a)-strand, on its right the
    // (b,c)-strand; reversing the arc swaps both pairs.
    int s01 = g_.circle_at(u, crossing, 0);
    int s23 = g_.circle_at(u, crossing, 2);
    int s12 = g_.circle_at(v, crossing, 1);
    int s30 = g_.circle_at(v, crossing, 3);
    if (!reversed_[crossing]) return ArcFeet{crossing, s01, s23, s30, s12};
    return ArcFeet{crossing, s23, s01, s12, s30};
}

ConfigClass ConfigClassifier::classify(uint32_t u, uint32_t arcs) const {
    ConfigClass out;
    int k = std::popcount(arcs);
    out.k = k;
    if (k == 0) return out;

    uint32_t v = u | arcs;
    ArcFeet ft[24];
    int nk = 0;
    for (uint32_t rest = arcs; rest; rest &= rest - 1)
        ft[nk++] = feet(u, v, std::countr_zero(rest));

    // starting circles and connectivity
    uint32_t smask = 0;
    for (int i = 0; i < k; ++i) {
        smask |= uint32_t(1) << ft[i].tail_u;
        smask |= uint32_t(1) << ft[i].head_u;
    }
    int parent[32];
    for (uint32_t m = smask; m; m &= m - 1) {
        int c = std::countr_zero(m);
        parent[c] = c;
    }
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < k; ++i) {
        int a = find(ft[i].tail_u), b = find(ft[i].head_u);
        if (a != b) parent[a] = b;
    }
    int roots = 0;
    for (uint32_t m = smask; m; m &= m - 1)
        roots += find(std::countr_zero(m)) == std::countr_zero(m);
    if (roots != 1) return out;  // disconnected: zero map

    uint32_t emask = 0;
    for (int i = 0; i < k; ++i) {
        emask |= uint32_t(1) << ft[i].left_v;
        emask |= uint32_t(1) << ft[i].right_v;
    }
    int s = std::popcount(smask), e = std::popcount(emask);
    int genus2 = k + 2 - s - e;
    if (genus2 < 0 || (genus2 & 1))
        throw std::runtime_error("configuration classification failure: " +
                                 serialize_config(g_, u, arcs));
    int genus = genus2 / 2;

    auto fill_sorted = [](uint32_t mask, std::vector<int>& v) {
        for (uint32_t m = mask; m; m &= m - 1) v.push_back(std::countr_zero(m));
    };

    // Path reconstruction over a circle multigraph given per-arc endpoints.
    // Returns circle ids in path order, or empty when not a simple path.
    auto build_path = [&](uint32_t vmask, auto endpoint_pair) -> std::vector<int> {
        int deg[32] = {0};
        bool self_loop = false;
        for (int i = 0; i < k; ++i) {
            auto [x, y] = endpoint_pair(ft[i]);
            if (x == y) self_loop = true;
            ++deg[x];
            ++deg[y];
        }
        int nverts = std::popcount(vmask);
        if (self_loop || nverts != k + 1) return {};
        int ends = 0, bad = 0, first = -1;
        for (uint32_t m = vmask; m; m &= m - 1) {
            int c = std::countr_zero(m);
            if (deg[c] == 1) {
                ++ends;
                if (first < 0) first = c;
            } else if (deg[c] != 2) {
                ++bad;
            }
        }
        if (bad || ends != 2) return {};
        std::vector<int> order;
        order.push_back(first);
        uint32_t used = 0;
        int cur = first;
        for (int step = 0; step < k; ++step) {
            bool advanced = false;
            for (int i = 0; i < k && !advanced; ++i) {
                if ((used >> i) & 1) continue;
                auto [x, y] = endpoint_pair(ft[i]);
                if (x == cur || y == cur) {
                    used |= uint32_t(1) << i;
                    cur = (x == cur) ? y : x;
                    order.push_back(cur);
                    advanced = true;
                }
            }
            if (!advanced) return {};
        }
        return order;
    };

    auto arc_at_end = [&](int circle, auto endpoint_pair) -> const ArcFeet* {
        for (int i = 0; i < k; ++i) {
            auto [x, y] = endpoint_pair(ft[i]);
            if (x == circle || y == circle) return &ft[i];
        }
        return nullptr;
    };

    if (genus == 0 && s == 1) {
        // split-like: ending circles must form a path
        auto ep = [](const ArcFeet& f) { return std::pair(f.left_v, f.right_v); };
        auto path = build_path(emask, ep);
        if (path.empty()) return out;  // star-shaped dual tree: zero
        out.type = ConfigType::TypeA;
        fill_sorted(smask, out.start);
        fill_sorted(emask, out.end);
        out.path_order = path;
        const ArcFeet* gf = arc_at_end(path.front(), ep);
        const ArcFeet* gl = arc_at_end(path.back(), ep);
        using ES = SzaboRuleOptions::EndSel;
        auto elig = [&](const ArcFeet* f, int circle) {
            if (k == 1 || opts_.a_sel == ES::Always) return true;
            return opts_.a_sel == ES::Left ? f->left_v == circle : f->right_v == circle;
        };
        out.elig_first = elig(gf, path.front());
        out.elig_last = elig(gl, path.back());
        return out;
    }
    if (genus == 0 && e == 1) {
        // merge-like: starting circles must form a path
        auto sp = [](const ArcFeet& f) { return std::pair(f.tail_u, f.head_u); };
        auto path = build_path(smask, sp);
        if (path.empty()) return out;
        out.type = ConfigType::TypeB;
        fill_sorted(smask, out.start);
        fill_sorted(emask, out.end);
        out.path_order = path;
        const ArcFeet* gf = arc_at_end(path.front(), sp);
        const ArcFeet* gl = arc_at_end(path.back(), sp);
        using SS = SzaboRuleOptions::StartSel;
        auto elig = [&](const ArcFeet* f, int circle) {
            if (k == 1 || opts_.b_sel == SS::Always) return true;
            return opts_.b_sel == SS::Tail ? f->tail_u == circle : f->head_u == circle;
        };
        out.elig_first = elig(gf, path.front());
        out.elig_last = elig(gl, path.back());
        return out;
    }
    if (genus == 0) return out;  // intermediate trees: zero

    if (genus == 1 && s == 1) {
        out.type = ConfigType::TypeC;
        fill_sorted(smask, out.start);
        fill_sorted(emask, out.end);
        using CT = SzaboRuleOptions::CTarget;
        if (opts_.c_sel == CT::All) {
            out.c_targets = (e >= 32 ? ~uint32_t(0) : (uint32_t(1) << e) - 1);
        } else {
            for (int i = 0; i < k; ++i) {
                int c = opts_.c_sel == CT::Left ? ft[i].left_v : ft[i].right_v;
                int idx = out.end_index(c);
                if (idx >= 0) out.c_targets |= uint32_t(1) << idx;
            }
        }
        return out;
    }
    if (genus == 1 && e == 1) {
        out.type = ConfigType::TypeD;
        fill_sorted(smask, out.start);
        fill_sorted(emask, out.end);
        using DC = SzaboRuleOptions::DCarrier;
        if (opts_.d_sel == DC::All) {
            out.d_carriers = (s >= 32 ? ~uint32_t(0) : (uint32_t(1) << s) - 1);
        } else {
            for (int i = 0; i < k; ++i) {
                int c = opts_.d_sel == DC::Tail ? ft[i].tail_u : ft[i].head_u;
                int idx = out.start_index(c);
                if (idx >= 0) out.d_carriers |= uint32_t(1) << idx;
            }
        }
        return out;
    }
    if (genus == 1) return out;

    if (genus == 2 && opts_.enable_type_e) {
        out.type = ConfigType::TypeE;
        fill_sorted(smask, out.start);
        fill_sorted(emask, out.end);
        return out;
    }
    return out;  // genus >= 3 (or type E disabled): zero
}

void apply_config(const ConfigClass& cfg, uint32_t in_x,
                  std::vector<uint32_t>& out_terms) {
    switch (cfg.type) {
        case ConfigType::Zero:
            return;
        case ConfigType::TypeA: {
            int fi = cfg.end_index(cfg.path_order.front());
            int li = cfg.end_index(cfg.path_order.back());
            if (in_x == 0) {
                if (cfg.elig_first) out_terms.push_back(uint32_t(1) << fi);
                if (cfg.elig_last) out_terms.push_back(uint32_t(1) << li);
            } else {
                if (cfg.elig_first && cfg.elig_last)
                    out_terms.push_back((uint32_t(1) << fi) | (uint32_t(1) << li));
            }
            return;
        }
        case ConfigType::TypeB: {
            int n = static_cast<int>(cfg.start.size());
            uint32_t full = (uint32_t(1) << n) - 1;
            uint32_t fi = uint32_t(1) << cfg.start_index(cfg.path_order.front());
            uint32_t li = uint32_t(1) << cfg.start_index(cfg.path_order.back());
            uint32_t mids = full & ~fi & ~li;
            if (in_x == mids) {
                if (cfg.elig_first && cfg.elig_last) out_terms.push_back(0);
            } else if (in_x == (mids | li)) {
                if (cfg.elig_first) out_terms.push_back(1);  // single ending circle
            } else if (in_x == (mids | fi)) {
                if (cfg.elig_last) out_terms.push_back(1);
            }
            return;
        }
        case ConfigType::TypeC: {
            if (in_x == 0) {
                out_terms.push_back(0);
            } else if (in_x == 1) {
                for (uint32_t m = cfg.c_targets; m; m &= m - 1)
                    out_terms.push_back(m & ~(m - 1));
            }
            return;
        }
        case ConfigType::TypeD: {
            int n = static_cast<int>(cfg.start.size());
            uint32_t full = (uint32_t(1) << n) - 1;
            if (in_x == full) {
                out_terms.push_back(1);
            } else {
                uint32_t ones = full & ~in_x;
                if (std::popcount(ones) == 1 && (cfg.d_carriers & ones))
                    out_terms.push_back(0);
            }
            return;
        }
        case ConfigType::TypeE: {
            int n = static_cast<int>(cfg.start.size());
            uint32_t full = (uint32_t(1) << n) - 1;
            if (in_x == full) out_terms.push_back(0);
            return;
        }
    }
}

std::string serialize_config(const CubeGeometry& g, uint32_t u, uint32_t arcs) {
    std::ostringstream os;
    os << "u=";
    for (int i = 0; i < g.n(); ++i) os << ((u >> i) & 1);
    os << " arcs={";
    bool first = true;
    for (uint32_t m = arcs; m; m &= m - 1) {
        if (!first) os << ",";
        first = false;
        os << std::countr_zero(m);
    }
    os << "} circles(u)=" << g.circles(u) << " circles(v)=" << g.circles(u | arcs);
    return os.str();
}



// ---- planar configuration words and canonical keys ----

uint32_t ConfigGeometry::in_x_of(uint32_t labels) const {
    uint32_t in_x = 0;
    for (std::size_t i = 0; i < start.size(); ++i)
        if ((labels >> start[i]) & 1) in_x |= uint32_t(1) << i;
    return in_x;
}

uint32_t ConfigGeometry::base_of(const CubeGeometry& g, uint32_t u,
                                 uint32_t labels) const {
    uint32_t base = 0;
    for (int c = 0; c < g.circles(u); ++c)
        if (pass_map[c] >= 0 && ((labels >> c) & 1))
            base |= uint32_t(1) << pass_map[c];
    return base;
}

uint32_t ConfigGeometry::full_mask(uint32_t base, uint32_t term) const {
    uint32_t m = base;
    for (std::size_t i = 0; i < end.size(); ++i)
        if ((term >> i) & 1) m |= uint32_t(1) << end[i];
    return m;
}

ConfigGeometry analyze_config(const CubeGeometry& g, const ConfigClassifier& cls,
                              uint32_t u, uint32_t arcs) {
    ConfigGeometry cd;
    uint32_t v = u | arcs;
    cd.k = std::popcount(arcs);
    for (uint32_t rest = arcs; rest; rest &= rest - 1)
        cd.feet.push_back(cls.feet(u, v, std::countr_zero(rest)));
    uint32_t smask = 0, emask = 0;
    for (const auto& f : cd.feet) {
        smask |= uint32_t(1) << f.tail_u;
        smask |= uint32_t(1) << f.head_u;
        emask |= uint32_t(1) << f.left_v;
        emask |= uint32_t(1) << f.right_v;
    }
    for (uint32_t m = smask; m; m &= m - 1) cd.start.push_back(std::countr_zero(m));
    for (uint32_t m = emask; m; m &= m - 1) cd.end.push_back(std::countr_zero(m));

    int parent[32];
    for (uint32_t m = smask; m; m &= m - 1) {
        int c = std::countr_zero(m);
        parent[c] = c;
    }
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& f : cd.feet) {
        int a = find(f.tail_u), b = find(f.head_u);
        if (a != b) parent[a] = b;
    }
    int roots = 0;
    for (uint32_t m = smask; m; m &= m - 1)
        roots += find(std::countr_zero(m)) == std::countr_zero(m);
    cd.connected = roots == 1;
    if (!cd.connected) return cd;

    int cu = g.circles(u), cv = g.circles(v);
    cd.pass_map.assign(cu, -1);
    for (int c = 0; c < cu; ++c) {
        if ((smask >> c) & 1) continue;
        int ma = g.circle_min_arc(u, c);
        for (int tc = 0; tc < cv; ++tc)
            if (g.circle_min_arc(v, tc) == ma) {
                cd.pass_map[c] = tc;
                break;
            }
    }
    return cd;
}

namespace {

struct WordSym {
    int arc, kind, side;
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

std::string canonical_word(std::vector<WordSym> w) {
    std::string best;
    int n = static_cast<int>(w.size());
    for (int dir = 0; dir < 2; ++dir) {
        for (int r = 0; r < n; ++r) {
            std::vector<WordSym> rot;
            for (int i = 0; i < n; ++i) rot.push_back(w[(r + i) % n]);
            std::string cand = word_str(rot);
            if (best.empty() || cand < best) best = std::move(cand);
        }
        std::reverse(w.begin(), w.end());
        for (auto& y : w) y.side ^= 1;
    }
    return best;
}

void raw_words(const CubeGeometry& g, const ConfigGeometry& cd, uint32_t u,
               uint32_t v, std::map<int, std::vector<WordSym>>& start_words,
               std::map<int, std::vector<WordSym>>& end_words) {
    std::map<int, std::pair<int, bool>> by_crossing;
    for (std::size_t i = 0; i < cd.feet.size(); ++i) {
        const ArcFeet& f = cd.feet[i];
        int s01 = g.circle_at(u, f.crossing, 0);
        bool rev = !(f.tail_u == s01);
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
            int kind = (ev.half == 0) == !rev ? 0 : 1;  // tail iff half0 and !rev
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
            int kind = (ev.half == 0) == !rev ? 1 : 0;  // right co-foot iff half0, !rev
            w.push_back(WordSym{arc, kind, ev.left ? 0 : 1});
        }
        end_words[c] = std::move(w);
    }
}

const std::vector<std::vector<int>>& arc_perms(int k) {
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
}

}  // namespace

CanonConfig canonicalize_config(const CubeGeometry& g, const ConfigGeometry& cd,
                                uint32_t u, uint32_t v) {
    std::map<int, std::vector<WordSym>> sw, ew;
    raw_words(g, cd, u, v, sw, ew);
    CanonConfig cc;
    std::string best;
    for (const auto& pi : arc_perms(cd.k)) {
        std::vector<std::pair<std::string, int>> scw, ecw;
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
            std::map<int, int> smap, emap;
            for (std::size_t i = 0; i < scw.size(); ++i) smap[scw[i].second] = (int)i;
            for (std::size_t i = 0; i < ecw.size(); ++i) emap[ecw[i].second] = (int)i;
            cc.labelings.emplace_back(smap, emap);
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
                    std::swap(alt.second.at(ecw[i].second),
                              alt.second.at(ecw[i + 1].second));
                    cc.labelings.push_back(std::move(alt));
                }
            }
        }
    }
    cc.config_str = best;
    return cc;
}

std::string config_key(const CanonConfig& cc, const ConfigGeometry& cd,
                       uint32_t in_x, uint32_t out_x) {
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

}  // namespace szk
