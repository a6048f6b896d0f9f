#include "szk/cube.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace szk {

namespace {

// Smoothing slot pairings at one crossing: 0-smoothing joins (a,b) and (c,d),
// 1-smoothing joins (b,c) and (d,a).
inline int smoothing_partner(int slot, bool one_smoothed) {
    static const int zero[4] = {1, 0, 3, 2};
    static const int one[4] = {3, 2, 1, 0};
    return one_smoothed ? one[slot] : zero[slot];
}

}  // namespace

CubeGeometry::CubeGeometry(const PlanarDiagram& d) : d_(d) {
    d_.validate();
    n_ = d_.n_crossings();
    if (n_ > 24) throw std::runtime_error("CubeGeometry: too many crossings");
    slots_ = 4 * n_;

    // arc -> slots
    std::map<int, std::vector<int>> where;
    for (int c = 0; c < n_; ++c)
        for (int k = 0; k < 4; ++k)
            where[d_.crossings[c].arc[k]].push_back(4 * c + k);
    arc_ids_ = d_.arcs();
    for (int a : arc_ids_) {
        auto it = where.find(a);
        if (it == where.end())
            arc_slots_.emplace_back(-1, -1);  // free loop
        else
            arc_slots_.emplace_back(it->second[0], it->second[1]);
    }

    uint32_t nv = vertices();
    std::vector<int> slot_arc(slots_);
    for (int c = 0; c < n_; ++c)
        for (int k = 0; k < 4; ++k) slot_arc[4 * c + k] = d_.crossings[c].arc[k];

    // other endpoint of the arc at a given slot
    std::vector<int> arc_partner(slots_, -1);
    for (auto [a, ss] : where) {
        (void)a;
        arc_partner[ss[0]] = ss[1];
        arc_partner[ss[1]] = ss[0];
    }

    // First pass: trace circles per vertex, record counts, provisional ids
    // and the strand-passage events in traversal order.
    std::vector<std::vector<int>> provisional(nv);
    std::vector<std::vector<int>> prov_min_arc(nv);
    std::vector<std::vector<FootEvent>> prov_events(nv);
    std::vector<std::vector<int>> prov_event_circle(nv);
    int mc = 0;
    int nfree = static_cast<int>(d_.free_loops.size());
    for (uint32_t v = 0; v < nv; ++v) {
        std::vector<int>& cid = provisional[v];
        cid.assign(slots_, -1);
        std::vector<int>& mins = prov_min_arc[v];
        int next = 0;
        for (int s0 = 0; s0 < slots_; ++s0) {
            if (cid[s0] != -1) continue;
            int id = next++;
            int min_a = slot_arc[s0];
            // walk: slot -> smoothing partner -> arc partner -> ...
            int s = s0;
            do {
                cid[s] = id;
                min_a = std::min(min_a, slot_arc[s]);
                int c = s / 4;
                bool one = (v >> c) & 1;
                int p = s % 4;
                int pp = smoothing_partner(p, one);
                int sp = 4 * c + pp;
                cid[sp] = id;
                min_a = std::min(min_a, slot_arc[sp]);
                // ordered smoothing pairs: 0-sm (0,1),(2,3); 1-sm (1,2),(3,0);
                // walking first->second keeps the crossing centre on the left
                FootEvent ev{};
                ev.crossing = static_cast<uint16_t>(c);
                if (!one) {
                    ev.half = (p == 2 || p == 3);
                    ev.left = (p == 0 || p == 2);
                } else {
                    ev.half = (p == 3 || p == 0);
                    ev.left = (p == 1 || p == 3);
                }
                prov_events[v].push_back(ev);
                prov_event_circle[v].push_back(id);
                s = arc_partner[sp];
            } while (s != s0);
            mins.push_back(min_a);
        }
        for (int f = 0; f < nfree; ++f) mins.push_back(d_.free_loops[f]);
        mc = std::max(mc, next + nfree);
    }
    max_circles_ = mc;

    // Second pass: canonical ordering by min-arc, flattened tables.
    circle_of_slot_.assign(std::size_t(nv) * slots_, 0);
    n_circles_.assign(nv, 0);
    min_arc_.assign(std::size_t(nv) * std::max(1, max_circles_), -1);
    events_.assign(std::size_t(nv) * slots_ / 2, FootEvent{});
    event_circle_.assign(std::size_t(nv) * slots_ / 2, 0);
    for (uint32_t v = 0; v < nv; ++v) {
        auto& mins = prov_min_arc[v];
        int total = static_cast<int>(mins.size());
        std::vector<int> order(total);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return mins[x] < mins[y]; });
        std::vector<int> rank(total);
        for (int i = 0; i < total; ++i) rank[order[i]] = i;
        for (int s = 0; s < slots_; ++s)
            circle_of_slot_[std::size_t(v) * slots_ + s] =
                static_cast<uint16_t>(rank[provisional[v][s]]);
        n_circles_[v] = static_cast<uint8_t>(total);
        for (int i = 0; i < total; ++i)
            min_arc_[std::size_t(v) * max_circles_ + rank[i]] = mins[i];
        for (std::size_t i = 0; i < prov_events[v].size(); ++i) {
            events_[std::size_t(v) * (slots_ / 2) + i] = prov_events[v][i];
            event_circle_[std::size_t(v) * (slots_ / 2) + i] =
                static_cast<uint16_t>(rank[prov_event_circle[v][i]]);
        }
    }
}

std::vector<CubeGeometry::FootEvent> CubeGeometry::circle_events(uint32_t v,
                                                                 int circle) const {
    std::vector<FootEvent> out;
    std::size_t base = std::size_t(v) * (slots_ / 2);
    for (int i = 0; i < slots_ / 2; ++i)
        if (event_circle_[base + i] == circle) out.push_back(events_[base + i]);
    return out;
}

int CubeGeometry::circle_of_arc(uint32_t v, int arc) const {
    auto it = std::lower_bound(arc_ids_.begin(), arc_ids_.end(), arc);
    if (it == arc_ids_.end() || *it != arc) return -1;
    std::size_t k = it - arc_ids_.begin();
    auto [s0, s1] = arc_slots_[k];
    if (s0 >= 0) return circle_at(v, s0 / 4, s0 % 4);
    // free loop: find its circle id by min-arc
    for (int c = 0; c < circles(v); ++c)
        if (circle_min_arc(v, c) == arc) return c;
    return -1;
}

double CubeGeometry::estimated_generators() const {
    double total = 0;
    for (uint32_t v = 0; v < vertices(); ++v)
        total += std::pow(2.0, circles(v));
    return total;
}

CircleDecomposition resolve(const PlanarDiagram& d, Resolution r) {
    if (r.n != d.n_crossings())
        throw std::runtime_error("resolve: resolution length mismatch");
    CubeGeometry g(d);
    CircleDecomposition out;
    out.resolution = r;
    out.count = g.circles(r.bits);
    out.circle_of_slot.resize(4 * d.n_crossings());
    for (int c = 0; c < d.n_crossings(); ++c)
        for (int k = 0; k < 4; ++k)
            out.circle_of_slot[4 * c + k] = g.circle_at(r.bits, c, k);
    for (int c = 0; c < out.count; ++c)
        out.min_arc.push_back(g.circle_min_arc(r.bits, c));
    return out;
}

int BasisBlock::index_of(uint32_t vertex, uint32_t labels) const {
    KhGenerator key{vertex, labels};
    auto cmp = [](const KhGenerator& a, const KhGenerator& b) {
        return a.vertex != b.vertex ? a.vertex < b.vertex : a.labels < b.labels;
    };
    auto it = std::lower_bound(gens.begin(), gens.end(), key, cmp);
    if (it == gens.end() || !(*it == key)) return -1;
    return static_cast<int>(it - gens.begin());
}

const BasisBlock* ChainComplex::block(Bigrading g) const {
    auto it = blocks.find(g);
    return it == blocks.end() ? nullptr : &it->second;
}

const MatF2* ChainComplex::d_out(Bigrading g) const {
    auto it = d_f2.find(g);
    return it == d_f2.end() ? nullptr : &it->second;
}

MatF2 ChainComplex::d_out_or_zero(Bigrading g) const {
    if (const MatF2* m = d_out(g)) return *m;
    std::size_t cols = block(g) ? block(g)->gens.size() : 0;
    Bigrading tgt{g.t + 1, g.q};
    std::size_t rows = block(tgt) ? block(tgt)->gens.size() : 0;
    return MatF2(rows, cols);
}

MatF2 ChainComplex::d_in_or_zero(Bigrading g) const {
    Bigrading src{g.t - 1, g.q};
    if (const MatF2* m = d_out(src)) return *m;
    std::size_t cols = block(src) ? block(src)->gens.size() : 0;
    std::size_t rows = block(g) ? block(g)->gens.size() : 0;
    return MatF2(rows, cols);
}

Poly2 ChainComplex::homology_poincare() const {
    std::map<Bigrading, int> rk;
    for (const auto& [deg, m] : d_f2) rk[deg] = rank_f2(m);
    auto rank_at = [&](Bigrading g) {
        auto it = rk.find(g);
        return it == rk.end() ? 0 : it->second;
    };
    Poly2 out;
    for (const auto& [deg, blk] : blocks) {
        long long h = static_cast<long long>(blk.gens.size()) -
                      rank_at({deg.t - 1, deg.q}) - rank_at(deg);
        if (h != 0) out[{deg.t, deg.q}] = h;
    }
    return out;
}

void ChainComplex::check_d_squared() const {
    for (const auto& [deg, m] : d_f2) {
        Bigrading next{deg.t + 1, deg.q};
        if (const MatF2* m2 = d_out(next)) {
            if (!m2->multiply(m).is_zero())
                throw std::runtime_error("d^2 != 0 at t=" + std::to_string(deg.t) +
                                         " q=" + std::to_string(deg.q));
        }
    }
    if (ring == Ring::Z) {
        for (const auto& [deg, m] : d_z) {
            Bigrading next{deg.t + 1, deg.q};
            auto it = d_z.find(next);
            if (it != d_z.end() && !it->second.multiply(m).is_zero())
                throw std::runtime_error("integral d^2 != 0 at t=" + std::to_string(deg.t) +
                                         " q=" + std::to_string(deg.q));
        }
    }
}

ChainComplex build_complex(const PlanarDiagram& d, Ring ring, MemoryCap cap) {
    return build_complex(std::make_shared<CubeGeometry>(d), ring, cap);
}

ChainComplex build_complex(std::shared_ptr<CubeGeometry> geom, Ring ring,
                           MemoryCap cap) {
    const CubeGeometry& g = *geom;
    const PlanarDiagram& d = g.diagram();
    double est = g.estimated_generators();
    if (cap.max_generators && est > *cap.max_generators)
        throw std::runtime_error("memory budget exceeded: estimated basis size " +
                                 std::to_string(static_cast<long long>(est)) +
                                 " generators > cap " +
                                 std::to_string(static_cast<long long>(*cap.max_generators)));

    ChainComplex cx;
    cx.ring = ring;
    cx.geom = geom;
    int np = d.n_plus(), nm = d.n_minus();

    for (uint32_t v = 0; v < g.vertices(); ++v) {
        int c = g.circles(v);
        int w = std::popcount(v);
        int t = w - nm;
        for (uint32_t mask = 0; mask < (uint32_t(1) << c); ++mask) {
            int q = (c - 2 * std::popcount(mask)) + w + np - 2 * nm;
            Bigrading deg{t, q};
            auto& blk = cx.blocks[deg];
            blk.deg = deg;
            blk.gens.push_back(KhGenerator{v, mask});
        }
    }

    // Differential. Circles of u and v are matched by min-arc; the surgery
    // merges two circles of u or splits one.
    for (auto& [deg, blk] : cx.blocks) {
        Bigrading tgt{deg.t + 1, deg.q};
        const BasisBlock* tblk = cx.block(tgt);
        if (!tblk) continue;
        MatF2 m(tblk->gens.size(), blk.gens.size());
        MatZ mz;
        if (ring == Ring::Z) mz = MatZ(tblk->gens.size(), blk.gens.size());

        for (std::size_t col = 0; col < blk.gens.size(); ++col) {
            KhGenerator gen = blk.gens[col];
            uint32_t u = gen.vertex;
            int cu = g.circles(u);
            for (int i = 0; i < g.n(); ++i) {
                if ((u >> i) & 1) continue;
                uint32_t v = u | (uint32_t(1) << i);
                int sign_exp = std::popcount(u & ((uint32_t(1) << i) - 1));
                int cv = g.circles(v);

                int fu1 = g.circle_at(u, i, 0), fu2 = g.circle_at(u, i, 2);

                // label transported by min-arc matching for untouched circles
                auto transport = [&](auto&& set_active) {
                    uint32_t out_mask = 0;
                    for (int cc = 0; cc < cu; ++cc) {
                        if (cc == fu1 || cc == fu2) continue;
                        if ((gen.labels >> cc) & 1) {
                            int ma = g.circle_min_arc(u, cc);
                            for (int tc = 0; tc < cv; ++tc)
                                if (g.circle_min_arc(v, tc) == ma) {
                                    out_mask |= uint32_t(1) << tc;
                                    break;
                                }
                        }
                    }
                    set_active(out_mask);
                };

                auto emit = [&](uint32_t vmask, int coeff) {
                    int row = tblk->index_of(v, vmask);
                    if (row < 0)
                        throw std::runtime_error("build_complex: target generator missing");
                    m.flip(row, col);
                    if (ring == Ring::Z)
                        mz.add(row, col, (sign_exp & 1) ? -coeff : coeff);
                };

                if (fu1 != fu2) {
                    // merge
                    bool x1 = (gen.labels >> fu1) & 1, x2 = (gen.labels >> fu2) & 1;
                    if (x1 && x2) continue;  // x*x = 0
                    int cm = g.circle_at(v, i, 1);  // merged circle
                    transport([&](uint32_t base) {
                        uint32_t vmask = base;
                        if (x1 || x2) vmask |= uint32_t(1) << cm;
                        emit(vmask, 1);
                    });
                } else {
                    // split
                    int cv1 = g.circle_at(v, i, 1), cv2 = g.circle_at(v, i, 3);
                    bool x = (gen.labels >> fu1) & 1;
                    transport([&](uint32_t base) {
                        if (x) {
                            emit(base | (uint32_t(1) << cv1) | (uint32_t(1) << cv2), 1);
                        } else {
                            emit(base | (uint32_t(1) << cv1), 1);
                            emit(base | (uint32_t(1) << cv2), 1);
                        }
                    });
                }
            }
        }
        if (!m.is_zero()) cx.d_f2.emplace(deg, std::move(m));
        if (ring == Ring::Z && !mz.is_zero()) cx.d_z.emplace(deg, std::move(mz));
    }
    return cx;
}

LaurentQ euler_characteristic(const ChainComplex& c) {
    LaurentQ chi;
    for (const auto& [deg, blk] : c.blocks) {
        long long s = (((deg.t % 2) + 2) % 2 == 0) ? 1 : -1;
        chi[deg.q] += s * static_cast<long long>(blk.gens.size());
    }
    for (auto it = chi.begin(); it != chi.end();) {
        if (it->second == 0) it = chi.erase(it); else ++it;
    }
    return chi;
}

std::string laurent_to_string(const LaurentQ& p) {
    if (p.empty()) return "0";
    std::string out;
    for (auto [e, c] : p) {
        if (c == 0) continue;
        if (!out.empty()) out += c > 0 ? " + " : " - ";
        else if (c < 0) out += "-";
        long long a = std::abs(c);
        if (a != 1) out += std::to_string(a) + "*";
        out += "q^" + std::to_string(e);
    }
    return out;
}

std::string poly2_to_string(const Poly2& p) {
    std::string out;
    for (auto [tq, c] : p) {
        if (!out.empty()) out += " + ";
        if (c != 1) out += std::to_string(c) + "*";
        out += "q^" + std::to_string(tq.second) + " t^" + std::to_string(tq.first);
    }
    return out.empty() ? "0" : out;
}

}  // namespace szk
