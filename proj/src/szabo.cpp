#include "szk/szabo.hpp"

#include <bit>
#include <sstream>

#include "szk/specseq.hpp"

namespace szk {

int SzaboDifferential::max_layer() const {
    return higher.empty() ? 1 : higher.rbegin()->first;
}

const MatF2* SzaboDifferential::layer_block(int n, Bigrading src) const {
    if (n == 1) return complex->d_out(src);
    auto it = higher.find(n);
    if (it == higher.end()) return nullptr;
    auto jt = it->second.find(src);
    return jt == it->second.end() ? nullptr : &jt->second;
}

MatF2 SzaboDifferential::layer_block_or_zero(int n, Bigrading src) const {
    if (const MatF2* m = layer_block(n, src)) return *m;
    const BasisBlock* sb = complex->block(src);
    const BasisBlock* tb = complex->block(target(src, n));
    return MatF2(tb ? tb->gens.size() : 0, sb ? sb->gens.size() : 0);
}

std::string SquareZeroWitness::to_string() const {
    if (ok) return "delta^2 = 0";
    std::ostringstream os;
    os << "delta^2 != 0 at (t=" << src.t << ", q=" << src.q << "), total t-shift "
       << total_shift << ", generator column " << col << " row " << row;
    return os.str();
}

SzaboDifferential build_szabo(const PlanarDiagram& d, uint64_t seed,
                              SzaboRuleOptions options,
                              const std::map<int, bool>& overrides) {
    auto cx = std::make_shared<ChainComplex>(build_complex(d, Ring::F2));
    return build_szabo(cx, seed, options, overrides);
}

namespace {

// table-driven assembly: layer 2 from canonical-key lookups, layers >= 3 zero
void build_layer2_from_table(SzaboDifferential& out, const ChainComplex& cx,
                             const ConfigClassifier& cls,
                             const std::map<std::string, int>& table) {
    const CubeGeometry& g = *cx.geom;
    const PlanarDiagram& d = g.diagram();
    int n = g.n();
    int np = d.n_plus(), nm = d.n_minus();
    uint32_t full = n >= 32 ? ~uint32_t(0) : (uint32_t(1) << n) - 1;
    auto& layer = out.higher[2];

    for (uint32_t u = 0; u <= full; ++u) {
        uint32_t zeros = full & ~u;
        int cu = g.circles(u);
        int wu = std::popcount(u);
        int t = wu - nm;
        for (uint32_t rest1 = zeros; rest1; rest1 &= rest1 - 1) {
            int i = std::countr_zero(rest1);
            for (uint32_t rest2 = rest1 & (rest1 - 1); rest2; rest2 &= rest2 - 1) {
                int j = std::countr_zero(rest2);
                uint32_t S = (uint32_t(1) << i) | (uint32_t(1) << j);
                ConfigGeometry cd = analyze_config(g, cls, u, S);
                if (!cd.connected) continue;
                uint32_t v = u | S;
                CanonConfig cc = canonicalize_config(g, cd, u, v);
                int s = static_cast<int>(cd.start.size());
                int e = static_cast<int>(cd.end.size());

                // cache firing output terms per active-input pattern
                std::map<uint32_t, std::vector<uint32_t>> fires;
                for (uint32_t mask = 0; mask < (uint32_t(1) << cu); ++mask) {
                    uint32_t in_x = cd.in_x_of(mask);
                    auto fit = fires.find(in_x);
                    if (fit == fires.end()) {
                        std::vector<uint32_t> terms;
                        for (uint32_t om : allowed_out_masks(s, e, 2, in_x)) {
                            auto it = table.find(config_key(cc, cd, in_x, om));
                            if (it == table.end())
                                throw std::runtime_error(
                                    "configuration classification failure (unseen "
                                    "key): " +
                                    serialize_config(g, u, S));
                            if (it->second & 1) terms.push_back(om);
                        }
                        fit = fires.emplace(in_x, std::move(terms)).first;
                    }
                    if (fit->second.empty()) continue;
                    int qsrc = (cu - 2 * std::popcount(mask)) + wu + np - 2 * nm;
                    Bigrading src{t, qsrc};
                    const BasisBlock* sblk = cx.block(src);
                    const BasisBlock* tblk = cx.block(SzaboDifferential::target(src, 2));
                    if (!sblk || !tblk)
                        throw std::runtime_error("build_szabo: missing block");
                    auto mit = layer.find(src);
                    if (mit == layer.end())
                        mit = layer.emplace(src,
                                            MatF2(tblk->gens.size(), sblk->gens.size()))
                                  .first;
                    MatF2& matrix = mit->second;
                    uint32_t base = cd.base_of(g, u, mask);
                    int col = sblk->index_of(u, mask);
                    for (uint32_t om : fit->second) {
                        int row = tblk->index_of(v, cd.full_mask(base, om));
                        if (col < 0 || row < 0)
                            throw std::runtime_error("build_szabo: generator missing");
                        matrix.flip(row, col);
                    }
                }
            }
        }
    }
}

}  // namespace

SzaboDifferential build_szabo(std::shared_ptr<const ChainComplex> cx,
                              uint64_t seed, SzaboRuleOptions options,
                              const std::map<int, bool>& overrides) {
    const CubeGeometry& g = *cx->geom;
    const PlanarDiagram& d = g.diagram();
    SzaboDifferential out;
    out.complex = cx;
    out.orientation_seed = seed;
    out.diagram_hash = d.hash();
    out.options = options;

    ConfigClassifier cls(g, seed, options);
    for (auto [crossing, rev] : overrides) cls.override_orientation(crossing, rev);

    if (options.k2_table) {
        build_layer2_from_table(out, *cx, cls, *options.k2_table);
        for (auto& [k, layer] : out.higher)
            for (auto it = layer.begin(); it != layer.end();)
                it = it->second.is_zero() ? layer.erase(it) : std::next(it);
        for (auto it = out.higher.begin(); it != out.higher.end();)
            it = it->second.empty() ? out.higher.erase(it) : std::next(it);
        return out;
    }

    int n = g.n();
    int np = d.n_plus(), nm = d.n_minus();
    uint32_t full = n >= 32 ? ~uint32_t(0) : (uint32_t(1) << n) - 1;

    std::vector<uint32_t> terms;
    std::vector<int> pass_map;  // active-complement circle transport u -> v

    for (uint32_t u = 0; u <= full; ++u) {
        uint32_t zeros = full & ~u;
        int cu = g.circles(u);
        int wu = std::popcount(u);
        int t = wu - nm;
        // enumerate subsets of the zero bits with >= 2 elements
        for (uint32_t S = zeros; S; S = (S - 1) & zeros) {
            int k = std::popcount(S);
            if (k < 2) continue;
            ConfigClass cfg = cls.classify(u, S);
            if (cfg.type == ConfigType::Zero) continue;

            uint32_t v = u | S;
            int cv = g.circles(v);

            // passive transport by min-arc matching
            pass_map.assign(cu, -1);
            uint32_t active_u = 0;
            for (int c : cfg.start) active_u |= uint32_t(1) << c;
            for (int c = 0; c < cu; ++c) {
                if ((active_u >> c) & 1) continue;
                int ma = g.circle_min_arc(u, c);
                for (int tc = 0; tc < cv; ++tc)
                    if (g.circle_min_arc(v, tc) == ma) {
                        pass_map[c] = tc;
                        break;
                    }
                if (pass_map[c] < 0)
                    throw std::runtime_error("build_szabo: passive circle lost: " +
                                             serialize_config(g, u, S));
            }

            auto& layer = out.higher[k];
            for (uint32_t mask = 0; mask < (uint32_t(1) << cu); ++mask) {
                uint32_t in_x = 0;
                for (std::size_t i = 0; i < cfg.start.size(); ++i)
                    if ((mask >> cfg.start[i]) & 1) in_x |= uint32_t(1) << i;
                terms.clear();
                apply_config(cfg, in_x, terms);
                if (terms.empty()) continue;

                int qsrc = (cu - 2 * std::popcount(mask)) + wu + np - 2 * nm;
                Bigrading src{t, qsrc};
                const BasisBlock* sblk = cx->block(src);
                Bigrading tgt = SzaboDifferential::target(src, k);
                const BasisBlock* tblk = cx->block(tgt);
                if (!sblk || !tblk)
                    throw std::runtime_error("build_szabo: missing block");
                auto mit = layer.find(src);
                if (mit == layer.end())
                    mit = layer.emplace(src, MatF2(tblk->gens.size(), sblk->gens.size()))
                              .first;
                MatF2& matrix = mit->second;
                int col = sblk->index_of(u, mask);

                uint32_t base = 0;
                for (int c = 0; c < cu; ++c)
                    if (pass_map[c] >= 0 && ((mask >> c) & 1))
                        base |= uint32_t(1) << pass_map[c];
                for (uint32_t term : terms) {
                    uint32_t vmask = base;
                    for (std::size_t i = 0; i < cfg.end.size(); ++i)
                        if ((term >> i) & 1) vmask |= uint32_t(1) << cfg.end[i];
                    int row = tblk->index_of(v, vmask);
                    if (row < 0)
                        throw std::runtime_error("build_szabo: target generator missing");
                    matrix.flip(row, col);
                }
            }
        }
    }
    // drop all-zero blocks (cancelled entries)
    for (auto& [k, layer] : out.higher)
        for (auto it = layer.begin(); it != layer.end();)
            it = it->second.is_zero() ? layer.erase(it) : std::next(it);
    for (auto it = out.higher.begin(); it != out.higher.end();)
        it = it->second.empty() ? out.higher.erase(it) : std::next(it);
    return out;
}

SquareZeroWitness verify_square_zero(const SzaboDifferential& s) {
    const ChainComplex& cx = *s.complex;
    int nmax = s.max_layer();
    for (const auto& [src, blk] : cx.blocks) {
        (void)blk;
        for (int m = 2; m <= 2 * nmax; ++m) {
            // composite layer_j after layer_i with i + j = m
            MatF2 acc;
            bool any = false;
            for (int i = std::max(1, m - nmax); i <= std::min(nmax, m - 1); ++i) {
                int j = m - i;
                const MatF2* first = s.layer_block(i, src);
                if (!first) continue;
                Bigrading mid = SzaboDifferential::target(src, i);
                const MatF2* second = s.layer_block(j, mid);
                if (!second) continue;
                MatF2 prod = second->multiply(*first);
                if (!any) {
                    acc = std::move(prod);
                    any = true;
                } else {
                    for (std::size_t r = 0; r < acc.rows(); ++r) acc.row(r) ^= prod.row(r);
                }
            }
            if (!any) continue;
            for (std::size_t r = 0; r < acc.rows(); ++r) {
                if (!acc.row(r).is_zero()) {
                    SquareZeroWitness w;
                    w.ok = false;
                    w.src = src;
                    w.total_shift = m;
                    w.row = static_cast<int>(r);
                    w.col = static_cast<int>(acc.row(r).lowest());
                    return w;
                }
            }
        }
    }
    return SquareZeroWitness{};
}

bool orientation_independence_check(const PlanarDiagram& d,
                                    const std::vector<uint64_t>& seeds,
                                    SzaboRuleOptions options) {
    if (seeds.size() < 2)
        throw std::runtime_error("orientation_independence_check: need >= 2 seeds");
    std::optional<std::vector<Poly2>> reference;
    auto cx = std::make_shared<ChainComplex>(build_complex(d, Ring::F2));
    for (uint64_t seed : seeds) {
        auto sz = build_szabo(cx, seed, options);
        auto pages = compute_pages(FilteredComplex{cx, std::move(sz)});
        std::vector<Poly2> polys;
        for (const auto& p : pages) polys.push_back(poincare_polynomial(p));
        if (!reference) {
            reference = std::move(polys);
        } else if (*reference != polys) {
            return false;
        }
    }
    return true;
}

}  // namespace szk
