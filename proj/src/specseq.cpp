#include "szk/specseq.hpp"

#include <algorithm>
#include <sstream>

namespace szk {

namespace {

// sorted symmetric difference
void xor_into(std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    a.swap(out);
}

}  // namespace

const PageBlock* Page::block(Bigrading deg) const {
    auto it = blocks.find(deg);
    return it == blocks.end() ? nullptr : &it->second;
}

long long Page::rank(Bigrading deg) const {
    const PageBlock* b = block(deg);
    return b ? b->rank : 0;
}

MatF2 Page::d_or_zero(Bigrading deg) const {
    auto it = d.find(deg);
    if (it != d.end()) return it->second;
    Bigrading tgt{deg.t + index, deg.q + 2 * index - 2};
    return MatF2(rank(tgt), rank(deg));
}

Poly2 poincare_polynomial(const Page& p) {
    Poly2 out;
    for (const auto& [deg, blk] : p.blocks)
        if (blk.rank) out[{deg.t, deg.q}] = blk.rank;
    return out;
}

PageContext::PageContext(const FilteredComplex& fc,
                         const std::vector<int>& extra_qshifts)
    : fc_(fc) {
    // diagonals carrying E_2
    auto h = fc_.complex->homology_poincare();
    std::vector<int> diags;
    for (auto [tq, r] : h) {
        (void)r;
        diags.push_back(tq.second - 2 * tq.first);
    }
    std::sort(diags.begin(), diags.end());
    diags.erase(std::unique(diags.begin(), diags.end()), diags.end());
    std::vector<int> all = diags;
    for (int shift : extra_qshifts)
        for (int c : diags) all.push_back(c + shift);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (int c : all) reduce_diagonal(c);
    for (const auto& cl : classes_)
        if (cl.death > 0) max_page_ = std::max(max_page_, cl.death + 1);
}

void PageContext::reduce_diagonal(int c) {
    if (reduced_.count(c)) return;
    reduced_[c] = true;
    const ChainComplex& cx = *fc_.complex;

    // levels on this diagonal, deepest (largest t) first
    std::vector<Bigrading> levels;
    for (const auto& [deg, blk] : cx.blocks) {
        (void)blk;
        if (deg.q - 2 * deg.t == c) levels.push_back(deg);
    }
    if (levels.empty()) return;
    std::sort(levels.begin(), levels.end(),
              [](Bigrading a, Bigrading b) { return a.t > b.t; });

    std::map<Bigrading, int> offset;
    int total = 0;
    for (Bigrading deg : levels) {
        offset[deg] = total;
        total += static_cast<int>(cx.block(deg)->gens.size());
    }
    std::vector<Bigrading> deg_of(total);
    std::vector<int> pos_of(total);
    for (Bigrading deg : levels) {
        int base = offset[deg];
        int dim = static_cast<int>(cx.block(deg)->gens.size());
        for (int i = 0; i < dim; ++i) {
            deg_of[base + i] = deg;
            pos_of[base + i] = i;
        }
    }

    int nmax = fc_.extra.max_layer();
    auto column_of = [&](int j) {
        std::vector<int> col;
        Bigrading src = deg_of[j];
        for (int n = 1; n <= nmax; ++n) {
            const MatF2* m = fc_.extra.layer_block(n, src);
            if (!m) continue;
            Bigrading tgt = SzaboDifferential::target(src, n);
            auto it = offset.find(tgt);
            if (it == offset.end()) {
                // target block empty: matrix must be trivially zero
                continue;
            }
            for (std::size_t r = 0; r < m->rows(); ++r)
                if (m->get(r, pos_of[j])) col.push_back(it->second + static_cast<int>(r));
        }
        std::sort(col.begin(), col.end());
        return col;
    };

    std::vector<std::vector<int>> R(total), V(total);
    std::vector<int> owner(total, -1);
    for (int j = 0; j < total; ++j) {
        R[j] = column_of(j);
        V[j] = {j};
        while (!R[j].empty()) {
            int low = R[j].back();
            if (owner[low] < 0) break;
            xor_into(R[j], R[owner[low]]);
            xor_into(V[j], V[owner[low]]);
        }
        if (!R[j].empty()) owner[R[j].back()] = j;
    }
    // targets adopt the reduced boundary columns as canonical representatives
    for (int r = 0; r < total; ++r) {
        if (owner[r] < 0) continue;
        if (!R[r].empty())
            throw std::runtime_error("page reduction: pivot row column not a cycle");
        V[r] = R[owner[r]];
    }

    auto to_chain = [&](const std::vector<int>& idx) {
        Chain ch;
        for (int i : idx) {
            Bigrading deg = deg_of[i];
            auto it = ch.find(deg);
            if (it == ch.end()) {
                VecF2 v(cx.block(deg)->gens.size());
                v.set(pos_of[i], true);
                ch.emplace(deg, std::move(v));
            } else {
                it->second.flip(pos_of[i]);
            }
        }
        return ch;
    };

    std::vector<int> class_of(total, -1);
    for (int j = 0; j < total; ++j) {
        IntervalClass cl;
        cl.deg = deg_of[j];
        if (!R[j].empty()) {
            int r = R[j].back();
            cl.death = deg_of[r].t - deg_of[j].t;
            cl.is_source = true;
            cl.partner = r;  // resolved to class id below
            cl.rep = to_chain(V[j]);
        } else if (owner[j] >= 0) {
            cl.death = deg_of[j].t - deg_of[owner[j]].t;
            cl.is_source = false;
            cl.partner = owner[j];
            cl.rep = to_chain(V[j]);
        } else {
            cl.death = -1;
            cl.partner = -1;
            cl.rep = to_chain(V[j]);
        }
        class_of[j] = static_cast<int>(classes_.size());
        classes_.push_back(std::move(cl));
    }
    for (int j = 0; j < total; ++j) {
        IntervalClass& cl = classes_[class_of[j]];
        if (cl.partner >= 0) cl.partner = class_of[cl.partner];
        by_deg_[deg_of[j]].class_ids.push_back(class_of[j]);
    }
    // lead index per bigrading for coordinate extraction: echelonize the
    // class leads once, tracking the coefficient combinations
    for (Bigrading deg : levels) {
        auto& li = lead_index_[deg];
        for (int id : by_deg_[deg].class_ids) {
            const Chain& rep = classes_[id].rep;
            auto it = rep.find(deg);
            if (it == rep.end())
                throw std::runtime_error("page reduction: representative lost its lead");
            li.class_ids.push_back(id);
        }
        std::size_t nc = li.class_ids.size();
        for (std::size_t i = 0; i < nc; ++i) {
            VecF2 row = classes_[li.class_ids[i]].rep.at(deg);
            VecF2 cmb(nc);
            cmb.set(i, true);
            for (std::size_t j = 0; j < li.ech_rows.size(); ++j) {
                if (row.get(li.ech_rows[j].lowest())) {
                    row ^= li.ech_rows[j];
                    cmb ^= li.ech_combo[j];
                }
            }
            if (row.is_zero())
                throw std::runtime_error("page reduction: class leads dependent");
            li.ech_rows.push_back(std::move(row));
            li.ech_combo.push_back(std::move(cmb));
        }
    }
}

std::vector<int> PageContext::alive(Bigrading deg, int page) const {
    std::vector<int> out;
    auto it = by_deg_.find(deg);
    if (it == by_deg_.end()) return out;
    for (int id : it->second.class_ids) {
        const IntervalClass& cl = classes_[id];
        if (cl.death < 0 || cl.death >= page) out.push_back(id);
    }
    return out;
}

VecF2 PageContext::page_coords(const Chain& w, Bigrading deg, int page) const {
    auto itw = w.find(deg);
    auto alive_ids = alive(deg, page);
    VecF2 out(alive_ids.size());
    if (itw == w.end() || itw->second.is_zero()) {
        // leading component zero: the class is zero (deeper terms don't matter)
        return out;
    }
    auto li_it = lead_index_.find(deg);
    if (li_it == lead_index_.end())
        throw std::runtime_error("page_coords: diagonal not reduced at this block");
    const LeadIndex& li = li_it->second;

    VecF2 rem = itw->second;
    VecF2 coeff(li.class_ids.size());
    for (std::size_t j = 0; j < li.ech_rows.size() && !rem.is_zero(); ++j) {
        if (rem.get(li.ech_rows[j].lowest())) {
            rem ^= li.ech_rows[j];
            coeff ^= li.ech_combo[j];
        }
    }
    if (!rem.is_zero())
        throw std::runtime_error("page_coords: lead component outside class span");

    // map coefficients to alive classes; dead sources must not appear
    std::map<int, std::size_t> alive_pos;
    for (std::size_t i = 0; i < alive_ids.size(); ++i) alive_pos[alive_ids[i]] = i;
    for (std::size_t i = 0; i < li.class_ids.size(); ++i) {
        if (!coeff.get(i)) continue;
        int id = li.class_ids[i];
        const IntervalClass& cl = classes_[id];
        bool is_alive = cl.death < 0 || cl.death >= page;
        if (is_alive) {
            out.set(alive_pos.at(id), true);
        } else if (cl.is_source) {
            throw std::runtime_error(
                "page_coords: chain carries a dead-source component (not a valid "
                "page element)");
        }
        // dead targets are boundaries on this page: coefficient drops
    }
    return out;
}

std::vector<Page> compute_pages(const FilteredComplex& fc, int max_page) {
    auto ctx = std::make_shared<PageContext>(fc, std::vector<int>{-2});
    int tspan = 0;
    {
        int tmin = 1 << 30, tmax = -(1 << 30);
        for (const auto& [deg, blk] : fc.complex->blocks) {
            (void)blk;
            tmin = std::min(tmin, deg.t);
            tmax = std::max(tmax, deg.t);
        }
        tspan = tmax >= tmin ? tmax - tmin : 0;
    }
    int limit = max_page > 0 ? max_page : std::max(tspan + 1, 2);
    int last = std::min(limit, std::max(2, ctx->max_page_needed()));

    std::vector<Page> pages;
    for (int n = 2; n <= last; ++n) {
        Page p;
        p.index = n;
        p.ctx = ctx;
        std::map<Bigrading, std::map<int, int>> position;  // deg -> class id -> pos
        for (int id = 0; id < ctx->n_classes(); ++id) {
            const IntervalClass& cl = ctx->cls(id);
            if (!(cl.death < 0 || cl.death >= n)) continue;
            auto& blk = p.blocks[cl.deg];
            blk.deg = cl.deg;
            position[cl.deg][id] = blk.rank;
            blk.classes.push_back(id);
            ++blk.rank;
        }
        for (int id = 0; id < ctx->n_classes(); ++id) {
            const IntervalClass& cl = ctx->cls(id);
            if (!cl.is_source || cl.death != n) continue;
            const IntervalClass& tgt = ctx->cls(cl.partner);
            Bigrading sdeg = cl.deg, tdeg = tgt.deg;
            auto& m = p.d[sdeg];
            if (m.rows() == 0 && m.cols() == 0)
                m = MatF2(p.blocks[tdeg].rank, p.blocks[sdeg].rank);
            m.set(position[tdeg][cl.partner], position[sdeg][id], true);
        }
        pages.push_back(std::move(p));
    }
    return pages;
}

const MatF2* ChainEndo::block(int layer, Bigrading src) const {
    auto it = layers.find(layer);
    if (it == layers.end()) return nullptr;
    auto jt = it->second.find(src);
    return jt == it->second.end() ? nullptr : &jt->second;
}

Chain ChainEndo::apply(const Chain& z) const {
    Chain out;
    for (const auto& [deg, vec] : z) {
        for (const auto& [layer, blocks] : layers) {
            auto it = blocks.find(deg);
            if (it == blocks.end()) continue;
            VecF2 y = it->second.apply(vec);
            if (y.is_zero()) continue;
            Bigrading tgt = target(deg, layer);
            auto [jt, inserted] = out.emplace(tgt, y);
            if (!inserted) jt->second ^= y;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::optional<std::string> ChainEndo::commutes_with(const SzaboDifferential& s) const {
    const ChainComplex& cx = *complex;
    int nmax = s.max_layer();
    int fmax = layers.empty() ? 0 : layers.rbegin()->first;
    for (const auto& [src, blk] : cx.blocks) {
        (void)blk;
        for (int total = 1; total <= nmax + fmax; ++total) {
            // sum over (f-layer a, delta-layer b), a + b = total, both orders
            std::optional<MatF2> acc;
            auto add = [&](MatF2 m) {
                if (!acc) {
                    acc = std::move(m);
                } else {
                    for (std::size_t r = 0; r < acc->rows(); ++r)
                        acc->row(r) ^= m.row(r);
                }
            };
            for (int a = 0; a <= total; ++a) {
                int b = total - a;
                if (b < 1) continue;
                // f_a after delta_b
                const MatF2* db = s.layer_block(b, src);
                if (db) {
                    Bigrading mid = SzaboDifferential::target(src, b);
                    if (const MatF2* fa = block(a, mid)) add(fa->multiply(*db));
                }
                // delta_b after f_a
                if (const MatF2* fa = block(a, src)) {
                    Bigrading mid = target(src, a);
                    if (const MatF2* db2 = s.layer_block(b, mid)) add(db2->multiply(*fa));
                }
            }
            if (acc && !acc->is_zero()) {
                std::ostringstream os;
                os << "chain map fails to commute at (t=" << src.t << ", q=" << src.q
                   << "), total shift " << total;
                return os.str();
            }
        }
    }
    return std::nullopt;
}

MatF2 PageMap::block_or_zero(const Page& p, Bigrading deg) const {
    auto it = blocks.find(deg);
    if (it != blocks.end()) return it->second;
    Bigrading tgt{deg.t + dt, deg.q + dq};
    return MatF2(p.rank(tgt), p.rank(deg));
}

std::vector<PageMap> induce_page_map(const ChainEndo& f,
                                     const std::vector<Page>& pages) {
    std::vector<PageMap> out;
    if (pages.empty()) return out;
    int dq0 = f.dq0;
    for (const auto& p : pages) {
        const PageContext& ctx = *p.ctx;
        PageMap pm;
        pm.page = p.index;
        pm.dt = 0;
        pm.dq = dq0;
        for (const auto& [deg, blk] : p.blocks) {
            Bigrading tgt{deg.t, deg.q + dq0};
            auto tgt_alive = ctx.alive(tgt, p.index);
            if (blk.rank == 0) continue;
            MatF2 m(tgt_alive.size(), blk.rank);
            bool nonzero = false;
            for (int i = 0; i < blk.rank; ++i) {
                const IntervalClass& cl = ctx.cls(blk.classes[i]);
                Chain w = f.apply(cl.rep);
                VecF2 coords = ctx.page_coords(w, tgt, p.index);
                for (std::size_t r = 0; r < coords.size(); ++r)
                    if (coords.get(r)) {
                        m.set(r, i, true);
                        nonzero = true;
                    }
            }
            if (nonzero) pm.blocks.emplace(deg, std::move(m));
        }
        out.push_back(std::move(pm));
    }
    return out;
}

std::string LiftReport::to_string() const {
    if (lifts) return "lifts: the operation extends to every computed page";
    std::ostringstream os;
    os << "fails at page " << failure_page << ", block (t=" << failure_block.t
       << ", q=" << failure_block.q << "), witness basis vector " << witness_index
       << "; d_n f_n " << (composite_d_f.is_zero() ? "= 0" : "!= 0") << ", f_n d_n "
       << (composite_f_d.is_zero() ? "= 0" : "!= 0");
    return os.str();
}

LiftReport check_operation_lift(const PageMap& f2, const std::vector<Page>& pages) {
    LiftReport report;
    if (pages.empty()) return report;

    PageMap cur = f2;
    for (std::size_t pi = 0; pi < pages.size(); ++pi) {
        const Page& p = pages[pi];
        cur.page = p.index;
        report.maps.push_back(cur);
        // commutation f_n d_n = d_n f_n on every block
        for (const auto& [deg, blk] : p.blocks) {
            if (blk.rank == 0) continue;
            Bigrading dtgt{deg.t + p.index, deg.q + 2 * p.index - 2};
            Bigrading ftgt{deg.t + cur.dt, deg.q + cur.dq};
            Bigrading both{dtgt.t + cur.dt, dtgt.q + cur.dq};
            MatF2 dn = p.d_or_zero(deg);
            MatF2 fn = cur.block_or_zero(p, deg);
            MatF2 dn_after = p.d_or_zero(ftgt);
            MatF2 fn_after = cur.block_or_zero(p, dtgt);
            (void)both;
            MatF2 fd = fn_after.multiply(dn);   // f after d
            MatF2 df = dn_after.multiply(fn);   // d after f
            if (!(fd == df)) {
                // locate a witness column
                for (std::size_t cidx = 0; cidx < fd.cols(); ++cidx) {
                    VecF2 a(fd.rows()), b(fd.rows());
                    for (std::size_t r = 0; r < fd.rows(); ++r) {
                        if (fd.get(r, cidx)) a.set(r, true);
                        if (df.get(r, cidx)) b.set(r, true);
                    }
                    if (!(a == b)) {
                        report.lifts = false;
                        report.failure_page = p.index;
                        report.failure_block = deg;
                        report.witness_index = static_cast<int>(cidx);
                        report.composite_f_d = a;
                        report.composite_d_f = b;
                        return report;
                    }
                }
            }
        }
        if (pi + 1 == pages.size()) break;
        // restrict to the classes alive on the next page
        const Page& next = pages[pi + 1];
        const PageContext& ctx = *p.ctx;
        PageMap nxt;
        nxt.page = next.index;
        nxt.dt = cur.dt;
        nxt.dq = cur.dq;
        for (const auto& [deg, blk] : next.blocks) {
            Bigrading ftgt{deg.t + cur.dt, deg.q + cur.dq};
            const PageBlock* cur_src = p.block(deg);
            const PageBlock* cur_tgt = p.block(ftgt);
            const PageBlock* next_tgt = next.block(ftgt);
            if (!cur_src || blk.rank == 0) continue;
            MatF2 fn = cur.block_or_zero(p, deg);
            // positions of surviving classes inside the page-n bases
            auto pos_in = [&](const PageBlock* pb, int id) {
                if (!pb) return -1;
                for (std::size_t i = 0; i < pb->classes.size(); ++i)
                    if (pb->classes[i] == id) return static_cast<int>(i);
                return -1;
            };
            std::size_t tgt_rank = next_tgt ? next_tgt->rank : 0;
            MatF2 m(tgt_rank, blk.rank);
            bool nonzero = false;
            for (int i = 0; i < blk.rank; ++i) {
                int src_pos = pos_in(cur_src, blk.classes[i]);
                for (std::size_t r = 0; r < tgt_rank; ++r) {
                    int tgt_pos = pos_in(cur_tgt, next_tgt->classes[r]);
                    if (src_pos >= 0 && tgt_pos >= 0 && fn.get(tgt_pos, src_pos)) {
                        m.set(r, i, true);
                        nonzero = true;
                    }
                }
                (void)ctx;
            }
            if (nonzero) nxt.blocks.emplace(deg, std::move(m));
        }
        cur = std::move(nxt);
    }
    return report;
}

}  // namespace szk
