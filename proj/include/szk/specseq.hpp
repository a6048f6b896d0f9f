#pragma once

// Spectral sequence of the t-filtration for (CKh, d + delta).
//
// Implementation: per q-diagonal (constant q - 2t, the lines preserved by
// every layer), the filtered complex over F2 splits into interval pieces
// after a filtration-compatible change of basis. A persistence-style column
// reduction computes that splitting once; every page's blocks, differentials
// and representatives are read off the intervals:
//   - a bar z -> w of length L contributes a class to E_n at both endpoints
//     for n <= L and a rank-1 d_L arrow between them,
//   - unpaired cycles survive to E_infinity.
// Representatives carry their correction tails, so chain maps can be applied
// to them directly and induced page maps become basis restrictions.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "szk/cube.hpp"
#include "szk/szabo.hpp"

namespace szk {

struct FilteredComplex {
    std::shared_ptr<const ChainComplex> complex;  // F2
    SzaboDifferential extra;                      // layers n >= 2 (layer 1 = d)
};

// Chain supported on one q-diagonal: component vectors per bigraded block.
using Chain = std::map<Bigrading, VecF2>;

struct PageClassRef {
    Bigrading deg;
    int index = -1;  // position in the page block basis
};

class PageContext;  // shared reduction state

struct PageBlock {
    Bigrading deg;
    int rank = 0;
    // global class ids (into PageContext) of the basis, in canonical order
    std::vector<int> classes;
};

struct Page {
    int index = 2;
    std::shared_ptr<const PageContext> ctx;
    std::map<Bigrading, PageBlock> blocks;
    // d_n arrows with nonzero rank: source block -> matrix into target block
    std::map<Bigrading, MatF2> d;

    const PageBlock* block(Bigrading deg) const;
    long long rank(Bigrading deg) const;
    MatF2 d_or_zero(Bigrading deg) const;
};

Poly2 poincare_polynomial(const Page& p);

// Explicit interval data for one diagonal class.
struct IntervalClass {
    Bigrading deg;      // leading bigrading
    int death = -1;     // page at which the class dies; -1 = survives
    bool is_source = false;  // dies as the source of a d_death arrow
    int partner = -1;   // global class id of the bar partner (or -1)
    Chain rep;          // representative with correction tail
};

class PageContext {
public:
    // Reduce the diagonals of fc that carry E_2 (and any extra diagonals
    // needed as targets of induced maps with the given q-shifts).
    PageContext(const FilteredComplex& fc, const std::vector<int>& extra_qshifts);

    const ChainComplex& complex() const { return *fc_.complex; }
    const FilteredComplex& filtered() const { return fc_; }

    int n_classes() const { return static_cast<int>(classes_.size()); }
    const IntervalClass& cls(int id) const { return classes_[id]; }

    // Classes alive at page n with leading bigrading deg, canonical order.
    std::vector<int> alive(Bigrading deg, int page) const;

    // Coordinates of a chain's page-n class over alive(deg, page). Throws
    // when the chain carries a dead-source component at the leading level
    // (i.e. it does not represent a page-n element).
    VecF2 page_coords(const Chain& w, Bigrading deg, int page) const;

    bool diagonal_reduced(int c) const { return reduced_.count(c) > 0; }
    int max_page_needed() const { return max_page_; }

private:
    void reduce_diagonal(int c);

    FilteredComplex fc_;
    std::map<int, bool> reduced_;
    std::vector<IntervalClass> classes_;
    // (diagonal, level t) -> list of (lead generator row, class id), echelon order
    struct LevelBasis {
        std::vector<int> class_ids;  // all classes with this leading bigrading
    };
    std::map<Bigrading, LevelBasis> by_deg_;
    // per bigrading: echelonized class leads with coefficient tracking
    struct LeadIndex {
        std::vector<int> class_ids;
        std::vector<VecF2> ech_rows;   // echelonized lead combinations
        std::vector<VecF2> ech_combo;  // same row ops applied to identity
    };
    std::map<Bigrading, LeadIndex> lead_index_;
    int max_page_ = 2;

    friend std::vector<Page> compute_pages(const FilteredComplex&, int);
};

std::vector<Page> compute_pages(const FilteredComplex& fc, int max_page = -1);

// Page-level map data of one chain endomorphism (or operation).
struct PageMap {
    int page = 2;
    int dt = 0, dq = 0;  // bidegree
    std::map<Bigrading, MatF2> blocks;  // source deg -> matrix

    MatF2 block_or_zero(const Page& p, Bigrading deg) const;
};

// Chain endomorphism given by layers: layer j has bidegree (j, dq0 + 2j);
// with dq0 = -2 layer 0 is the basepoint shape (0,-2) and layer j >= 1 the
// (j, 2j-2) corrections. Used for X_Sz.
struct ChainEndo {
    std::shared_ptr<const ChainComplex> complex;
    int dq0 = -2;
    std::map<int, std::map<Bigrading, MatF2>> layers;

    const MatF2* block(int layer, Bigrading src) const;
    Bigrading target(Bigrading src, int layer) const {
        return Bigrading{src.t + layer, src.q + dq0 + 2 * layer};
    }
    // apply to a chain (sum over layers and components)
    Chain apply(const Chain& z) const;
    // commutes with the total differential of s? first failing block reported
    std::optional<std::string> commutes_with(const SzaboDifferential& s) const;
};

// Induce the page maps of a chain endomorphism commuting with d + delta.
std::vector<PageMap> induce_page_map(const ChainEndo& f,
                                     const std::vector<Page>& pages);

struct LiftReport {
    bool lifts = true;
    int failure_page = -1;
    Bigrading failure_block{};
    int witness_index = -1;          // basis vector in the failure block
    VecF2 composite_d_f;             // d_n f_n on the witness (target coords)
    VecF2 composite_f_d;             // f_n d_n on the witness
    std::vector<PageMap> maps;       // the forced maps f_n, page by page
    std::string to_string() const;
};

// Iteratively checks f_n d_n = d_n f_n, setting f_{n+1} = H(f_n, d_n); the
// first failure produces the witness. f2 must be given on page 2.
LiftReport check_operation_lift(const PageMap& f2, const std::vector<Page>& pages);

}  // namespace szk
