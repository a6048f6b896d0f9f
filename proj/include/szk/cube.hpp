#pragma once

// Resolution cube of a diagram: circles of each resolution, the bigraded
// Khovanov generator basis, and the Khovanov differential over F2 and Z.
//
// Gradings: t = |v| - n_minus,  q = (#1 - #x) + |v| + n_plus - 2 n_minus.
// Basis order: vertices by increasing bitmask value (crossing i = bit i),
// labelings by increasing mask value (circle j = bit j, set = label x),
// circles of a resolution sorted by minimal incident arc id.

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "szk/diagram.hpp"
#include "szk/linalg.hpp"

namespace szk {

enum class Ring { F2, Z };

struct Resolution {
    uint32_t bits = 0;
    int n = 0;
    int weight() const { return std::popcount(bits); }
    bool operator==(const Resolution&) const = default;
};

struct CircleDecomposition {
    Resolution resolution;
    int count = 0;
    // circle id per crossing slot (slot = 4*crossing + k); free loops occupy
    // ids after all crossing-incident circles get theirs
    std::vector<int> circle_of_slot;
    std::vector<int> min_arc;  // per circle id, canonical order key (increasing)
};

// Per-diagram resolved-cube geometry, shared by the complex builder, the
// configuration classifier and the basepoint machinery.
class CubeGeometry {
public:
    explicit CubeGeometry(const PlanarDiagram& d);

    const PlanarDiagram& diagram() const { return d_; }
    int n() const { return n_; }
    uint32_t vertices() const { return uint32_t(1) << n_; }

    int circles(uint32_t v) const { return n_circles_[v]; }
    // circle id at a crossing slot, canonical (min-arc sorted) numbering
    int circle_at(uint32_t v, int crossing, int slot) const {
        return circle_of_slot_[std::size_t(v) * slots_ + 4 * crossing + slot];
    }
    int circle_min_arc(uint32_t v, int circle) const {
        return min_arc_[std::size_t(v) * max_circles_ + circle];
    }
    int max_circles() const { return max_circles_; }
    // circle id containing a given arc (free loops included); -1 if absent
    int circle_of_arc(uint32_t v, int arc) const;

    // Cyclic order of the smoothed-crossing strand passages around each
    // circle of a resolution. `half` identifies the strand (0 = the strand
    // containing slot 0), `left` whether the crossing centre lies to the
    // left of the traversal.
    struct FootEvent {
        uint16_t crossing : 14;
        uint16_t half : 1;
        uint16_t left : 1;
    };
    // events of one circle, in traversal order
    std::vector<FootEvent> circle_events(uint32_t v, int circle) const;

    // Total number of Khovanov generators, sum over v of 2^circles(v).
    double estimated_generators() const;

private:
    PlanarDiagram d_;
    int n_ = 0;
    int slots_ = 0;
    int max_circles_ = 0;
    std::vector<uint16_t> circle_of_slot_;  // vertices x slots
    std::vector<uint8_t> n_circles_;
    std::vector<int32_t> min_arc_;          // vertices x max_circles
    // per vertex: 2n strand-passage events in traversal order (circles
    // concatenated in id order after canonical renumbering)
    std::vector<FootEvent> events_;         // vertices x (2n)
    std::vector<uint16_t> event_circle_;    // parallel: circle id per event
    // arc -> its two slots (crossing*4+k); free loops: -1
    std::vector<std::pair<int, int>> arc_slots_;
    std::vector<int> arc_ids_;

    friend CircleDecomposition resolve(const PlanarDiagram&, Resolution);
};

CircleDecomposition resolve(const PlanarDiagram& d, Resolution r);

struct KhGenerator {
    uint32_t vertex;
    uint32_t labels;  // bit j set = circle j carries x
    bool operator==(const KhGenerator&) const = default;
};

struct Bigrading {
    int t = 0, q = 0;
    auto operator<=>(const Bigrading&) const = default;
};

struct BasisBlock {
    Bigrading deg;
    std::vector<KhGenerator> gens;  // sorted by (vertex, labels)

    // index of a generator in this block; -1 when absent
    int index_of(uint32_t vertex, uint32_t labels) const;
};

// Laurent polynomial in q with integer coefficients.
using LaurentQ = std::map<int, long long>;
// Bigraded rank table: (t, q) -> rank.
using Poly2 = std::map<std::pair<int, int>, long long>;

std::string laurent_to_string(const LaurentQ& p);
std::string poly2_to_string(const Poly2& p);

class ChainComplex {
public:
    Ring ring = Ring::F2;
    std::shared_ptr<CubeGeometry> geom;
    std::map<Bigrading, BasisBlock> blocks;
    // Khovanov differential, bidegree (1, 0): per source (t,q) a matrix into
    // (t+1, q). Over Z the F2 matrix is the mod-2 reduction of the Z one.
    std::map<Bigrading, MatF2> d_f2;
    std::map<Bigrading, MatZ> d_z;

    const BasisBlock* block(Bigrading g) const;
    const MatF2* d_out(Bigrading g) const;  // null when absent (zero)
    MatF2 d_out_or_zero(Bigrading g) const;
    MatF2 d_in_or_zero(Bigrading g) const;  // differential entering (t,q)

    // F2 homology ranks per bidegree.
    Poly2 homology_poincare() const;
    void check_d_squared() const;  // throws on failure
};

struct MemoryCap {
    // cap on the total generator count (not bytes; generators dominate)
    std::optional<double> max_generators;
};

ChainComplex build_complex(const PlanarDiagram& d, Ring ring,
                           MemoryCap cap = {});
ChainComplex build_complex(std::shared_ptr<CubeGeometry> geom, Ring ring,
                           MemoryCap cap = {});

LaurentQ euler_characteristic(const ChainComplex& c);

}  // namespace szk
