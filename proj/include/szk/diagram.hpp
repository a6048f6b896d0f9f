#pragma once

// Oriented knot/link diagrams in PD-code form.
//
// A crossing X(a,b,c,d) lists its four incident arcs counterclockwise
// starting from the incoming under-strand, so the under-strand runs a -> c
// and the over-strand occupies b and d. `over_from_d` records the
// over-strand direction (d -> b when true), which makes the crossing
// positive; b -> d makes it negative.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace szk {

struct ParseError : std::runtime_error {
    std::size_t position;  // byte offset into the input text
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct Crossing {
    int arc[4];         // slots (a, b, c, d), counterclockwise from incoming under
    bool over_from_d;   // true: over-strand flows d -> b (positive crossing)

    int sign() const { return over_from_d ? +1 : -1; }
};

class PlanarDiagram {
public:
    std::vector<Crossing> crossings;
    std::vector<int> free_loops;      // crossingless components, one arc id each
    std::optional<int> basepoint_arc; // defaults to the lowest arc id when unset

    int n_crossings() const { return static_cast<int>(crossings.size()); }
    int n_plus() const;
    int n_minus() const;

    // All arc identifiers in increasing order.
    std::vector<int> arcs() const;
    int max_arc() const;

    int basepoint() const;  // resolved default

    // Throws std::runtime_error on violated invariants (arc multiplicity,
    // inconsistent strand orientations).
    void validate() const;

    // Stable content hash (used for cache keys and provenance tags).
    uint64_t hash() const;
};

PlanarDiagram parse_pd(const std::string& text);
std::string render_pd(const PlanarDiagram& d);

// Closure of the braid (sigma_1 ... sigma_{p-1})^q on p strands; all
// crossings positive. p, q >= 2.
PlanarDiagram torus_knot(int p, int q);

// 0-crossing unknot (one free loop).
PlanarDiagram unknot();

struct KinkedDiagram {
    PlanarDiagram diagram;
    int kink_crossing;  // index of the added crossing
    int loop_arc;       // the self-arc of the kink
};

// Insert a positive Reidemeister-1 kink on the given arc. The kink
// crossing's 0-resolution splits off a disjoint circle (the loop arc).
KinkedDiagram insert_kink(const PlanarDiagram& d, int at_arc);

PlanarDiagram disjoint_union(const PlanarDiagram& a, const PlanarDiagram& b);

}  // namespace szk
