#pragma once

// The geometric differential: Khovanov d plus higher layers assigned to
// special surgery configurations. Layer n raises t by n and q by 2n-2; the
// sum of all layers squares to zero.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "szk/config.hpp"
#include "szk/cube.hpp"

namespace szk {

struct SzaboDifferential {
    std::shared_ptr<const ChainComplex> complex;  // F2 Khovanov complex
    uint64_t orientation_seed = 0;
    uint64_t diagram_hash = 0;
    SzaboRuleOptions options;
    // layers[n] for n >= 2; layer 1 is the complex's own differential
    std::map<int, std::map<Bigrading, MatF2>> higher;

    int max_layer() const;
    // Layer-n block leaving (t, q); nullptr when structurally zero.
    const MatF2* layer_block(int n, Bigrading src) const;
    // Same, materialized with correct dimensions.
    MatF2 layer_block_or_zero(int n, Bigrading src) const;

    static Bigrading target(Bigrading src, int n) {
        return Bigrading{src.t + n, src.q + 2 * n - 2};
    }
};

struct SquareZeroWitness {
    bool ok = true;
    Bigrading src{};     // block where the first failure occurs
    int total_shift = 0; // t-shift of the failing composite
    int col = -1, row = -1;
    std::string to_string() const;
};

SzaboDifferential build_szabo(
    const PlanarDiagram& d, uint64_t orientation_seed,
    SzaboRuleOptions options = {},
    const std::map<int, bool>& orientation_overrides = {});

SzaboDifferential build_szabo(
    std::shared_ptr<const ChainComplex> f2_complex, uint64_t orientation_seed,
    SzaboRuleOptions options = {},
    const std::map<int, bool>& orientation_overrides = {});

SquareZeroWitness verify_square_zero(const SzaboDifferential& s);

// Builds the differential for each seed, computes all pages, and reports
// whether every page's rank table agrees across seeds (chain-level matrices
// may differ; only page data is compared).
bool orientation_independence_check(const PlanarDiagram& d,
                                    const std::vector<uint64_t>& seeds,
                                    SzaboRuleOptions options = {});

}  // namespace szk
