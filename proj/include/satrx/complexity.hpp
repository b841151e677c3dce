// SPDX-License-Identifier: Apache-2.0
//
// Real-squaring complexity model for the list detector: a ledger filled by
// actual runs plus the closed-form predictions it reconciles against.
//
// Units: one Euclidean-distance evaluation over d complex dimensions counts
// 2*d real squarings. The unique-vector count R at the GLO input is carried
// as-is, one unit per vector.

#ifndef SATRX_COMPLEXITY_HPP
#define SATRX_COMPLEXITY_HPP

#include <cstdint>
#include <vector>

namespace satrx {

struct IterationSet {
    int iglb = 1;  // global iterations
    int ible = 1;  // per-BLE inner iterations
    int iglo = 1;  // GLO refinement iterations
};

struct ComplexityLedger {
    std::uint64_t ble_squarings = 0;
    std::uint64_t glo_squarings = 0;
    // Unique major-list vectors per global round.
    std::vector<std::uint64_t> sort_unique_r;

    struct LvRecord {
        int global_round;    // 0-based
        int glo_iteration;   // 0-based
        int group;           // 0-based
        std::uint64_t lv;    // unique sub-vectors in that group's list
    };
    std::vector<LvRecord> per_iteration_lv;

    void add(const ComplexityLedger& other);
    std::uint64_t r_total() const;
    std::uint64_t lv_sum() const;
};

// K^e with an overflow check against 2^63.
std::uint64_t pow_u64_checked(std::uint64_t base, unsigned exp);

// C(B) with constant L_v = list_size and R = 0 (the nominal convention used
// for the published complexity tables).
std::uint64_t closed_form_c_nominal(int ble_count, const IterationSet& it, int k,
                                    const std::vector<int>& group_sizes, std::uint64_t list_size);

// C(B) evaluated with the per-iteration L_v and per-round R recorded in a
// ledger. Matches the counted squarings exactly by construction.
std::uint64_t closed_form_c_from_ledger(int ble_count, const IterationSet& it, int k,
                                        const std::vector<int>& group_sizes,
                                        const ComplexityLedger& ledger);

// C_JML = 2 M K^N.
std::uint64_t c_jml(int m, int n, int k);

// C(M)/C_JML * 100.
double c_rc_percent(std::uint64_t c_m, std::uint64_t c_jml_value);

struct CsaveResult {
    double exact_percent;   // (C(N) - C(M)) / C(N) * 100
    double approx_percent;  // R-free approximation
};

CsaveResult c_save_percent(const IterationSet& it, int n, int m, int k,
                           const std::vector<int>& group_sizes, std::uint64_t list_size);

struct ReconcileReport {
    std::uint64_t counted_ble = 0;
    std::uint64_t predicted_ble = 0;
    std::uint64_t counted_glo = 0;
    std::uint64_t predicted_glo = 0;
    std::uint64_t r_units = 0;  // 2 * sum of per-round R
    std::int64_t ble_diff = 0;
    std::int64_t glo_diff = 0;
    bool exact() const { return ble_diff == 0 && glo_diff == 0; }
};

// Compares the ledgered counts against the closed form evaluated with the
// ledger's own recorded values.
ReconcileReport reconcile(const ComplexityLedger& ledger, int ble_count, const IterationSet& it,
                          int k, const std::vector<int>& group_sizes);

// Iteration sets of the published 8PSK and 16APSK complexity studies.
const std::vector<IterationSet>& table1_iteration_sets();
const std::vector<IterationSet>& table2_iteration_sets();

}  // namespace satrx

#endif
