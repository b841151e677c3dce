// SPDX-License-Identifier: Apache-2.0

#include "satrx/complexity.hpp"

#include <limits>
#include <stdexcept>

namespace satrx {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r) || r > (1ull << 63))
        throw std::overflow_error("complexity count exceeds 2^63; arbitrary precision required");
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r) || r > (1ull << 63))
        throw std::overflow_error("complexity count exceeds 2^63; arbitrary precision required");
    return r;
}

std::uint64_t group_search_sum(int k, const std::vector<int>& group_sizes) {
    std::uint64_t s = 0;
    for (int g : group_sizes)
        s = checked_add(s, pow_u64_checked(static_cast<std::uint64_t>(k), static_cast<unsigned>(g)));
    return s;
}

}  // namespace

void ComplexityLedger::add(const ComplexityLedger& other) {
    ble_squarings += other.ble_squarings;
    glo_squarings += other.glo_squarings;
    sort_unique_r.insert(sort_unique_r.end(), other.sort_unique_r.begin(),
                         other.sort_unique_r.end());
    per_iteration_lv.insert(per_iteration_lv.end(), other.per_iteration_lv.begin(),
                            other.per_iteration_lv.end());
}

std::uint64_t ComplexityLedger::r_total() const {
    std::uint64_t s = 0;
    for (auto r : sort_unique_r) s += r;
    return s;
}

std::uint64_t ComplexityLedger::lv_sum() const {
    std::uint64_t s = 0;
    for (const auto& rec : per_iteration_lv) s += rec.lv;
    return s;
}

std::uint64_t pow_u64_checked(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

std::uint64_t closed_form_c_nominal(int ble_count, const IterationSet& it, int k,
                                    const std::vector<int>& group_sizes,
                                    std::uint64_t list_size) {
    if (it.iglb < 1 || it.ible < 1 || it.iglo < 1)
        throw std::invalid_argument("iteration counts must be >= 1");
    std::uint64_t ble_term = checked_mul(
        checked_mul(static_cast<std::uint64_t>(ble_count), static_cast<std::uint64_t>(it.ible)),
        group_search_sum(k, group_sizes));
    std::uint64_t glo_term = 0;
    for (int g : group_sizes) {
        std::uint64_t t = checked_mul(list_size, static_cast<std::uint64_t>(g));
        t = checked_mul(t, pow_u64_checked(static_cast<std::uint64_t>(k), static_cast<unsigned>(g)));
        glo_term = checked_add(glo_term, t);
    }
    glo_term = checked_mul(glo_term, static_cast<std::uint64_t>(it.iglo));
    return checked_mul(2ull * static_cast<std::uint64_t>(it.iglb),
                       checked_add(ble_term, glo_term));
}

std::uint64_t closed_form_c_from_ledger(int ble_count, const IterationSet& it, int k,
                                        const std::vector<int>& group_sizes,
                                        const ComplexityLedger& ledger) {
    std::uint64_t ble_term =
        checked_mul(checked_mul(static_cast<std::uint64_t>(it.iglb),
                                checked_mul(static_cast<std::uint64_t>(ble_count),
                                            static_cast<std::uint64_t>(it.ible))),
                    group_search_sum(k, group_sizes));
    std::uint64_t glo_term = 0;
    for (const auto& rec : ledger.per_iteration_lv) {
        int gsz = group_sizes.at(static_cast<std::size_t>(rec.group));
        std::uint64_t t = checked_mul(rec.lv, static_cast<std::uint64_t>(gsz));
        t = checked_mul(t, pow_u64_checked(static_cast<std::uint64_t>(k), static_cast<unsigned>(gsz)));
        glo_term = checked_add(glo_term, t);
    }
    std::uint64_t r_term = ledger.r_total();
    return checked_mul(2ull, checked_add(checked_add(ble_term, glo_term), r_term));
}

std::uint64_t c_jml(int m, int n, int k) {
    if (m < 1 || n < 1 || k < 1) throw std::invalid_argument("c_jml: arguments must be positive");
    return checked_mul(2ull * static_cast<std::uint64_t>(m),
                       pow_u64_checked(static_cast<std::uint64_t>(k), static_cast<unsigned>(n)));
}

double c_rc_percent(std::uint64_t c_m, std::uint64_t c_jml_value) {
    if (c_jml_value == 0) throw std::invalid_argument("c_rc_percent: zero JML complexity");
    return 100.0 * static_cast<double>(c_m) / static_cast<double>(c_jml_value);
}

CsaveResult c_save_percent(const IterationSet& it, int n, int m, int k,
                           const std::vector<int>& group_sizes, std::uint64_t list_size) {
    std::uint64_t cn = closed_form_c_nominal(n, it, k, group_sizes, list_size);
    std::uint64_t cm = closed_form_c_nominal(m, it, k, group_sizes, list_size);
    CsaveResult out;
    out.exact_percent = 100.0 * static_cast<double>(cn - cm) / static_cast<double>(cn);

    double search = static_cast<double>(it.ible) * static_cast<double>(group_search_sum(k, group_sizes));
    double glo = 0.0;
    for (int g : group_sizes)
        glo += static_cast<double>(list_size) * g *
               static_cast<double>(pow_u64_checked(static_cast<std::uint64_t>(k),
                                                   static_cast<unsigned>(g)));
    glo *= static_cast<double>(it.iglo);
    out.approx_percent = 100.0 * (n - m) * search / (n * search + glo);
    return out;
}

const std::vector<IterationSet>& table1_iteration_sets() {
    static const std::vector<IterationSet> sets = {
        {1, 1, 3}, {2, 1, 1}, {2, 1, 2}, {2, 1, 3}, {2, 2, 1}, {2, 2, 2}, {2, 2, 3},
        {2, 3, 1}, {2, 3, 2}, {2, 3, 3}, {3, 1, 1}, {3, 1, 2}, {3, 2, 1}, {3, 3, 1}};
    return sets;
}

const std::vector<IterationSet>& table2_iteration_sets() {
    static const std::vector<IterationSet> sets = {
        {4, 4, 4}, {4, 4, 5}, {4, 4, 6}, {4, 5, 4}, {4, 5, 5}, {4, 5, 6}, {4, 6, 4}, {4, 6, 5},
        {4, 6, 6}, {5, 4, 4}, {5, 4, 5}, {5, 5, 4}, {5, 5, 5}, {5, 6, 4}, {6, 4, 4}, {6, 5, 4}};
    return sets;
}

ReconcileReport reconcile(const ComplexityLedger& ledger, int ble_count, const IterationSet& it,
                          int k, const std::vector<int>& group_sizes) {
    ReconcileReport rep;
    rep.counted_ble = ledger.ble_squarings;
    rep.predicted_ble =
        checked_mul(2ull,
                    checked_mul(checked_mul(static_cast<std::uint64_t>(it.iglb),
                                            checked_mul(static_cast<std::uint64_t>(ble_count),
                                                        static_cast<std::uint64_t>(it.ible))),
                                group_search_sum(k, group_sizes)));
    rep.counted_glo = ledger.glo_squarings;
    std::uint64_t glo = 0;
    for (const auto& rec : ledger.per_iteration_lv) {
        int gsz = group_sizes.at(static_cast<std::size_t>(rec.group));
        std::uint64_t t = checked_mul(rec.lv, static_cast<std::uint64_t>(gsz));
        t = checked_mul(t, pow_u64_checked(static_cast<std::uint64_t>(k), static_cast<unsigned>(gsz)));
        glo = checked_add(glo, t);
    }
    rep.predicted_glo = checked_mul(2ull, glo);
    rep.r_units = 2ull * ledger.r_total();
    rep.ble_diff = static_cast<std::int64_t>(rep.counted_ble) -
                   static_cast<std::int64_t>(rep.predicted_ble);
    rep.glo_diff = static_cast<std::int64_t>(rep.counted_glo) -
                   static_cast<std::int64_t>(rep.predicted_glo);
    return rep;
}

}  // namespace satrx
