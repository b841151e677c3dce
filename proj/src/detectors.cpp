// SPDX-License-Identifier: Apache-2.0

#include "satrx/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "satrx/rng.hpp"

namespace satrx {

namespace {

constexpr std::uint64_t kGroupSearchCap = 1ull << 20;

// Lexicographic odometer over `digits`, radix k. Returns false on wrap.
bool advance_odometer(IndexVector& digits, std::size_t k) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < k) return true;
        digits[i] = 0;
    }
    return false;
}

std::uint64_t pow_size(std::size_t k, std::size_t e) {
    std::uint64_t r = 1;
    while (e--) r *= k;
    return r;
}

}  // namespace

void GroupPartition::validate(int n_streams) const {
    std::vector<char> seen(static_cast<std::size_t>(n_streams), 0);
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("partition: empty group");
        for (int idx : g) {
            if (idx < 0 || idx >= n_streams)
                throw std::invalid_argument("partition: stream index out of range");
            if (seen[static_cast<std::size_t>(idx)]++)
                throw std::invalid_argument("partition: groups are not disjoint");
        }
        total += g.size();
    }
    if (total != static_cast<std::size_t>(n_streams))
        throw std::invalid_argument("partition: groups do not cover all streams");
}

std::int64_t quantized_score(double score) {
    double q = score * 1e12;
    if (q >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
    return std::llround(q);
}

bool candidate_less(const Candidate& a, const Candidate& b) {
    std::int64_t qa = quantized_score(a.score), qb = quantized_score(b.score);
    if (qa != qb) return qa < qb;
    return a.indices < b.indices;
}

void CandidateList::sort_truncate() {
    std::sort(entries.begin(), entries.end(), candidate_less);
    if (capacity > 0 && entries.size() > capacity) entries.resize(capacity);
}

void CandidateList::dedup() {
    std::vector<Candidate> kept;
    kept.reserve(entries.size());
    for (auto& e : entries) {
        bool dup = false;
        for (const auto& k : kept)
            if (k.indices == e.indices) {
                dup = true;
                break;
            }
        if (!dup) kept.push_back(std::move(e));
    }
    entries = std::move(kept);
}

void LgsdConfig::validate(int n_streams, int n_rows) const {
    if (list_size < 1) throw std::invalid_argument("lgsd: list size must be >= 1");
    if (iterations.iglb < 1 || iterations.ible < 1 || iterations.iglo < 1)
        throw std::invalid_argument("lgsd: iteration counts must be >= 1");
    int total = 0;
    for (int g : group_sizes) {
        if (g < 1) throw std::invalid_argument("lgsd: group sizes must be >= 1");
        if (g > n_rows)
            throw std::invalid_argument("lgsd: group size exceeds detector row count");
        total += g;
    }
    if (total != n_streams)
        throw std::invalid_argument("lgsd: group sizes must sum to the stream count");
}

double full_mse(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y, const Constellation& c,
                std::span<const std::uint8_t> indices) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        cxd resid = y(i);
        for (Eigen::Index j = 0; j < h.cols(); ++j) resid -= h(i, j) * c.points[indices[j]];
        acc += std::norm(resid);
    }
    return acc;
}

std::pair<IndexVector, double> jml_detect(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                          const Constellation& c, std::uint64_t max_evals) {
    const auto n = static_cast<std::size_t>(h.cols());
    const auto rows = static_cast<std::size_t>(h.rows());
    const std::size_t k = c.size();
    std::uint64_t space = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (space > max_evals / k) throw std::runtime_error("jml_detect: search space cap exceeded");
        space *= k;
    }

    IndexVector s(n, 0);
    Eigen::VectorXcd hs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows));
    for (Eigen::Index j = 0; j < h.cols(); ++j) hs += h.col(j) * c.points[0];

    auto score_current = [&] {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rows); ++i)
            acc += std::norm(y(i) - hs(i));
        return acc;
    };

    IndexVector best = s;
    double best_score = score_current();
    // Lexicographic enumeration with incremental channel-product updates;
    // strict improvement keeps the lexicographically smallest minimizer.
    std::int64_t best_q = quantized_score(best_score);
    while (true) {
        bool carried = false;
        for (std::size_t i = n; i-- > 0;) {
            std::uint8_t old = s[i];
            if (++s[i] < k) {
                hs += h.col(static_cast<Eigen::Index>(i)) * (c.points[s[i]] - c.points[old]);
                carried = true;
                break;
            }
            s[i] = 0;
            hs += h.col(static_cast<Eigen::Index>(i)) * (c.points[0] - c.points[old]);
        }
        if (!carried) break;
        double sc = score_current();
        std::int64_t q = quantized_score(sc);
        if (q < best_q) {
            best_q = q;
            best_score = sc;
            best = s;
        }
    }
    return {best, best_score};
}

CandidateList initial_candidates(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                 const Constellation& c, const LgsdConfig& cfg,
                                 std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(h.cols());
    CandidateList list;
    list.capacity = cfg.list_size;
    list.entries.reserve(cfg.list_size);
    for (std::size_t l = 0; l < cfg.list_size; ++l) {
        Candidate cand;
        cand.indices.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            cand.indices[j] = static_cast<std::uint8_t>(bounded(rng, c.size()));
        cand.score = full_mse(h, y, c, cand.indices);
        list.entries.push_back(std::move(cand));
    }
    list.sort_truncate();
    return list;
}

CandidateList exhaustive_candidates(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                    const Constellation& c, std::size_t list_size) {
    const auto n = static_cast<std::size_t>(h.cols());
    if (pow_size(c.size(), n) > kGroupSearchCap)
        throw std::runtime_error("exhaustive_candidates: joint alphabet too large");
    CandidateList list;
    list.capacity = list_size;
    IndexVector s(n, 0);
    do {
        list.entries.push_back({s, full_mse(h, y, c, s)});
    } while (advance_odometer(s, c.size()));
    list.sort_truncate();
    return list;
}

CandidateList ble_run(int m, const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                      const Constellation& c, const IndexVector& best,
                      const GroupPartition& partition, const LgsdConfig& cfg,
                      ComplexityLedger& ledger) {
    const auto n = static_cast<std::size_t>(h.cols());
    if (best.size() != n) throw std::invalid_argument("ble_run: best vector length mismatch");
    partition.validate(static_cast<int>(n));

    const std::size_t k = c.size();
    const cxd ym = y(m);
    std::vector<cxd> hrow(n);
    for (std::size_t j = 0; j < n; ++j) hrow[j] = h(m, static_cast<Eigen::Index>(j));

    struct SubCand {
        double score;
        IndexVector digits;
    };
    auto sub_less = [](const SubCand& a, const SubCand& b) {
        std::int64_t qa = quantized_score(a.score), qb = quantized_score(b.score);
        if (qa != qb) return qa < qb;
        return a.digits < b.digits;
    };

    IndexVector canceller = best;
    CandidateList list;
    list.capacity = cfg.list_size;

    for (int t = 0; t < cfg.iterations.ible; ++t) {
        std::vector<Candidate> pool;
        for (const auto& group : partition.groups) {
            if (pow_size(k, group.size()) > kGroupSearchCap)
                throw std::runtime_error("ble_run: group search space too large");

            // Eq-style cancellation of the other groups on row m.
            cxd base = ym;
            std::vector<char> in_group(n, 0);
            for (int j : group) in_group[static_cast<std::size_t>(j)] = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (!in_group[j]) base -= hrow[j] * c.points[canceller[j]];

            // Scalar-metric search over the group's sub-alphabet, keeping
            // the best L sub-vectors.
            std::vector<SubCand> top;
            top.reserve(cfg.list_size + 1);
            IndexVector digits(group.size(), 0);
            std::uint64_t probes = 0;
            do {
                cxd contrib{0.0, 0.0};
                for (std::size_t d = 0; d < group.size(); ++d)
                    contrib += hrow[static_cast<std::size_t>(group[d])] * c.points[digits[d]];
                double e = std::norm(base - contrib);
                ++probes;
                SubCand sc{e, digits};
                if (top.size() < cfg.list_size || sub_less(sc, top.back())) {
                    auto pos = std::upper_bound(top.begin(), top.end(), sc, sub_less);
                    top.insert(pos, std::move(sc));
                    if (top.size() > cfg.list_size) top.pop_back();
                }
            } while (advance_odometer(digits, k));
            ledger.ble_squarings += 2 * probes;

            // Embed each retained sub-vector into the canceller vector.
            for (const auto& sc : top) {
                Candidate cand;
                cand.indices = canceller;
                for (std::size_t d = 0; d < group.size(); ++d)
                    cand.indices[static_cast<std::size_t>(group[d])] = sc.digits[d];
                pool.push_back(std::move(cand));
            }
        }

        // Branch sort on the row-m metric (not ledgered; the complexity
        // model carries no matching term).
        for (auto& cand : pool) {
            cxd resid = ym;
            for (std::size_t j = 0; j < n; ++j) resid -= hrow[j] * c.points[cand.indices[j]];
            cand.score = std::norm(resid);
        }
        list.entries = std::move(pool);
        list.sort_truncate();
        canceller = list.head().indices;
    }
    return list;
}

CandidateList glo_run(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                      const Constellation& c, const std::vector<CandidateList>& branch_lists,
                      const GroupPartition& partition, const LgsdConfig& cfg,
                      ComplexityLedger& ledger, int global_round) {
    if (branch_lists.empty()) throw std::invalid_argument("glo_run: no branch lists");
    const auto n = static_cast<std::size_t>(h.cols());
    const auto rows = static_cast<std::size_t>(h.rows());
    const std::size_t k = c.size();

    // (a) Major list: concatenate, dedup, rescore by full MSE.
    CandidateList major;
    major.capacity = 0;
    for (const auto& bl : branch_lists)
        for (const auto& e : bl.entries) major.entries.push_back(e);
    std::sort(major.entries.begin(), major.entries.end(),
              [](const Candidate& a, const Candidate& b) { return a.indices < b.indices; });
    major.entries.erase(std::unique(major.entries.begin(), major.entries.end(),
                                    [](const Candidate& a, const Candidate& b) {
                                        return a.indices == b.indices;
                                    }),
                        major.entries.end());
    ledger.sort_unique_r.push_back(major.entries.size());
    for (auto& e : major.entries) e.score = full_mse(h, y, c, e.indices);
    major.capacity = cfg.list_size;
    major.sort_truncate();
    CandidateList list = std::move(major);  // S_in

    // Strongest rows per group: largest aggregate column energy, once per H.
    std::vector<std::vector<Eigen::Index>> group_rows(partition.groups.size());
    for (std::size_t v = 0; v < partition.groups.size(); ++v) {
        const auto& group = partition.groups[v];
        std::vector<std::pair<double, Eigen::Index>> energy;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rows); ++i) {
            double e = 0.0;
            for (int j : group) e += std::norm(h(i, j));
            energy.emplace_back(e, i);
        }
        std::stable_sort(energy.begin(), energy.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        auto take = std::min(group.size(), rows);
        std::vector<Eigen::Index> sel;
        for (std::size_t i = 0; i < take; ++i) sel.push_back(energy[i].second);
        std::sort(sel.begin(), sel.end());
        group_rows[v] = std::move(sel);
    }

    for (int t = 0; t < cfg.iterations.iglo; ++t) {
        std::vector<Candidate> fresh;
        for (std::size_t v = 0; v < partition.groups.size(); ++v) {
            const auto& group = partition.groups[v];
            const auto& sel = group_rows[v];
            if (pow_size(k, group.size()) > kGroupSearchCap)
                throw std::runtime_error("glo_run: group search space too large");

            // Dedup the group-v sub-vectors across the list; the context of
            // each unique sub-vector is its best-ranked host.
            std::vector<std::pair<IndexVector, const Candidate*>> contexts;
            for (const auto& e : list.entries) {
                IndexVector key(group.size());
                for (std::size_t d = 0; d < group.size(); ++d)
                    key[d] = e.indices[static_cast<std::size_t>(group[d])];
                bool seen = false;
                for (const auto& [kk, ctx] : contexts)
                    if (kk == key) {
                        seen = true;
                        break;
                    }
                if (!seen) contexts.emplace_back(std::move(key), &e);
            }
            ledger.per_iteration_lv.push_back(
                {global_round, t, static_cast<int>(v), contexts.size()});

            // Per-symbol contribution tables for the selected rows.
            std::vector<cxd> table(group.size() * k * sel.size());
            for (std::size_t d = 0; d < group.size(); ++d)
                for (std::size_t sym = 0; sym < k; ++sym)
                    for (std::size_t ri = 0; ri < sel.size(); ++ri)
                        table[(d * k + sym) * sel.size() + ri] =
                            h(sel[ri], group[d]) * c.points[sym];

            for (const auto& [key, ctx] : contexts) {
                // Residual of the context on the selected rows, group-v
                // contribution excluded.
                std::vector<cxd> base(sel.size());
                std::vector<char> in_group(n, 0);
                for (int j : group) in_group[static_cast<std::size_t>(j)] = 1;
                for (std::size_t ri = 0; ri < sel.size(); ++ri) {
                    cxd acc = y(sel[ri]);
                    for (std::size_t j = 0; j < n; ++j)
                        if (!in_group[j])
                            acc -= h(sel[ri], static_cast<Eigen::Index>(j)) *
                                   c.points[ctx->indices[j]];
                    base[ri] = acc;
                }

                // Exhaustive re-optimization of the group with incremental
                // contribution updates along the odometer.
                IndexVector digits(group.size(), 0);
                std::vector<cxd> contrib(sel.size(), cxd{0.0, 0.0});
                for (std::size_t d = 0; d < group.size(); ++d)
                    for (std::size_t ri = 0; ri < sel.size(); ++ri)
                        contrib[ri] += table[(d * k + 0) * sel.size() + ri];

                IndexVector best_digits = digits;
                double best_score = 0.0;
                for (std::size_t ri = 0; ri < sel.size(); ++ri)
                    best_score += std::norm(base[ri] - contrib[ri]);
                std::int64_t best_q = quantized_score(best_score);
                std::uint64_t probes = 1;
                while (true) {
                    bool carried = false;
                    for (std::size_t d = digits.size(); d-- > 0;) {
                        std::uint8_t old = digits[d];
                        std::uint8_t next = static_cast<std::uint8_t>(old + 1 < k ? old + 1 : 0);
                        for (std::size_t ri = 0; ri < sel.size(); ++ri)
                            contrib[ri] += table[(d * k + next) * sel.size() + ri] -
                                           table[(d * k + old) * sel.size() + ri];
                        digits[d] = next;
                        if (next != 0) {
                            carried = true;
                            break;
                        }
                    }
                    if (!carried) break;
                    double sc = 0.0;
                    for (std::size_t ri = 0; ri < sel.size(); ++ri)
                        sc += std::norm(base[ri] - contrib[ri]);
                    ++probes;
                    std::int64_t q = quantized_score(sc);
                    if (q < best_q || (q == best_q && digits < best_digits)) {
                        best_q = q;
                        best_score = sc;
                        best_digits = digits;
                    }
                }
                // The metric spans |group| rows: 2*|group| squarings each.
                ledger.glo_squarings += probes * 2 * group.size();

                Candidate cand;
                cand.indices = ctx->indices;
                for (std::size_t d = 0; d < group.size(); ++d)
                    cand.indices[static_cast<std::size_t>(group[d])] = best_digits[d];
                cand.score = full_mse(h, y, c, cand.indices);
                fresh.push_back(std::move(cand));
            }
        }

        // (c) Union with the current list, rescore, truncate.
        for (auto& cand : fresh) list.entries.push_back(std::move(cand));
        list.dedup();
        list.sort_truncate();
    }
    return list;
}

GroupPartitioner::GroupPartitioner(const Eigen::MatrixXcd& h, std::vector<int> sizes)
    : sizes_(std::move(sizes)) {
    int total = 0;
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("partitioner: group sizes must be >= 1");
        total += s;
    }
    if (total != h.cols())
        throw std::invalid_argument("partitioner: group sizes must sum to the stream count");
    column_norms_.resize(static_cast<std::size_t>(h.cols()));
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        column_norms_[static_cast<std::size_t>(j)] = h.col(j).norm();
}

GroupPartition GroupPartitioner::initial() const {
    const int n = static_cast<int>(column_norms_.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return column_norms_[static_cast<std::size_t>(a)] >
               column_norms_[static_cast<std::size_t>(b)];
    });
    GroupPartition p;
    std::size_t at = 0;
    for (int s : sizes_) {
        std::vector<int> g(order.begin() + static_cast<std::ptrdiff_t>(at),
                           order.begin() + static_cast<std::ptrdiff_t>(at + s));
        std::sort(g.begin(), g.end());
        p.groups.push_back(std::move(g));
        at += static_cast<std::size_t>(s);
    }
    return p;
}

GroupPartition GroupPartitioner::shuffled(std::mt19937_64& rng) const {
    const int n = static_cast<int>(column_norms_.size());
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(bounded(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    GroupPartition p;
    std::size_t at = 0;
    for (int s : sizes_) {
        std::vector<int> g(perm.begin() + static_cast<std::ptrdiff_t>(at),
                           perm.begin() + static_cast<std::ptrdiff_t>(at + s));
        std::sort(g.begin(), g.end());
        p.groups.push_back(std::move(g));
        at += static_cast<std::size_t>(s);
    }
    return p;
}

DetectionResult rc_lgsd_detect(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                               const Constellation& c, const LgsdConfig& cfg) {
    const int n = static_cast<int>(h.cols());
    const int rows = static_cast<int>(h.rows());
    cfg.validate(n, rows);

    std::mt19937_64 rng(cfg.rng_seed);
    GroupPartitioner partitioner(h, cfg.group_sizes);

    // Partition draws precede symbol draws in the seed stream.
    std::vector<GroupPartition> partitions;
    partitions.push_back(partitioner.initial());
    for (int g = 1; g < cfg.iterations.iglb; ++g)
        partitions.push_back(cfg.reshuffle ? partitioner.shuffled(rng) : partitions.front());

    CandidateList list = initial_candidates(h, y, c, cfg, rng);

    DetectionResult out;
    for (int g = 0; g < cfg.iterations.iglb; ++g) {
        const auto& part = partitions[static_cast<std::size_t>(g)];
        const IndexVector& best = list.head().indices;

        std::vector<CandidateList> branches;
        branches.reserve(static_cast<std::size_t>(rows));
        for (int m = 0; m < rows; ++m)
            branches.push_back(ble_run(m, h, y, c, best, part, cfg, out.ledger));

        CandidateList refined = glo_run(h, y, c, branches, part, cfg, out.ledger, g);

        // The fed-back list keeps the incumbents: union-rescore-truncate of
        // the GLO output with the previous list.
        for (auto& e : list.entries) refined.entries.push_back(std::move(e));
        refined.dedup();
        refined.sort_truncate();
        list = std::move(refined);
    }

    out.s_hat = list.head().indices;
    out.mse = list.head().score;
    out.list = std::move(list);
    return out;
}

}  // namespace satrx
