// SPDX-License-Identifier: Apache-2.0
//
// Multi-user detection over the preprocessed model y = H s + z: exhaustive
// joint ML and the iterative list-based group-wise search detector (branch
// list estimators + global list optimizer) with complexity metering.

#ifndef SATRX_DETECTORS_HPP
#define SATRX_DETECTORS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "satrx/complexity.hpp"
#include "satrx/constellation.hpp"

namespace satrx {

using IndexVector = std::vector<std::uint8_t>;  // one symbol index per stream

// Disjoint cover of the stream indices {0..N-1}.
struct GroupPartition {
    std::vector<std::vector<int>> groups;
    void validate(int n_streams) const;  // throws std::invalid_argument
    int group_count() const { return static_cast<int>(groups.size()); }
};

struct Candidate {
    IndexVector indices;
    double score = 0.0;
};

// Scores compared at 1e-12 granularity, ties broken lexicographically on
// the symbol indices. This is the one ordering used by every list stage.
bool candidate_less(const Candidate& a, const Candidate& b);
std::int64_t quantized_score(double score);

struct CandidateList {
    std::vector<Candidate> entries;  // sorted ascending by candidate_less
    std::size_t capacity = 0;

    const Candidate& head() const { return entries.front(); }
    void sort_truncate();
    // Drops exact duplicate index vectors, keeping the best-ranked one.
    void dedup();
};

enum class BleCount { TruncatedM, FullN };

struct LgsdConfig {
    std::size_t list_size = 8;  // L
    IterationSet iterations;    // I_GLB / I_BLE / I_GLO
    std::vector<int> group_sizes = {3, 2};
    bool reshuffle = true;      // redraw group membership after round 1
    std::uint64_t rng_seed = 0;
    BleCount ble_count = BleCount::TruncatedM;

    // n_rows is the detector-facing row count (M truncated, N full). Group
    // sizes may not exceed it: the GLO refinement metric spans |gamma_v|
    // rows, which is also the dimension the complexity model assigns it.
    void validate(int n_streams, int n_rows) const;
};

// Full-model mean-squared error ||y - H s||^2.
double full_mse(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y, const Constellation& c,
                std::span<const std::uint8_t> indices);

// Exhaustive minimizer over all K^N index vectors, lexicographic
// tie-breaking. Throws when K^N exceeds max_evals.
std::pair<IndexVector, double> jml_detect(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                          const Constellation& c,
                                          std::uint64_t max_evals = 10'000'000);

// L index vectors drawn uniformly from the joint alphabet, scored by full
// MSE and sorted.
CandidateList initial_candidates(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                 const Constellation& c, const LgsdConfig& cfg,
                                 std::mt19937_64& rng);

// Test hook: the fully enumerated, sorted joint alphabet truncated to L.
CandidateList exhaustive_candidates(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                                    const Constellation& c, std::size_t list_size);

// One branch list estimator: group-wise interference cancellation against
// `best` on row m, scalar-metric group search (2 squarings per probe,
// ledgered), embedding into `best`, and the row-m sort, iterated I_BLE
// times with the list head fed back as the canceller.
CandidateList ble_run(int m, const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                      const Constellation& c, const IndexVector& best,
                      const GroupPartition& partition, const LgsdConfig& cfg,
                      ComplexityLedger& ledger);

// Global list optimizer: merges the branch lists (recording the unique
// count R), then runs I_GLO rounds of per-group dedup + context-anchored
// exhaustive re-optimization over the strongest |gamma_v| rows (2*|gamma_v|
// squarings per completion, ledgered) followed by union-rescore-truncate.
CandidateList glo_run(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                      const Constellation& c, const std::vector<CandidateList>& branch_lists,
                      const GroupPartition& partition, const LgsdConfig& cfg,
                      ComplexityLedger& ledger, int global_round);

struct DetectionResult {
    IndexVector s_hat;
    double mse = 0.0;
    CandidateList list;
    ComplexityLedger ledger;
};

// Full detector: I_GLB rounds of {all BLEs -> GLO}, carrying the list
// between rounds so the head MSE never increases. Deterministic for a
// fixed rng_seed; the partition reshuffle draws precede the symbol draws
// in the seed stream.
DetectionResult rc_lgsd_detect(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& y,
                               const Constellation& c, const LgsdConfig& cfg);

// Produces the group partitions for a detection run: the initial call
// groups the strongest streams (largest column norms of H) together, later
// calls shuffle membership uniformly while preserving the group sizes.
class GroupPartitioner {
public:
    GroupPartitioner(const Eigen::MatrixXcd& h, std::vector<int> sizes);
    GroupPartition initial() const;
    GroupPartition shuffled(std::mt19937_64& rng) const;

private:
    std::vector<double> column_norms_;
    std::vector<int> sizes_;
};

}  // namespace satrx

#endif
